#ifndef LASER_TYPES_HPP
#define LASER_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace laser {

// All scheduling arithmetic runs on integer seconds.
using Seconds = std::int64_t;

constexpr Seconds kInfinity = std::numeric_limits<Seconds>::max() / 4;

// Pseudo task id for absolute temporal constraints anchored at t = 0.
constexpr int kOrigin = -1;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class TaskKind { Glue, Pick, Place, Screw, BatchedGlue, Transition };

enum class PriorityClass { None, Priority, Reinforcement };

enum class Anchor { Start, End };

struct TaskPrimitive {
  int id = 0;                  // dense internal id, 0..n-1
  std::string external_id;     // id as written in the instance file
  TaskKind kind = TaskKind::Screw;
  int element = -1;            // -1 = none (top-session screws)
  std::vector<Point> coords;   // 1 point, or 2 for glue lines
  std::map<int, Seconds> durations;  // actor id -> d_k^i, absent = incapable
  std::vector<int> footprint;  // occupied voxel cell indices
  PriorityClass priority = PriorityClass::None;
  std::vector<int> members;    // BatchedGlue: ordered member glue ids
  std::string tool;            // effector needed; defaults from kind

  const Point& entry() const { return coords.front(); }
  const Point& exit() const { return coords.back(); }
  bool capable(int actor) const { return durations.count(actor) != 0; }
};

struct Actor {
  int id = 0;                  // dense internal id
  std::string external_id;     // id as written in the instance file
  std::string name;
  std::map<std::pair<std::string, std::string>, Seconds> tool_switch_times;
  double travel_speed = 1.0;  // m/s
  std::map<TaskKind, Seconds> prep_times;

  // Lookup falls back to the reversed pair, then 0.
  Seconds tool_switch(const std::string& a, const std::string& b) const {
    auto it = tool_switch_times.find({a, b});
    if (it != tool_switch_times.end()) return it->second;
    it = tool_switch_times.find({b, a});
    if (it != tool_switch_times.end()) return it->second;
    return 0;
  }

  Seconds prep(TaskKind k) const {
    auto it = prep_times.find(k);
    return it == prep_times.end() ? 0 : it->second;
  }
};

// L <= t_{eta_v}^v - t_{eta_u}^u <= U. Precedence is L=0, U=infinity.
struct TemporalConstraint {
  int u = kOrigin;
  int v = kOrigin;
  Anchor eta_u = Anchor::End;
  Anchor eta_v = Anchor::Start;
  Seconds lower = 0;
  Seconds upper = kInfinity;  // kInfinity = unbounded

  bool bounded_above() const { return upper < kInfinity; }
};

class ConflictMatrices {
 public:
  // R^{ij}_{ab}: task i on actor a conflicts with task j on actor b.
  bool node(int i, int j, int a, int b) const {
    return node_set_.count(node_key(i, j, a, b)) != 0;
  }
  // R^{(ij)}_edge, ordered pair.
  bool edge(int i, int j) const {
    return edge_set_.count(edge_key(i, j)) != 0;
  }

  void set_node(int i, int j, int a, int b) {
    node_set_.insert(node_key(i, j, a, b));
  }
  void set_edge(int i, int j) { edge_set_.insert(edge_key(i, j)); }

  std::size_t node_count() const { return node_set_.size(); }
  std::size_t edge_count() const { return edge_set_.size(); }

  const std::unordered_set<std::uint64_t>& node_entries() const {
    return node_set_;
  }
  const std::unordered_set<std::uint64_t>& edge_entries() const {
    return edge_set_;
  }

  static std::uint64_t node_key(int i, int j, int a, int b) {
    // canonical under simultaneous (i,a) <-> (j,b) swap
    if (i > j || (i == j && a > b)) {
      std::swap(i, j);
      std::swap(a, b);
    }
    return (std::uint64_t(i) << 40) | (std::uint64_t(j) << 16) |
           (std::uint64_t(a) << 8) | std::uint64_t(b);
  }
  static std::uint64_t edge_key(int i, int j) {
    return (std::uint64_t(i) << 24) | std::uint64_t(j);
  }
  static void unpack_node(std::uint64_t k, int& i, int& j, int& a, int& b) {
    i = int(k >> 40);
    j = int((k >> 16) & 0xFFFFFF);
    a = int((k >> 8) & 0xFF);
    b = int(k & 0xFF);
  }
  static void unpack_edge(std::uint64_t k, int& i, int& j) {
    i = int(k >> 24);
    j = int(k & 0xFFFFFF);
  }

 private:
  std::unordered_set<std::uint64_t> node_set_;
  std::unordered_set<std::uint64_t> edge_set_;
};

// Optional grid metadata carried by an instance so footprint cell indices
// stay interpretable across save/load.
struct GridInfo {
  Point origin;
  double cell_size = 0.1;
  int nx = 0;
  int ny = 0;
};

struct ProblemInstance {
  std::vector<TaskPrimitive> tasks;
  std::vector<Actor> actors;
  std::vector<TemporalConstraint> temporal;
  ConflictMatrices conflicts;
  std::optional<GridInfo> grid;
  Seconds adhesive_open_s = 900;
  Seconds adhesive_close_s = 7200;
  double safety_buffer_fraction = 0.0;

  // rho_k^{ij}, keyed by (actor, from-task, to-task)
  std::unordered_map<std::uint64_t, Seconds> transitions;

  static std::uint64_t transition_key(int k, int i, int j) {
    return (std::uint64_t(k) << 48) | (std::uint64_t(i) << 24) |
           std::uint64_t(j);
  }
  Seconds transition(int k, int i, int j) const {
    auto it = transitions.find(transition_key(k, i, j));
    return it == transitions.end() ? 0 : it->second;
  }
  void set_transition(int k, int i, int j, Seconds s) {
    transitions[transition_key(k, i, j)] = s;
  }

  int task_count() const { return int(tasks.size()); }
  int actor_count() const { return int(actors.size()); }
};

struct Schedule {
  std::vector<int> assignment;               // task -> actor
  std::vector<std::vector<int>> sequences;   // actor -> ordered task ids
  std::vector<int> level;                    // task -> level index
  std::vector<Seconds> start;
  std::vector<Seconds> end;
  std::vector<Seconds> barriers;             // indexed by level
  Seconds makespan = 0;
  int max_level = 0;
};

// Errors ------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct CapabilityError : Error { using Error::Error; };
struct SpecError : Error { using Error::Error; };
struct GridError : Error { using Error::Error; };
struct ReferenceError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct IterationLimitError : Error { using Error::Error; };
struct InsertionError : Error { using Error::Error; };

// Helpers -----------------------------------------------------------------

std::string to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);
std::string default_tool(TaskKind k);

// Decimal seconds -> integer seconds, round half up.
inline Seconds round_seconds(double s) {
  return Seconds(std::floor(s + 0.5));
}

// Safety-buffered upper bound: U' = L + (U - L) * (1 - buffer).
inline Seconds buffered_upper(Seconds lower, Seconds upper, double buffer) {
  if (upper >= kInfinity || buffer <= 0.0) return upper;
  return lower + Seconds(std::llround(double(upper - lower) * (1.0 - buffer)));
}

}  // namespace laser

#endif  // LASER_TYPES_HPP
