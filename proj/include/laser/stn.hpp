#ifndef LASER_STN_HPP
#define LASER_STN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "laser/types.hpp"

namespace laser {

// Difference-constraint network solved for earliest times.
//
// Variables are timestamps; every constraint has the form x >= y + c
// (including upper bounds U on x - y, added as y >= x - U). Earliest times
// are longest-path distances from an implicit origin at t = 0. The network
// is inconsistent iff the constraint graph has a positive cycle.
class Stn {
 public:
  explicit Stn(int num_vars) : num_vars_(num_vars) {}

  // x >= y + c; pass y = -1 for the origin (x >= c).
  void add_ge(int x, int y, Seconds c) { edges_.push_back({x, y, c}); }

  // x - y <= c  (y >= x - c)
  void add_le_diff(int x, int y, Seconds c) { edges_.push_back({y, x, -c}); }

  // x <= c against the origin.
  void add_ub(int x, Seconds c) { ubs_.push_back({x, c}); }

  int num_vars() const { return num_vars_; }

  // Returns earliest times, or nullopt when inconsistent.
  std::optional<std::vector<Seconds>> earliest() const;

 private:
  struct Edge {
    int to;    // x
    int from;  // y, -1 = origin
    Seconds weight;
  };
  int num_vars_;
  std::vector<Edge> edges_;
  std::vector<std::pair<int, Seconds>> ubs_;
};

}  // namespace laser

#endif  // LASER_STN_HPP
