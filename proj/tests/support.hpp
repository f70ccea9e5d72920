#ifndef TESTS_SUPPORT_HPP
#define TESTS_SUPPORT_HPP

// Shared fixtures and independent oracles for the test binaries. The
// oracles deliberately reimplement the checked logic from scratch
// (plain loops, no shared helpers) so a bug in the library cannot hide
// in its own verification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "laser/collision.hpp"
#include "laser/instance_io.hpp"
#include "laser/sim.hpp"
#include "laser/types.hpp"

namespace support {

// Builders -----------------------------------------------------------------

inline laser::Actor make_actor(int id, double speed = 1.0) {
  laser::Actor a;
  a.id = id;
  a.external_id = "r" + std::to_string(id + 1);
  a.travel_speed = speed;
  return a;
}

inline laser::TaskPrimitive make_task(int id, laser::TaskKind kind,
                                      laser::Point p,
                                      std::map<int, laser::Seconds> durations) {
  laser::TaskPrimitive t;
  t.id = id;
  t.external_id = "t" + std::to_string(id);
  t.kind = kind;
  t.coords = {p};
  t.durations = std::move(durations);
  t.tool = laser::default_tool(kind);
  return t;
}

// Fills transitions and checks invariants; footprints stay empty unless
// the test sets them.
inline void finalize(laser::ProblemInstance& inst) {
  laser::compute_transitions(inst);
  laser::validate_instance(inst);
}

// Random small instances for the solver-vs-enumeration comparisons.
inline laser::ProblemInstance random_tiny_instance(std::mt19937_64& rng,
                                                   int n, int m) {
  laser::ProblemInstance inst;
  std::uniform_real_distribution<double> coord(0.0, 3.0);
  std::uniform_int_distribution<int> dur(3, 12);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  for (int k = 0; k < m; ++k) inst.actors.push_back(make_actor(k));
  for (int i = 0; i < n; ++i) {
    std::map<int, laser::Seconds> d;
    for (int k = 0; k < m; ++k)
      if (u01(rng) < 0.8) d[k] = dur(rng);
    if (d.empty()) d[int(rng() % m)] = dur(rng);
    inst.tasks.push_back(make_task(i, laser::TaskKind::Screw,
                                   {coord(rng), coord(rng)}, std::move(d)));
  }
  for (int i = 0; i + 1 < n; ++i)
    if (u01(rng) < 0.4) {
      int j = i + 1 + int(rng() % (n - i - 1));
      inst.temporal.push_back({i, j, laser::Anchor::End, laser::Anchor::Start,
                               0, laser::kInfinity});
    }
  if (n >= 2 && u01(rng) < 0.5) {
    int i = int(rng() % (n - 1));
    int j = i + 1 + int(rng() % (n - i - 1));
    inst.temporal.push_back({i, j, laser::Anchor::End, laser::Anchor::Start,
                             0, laser::Seconds(20 + rng() % 41)});
  }
  if (u01(rng) < 0.3)
    inst.temporal.push_back({laser::kOrigin, int(rng() % n),
                             laser::Anchor::End, laser::Anchor::End, 0,
                             laser::Seconds(40 + rng() % 41)});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (u01(rng) < 0.25)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b)
            if (a != b) inst.conflicts.set_node(i, j, a, b);
      if (u01(rng) < 0.15) {
        inst.conflicts.set_edge(i, j);
        inst.conflicts.set_edge(j, i);
      }
    }
  finalize(inst);
  return inst;
}

// Exhaustive scheduling oracle ----------------------------------------------
//
// Enumerates every assignment, every level map and every level-compatible
// pair of actor sequences, evaluates earliest times by plain Bellman-Ford
// over the difference constraints, and returns the minimum of
// makespan + lambda * max_level. nullopt = no feasible schedule.

struct BruteResult {
  double objective = 0.0;
  laser::Seconds makespan = 0;
  int max_level = 0;
};

inline std::optional<BruteResult> brute_force_optimum(
    const laser::ProblemInstance& inst, double lambda) {
  const int n = inst.task_count();
  const int m = inst.actor_count();
  const laser::Seconds big = laser::kInfinity / 4;

  // earliest times for one fully decided candidate, or nullopt
  auto evaluate = [&](const std::vector<int>& actor,
                      const std::vector<int>& level,
                      const std::vector<std::vector<int>>& seqs)
      -> std::optional<BruteResult> {
    struct E {
      int from, to;
      laser::Seconds w;
    };
    std::vector<E> edges;
    auto var = [&](int task, laser::Anchor a) {
      return 2 * task + (a == laser::Anchor::End ? 1 : 0);
    };
    for (int i = 0; i < n; ++i)
      edges.push_back({2 * i, 2 * i + 1, inst.tasks[i].durations.at(actor[i])});
    for (const auto& s : seqs)
      for (std::size_t p = 0; p + 1 < s.size(); ++p)
        edges.push_back({2 * s[p] + 1, 2 * s[p + 1],
                         inst.transition(actor[s[p]], s[p], s[p + 1])});
    std::vector<std::pair<int, laser::Seconds>> caps;
    for (const auto& c : inst.temporal) {
      if (c.u == laser::kOrigin) {
        if (c.lower > 0) edges.push_back({-1, var(c.v, c.eta_v), c.lower});
        if (c.upper < laser::kInfinity)
          caps.push_back({var(c.v, c.eta_v), c.upper});
        continue;
      }
      edges.push_back({var(c.u, c.eta_u), var(c.v, c.eta_v), c.lower});
      if (c.upper < laser::kInfinity)
        edges.push_back({var(c.v, c.eta_v), var(c.u, c.eta_u), -c.upper});
    }
    // barrier structure: anything on a lower level finishes first
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (level[i] < level[j]) edges.push_back({2 * i + 1, 2 * j, 0});

    std::vector<laser::Seconds> t(2 * n, 0);
    bool changed = true;
    for (int round = 0; round <= 2 * n && changed; ++round) {
      changed = false;
      for (const auto& e : edges) {
        laser::Seconds base = e.from < 0 ? 0 : t[e.from];
        if (base + e.w > t[e.to]) {
          t[e.to] = base + e.w;
          if (t[e.to] > big) return std::nullopt;
          changed = true;
        }
      }
    }
    if (changed) return std::nullopt;  // positive cycle
    for (const auto& [v, cap] : caps)
      if (t[v] > cap) return std::nullopt;
    BruteResult r;
    for (int i = 0; i < n; ++i) r.makespan = std::max(r.makespan, t[2 * i + 1]);
    r.max_level = *std::max_element(level.begin(), level.end());
    r.objective = double(r.makespan) + lambda * r.max_level;
    return r;
  };

  std::optional<BruteResult> best;
  auto consider = [&](const std::optional<BruteResult>& r) {
    if (r && (!best || r->objective < best->objective)) best = r;
  };

  std::vector<int> actor(n, -1), level(n, 0);

  // sequences per actor: tasks ordered by level; same-level blocks permute
  std::function<void(int, std::vector<std::vector<int>>&)> seq_rec =
      [&](int k, std::vector<std::vector<int>>& seqs) {
        if (k == m) {
          // edge conflicts between same-level neighbours are forbidden
          for (const auto& s : seqs)
            for (std::size_t p = 0; p + 1 < s.size(); ++p)
              if (level[s[p]] == level[s[p + 1]] &&
                  inst.conflicts.edge(s[p], s[p + 1]))
                return;
          consider(evaluate(actor, level, seqs));
          return;
        }
        std::vector<int> mine;
        for (int i = 0; i < n; ++i)
          if (actor[i] == k) mine.push_back(i);
        std::sort(mine.begin(), mine.end(), [&](int a, int b) {
          if (level[a] != level[b]) return level[a] < level[b];
          return a < b;
        });
        // permute within each same-level block
        std::vector<std::pair<int, int>> blocks;
        for (std::size_t p = 0; p < mine.size();) {
          std::size_t q = p;
          while (q < mine.size() && level[mine[q]] == level[mine[p]]) ++q;
          blocks.push_back({int(p), int(q)});
          p = q;
        }
        std::function<void(std::size_t)> perm_rec = [&](std::size_t b) {
          if (b == blocks.size()) {
            seqs[k] = mine;
            seq_rec(k + 1, seqs);
            return;
          }
          auto [lo, hi] = blocks[b];
          std::sort(mine.begin() + lo, mine.begin() + hi);
          do {
            perm_rec(b + 1);
          } while (std::next_permutation(mine.begin() + lo, mine.begin() + hi));
        };
        perm_rec(0);
      };

  std::function<void(int)> level_rec = [&](int i) {
    if (i == n) {
      // levels must be dense 0..L
      int top = *std::max_element(level.begin(), level.end());
      for (int l = 0; l < top; ++l)
        if (std::find(level.begin(), level.end(), l) == level.end()) return;
      // node conflicts forbid shared levels
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (level[a] == level[b] &&
              inst.conflicts.node(a, b, actor[a], actor[b]))
            return;
      std::vector<std::vector<int>> seqs(m);
      seq_rec(0, seqs);
      return;
    }
    for (int l = 0; l < n; ++l) {
      level[i] = l;
      level_rec(i + 1);
    }
  };

  std::function<void(int)> assign_rec = [&](int i) {
    if (i == n) {
      level_rec(0);
      return;
    }
    for (int k = 0; k < m; ++k)
      if (inst.tasks[i].capable(k)) {
        actor[i] = k;
        assign_rec(i + 1);
      }
    actor[i] = -1;
  };
  assign_rec(0);
  return best;
}

// Geometry oracles -----------------------------------------------------------

// Cells touched by segment a-b, by dense sampling. Misses only cells the
// segment touches in a corner point, so it is a subset of a supercover.
inline std::vector<int> sampled_segment_cells(const laser::VoxelGrid& grid,
                                              laser::Point a, laser::Point b,
                                              int steps = 20000) {
  std::vector<int> cells;
  for (int s = 0; s <= steps; ++s) {
    double f = double(s) / steps;
    laser::Point p{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
    int c = grid.cell_of(p);
    if (c >= 0) cells.push_back(c);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

// Minimum distance from segment a-b to an axis-aligned cell rectangle.
inline double segment_cell_distance(const laser::VoxelGrid& grid, int cell,
                                    laser::Point a, laser::Point b) {
  double x0 = grid.origin.x + grid.cx_of(cell) * grid.cell_size;
  double y0 = grid.origin.y + grid.cy_of(cell) * grid.cell_size;
  double x1 = x0 + grid.cell_size, y1 = y0 + grid.cell_size;
  double best = 1e18;
  for (int s = 0; s <= 4000; ++s) {
    double f = double(s) / 4000;
    double px = a.x + f * (b.x - a.x), py = a.y + f * (b.y - a.y);
    double dx = std::max({x0 - px, 0.0, px - x1});
    double dy = std::max({y0 - py, 0.0, py - y1});
    best = std::min(best, std::hypot(dx, dy));
  }
  return best;
}

// Simulation checks ----------------------------------------------------------

// True when no task of a later level starts before every earlier-level
// completion seen in the trace.
inline bool barrier_safe(const std::vector<laser::SimTaskEvent>& events) {
  for (const auto& a : events)
    for (const auto& b : events)
      if (a.level < b.level && b.start < a.end - 1e-9) return false;
  return true;
}

}  // namespace support

#endif  // TESTS_SUPPORT_HPP
