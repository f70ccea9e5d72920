#include "laser/top.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "laser/solver.hpp"

namespace laser {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<TemporalConstraint> buffered_set(const ProblemInstance& inst) {
  auto out = inst.temporal;
  for (auto& c : out)
    c.upper = buffered_upper(c.lower, c.upper, inst.safety_buffer_fraction);
  return out;
}

// Per-actor counts for `total` tasks minimizing the load spread, using a
// representative per-actor task duration. Exhaustive for few actors,
// greedy otherwise.
struct Counts {
  std::vector<int> c;
  Seconds g = 0;
};

std::optional<Counts> balance_counts(const std::vector<Seconds>& w,
                                     int total, Seconds delta) {
  const int m = int(w.size());
  if (m == 0 || total <= 0) return std::nullopt;
  std::vector<int> c(m, 0);
  Counts best;
  Seconds best_g = kInfinity;
  auto eval = [&]() {
    Seconds lo = kInfinity, hi = 0;
    for (int i = 0; i < m; ++i) {
      Seconds load = w[i] * c[i];
      lo = std::min(lo, load);
      hi = std::max(hi, load);
    }
    Seconds g = hi - lo;
    if (g < best_g) {
      best_g = g;
      best = {c, g};
    }
  };
  if (m <= 3) {
    std::function<void(int, int)> rec = [&](int k, int left) {
      if (k == m - 1) {
        c[k] = left;
        eval();
        return;
      }
      for (int x = 0; x <= left; ++x) {
        c[k] = x;
        rec(k + 1, left - x);
      }
    };
    rec(0, total);
  } else {
    std::vector<Seconds> load(m, 0);
    for (int t = 0; t < total; ++t) {
      int pick = 0;
      for (int i = 1; i < m; ++i)
        if (load[i] + w[i] < load[pick] + w[pick]) pick = i;
      load[pick] += w[pick];
      ++c[pick];
    }
    eval();
  }
  if (best_g > delta) return std::nullopt;
  return best;
}

double dist_of(const ProblemInstance& inst, int i, int j) {
  return distance(inst.tasks[i].entry(), inst.tasks[j].entry());
}

}  // namespace

PartitionResult set_partition(const ProblemInstance& inst,
                              const std::vector<int>& screws, int num_levels,
                              Seconds delta, double delta_dist,
                              double time_budget_s) {
  auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(time_budget_s));
  PartitionResult res;
  const int m = inst.actor_count();
  const int total = int(screws.size());
  if (total < 2 || num_levels < 1) {
    res.unassigned = screws;
    return res;
  }

  // actors that can handle the whole homogeneous set
  std::vector<int> capable;
  for (int k = 0; k < m; ++k) {
    bool ok = true;
    for (int s : screws) ok = ok && inst.tasks[s].capable(k);
    if (ok) capable.push_back(k);
  }
  if (capable.empty()) {
    res.unassigned = screws;
    return res;
  }
  std::vector<Seconds> w;
  for (int k : capable) w.push_back(inst.tasks[screws[0]].durations.at(k));

  const int levels = std::max(1, std::min(num_levels, total / 2));
  std::vector<int> totals(levels, total / levels);
  for (int l = 0; l < total % levels; ++l) ++totals[l];

  // counts per level, shrinking until the spread tolerance holds
  std::vector<std::vector<int>> counts(levels,
                                       std::vector<int>(capable.size(), 0));
  for (int l = 0; l < levels; ++l) {
    for (int t = totals[l]; t >= 2; --t) {
      auto bc = balance_counts(w, t, delta);
      if (bc) {
        counts[l] = bc->c;
        break;
      }
    }
  }

  // slice a y-sorted list into actor-major bands, so the same level's
  // bands of different actors sit far apart
  std::vector<int> sorted = screws;
  std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
    const Point& pa = inst.tasks[a].entry();
    const Point& pb = inst.tasks[b].entry();
    if (pa.y != pb.y) return pa.y < pb.y;
    if (pa.x != pb.x) return pa.x < pb.x;
    return a < b;
  });
  std::vector<std::vector<std::vector<int>>> bucket(
      levels, std::vector<std::vector<int>>(m));
  std::size_t cursor = 0;
  for (std::size_t ci = 0; ci < capable.size(); ++ci)
    for (int l = 0; l < levels; ++l)
      for (int cnt = 0; cnt < counts[l][ci] && cursor < sorted.size(); ++cnt)
        bucket[l][capable[ci]].push_back(sorted[cursor++]);
  std::vector<int> pool(sorted.begin() + cursor, sorted.end());

  auto level_tasks = [&](int l) {
    std::vector<std::pair<int, int>> out;  // (task, actor)
    for (int k = 0; k < m; ++k)
      for (int t : bucket[l][k]) out.push_back({t, k});
    return out;
  };
  auto unassign = [&](int l, int k, int t) {
    auto& v = bucket[l][k];
    v.erase(std::find(v.begin(), v.end(), t));
    pool.push_back(t);
  };
  auto loads = [&](int l) {
    std::vector<Seconds> ld(m, 0);
    for (int k = 0; k < m; ++k)
      for (int t : bucket[l][k]) ld[k] += inst.tasks[t].durations.at(k);
    return ld;
  };
  auto spread = [&](const std::vector<Seconds>& ld) {
    Seconds lo = kInfinity, hi = 0;
    bool any = false;
    for (std::size_t ci = 0; ci < capable.size(); ++ci) {
      lo = std::min(lo, ld[capable[ci]]);
      hi = std::max(hi, ld[capable[ci]]);
      any = true;
    }
    return any ? hi - lo : 0;
  };
  auto has_neighbor = [&](int l, int t) {
    for (int k = 0; k < m; ++k)
      for (int u : bucket[l][k])
        if (u != t && dist_of(inst, t, u) <= delta_dist) return true;
    return false;
  };
  auto conflicted = [&](int l, int t, int a) {
    for (int k = 0; k < m; ++k) {
      if (k == a) continue;
      for (int u : bucket[l][k])
        if (inst.conflicts.node(t, u, a, k)) return true;
    }
    return false;
  };

  // repairs fall back to unassignment; each pass only removes, so the
  // loop settles
  for (int round = 0; round < 6; ++round) {
    bool changed = false;
    for (int l = 0; l < levels; ++l) {
      for (int k = 0; k < m; ++k) {
        auto tasks = bucket[l][k];
        for (int t : tasks)
          if (conflicted(l, t, k)) {
            unassign(l, k, t);
            changed = true;
          }
      }
      for (int k = 0; k < m; ++k) {
        auto tasks = bucket[l][k];
        for (int t : tasks)
          if (!has_neighbor(l, t)) {
            unassign(l, k, t);
            changed = true;
          }
      }
      auto ld = loads(l);
      while (spread(ld) > delta) {
        int worst = capable[0];
        for (int k : capable)
          if (ld[k] > ld[worst]) worst = k;
        if (bucket[l][worst].empty()) break;
        int t = bucket[l][worst].back();
        unassign(l, worst, t);
        changed = true;
        ld = loads(l);
      }
      auto all = level_tasks(l);
      if (all.size() == 1) {
        unassign(l, all[0].second, all[0].first);
        changed = true;
      }
    }
    if (!changed || Clock::now() > deadline) break;
  }

  // one reinsertion pass over the pool, preserving every invariant
  std::sort(pool.begin(), pool.end());
  std::vector<int> still;
  for (int t : pool) {
    bool placed = false;
    for (int l = 0; l < levels && !placed; ++l) {
      if (level_tasks(l).empty()) continue;
      for (std::size_t ci = 0; ci < capable.size() && !placed; ++ci) {
        int k = capable[ci];
        if (conflicted(l, t, k)) continue;
        if (!has_neighbor(l, t)) continue;
        auto ld = loads(l);
        ld[k] += inst.tasks[t].durations.at(k);
        if (spread(ld) > delta) continue;
        bucket[l][k].push_back(t);
        placed = true;
      }
    }
    if (!placed) still.push_back(t);
  }
  pool = std::move(still);

  res.workload.assign(levels, std::vector<Seconds>(m, 0));
  res.g.assign(levels, 0);
  for (int l = 0; l < levels; ++l) {
    auto ld = loads(l);
    res.workload[l] = ld;
    res.g[l] = spread(ld);
    for (int k = 0; k < m; ++k)
      for (int t : bucket[l][k]) res.assignment[t] = {k, l};
  }
  res.unassigned = pool;
  return res;
}

RoutePlan solve_vrp_level(const ProblemInstance& inst,
                          const std::vector<std::vector<int>>& level_tasks,
                          const std::vector<std::optional<Point>>& anchor,
                          const std::vector<std::vector<int>>& next_tasks) {
  const int m = inst.actor_count();
  RoutePlan plan;
  plan.routes.resize(m);

  for (int k = 0; k < m; ++k) {
    const auto& nodes = level_tasks[k];
    if (nodes.empty()) continue;
    auto allowed = [&](int i, int j) { return !inst.conflicts.edge(i, j); };
    auto end_cost = [&](int i) {
      if (k >= int(next_tasks.size()) || next_tasks[k].empty()) return 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (int t : next_tasks[k]) best = std::min(best, dist_of(inst, i, t));
      return best;
    };
    auto start_cost = [&](int i) {
      if (k >= int(anchor.size()) || !anchor[k]) return 0.0;
      return distance(*anchor[k], inst.tasks[i].entry());
    };

    // The allowed-arc graph is sparse (long hops sweep over other
    // screws), so greedy nearest-neighbour dead-ends constantly. Search
    // for a spanning path instead: expand the fewest-options neighbour
    // first and backtrack within a step budget.
    const int n = int(nodes.size());
    std::vector<std::vector<int>> adj(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && allowed(nodes[a], nodes[b])) adj[a].push_back(b);

    std::vector<char> used(n, 0);
    std::vector<int> path, best_path, overall;
    long budget = 500000;
    std::function<bool(int)> dfs = [&](int v) {
      used[v] = 1;
      path.push_back(v);
      if (path.size() > best_path.size()) best_path = path;
      if (int(path.size()) == n) return true;
      if (--budget > 0) {
        std::vector<int> cand;
        for (int u : adj[v])
          if (!used[u]) cand.push_back(u);
        auto options = [&](int u) {
          int c = 0;
          for (int w : adj[u])
            if (!used[w]) ++c;
          return c;
        };
        std::sort(cand.begin(), cand.end(), [&](int a, int b) {
          int oa = options(a), ob = options(b);
          if (oa != ob) return oa < ob;
          double da = dist_of(inst, nodes[v], nodes[a]);
          double db = dist_of(inst, nodes[v], nodes[b]);
          if (da != db) return da < db;
          return nodes[a] < nodes[b];
        });
        for (int u : cand)
          if (dfs(u)) return true;
      }
      used[v] = 0;
      path.pop_back();
      return false;
    };

    std::vector<int> starts(n);
    std::iota(starts.begin(), starts.end(), 0);
    std::sort(starts.begin(), starts.end(), [&](int a, int b) {
      if (adj[a].size() != adj[b].size()) return adj[a].size() < adj[b].size();
      double ca = start_cost(nodes[a]) + inst.tasks[nodes[a]].entry().y;
      double cb = start_cost(nodes[b]) + inst.tasks[nodes[b]].entry().y;
      if (ca != cb) return ca < cb;
      return nodes[a] < nodes[b];
    });
    for (int s : starts) {
      if (budget <= 0) break;
      path.clear();
      best_path.clear();
      if (dfs(s)) {
        overall = path;
        break;
      }
      if (best_path.size() > overall.size()) overall = best_path;
    }
    if (overall.empty() && n > 0) overall = {starts[0]};

    std::vector<int> route;
    std::vector<char> on_path(n, 0);
    for (int v : overall) {
      route.push_back(nodes[v]);
      on_path[v] = 1;
    }
    for (int v = 0; v < n; ++v)
      if (!on_path[v]) plan.bounced.push_back(nodes[v]);

    // 2-opt and or-opt over the open path
    auto leg = [&](int a, int b) { return dist_of(inst, a, b); };
    auto boundary = [&](const std::vector<int>& r) {
      return r.empty() ? 0.0 : start_cost(r.front()) + end_cost(r.back());
    };
    auto path_cost = [&](const std::vector<int>& r) {
      double c = boundary(r);
      for (std::size_t p = 0; p + 1 < r.size(); ++p) c += leg(r[p], r[p + 1]);
      return c;
    };
    auto valid = [&](const std::vector<int>& r) {
      for (std::size_t p = 0; p + 1 < r.size(); ++p)
        if (!allowed(r[p], r[p + 1])) return false;
      return true;
    };
    double cost = path_cost(route);
    for (int pass = 0; pass < 8; ++pass) {
      bool improved = false;
      const int nr = int(route.size());
      for (int a = 0; a < nr - 1; ++a)
        for (int b = a + 1; b < nr; ++b) {
          std::vector<int> cand = route;
          std::reverse(cand.begin() + a, cand.begin() + b + 1);
          if (!valid(cand)) continue;
          double cc = path_cost(cand);
          if (cc < cost - 1e-9) {
            route = std::move(cand);
            cost = cc;
            improved = true;
          }
        }
      for (int len = 1; len <= 3 && len < nr; ++len)
        for (int a = 0; a + len <= nr; ++a) {
          std::vector<int> seg(route.begin() + a, route.begin() + a + len);
          std::vector<int> rest = route;
          rest.erase(rest.begin() + a, rest.begin() + a + len);
          for (std::size_t q = 0; q <= rest.size(); ++q) {
            if (int(q) == a) continue;
            std::vector<int> cand = rest;
            cand.insert(cand.begin() + q, seg.begin(), seg.end());
            if (!valid(cand)) continue;
            double cc = path_cost(cand);
            if (cc < cost - 1e-9) {
              route = std::move(cand);
              cost = cc;
              improved = true;
              break;
            }
          }
        }
      if (!improved) break;
    }
    plan.routes[k] = route;
  }
  return plan;
}

namespace {

// per-actor routes of one global level, plus which block it belongs to
struct LevelBucket {
  std::vector<std::vector<int>> routes;
  bool priority = false;
};

struct Placement {
  std::vector<int> assignment, levels;
  std::vector<std::vector<int>> seqs;
};

// Connected components of the edge-conflict-free graph over one screw
// class. A level route can never hop between components (every crossing
// arc is flagged), so each component must be partitioned on its own.
std::vector<std::vector<int>> routing_zones(const ProblemInstance& inst,
                                            const std::vector<int>& screws) {
  const int n = int(screws.size());
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> zones;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = int(zones.size());
    zones.push_back({screws[s]});
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < n; ++u) {
        if (comp[u] >= 0 || inst.conflicts.edge(screws[v], screws[u]) ||
            inst.conflicts.edge(screws[u], screws[v]))
          continue;
        comp[u] = comp[s];
        zones[comp[s]].push_back(screws[u]);
        stack.push_back(u);
      }
    }
  }
  return zones;
}

// A connected zone can still be several column strips tied together by a
// handful of bridge arcs; y-band slices then straddle the strips and the
// spanning-path search dead-ends. Split wide zones at the clearest x
// gaps (falling back to the median x) so each part routes on its own.
void split_wide_zone(const ProblemInstance& inst, std::vector<int> zone,
                     std::vector<std::vector<int>>& out) {
  const std::size_t cap = 160;
  std::vector<double> xs;
  for (int t : zone) xs.push_back(inst.tasks[t].entry().x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-9; }),
           xs.end());
  // yardstick: the tightest screw-to-screw spacing inside the zone (a
  // single-column strip has no x neighbours, only y ones)
  double d_nn = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < zone.size(); ++a)
    for (std::size_t b = a + 1; b < zone.size(); ++b)
      d_nn = std::min(d_nn, dist_of(inst, zone[a], zone[b]));
  std::vector<double> cuts;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] - xs[i - 1] > 2.0 * d_nn + 1e-9)
      cuts.push_back((xs[i] + xs[i - 1]) / 2.0);
  if (cuts.empty() && zone.size() > cap && xs.size() >= 2)
    cuts.push_back((xs[xs.size() / 2] + xs[xs.size() / 2 - 1]) / 2.0);
  if (cuts.empty()) {
    out.push_back(std::move(zone));
    return;
  }
  std::vector<std::vector<int>> parts(cuts.size() + 1);
  for (int t : zone) {
    double x = inst.tasks[t].entry().x;
    std::size_t p = 0;
    while (p < cuts.size() && x > cuts[p]) ++p;
    parts[p].push_back(t);
  }
  std::size_t nonempty = 0;
  for (const auto& p : parts) nonempty += !p.empty();
  if (nonempty <= 1) {
    out.push_back(std::move(zone));
    return;
  }
  for (auto& p : parts)
    if (!p.empty()) split_wide_zone(inst, std::move(p), out);
}

// set_partition per zone, merged with a level offset per zone
PartitionResult partition_class(const ProblemInstance& inst,
                                const std::vector<int>& screws,
                                const TopConfig& cfg, double budget_s) {
  PartitionResult merged;
  if (screws.empty()) return merged;
  std::vector<std::vector<int>> zones;
  for (auto& zone : routing_zones(inst, screws))
    split_wide_zone(inst, std::move(zone), zones);
  double per_zone = budget_s / double(zones.size());
  for (const auto& zone : zones) {
    PartitionResult part = set_partition(inst, zone, cfg.levels_per_stage,
                                         cfg.delta, cfg.delta_dist, per_zone);
    int offset = int(merged.workload.size());
    for (const auto& [t, ak] : part.assignment)
      merged.assignment[t] = {ak.first, ak.second + offset};
    merged.workload.insert(merged.workload.end(), part.workload.begin(),
                           part.workload.end());
    merged.g.insert(merged.g.end(), part.g.begin(), part.g.end());
    merged.unassigned.insert(merged.unassigned.end(),
                             part.unassigned.begin(), part.unassigned.end());
  }
  return merged;
}

Placement realize(const ProblemInstance& inst,
                  const std::vector<LevelBucket>& buckets) {
  Placement p;
  p.assignment.assign(inst.task_count(), -1);
  p.levels.assign(inst.task_count(), 0);
  p.seqs.assign(inst.actor_count(), {});
  for (std::size_t l = 0; l < buckets.size(); ++l)
    for (int k = 0; k < inst.actor_count(); ++k)
      for (int t : buckets[l].routes[k]) {
        p.assignment[t] = k;
        p.levels[t] = int(l);
        p.seqs[k].push_back(t);
      }
  return p;
}

}  // namespace

TopResult solve_top(const ProblemInstance& inst, const TopConfig& cfg) {
  const int m = inst.actor_count();
  std::vector<int> prio, reinf;
  for (const auto& t : inst.tasks) {
    if (t.kind != TaskKind::Screw)
      throw SpecError("top-session solver expects a pure screw field");
    if (t.priority == PriorityClass::Priority)
      prio.push_back(t.id);
    else
      reinf.push_back(t.id);
  }

  TopResult res;
  res.priority = partition_class(inst, prio, cfg, cfg.time_budget_s / 2);
  res.reinforcement =
      partition_class(inst, reinf, cfg, cfg.time_budget_s / 2);

  // global level order: priority block first
  std::vector<LevelBucket> buckets;
  auto append_stage = [&](const PartitionResult& part, bool priority) {
    std::vector<std::vector<std::vector<int>>> per_level(
        part.workload.size(), std::vector<std::vector<int>>(m));
    for (const auto& [t, ak] : part.assignment)
      per_level[ak.second][ak.first].push_back(t);
    for (auto& lv : per_level) {
      bool empty = true;
      for (const auto& r : lv) empty = empty && r.empty();
      if (empty) continue;
      for (auto& r : lv) std::sort(r.begin(), r.end());
      LevelBucket b;
      b.routes = lv;
      b.priority = priority;
      buckets.push_back(std::move(b));
    }
  };
  append_stage(res.priority, true);
  append_stage(res.reinforcement, false);

  // chained routing over the global levels
  std::vector<std::optional<Point>> anchor(m);
  for (std::size_t l = 0; l < buckets.size(); ++l) {
    std::vector<std::vector<int>> next(m);
    if (l + 1 < buckets.size()) next = buckets[l + 1].routes;
    RoutePlan rp = solve_vrp_level(inst, buckets[l].routes, anchor, next);
    for (int t : rp.bounced) {
      auto& part =
          buckets[l].priority ? res.priority : res.reinforcement;
      part.unassigned.push_back(t);
      auto it = part.assignment.find(t);
      if (it != part.assignment.end()) part.assignment.erase(it);
      ++res.bounced;
    }
    buckets[l].routes = rp.routes;
    for (int k = 0; k < m; ++k)
      if (!rp.routes[k].empty())
        anchor[k] = inst.tasks[rp.routes[k].back()].entry();
  }

  const int total = inst.task_count();
  std::vector<int> leftovers = res.priority.unassigned;
  leftovers.insert(leftovers.end(), res.reinforcement.unassigned.begin(),
                   res.reinforcement.unassigned.end());
  res.assigned_fraction =
      total == 0 ? 1.0 : double(total - int(leftovers.size())) / total;

  auto buffered = buffered_set(inst);
  auto propagate_ok = [&]() -> std::optional<Schedule> {
    Placement p = realize(inst, buckets);
    return propagate_times(inst, buffered, p.assignment, p.seqs, p.levels);
  };

  // leftovers re-enter inside their own block, with the workload balance
  // of that level relaxed; a fresh trailing level is the fallback
  std::vector<char> is_prio(total, 0);
  for (int t : prio) is_prio[t] = 1;
  std::sort(leftovers.begin(), leftovers.end(), [&](int a, int b) {
    if (is_prio[a] != is_prio[b]) return is_prio[a] > is_prio[b];
    return a < b;
  });
  for (int t : leftovers) {
    bool placed = false;
    for (std::size_t l = 0; l < buckets.size() && !placed; ++l) {
      if (buckets[l].priority != bool(is_prio[t])) continue;
      for (int k = 0; k < m && !placed; ++k) {
        if (!inst.tasks[t].capable(k)) continue;
        bool clash = false;
        for (int ko = 0; ko < m && !clash; ++ko) {
          if (ko == k) continue;
          for (int u : buckets[l].routes[ko])
            if (inst.conflicts.node(t, u, k, ko)) {
              clash = true;
              break;
            }
        }
        if (clash) continue;
        auto& route = buckets[l].routes[k];
        // cheapest feasible position
        std::vector<std::size_t> order;
        for (std::size_t p = 0; p <= route.size(); ++p) order.push_back(p);
        std::sort(order.begin(), order.end(), [&](std::size_t a,
                                                  std::size_t b) {
          auto added = [&](std::size_t p) {
            double d = 0;
            if (p > 0) d += dist_of(inst, route[p - 1], t);
            if (p < route.size()) d += dist_of(inst, t, route[p]);
            return d;
          };
          return added(a) < added(b);
        });
        for (std::size_t p : order) {
          if (p > 0 && inst.conflicts.edge(route[p - 1], t)) continue;
          if (p < route.size() && inst.conflicts.edge(t, route[p]))
            continue;
          route.insert(route.begin() + p, t);
          if (propagate_ok()) {
            placed = true;
            break;
          }
          route.erase(route.begin() + p);
        }
      }
    }
    if (!placed) {
      // new level at the end of the block
      std::size_t at = buckets.size();
      if (is_prio[t])
        for (std::size_t l = 0; l < buckets.size(); ++l)
          if (!buckets[l].priority) {
            at = l;
            break;
          }
      LevelBucket nb;
      nb.routes.assign(m, {});
      nb.priority = bool(is_prio[t]);
      for (int k = 0; k < m && !placed; ++k) {
        if (!inst.tasks[t].capable(k)) continue;
        nb.routes[k] = {t};
        buckets.insert(buckets.begin() + at, nb);
        if (propagate_ok())
          placed = true;
        else
          buckets.erase(buckets.begin() + at);
        nb.routes[k].clear();
      }
    }
    if (!placed)
      throw InsertionError("screw " + inst.tasks[t].external_id +
                           " cannot be inserted into any level");
  }

  auto sched = propagate_ok();
  if (!sched)
    throw InsertionError("top-session schedule is temporally inconsistent");
  for (int t = 0; t < total; ++t)
    if (sched->assignment[t] < 0)
      throw InsertionError("task " + inst.tasks[t].external_id +
                           " left unscheduled");
  res.schedule = *sched;

  Seconds busy = 0;
  for (int k = 0; k < m; ++k) {
    const auto& seq = res.schedule.sequences[k];
    for (std::size_t p = 0; p < seq.size(); ++p) {
      busy += inst.tasks[seq[p]].durations.at(k);
      if (p + 1 < seq.size()) busy += inst.transition(k, seq[p], seq[p + 1]);
    }
  }
  if (res.schedule.makespan > 0 && m > 0)
    res.utilization = double(busy) / (double(res.schedule.makespan) * m);
  return res;
}

}  // namespace laser
