#include "laser/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace laser {

namespace {

using Clock = std::chrono::steady_clock;

// Longest-path propagation with reusable buffers; hot path of the search.
class FastStn {
 public:
  void reset(int num_vars) {
    n_ = num_vars;
    heads_.assign(n_, -1);
    ge0_.clear();
    ubs_.clear();
    edge_to_.clear();
    edge_w_.clear();
    edge_next_.clear();
    ubs_.clear();
  }
  // x >= y + c; y = -1 anchors at the origin.
  void add(int x, int y, Seconds c) {
    if (y < 0) {
      ge0_.push_back({x, c});
      return;
    }
    edge_to_.push_back(x);
    edge_w_.push_back(c);
    edge_next_.push_back(heads_[y]);
    heads_[y] = int(edge_to_.size()) - 1;
  }
  void add_ub(int x, Seconds c) { ubs_.push_back({x, c}); }

  bool solve(std::vector<Seconds>& dist) {
    dist.assign(n_, 0);
    for (const auto& [x, c] : ge0_) dist[x] = std::max(dist[x], c);
    in_queue_.assign(n_, 1);
    relax_count_.assign(n_, 0);
    queue_.clear();
    for (int v = 0; v < n_; ++v) queue_.push_back(v);
    while (!queue_.empty()) {
      int u = queue_.front();
      queue_.pop_front();
      in_queue_[u] = 0;
      Seconds du = dist[u];
      for (int e = heads_[u]; e >= 0; e = edge_next_[e]) {
        int v = edge_to_[e];
        if (du + edge_w_[e] > dist[v]) {
          dist[v] = du + edge_w_[e];
          if (++relax_count_[v] > n_ + 1) return false;
          if (!in_queue_[v]) {
            in_queue_[v] = 1;
            queue_.push_back(v);
          }
        }
      }
    }
    for (const auto& [x, c] : ubs_)
      if (dist[x] > c) return false;
    return true;
  }

 private:
  int n_ = 0;
  std::vector<int> heads_, edge_to_, edge_next_;
  std::vector<Seconds> edge_w_;
  std::vector<std::pair<int, Seconds>> ge0_, ubs_;
  std::deque<int> queue_;
  std::vector<char> in_queue_;
  std::vector<int> relax_count_;
};

// Shared temporal-network assembly. Variable layout: S_i = 2i, E_i = 2i+1,
// barrier of level rank r = 2n + r.
void add_common_edges(FastStn& stn, const ProblemInstance& inst,
                      const std::vector<TemporalConstraint>& temporal,
                      int num_tasks,
                      const std::vector<char>* active = nullptr) {
  auto var = [&](int task, Anchor a) {
    return 2 * task + (a == Anchor::End ? 1 : 0);
  };
  auto is_active = [&](int task) {
    return task == kOrigin || !active || (*active)[task];
  };
  for (const auto& c : temporal) {
    if (!is_active(c.u) || !is_active(c.v)) continue;
    int vu = c.u == kOrigin ? -1 : var(c.u, c.eta_u);
    int vv = c.v == kOrigin ? -1 : var(c.v, c.eta_v);
    // lower: t_v >= t_u + L
    if (vv >= 0)
      stn.add(vv, vu, c.lower);
    else if (vu >= 0)
      stn.add_ub(vu, -c.lower);
    // upper: t_u >= t_v - U
    if (c.bounded_above()) {
      if (vu >= 0)
        stn.add(vu, vv, -c.upper);
      else if (vv >= 0)
        stn.add_ub(vv, c.upper);
    }
  }
  (void)num_tasks;
}

struct Search {
  const CpModel& model;
  const ProblemInstance& inst;
  int n, num_actors, level_cap;
  std::vector<int> order;              // static decision order
  std::vector<std::vector<int>> actor_choices;  // per task, sorted
  std::vector<int> cap_remaining;      // undecided tasks capable per actor
  std::vector<Seconds> min_dur;
  std::vector<int> assignment;         // -1 = undecided
  std::vector<std::vector<int>> seqs;
  std::vector<std::vector<int>> level_members;  // by level object id
  std::vector<int> level_order;        // object ids in rank order
  std::vector<int> task_oid;

  // Heuristic mode: apply the flagged-adjacency level restriction at
  // every insertion even though later insertions may break the
  // adjacency. Every leaf it reaches is valid, but it can miss optima,
  // so exhausting it proves nothing.
  bool restrict_edges = false;

  double best_obj = std::numeric_limits<double>::infinity();
  Schedule best;
  bool have_best = false;
  std::int64_t nodes = 0;
  Clock::time_point deadline;
  bool timed_out = false;

  FastStn stn;
  std::vector<Seconds> dist;

  explicit Search(const CpModel& m)
      : model(m), inst(*m.instance), n(inst.task_count()),
        num_actors(inst.actor_count()) {
    level_cap = model.max_levels.value_or(n);
    assignment.assign(n, -1);
    task_oid.assign(n, -1);
    seqs.assign(num_actors, {});
    min_dur.assign(n, 0);
    actor_choices.resize(n);
    for (int i = 0; i < n; ++i) {
      Seconds m_d = kInfinity;
      for (const auto& [k, d] : inst.tasks[i].durations) {
        m_d = std::min(m_d, d);
        actor_choices[i].push_back(k);
      }
      min_dur[i] = m_d;
      std::sort(actor_choices[i].begin(), actor_choices[i].end(),
                [&](int a, int b) {
                  Seconds da = inst.tasks[i].durations.at(a);
                  Seconds db = inst.tasks[i].durations.at(b);
                  return da != db ? da < db : a < b;
                });
    }
    cap_remaining.assign(num_actors, 0);
    for (int i = 0; i < n; ++i)
      for (int k : actor_choices[i]) ++cap_remaining[k];
    order = decision_order();
    deadline = Clock::now() +
               std::chrono::microseconds(
                   std::int64_t(model.time_limit_s * 1e6));
  }

  // Topological over precedence-style constraints, ties on id.
  std::vector<int> decision_order() const {
    std::vector<std::vector<int>> succ(n);
    std::vector<int> indeg(n, 0);
    for (const auto& c : model.buffered)
      if (c.u != kOrigin && c.v != kOrigin && c.u != c.v && c.lower >= 0) {
        succ[c.u].push_back(c.v);
        ++indeg[c.v];
      }
    std::vector<int> out;
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
      if (indeg[i] == 0) ready.push_back(i);
    std::make_heap(ready.begin(), ready.end(), std::greater<>());
    while (!ready.empty()) {
      std::pop_heap(ready.begin(), ready.end(), std::greater<>());
      int u = ready.back();
      ready.pop_back();
      out.push_back(u);
      for (int v : succ[u])
        if (--indeg[v] == 0) {
          ready.push_back(v);
          std::push_heap(ready.begin(), ready.end(), std::greater<>());
        }
    }
    if (int(out.size()) != n) {  // constraint graph has a cycle; id order
      out.clear();
      for (int i = 0; i < n; ++i) out.push_back(i);
    }
    return out;
  }

  int rank_of(int oid) const {
    for (std::size_t r = 0; r < level_order.size(); ++r)
      if (level_order[r] == oid) return int(r);
    return -1;
  }

  // Relaxation: decided tasks carry full sequencing/barrier edges,
  // undecided ones only durations and temporal bounds.
  bool relax(Seconds* max_end) {
    int num_levels = int(level_order.size());
    stn.reset(2 * n + num_levels);
    add_common_edges(stn, inst, model.buffered, n);
    for (int i = 0; i < n; ++i) {
      Seconds d = assignment[i] >= 0 ? inst.tasks[i].durations.at(assignment[i])
                                     : min_dur[i];
      stn.add(2 * i + 1, 2 * i, d);
    }
    for (int k = 0; k < num_actors; ++k)
      for (std::size_t p = 0; p + 1 < seqs[k].size(); ++p)
        stn.add(2 * seqs[k][p + 1], 2 * seqs[k][p] + 1,
                inst.transition(k, seqs[k][p], seqs[k][p + 1]));
    for (int r = 0; r < num_levels; ++r) {
      if (r > 0) stn.add(2 * n + r, 2 * n + r - 1, 0);
      for (int t : level_members[level_order[r]]) {
        stn.add(2 * n + r, 2 * t + 1, 0);       // B_r >= E_t
        if (r > 0) stn.add(2 * t, 2 * n + r - 1, 0);  // S_t >= B_{r-1}
      }
    }
    if (!stn.solve(dist)) return false;
    if (max_end) {
      Seconds m = 0;
      for (int i = 0; i < n; ++i) m = std::max(m, dist[2 * i + 1]);
      *max_end = m;
    }
    return true;
  }

  bool node_conflict_with_level(int t, int a, int oid) const {
    for (int u : level_members[oid])
      if (inst.conflicts.node(t, u, a, assignment[u])) return true;
    return false;
  }

  // Final sequences only: a flagged consecutive pair must split levels.
  bool leaf_edge_ok() const {
    if (model.relax_edge_conflicts) return true;
    for (const auto& seq : seqs)
      for (std::size_t p = 0; p + 1 < seq.size(); ++p)
        if (task_oid[seq[p]] == task_oid[seq[p + 1]] &&
            inst.conflicts.edge(seq[p], seq[p + 1]))
          return false;
    return true;
  }

  void record_leaf() {
    if (!leaf_edge_ok()) return;
    Seconds max_end = 0;
    if (!relax(&max_end)) return;  // guarded by caller; belt and braces
    int num_levels = int(level_order.size());
    double obj = double(max_end) + model.lambda * double(num_levels - 1);
    if (obj >= best_obj - 1e-12) return;
    Schedule s;
    s.assignment = assignment;
    s.sequences = seqs;
    s.level.assign(n, 0);
    s.start.assign(n, 0);
    s.end.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      s.level[i] = rank_of(task_oid[i]);
      s.start[i] = dist[2 * i];
      s.end[i] = dist[2 * i + 1];
    }
    s.barriers.assign(num_levels, 0);
    for (int r = 0; r < num_levels; ++r) s.barriers[r] = dist[2 * n + r];
    s.makespan = max_end;
    s.max_level = num_levels - 1;
    best = std::move(s);
    best_obj = obj;
    have_best = true;
  }

  bool out_of_time() {
    if (timed_out) return true;
    if ((nodes & 255) == 0 && Clock::now() > deadline) timed_out = true;
    return timed_out;
  }

  // Returns false to abort the whole search (time limit).
  bool dfs(int depth) {
    if (depth == n) {
      record_leaf();
      return true;
    }
    int t = order[depth];
    for (int k : actor_choices[t]) --cap_remaining[k];
    for (int a : actor_choices[t]) {
      assignment[t] = a;
      auto& seq = seqs[a];
      // A flagged adjacency prunes the level range only once it is final,
      // i.e. no undecided task can still be inserted into this sequence;
      // otherwise the restriction is deferred to the leaf check. The
      // heuristic pass applies it eagerly regardless.
      bool adjacency_final = restrict_edges || cap_remaining[a] == 0;
      for (int p = int(seq.size()); p >= 0; --p) {
        seq.insert(seq.begin() + p, t);
        int prev = p > 0 ? seq[p - 1] : -1;
        int next = p + 1 < int(seq.size()) ? seq[p + 1] : -1;
        bool edge_prev =
            prev >= 0 && adjacency_final && !model.relax_edge_conflicts &&
            inst.conflicts.edge(prev, t);
        bool edge_next =
            next >= 0 && adjacency_final && !model.relax_edge_conflicts &&
            inst.conflicts.edge(t, next);
        int num_levels = int(level_order.size());
        int join_lo = prev >= 0 ? rank_of(task_oid[prev]) + (edge_prev ? 1 : 0)
                                : 0;
        int join_hi = next >= 0
                          ? rank_of(task_oid[next]) - (edge_next ? 1 : 0)
                          : num_levels - 1;
        // join an existing level, latest first
        for (int r = join_hi; r >= join_lo; --r) {
          int oid = level_order[r];
          if (node_conflict_with_level(t, a, oid)) continue;
          level_members[oid].push_back(t);
          task_oid[t] = oid;
          ++nodes;
          if (out_of_time()) return false;
          Seconds max_end = 0;
          if (relax(&max_end)) {
            double lb = double(max_end) +
                        model.lambda * double(num_levels - 1);
            if (lb < best_obj - 1e-12 && !dfs(depth + 1)) return false;
          }
          level_members[oid].pop_back();
          task_oid[t] = -1;
        }
        // open a fresh level at insertion point q, latest first
        if (num_levels < level_cap) {
          int q_lo = prev >= 0 ? rank_of(task_oid[prev]) + 1 : 0;
          int q_hi = next >= 0 ? rank_of(task_oid[next]) : num_levels;
          for (int q = q_hi; q >= q_lo; --q) {
            int oid = int(level_members.size());
            level_members.push_back({t});
            level_order.insert(level_order.begin() + q, oid);
            task_oid[t] = oid;
            ++nodes;
            if (out_of_time()) return false;
            Seconds max_end = 0;
            if (relax(&max_end)) {
              double lb =
                  double(max_end) + model.lambda * double(num_levels);
              if (lb < best_obj - 1e-12 && !dfs(depth + 1)) return false;
            }
            level_order.erase(level_order.begin() + q);
            level_members.pop_back();
            task_oid[t] = -1;
          }
        }
        seq.erase(seq.begin() + p);
      }
      assignment[t] = -1;
    }
    for (int k : actor_choices[t]) ++cap_remaining[k];
    return true;
  }
};

}  // namespace

CpModel make_model(const ProblemInstance& inst, double lambda,
                   double time_limit_s) {
  CpModel m;
  m.instance = &inst;
  m.lambda = lambda;
  m.time_limit_s = time_limit_s;
  m.buffered = inst.temporal;
  for (auto& c : m.buffered)
    c.upper = buffered_upper(c.lower, c.upper, inst.safety_buffer_fraction);
  Seconds horizon = 0;
  Seconds max_rho = 0;
  for (const auto& t : inst.tasks) {
    Seconds d = 0;
    for (const auto& [k, dk] : t.durations) d = std::max(d, dk);
    horizon += d;
  }
  for (const auto& [key, rho] : inst.transitions)
    max_rho = std::max(max_rho, rho);
  m.horizon = horizon + Seconds(inst.task_count()) * max_rho;
  return m;
}

SolveReport solve_monolithic(const CpModel& model) {
  auto t0 = Clock::now();
  auto deadline = t0 + std::chrono::microseconds(
                           std::int64_t(model.time_limit_s * 1e6));

  // Pass 1 dives with the eager flagged-adjacency restriction: incomplete,
  // but it reaches good incumbents quickly on dense conflict structures.
  Search heur(model);
  heur.restrict_edges = true;
  heur.deadline = std::min(deadline,
                           t0 + std::chrono::microseconds(std::int64_t(
                                    model.time_limit_s * 0.5e6)));
  heur.dfs(0);

  // Pass 2 is the complete search; only its exhaustion proves optimality
  // or infeasibility.
  Search search(model);
  search.deadline = deadline;
  search.best = heur.best;
  search.best_obj = heur.best_obj;
  search.have_best = heur.have_best;
  bool completed = search.dfs(0);

  SolveReport report;
  report.nodes_explored = heur.nodes + search.nodes;
  report.wall_time_s =
      std::chrono::duration<double>(Clock::now() - t0).count();
  if (search.have_best) {
    report.schedule = search.best;
    report.objective = search.best_obj;
    report.status = completed ? SolveStatus::Optimal : SolveStatus::Feasible;
  } else {
    report.status =
        completed ? SolveStatus::Infeasible : SolveStatus::Timeout;
  }
  return report;
}

Seconds lower_bound(const CpModel& model) {
  const ProblemInstance& inst = *model.instance;
  int n = inst.task_count();

  // critical path over duration and temporal lower bounds
  FastStn stn;
  stn.reset(2 * n);
  add_common_edges(stn, inst, model.buffered, n);
  std::vector<Seconds> dist;
  Seconds path_bound = 0;
  Seconds total_work = 0;
  for (int i = 0; i < n; ++i) {
    Seconds m_d = kInfinity;
    for (const auto& [k, d] : inst.tasks[i].durations)
      m_d = std::min(m_d, d);
    stn.add(2 * i + 1, 2 * i, m_d);
    total_work += m_d;
  }
  if (stn.solve(dist))
    for (int i = 0; i < n; ++i)
      path_bound = std::max(path_bound, dist[2 * i + 1]);

  Seconds work_bound =
      (total_work + inst.actor_count() - 1) / inst.actor_count();
  return std::max(path_bound, work_bound);
}

std::optional<Schedule> propagate_times(
    const ProblemInstance& inst,
    const std::vector<TemporalConstraint>& temporal,
    const std::vector<int>& assignment,
    const std::vector<std::vector<int>>& sequences,
    const std::vector<int>& level) {
  int n = inst.task_count();
  std::vector<char> active(n, 0);
  bool partial = false;
  for (int i = 0; i < n; ++i) {
    active[i] = assignment[i] >= 0;
    partial = partial || !active[i];
  }
  int num_levels = 0;
  for (int i = 0; i < n; ++i)
    if (active[i]) num_levels = std::max(num_levels, level[i] + 1);

  FastStn stn;
  stn.reset(2 * n + num_levels);
  add_common_edges(stn, inst, temporal, n, partial ? &active : nullptr);
  for (int i = 0; i < n; ++i)
    if (active[i])
      stn.add(2 * i + 1, 2 * i, inst.tasks[i].durations.at(assignment[i]));
  for (std::size_t k = 0; k < sequences.size(); ++k)
    for (std::size_t p = 0; p + 1 < sequences[k].size(); ++p)
      stn.add(2 * sequences[k][p + 1], 2 * sequences[k][p] + 1,
              inst.transition(int(k), sequences[k][p], sequences[k][p + 1]));
  for (int r = 1; r < num_levels; ++r) stn.add(2 * n + r, 2 * n + r - 1, 0);
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    stn.add(2 * n + level[i], 2 * i + 1, 0);
    if (level[i] > 0) stn.add(2 * i, 2 * n + level[i] - 1, 0);
  }

  std::vector<Seconds> dist;
  if (!stn.solve(dist)) return std::nullopt;

  Schedule s;
  s.assignment = assignment;
  s.sequences = sequences;
  s.level = level;
  s.start.assign(n, 0);
  s.end.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    s.start[i] = dist[2 * i];
    s.end[i] = dist[2 * i + 1];
    s.makespan = std::max(s.makespan, s.end[i]);
  }
  s.barriers.assign(num_levels, 0);
  for (int r = 0; r < num_levels; ++r) s.barriers[r] = dist[2 * n + r];
  s.max_level = num_levels - 1;
  return s;
}

double objective_value(const Schedule& s, double lambda) {
  return double(s.makespan) + lambda * double(s.max_level);
}

}  // namespace laser
