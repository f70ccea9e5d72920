#include "laser/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <sstream>

namespace laser {

namespace {

// Realized numbers, drawn up front in a fixed order so both executor
// implementations (and any actor interleaving) see the same values.
struct Prepared {
  std::vector<std::vector<int>> chain;  // per actor, ordered task ids
  std::vector<double> task_dur;
  std::vector<std::vector<double>> gaps;  // per actor, per chain hop
  // dispatch predecessors: v may not start before end(u) + lower, for
  // every end-to-start constraint with a nonnegative lower bound (the
  // protocol signals completions; start-anchored or negative lowers are
  // not dispatchable and are only reported by the trace check)
  std::vector<std::vector<std::pair<int, Seconds>>> preds;
  std::vector<char> scheduled;
  int total_tasks = 0;
};

double draw_factor(const NoiseModel& noise, std::mt19937_64& rng) {
  double s = 0.0;
  switch (noise.kind) {
    case NoiseModel::Kind::None:
      return 1.0;
    case NoiseModel::Kind::Gaussian: {
      std::normal_distribution<double> d(0.0, noise.magnitude);
      s = d(rng);
      s = std::clamp(s, -3.0 * noise.magnitude, 3.0 * noise.magnitude);
      break;
    }
    case NoiseModel::Kind::BoundedUniform: {
      std::uniform_real_distribution<double> d(-noise.magnitude,
                                               noise.magnitude);
      s = d(rng);
      break;
    }
  }
  return std::max(0.01, 1.0 + s);
}

Prepared prepare(const ProblemInstance& inst, const Schedule& sched,
                 const NoiseModel& noise,
                 const std::optional<FaultSpec>& fault) {
  Prepared prep;
  const int n = inst.task_count();
  const int m = inst.actor_count();
  std::mt19937_64 rng(noise.seed);

  std::vector<double> task_factor(n, 1.0);
  for (int i = 0; i < n; ++i) task_factor[i] = draw_factor(noise, rng);

  prep.chain.resize(m);
  prep.scheduled.assign(n, 0);
  for (int k = 0; k < m && k < int(sched.sequences.size()); ++k) {
    prep.chain[k] = sched.sequences[k];
    for (int t : prep.chain[k]) prep.scheduled[t] = 1;
    prep.total_tasks += int(prep.chain[k].size());
  }

  prep.task_dur.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto it = inst.tasks[i].durations.find(sched.assignment[i]);
    if (it != inst.tasks[i].durations.end())
      prep.task_dur[i] = double(it->second) * task_factor[i];
  }
  if (fault && !fault->fail && fault->task >= 0 && fault->task < n)
    prep.task_dur[fault->task] *= fault->stall_factor;

  // travel stays nominal; the tool-switch share of a transition is noisy
  prep.gaps.resize(m);
  for (int k = 0; k < m; ++k) {
    const auto& chain = prep.chain[k];
    for (std::size_t p = 0; p + 1 < chain.size(); ++p) {
      int i = chain[p], j = chain[p + 1];
      double rho = double(inst.transition(k, i, j));
      double sw = double(inst.actors[k].tool_switch(inst.tasks[i].tool,
                                                    inst.tasks[j].tool));
      sw = std::min(sw, rho);
      double f = draw_factor(noise, rng);
      prep.gaps[k].push_back(std::max(0.0, rho + sw * (f - 1.0)));
    }
  }

  prep.preds.resize(n);
  for (const auto& c : inst.temporal) {
    if (c.v < 0 || c.u < 0) continue;
    if (c.eta_u != Anchor::End || c.eta_v != Anchor::Start) continue;
    if (c.lower < 0) continue;
    if (!prep.scheduled[c.u] || !prep.scheduled[c.v]) continue;
    prep.preds[c.v].push_back({c.u, c.lower});
  }
  return prep;
}

struct ActorState {
  double time = 0.0;
  int last = -1;
  int gap_idx = 0;
  std::size_t pos = 0;  // index into the actor's chain
  bool halted = false;
  double idle = 0.0;
};

SimReport finish_report(const ProblemInstance& inst, SimReport report) {
  std::sort(report.events.begin(), report.events.end(),
            [](const SimTaskEvent& a, const SimTaskEvent& b) {
              return a.task < b.task;
            });
  report.completed = int(report.events.size());
  const int n = inst.task_count();
  std::vector<double> start(n, -1.0), end(n, -1.0);
  for (const auto& e : report.events) {
    report.makespan = std::max(report.makespan, e.end);
    start[e.task] = e.start;
    end[e.task] = e.end;
  }
  auto at = [&](int task, Anchor a) {
    if (task == kOrigin) return 0.0;
    return a == Anchor::Start ? start[task] : end[task];
  };
  auto seen = [&](int task) { return task == kOrigin || end[task] >= 0.0; };
  for (const auto& c : inst.temporal) {
    if (!seen(c.u) || !seen(c.v)) continue;
    double diff = at(c.v, c.eta_v) - at(c.u, c.eta_u);
    std::ostringstream os;
    if (diff < double(c.lower) - 1e-6)
      os << "lower bound short by " << double(c.lower) - diff << "s";
    else if (c.bounded_above() && diff > double(c.upper) + 1e-6)
      os << "upper bound exceeded by " << diff - double(c.upper) << "s";
    else
      continue;
    std::string u = c.u == kOrigin ? "origin" : inst.tasks[c.u].external_id;
    std::string v = c.v == kOrigin ? "origin" : inst.tasks[c.v].external_id;
    report.window_violations.push_back(u + " -> " + v + ": " + os.str());
  }
  return report;
}

}  // namespace

std::vector<ExecTaskObject> compile_schedule(const Schedule& sched,
                                             const ProblemInstance& inst) {
  std::vector<ExecTaskObject> out;
  for (std::size_t k = 0; k < sched.sequences.size(); ++k) {
    for (int t : sched.sequences[k]) {
      bool extend = !out.empty() && out.back().actor == int(k) &&
                    out.back().level == sched.level[t] &&
                    out.back().kind == inst.tasks[t].kind;
      if (extend) {
        out.back().tasks.push_back(t);
      } else {
        ExecTaskObject obj;
        obj.actor = int(k);
        obj.level = sched.level[t];
        obj.kind = inst.tasks[t].kind;
        obj.tasks = {t};
        out.push_back(std::move(obj));
      }
    }
  }
  return out;
}

// Both executors dispatch a task at the same instant: no earlier than its
// scheduled start (actors follow the timetable; early finishes wait), its
// chain predecessor plus the realized transition gap, its level release,
// and every dispatch predecessor's realized end plus the bound.

SimReport simulate(const ProblemInstance& inst, const Schedule& sched,
                   const NoiseModel& noise,
                   const std::optional<FaultSpec>& fault) {
  Prepared prep = prepare(inst, sched, noise, fault);
  const int m = inst.actor_count();
  const int num_levels = sched.max_level + 1;

  SimReport report;
  std::vector<ActorState> st(m);
  std::vector<double> end_time(inst.task_count(), -1.0);
  double release = 0.0;
  for (int lvl = 0; lvl < num_levels; ++lvl) {
    // this level's tasks in scheduled-start order; a dispatch predecessor
    // always has a strictly earlier scheduled start, so its realized end
    // is known by the time the successor is dispatched
    struct Item {
      Seconds s;
      int task;
      int k;
    };
    std::vector<Item> items;
    for (int k = 0; k < m; ++k) {
      std::size_t p = st[k].pos;
      while (p < prep.chain[k].size() &&
             sched.level[prep.chain[k][p]] == lvl) {
        int t = prep.chain[k][p];
        items.push_back({sched.start[t], t, k});
        ++p;
      }
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return a.s != b.s ? a.s < b.s : a.task < b.task;
    });

    bool any_halt = false;
    for (const auto& it : items) {
      auto& a = st[it.k];
      if (a.halted) continue;
      int t = it.task;
      bool blocked = false;
      double ready = 0.0;
      for (const auto& [u, lb] : prep.preds[t]) {
        if (end_time[u] < 0.0) {
          blocked = true;  // predecessor never ran (halt upstream)
          break;
        }
        ready = std::max(ready, end_time[u] + double(lb));
      }
      if (blocked) {
        a.halted = true;
        any_halt = true;
        continue;
      }
      double gap = a.last < 0 ? 0.0 : prep.gaps[it.k][a.gap_idx++];
      double start = std::max({a.time + gap, release, double(sched.start[t]),
                               ready});
      a.idle += std::max(0.0, start - (a.time + gap));
      if (fault && fault->fail && fault->task == t) {
        a.halted = true;
        any_halt = true;
        a.time = start;
        continue;
      }
      double end = start + prep.task_dur[t];
      report.events.push_back({t, it.k, lvl, start, end});
      end_time[t] = end;
      a.time = end;
      a.last = t;
      ++a.pos;
    }
    if (any_halt) {
      report.halted = true;
      break;
    }
    for (int k = 0; k < m; ++k) release = std::max(release, st[k].time);
    report.barrier_release.push_back(release);
  }
  report.checkpoint_level = int(report.barrier_release.size()) - 1;
  report.actor_idle.resize(m);
  for (int k = 0; k < m; ++k) report.actor_idle[k] = st[k].idle;
  return finish_report(inst, std::move(report));
}

SimReport simulate_agents(const ProblemInstance& inst, const Schedule& sched,
                          const NoiseModel& noise,
                          const std::optional<FaultSpec>& fault) {
  Prepared prep = prepare(inst, sched, noise, fault);
  const int m = inst.actor_count();
  const int num_levels = sched.max_level + 1;

  SimReport report;
  std::vector<ActorState> st(m);
  std::vector<double> end_time(inst.task_count(), -1.0);
  std::vector<double> release_at(num_levels + 1, 0.0);
  std::vector<int> confirms(std::max(num_levels, 1), 0);
  std::vector<double> confirm_time(std::max(num_levels, 1), 0.0);
  std::vector<int> confirmed_up_to(m, -1);
  std::vector<char> in_flight(m, 0);
  int released = 0;  // levels <= released may run

  struct Done {
    double time;
    int seq;
    int actor;
    int level;
    bool operator>(const Done& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };
  std::priority_queue<Done, std::vector<Done>, std::greater<Done>> inbox;
  int seq = 0;

  auto confirm = [&](int lvl, double when) {
    confirm_time[lvl] = std::max(confirm_time[lvl], when);
    ++confirms[lvl];
  };

  // Tries to dispatch actor k's next task; returns true on progress. A
  // task blocked on an unfinished dispatch predecessor is retried once
  // more information arrives.
  auto try_start = [&](int k) {
    auto& a = st[k];
    if (a.halted || in_flight[k]) return false;
    int next_lvl = a.pos < prep.chain[k].size()
                       ? sched.level[prep.chain[k][a.pos]]
                       : num_levels;
    bool progress = false;
    // an idle actor confirms every released level it has no work for
    while (confirmed_up_to[k] + 1 < next_lvl &&
           confirmed_up_to[k] + 1 <= released &&
           confirmed_up_to[k] + 1 < num_levels) {
      int lvl = ++confirmed_up_to[k];
      confirm(lvl, std::max(a.time, release_at[lvl]));
      progress = true;
    }
    if (next_lvl >= num_levels || next_lvl > released) return progress;
    int t = prep.chain[k][a.pos];
    double ready = 0.0;
    for (const auto& [u, lb] : prep.preds[t]) {
      if (end_time[u] < 0.0) return progress;  // wait for the signal
      ready = std::max(ready, end_time[u] + double(lb));
    }
    double gap = a.last < 0 ? 0.0 : prep.gaps[k][a.gap_idx];
    double start = std::max({a.time + gap, release_at[next_lvl],
                             double(sched.start[t]), ready});
    a.idle += std::max(0.0, start - (a.time + gap));
    if (fault && fault->fail && fault->task == t) {
      a.halted = true;
      a.time = start;
      return true;
    }
    if (a.last >= 0) ++a.gap_idx;
    double end = start + prep.task_dur[t];
    report.events.push_back({t, k, next_lvl, start, end});
    end_time[t] = end;
    a.time = end;
    a.last = t;
    ++a.pos;
    in_flight[k] = 1;
    inbox.push({end, seq++, k, next_lvl});
    return true;
  };

  auto process_releases = [&]() {
    bool any = false;
    while (released < num_levels && confirms[released] == m) {
      double t = confirm_time[released];
      report.barrier_release.push_back(t);
      ++released;
      release_at[std::min(released, num_levels)] = t;
      any = true;
    }
    return any;
  };
  auto sweep = [&]() {
    bool progress = true;
    while (progress) {
      progress = false;
      for (int k = 0; k < m; ++k) progress = try_start(k) || progress;
      progress = process_releases() || progress;
    }
  };

  sweep();
  while (!inbox.empty()) {
    Done msg = inbox.top();
    inbox.pop();
    int k = msg.actor;
    in_flight[k] = 0;
    int next_lvl = st[k].pos < prep.chain[k].size()
                       ? sched.level[prep.chain[k][st[k].pos]]
                       : num_levels;
    if (next_lvl > msg.level) {
      confirmed_up_to[k] = msg.level;
      confirm(msg.level, msg.time);
    }
    sweep();
  }

  report.halted = false;
  for (int k = 0; k < m; ++k) report.halted = report.halted || st[k].halted;
  if (int(report.barrier_release.size()) < num_levels) report.halted = true;
  report.checkpoint_level = int(report.barrier_release.size()) - 1;
  report.actor_idle.resize(m);
  for (int k = 0; k < m; ++k) report.actor_idle[k] = st[k].idle;
  return finish_report(inst, std::move(report));
}

SimReport fault_inject(const ProblemInstance& inst, const Schedule& sched,
                       const FaultSpec& fault, const NoiseModel& noise) {
  return simulate(inst, sched, noise, fault);
}

}  // namespace laser
