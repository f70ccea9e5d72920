#include "laser/validate.hpp"

#include <algorithm>
#include <sstream>

namespace laser {

namespace {

void add(std::vector<Violation>& out, int eq, int u, int v, Seconds amount,
         std::string msg) {
  out.push_back({eq, u, v, amount, std::move(msg)});
}

}  // namespace

std::vector<Violation> validate_schedule(const ProblemInstance& inst,
                                         const Schedule& s,
                                         bool strict_windows) {
  const int n = inst.task_count();
  const int num_actors = inst.actor_count();

  if (int(s.assignment.size()) != n || int(s.level.size()) != n ||
      int(s.start.size()) != n || int(s.end.size()) != n)
    throw ReferenceError("schedule arrays do not match the instance size");
  if (int(s.sequences.size()) != num_actors)
    throw ReferenceError("schedule sequences do not match the actor count");
  for (int i = 0; i < n; ++i) {
    if (s.assignment[i] < 0 || s.assignment[i] >= num_actors)
      throw ReferenceError("task " + inst.tasks[i].external_id +
                           ": unknown actor in assignment");
    if (s.level[i] < 0)
      throw ReferenceError("task " + inst.tasks[i].external_id +
                           ": negative level");
  }
  for (const auto& seq : s.sequences)
    for (int t : seq)
      if (t < 0 || t >= n)
        throw ReferenceError("sequence references unknown task id");

  std::vector<Violation> out;

  // Eq. 2: unique assignment, consistent with sequences.
  {
    std::vector<int> seen(n, 0);
    for (int k = 0; k < num_actors; ++k)
      for (int t : s.sequences[k]) {
        ++seen[t];
        if (s.assignment[t] != k)
          add(out, 2, t, -1, 0,
              "task appears in sequence of actor " +
                  inst.actors[k].external_id + " but is assigned to " +
                  inst.actors[s.assignment[t]].external_id);
      }
    for (int i = 0; i < n; ++i) {
      if (seen[i] != 1)
        add(out, 2, i, -1, seen[i],
            "task appears " + std::to_string(seen[i]) +
                " times across sequences");
      if (!inst.tasks[i].capable(s.assignment[i]))
        add(out, 2, i, -1, 0, "assigned actor is not capable");
    }
  }

  // Eq. 3: processing durations.
  for (int i = 0; i < n; ++i) {
    auto it = inst.tasks[i].durations.find(s.assignment[i]);
    if (it == inst.tasks[i].durations.end()) continue;  // reported above
    Seconds need = s.start[i] + it->second;
    if (s.end[i] < need)
      add(out, 3, i, -1, need - s.end[i], "end < start + duration");
  }

  // Eq. 4 / 5: routing gaps and level monotonicity along each sequence.
  for (int k = 0; k < num_actors; ++k) {
    const auto& seq = s.sequences[k];
    for (std::size_t p = 0; p + 1 < seq.size(); ++p) {
      int i = seq[p], j = seq[p + 1];
      Seconds gap = inst.transition(k, i, j);
      if (s.start[j] < s.end[i] + gap)
        add(out, 4, i, j, s.end[i] + gap - s.start[j],
            "sequence gap below transition time");
      if (s.level[j] < s.level[i])
        add(out, 5, i, j, s.level[i] - s.level[j],
            "level decreases along sequence");
    }
  }

  // Eq. 6: temporal constraints.
  auto anchor_time = [&](int task, Anchor a) -> Seconds {
    if (task == kOrigin) return 0;
    return a == Anchor::Start ? s.start[task] : s.end[task];
  };
  for (const auto& c : inst.temporal) {
    Seconds diff = anchor_time(c.v, c.eta_v) - anchor_time(c.u, c.eta_u);
    Seconds upper = strict_windows
                        ? c.upper
                        : buffered_upper(c.lower, c.upper,
                                         inst.safety_buffer_fraction);
    if (diff < c.lower)
      add(out, 6, c.u, c.v, c.lower - diff, "temporal lower bound violated");
    if (diff > upper)
      add(out, 6, c.u, c.v, diff - upper, "temporal upper bound violated");
  }

  // Eq. 7: node conflicts must split levels.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (s.level[i] == s.level[j] &&
          inst.conflicts.node(i, j, s.assignment[i], s.assignment[j]))
        add(out, 7, i, j, 0, "node-conflicting tasks share a level");

  // Eq. 8: flagged transition edges must split levels.
  for (int k = 0; k < num_actors; ++k) {
    const auto& seq = s.sequences[k];
    for (std::size_t p = 0; p + 1 < seq.size(); ++p) {
      int i = seq[p], j = seq[p + 1];
      if (inst.conflicts.edge(i, j) && s.level[i] == s.level[j])
        add(out, 8, i, j, 0, "edge-conflicting consecutive tasks share a level");
    }
  }

  // Eq. 9: barrier coverage and monotonicity.
  int max_level = 0;
  for (int i = 0; i < n; ++i) max_level = std::max(max_level, s.level[i]);
  if (int(s.barriers.size()) <= max_level) {
    add(out, 9, -1, -1, 0, "missing barrier entries for used levels");
  } else {
    for (int i = 0; i < n; ++i)
      if (s.end[i] > s.barriers[s.level[i]])
        add(out, 9, i, -1, s.end[i] - s.barriers[s.level[i]],
            "task ends after its level barrier");
  }
  for (std::size_t l = 0; l + 1 < s.barriers.size(); ++l)
    if (s.barriers[l] > s.barriers[l + 1])
      add(out, 9, -1, -1, s.barriers[l] - s.barriers[l + 1],
          "barriers not non-decreasing at level " + std::to_string(l));

  // Eq. 10: cross-level starts wait for the earlier barrier.
  if (int(s.barriers.size()) > max_level) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (s.level[i] < s.level[j] && s.barriers[s.level[i]] > s.start[j])
          add(out, 10, i, j, s.barriers[s.level[i]] - s.start[j],
              "task starts before an earlier level's barrier");
  }

  // Eq. 11: objective bookkeeping.
  Seconds max_end = 0;
  for (int i = 0; i < n; ++i) max_end = std::max(max_end, s.end[i]);
  if (s.makespan != max_end)
    add(out, 11, -1, -1, s.makespan - max_end,
        "makespan does not equal max task end");
  if (s.max_level != max_level)
    add(out, 11, -1, -1, s.max_level - max_level,
        "max_level does not equal max task level");

  return out;
}

std::string describe(const std::vector<Violation>& violations,
                     const ProblemInstance& inst) {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "eq" << v.equation;
    if (v.task_u >= 0) os << " u=" << inst.tasks[v.task_u].external_id;
    if (v.task_v >= 0) os << " v=" << inst.tasks[v.task_v].external_id;
    if (v.amount != 0) os << " amount=" << v.amount;
    os << ": " << v.message << "\n";
  }
  return os.str();
}

}  // namespace laser
