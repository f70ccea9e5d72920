#include "laser/bottom.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "laser/validate.hpp"

namespace laser {

namespace {

std::vector<TemporalConstraint> buffered_set(const ProblemInstance& inst) {
  auto out = inst.temporal;
  for (auto& c : out)
    c.upper = buffered_upper(c.lower, c.upper, inst.safety_buffer_fraction);
  return out;
}

bool is_batched(const std::vector<std::vector<int>>& batches, int glue) {
  for (const auto& b : batches)
    for (int g : b)
      if (g == glue) return true;
  return false;
}

// Violations of `bounds` among scheduled tasks, given earliest times.
ViolationSet find_violations(const ProblemInstance& inst,
                             const std::vector<TemporalConstraint>& bounds,
                             const Schedule& s,
                             const std::vector<int>& assignment) {
  auto active = [&](int t) { return t == kOrigin || assignment[t] >= 0; };
  auto at = [&](int t, Anchor a) -> Seconds {
    if (t == kOrigin) return 0;
    return a == Anchor::Start ? s.start[t] : s.end[t];
  };
  ViolationSet out;
  for (std::size_t idx = 0; idx < bounds.size(); ++idx) {
    const auto& c = bounds[idx];
    if (!active(c.u) || !active(c.v)) continue;
    Seconds diff = at(c.v, c.eta_v) - at(c.u, c.eta_u);
    Seconds over = 0;
    if (diff < c.lower) over = c.lower - diff;
    if (c.bounded_above() && diff > c.upper)
      over = std::max(over, diff - c.upper);
    if (over == 0) continue;
    int elem = -1;
    if (c.u >= 0 && inst.tasks[c.u].element >= 0)
      elem = inst.tasks[c.u].element;
    else if (c.v >= 0)
      elem = inst.tasks[c.v].element;
    out.push_back({elem, int(idx), over});
  }
  return out;
}

// Detaches the glues of `element` out of any multi-element batch.
bool split_batches(BatchPlan& plan, const ProblemInstance& inst,
                   int element) {
  for (std::size_t b = 0; b < plan.glue_batches.size(); ++b) {
    auto& batch = plan.glue_batches[b];
    bool has_elem = false, has_other = false;
    for (int g : batch)
      (inst.tasks[g].element == element ? has_elem : has_other) = true;
    if (!has_elem || !has_other) continue;
    std::vector<int> prefix, own, suffix;
    bool seen = false;
    for (int g : batch) {
      if (inst.tasks[g].element == element) {
        own.push_back(g);
        seen = true;
      } else {
        (seen ? suffix : prefix).push_back(g);
      }
    }
    std::vector<std::vector<int>> parts;
    if (!prefix.empty()) parts.push_back(std::move(prefix));
    parts.push_back(std::move(own));
    if (!suffix.empty()) parts.push_back(std::move(suffix));
    plan.glue_batches.erase(plan.glue_batches.begin() + b);
    plan.glue_batches.insert(plan.glue_batches.begin() + b,
                             parts.begin(), parts.end());
    return true;
  }
  return false;
}

}  // namespace

BatchPlan initialize_batches(const ProblemInstance& inst) {
  BatchPlan plan;
  std::map<int, std::vector<int>> glues, screws;
  std::map<int, int> place_of;
  std::vector<int> loose_glues;
  int max_elem = -1;
  for (const auto& t : inst.tasks) {
    max_elem = std::max(max_elem, t.element);
    if (t.kind == TaskKind::Glue) {
      if (t.element >= 0)
        glues[t.element].push_back(t.id);
      else
        loose_glues.push_back(t.id);
    } else if (t.kind == TaskKind::Screw && t.element >= 0) {
      screws[t.element].push_back(t.id);
    } else if (t.kind == TaskKind::Place && t.element >= 0) {
      place_of[t.element] = t.id;
    }
  }

  // runs of adjacent elements coalesce into one batch; a batch fixes its
  // internal order, so it must never chain an edge-conflicting pair
  std::vector<int> current;
  int prev_elem = -2;
  for (const auto& [e, ids] : glues) {
    if (e != prev_elem + 1 && !current.empty()) {
      plan.glue_batches.push_back(current);
      current.clear();
    }
    for (int g : ids) {
      if (!current.empty() && inst.conflicts.edge(current.back(), g)) {
        plan.glue_batches.push_back(current);
        current.clear();
      }
      current.push_back(g);
    }
    prev_elem = e;
  }
  if (!current.empty()) plan.glue_batches.push_back(current);
  for (int g : loose_glues) plan.glue_batches.push_back({g});

  plan.place_merged.assign(std::size_t(max_elem + 1), {});
  for (const auto& [e, ids] : screws) {
    if (!place_of.count(e)) {
      plan.deferred.insert(plan.deferred.end(), ids.begin(), ids.end());
      continue;
    }
    // center plus the two ends stabilize the element; the merged node
    // executes place then screws in order, so any screw that would sit
    // edge-conflicting behind its predecessor in that chain is deferred
    std::vector<int> wanted = ids;
    if (int(ids.size()) > 3)
      wanted = {ids.front(), ids[ids.size() / 2], ids.back()};
    std::vector<int> critical;
    int prev = place_of[e];
    for (int s : wanted)
      if (!inst.conflicts.edge(prev, s)) {
        critical.push_back(s);
        prev = s;
      }
    plan.place_merged[e] = critical;
    for (int s : ids)
      if (std::find(critical.begin(), critical.end(), s) == critical.end())
        plan.deferred.push_back(s);
  }
  return plan;
}

std::vector<TemporalConstraint> apply_relaxation(
    const std::vector<TemporalConstraint>& temporal, const BatchPlan& plan,
    const ProblemInstance& inst) {
  auto out = temporal;
  for (auto& c : out) {
    if (!c.bounded_above() || c.u < 0 || c.v < 0) continue;
    if (inst.tasks[c.u].kind != TaskKind::Glue) continue;
    if (inst.tasks[c.v].kind != TaskKind::Place) continue;
    if (is_batched(plan.glue_batches, c.u)) c.upper = kInfinity;
  }
  return out;
}

SkeletonInstance build_skeleton(const ProblemInstance& inst,
                                const BatchPlan& plan, bool relax_windows) {
  SkeletonInstance skel;
  ProblemInstance& red = skel.instance;
  red.actors = inst.actors;
  red.grid = inst.grid;
  red.adhesive_open_s = inst.adhesive_open_s;
  red.adhesive_close_s = inst.adhesive_close_s;
  red.safety_buffer_fraction = inst.safety_buffer_fraction;

  const int n = inst.task_count();
  std::vector<int> node_of(n, -1);
  std::vector<int> batch_of_glue(n, -1);
  for (std::size_t b = 0; b < plan.glue_batches.size(); ++b)
    for (int g : plan.glue_batches[b]) batch_of_glue[g] = int(b);
  std::vector<char> deferred(n, 0);
  for (int s : plan.deferred) deferred[s] = 1;
  std::vector<char> merged(n, 0);
  for (const auto& ids : plan.place_merged)
    for (int s : ids) merged[s] = 1;

  auto add_node = [&](TaskPrimitive t, std::vector<int> expansion) {
    t.id = int(red.tasks.size());
    for (int orig : expansion) node_of[orig] = t.id;
    red.tasks.push_back(std::move(t));
    skel.expansion.push_back(std::move(expansion));
    return red.tasks.back().id;
  };

  std::vector<char> emitted_batch(plan.glue_batches.size(), 0);
  for (const auto& orig : inst.tasks) {
    if (deferred[orig.id] || merged[orig.id]) continue;
    if (orig.kind == TaskKind::Glue) {
      int b = batch_of_glue[orig.id];
      if (b < 0) {
        add_node(orig, {orig.id});
        continue;
      }
      if (emitted_batch[b]) continue;
      emitted_batch[b] = 1;
      const auto& members = plan.glue_batches[b];
      if (members.size() == 1) {
        add_node(inst.tasks[members[0]], {members[0]});
        continue;
      }
      TaskPrimitive node;
      node.kind = TaskKind::BatchedGlue;
      node.external_id = "batch_" + std::to_string(b);
      node.element = inst.tasks[members.front()].element;
      node.coords = {inst.tasks[members.front()].entry(),
                     inst.tasks[members.back()].exit()};
      node.tool = inst.tasks[members.front()].tool;
      node.members = members;
      for (const auto& [k, d0] : inst.tasks[members[0]].durations) {
        Seconds total = d0;
        bool ok = true;
        for (std::size_t m = 1; m < members.size(); ++m) {
          const auto& tm = inst.tasks[members[m]];
          if (!tm.capable(k)) {
            ok = false;
            break;
          }
          total += inst.transition(k, members[m - 1], members[m]);
          total += tm.durations.at(k);
        }
        if (ok) node.durations[k] = total;
      }
      for (int g : members)
        node.footprint.insert(node.footprint.end(),
                              inst.tasks[g].footprint.begin(),
                              inst.tasks[g].footprint.end());
      std::sort(node.footprint.begin(), node.footprint.end());
      node.footprint.erase(
          std::unique(node.footprint.begin(), node.footprint.end()),
          node.footprint.end());
      add_node(std::move(node), members);
    } else if (orig.kind == TaskKind::Place && orig.element >= 0 &&
               orig.element < int(plan.place_merged.size()) &&
               !plan.place_merged[orig.element].empty()) {
      const auto& crit = plan.place_merged[orig.element];
      TaskPrimitive node = orig;
      node.durations.clear();
      for (const auto& [k, dp] : orig.durations) {
        Seconds total = dp;
        bool ok = true;
        int prev = orig.id;
        for (int s : crit) {
          if (!inst.tasks[s].capable(k)) {
            ok = false;
            break;
          }
          total += inst.transition(k, prev, s);
          total += inst.tasks[s].durations.at(k);
          prev = s;
        }
        if (ok) node.durations[k] = total;
      }
      for (int s : crit)
        node.footprint.insert(node.footprint.end(),
                              inst.tasks[s].footprint.begin(),
                              inst.tasks[s].footprint.end());
      std::sort(node.footprint.begin(), node.footprint.end());
      node.footprint.erase(
          std::unique(node.footprint.begin(), node.footprint.end()),
          node.footprint.end());
      std::vector<int> expansion = {orig.id};
      expansion.insert(expansion.end(), crit.begin(), crit.end());
      add_node(std::move(node), std::move(expansion));
    } else {
      add_node(orig, {orig.id});
    }
  }

  // temporal bounds map onto the containing nodes; internal ones drop out
  auto source =
      relax_windows ? apply_relaxation(inst.temporal, plan, inst)
                    : inst.temporal;
  for (const auto& c : source) {
    int mu = c.u == kOrigin ? kOrigin : node_of[c.u];
    int mv = c.v == kOrigin ? kOrigin : node_of[c.v];
    if ((c.u != kOrigin && mu < 0) || (c.v != kOrigin && mv < 0)) continue;
    if (mu == mv && mu != kOrigin) continue;
    TemporalConstraint mapped = c;
    mapped.u = mu;
    mapped.v = mv;
    red.temporal.push_back(mapped);
  }

  for (std::uint64_t key : inst.conflicts.node_entries()) {
    int i, j, a, b;
    ConflictMatrices::unpack_node(key, i, j, a, b);
    int mi = node_of[i], mj = node_of[j];
    if (mi < 0 || mj < 0 || mi == mj) continue;
    red.conflicts.set_node(mi, mj, a, b);
  }
  const int m = red.task_count();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      if (inst.conflicts.edge(skel.expansion[a].back(),
                              skel.expansion[b].front()))
        red.conflicts.set_edge(a, b);
    }

  for (int k = 0; k < red.actor_count(); ++k)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (a == b) continue;
        if (!red.tasks[a].capable(k) || !red.tasks[b].capable(k)) continue;
        red.set_transition(k, a, b,
                           inst.transition(k, skel.expansion[a].back(),
                                           skel.expansion[b].front()));
      }
  return skel;
}

BottomResult solve_bottom(const ProblemInstance& inst,
                          const BottomConfig& cfg) {
  const int n = inst.task_count();
  const int num_actors = inst.actor_count();
  auto buffered = buffered_set(inst);

  BatchPlan plan = initialize_batches(inst);
  BottomResult res;

  std::vector<int> assignment, levels;
  std::vector<std::vector<int>> seqs;
  Schedule partial;
  bool strict_mode = false;

  while (true) {
    SkeletonInstance skel = build_skeleton(inst, plan, !strict_mode);
    if (skel.instance.task_count() > 100 && res.warnings.empty())
      res.warnings.push_back(
          "skeleton has " + std::to_string(skel.instance.task_count()) +
          " active nodes; CP solve times degrade above 100");
    CpModel model =
        make_model(skel.instance, cfg.lambda, cfg.cp_time_limit_s);
    SolveReport rep = solve_monolithic(model);
    ++res.iterations;
    if (!rep.schedule)
      throw IterationLimitError(
          "bottom-session skeleton has no schedule (status " +
          std::to_string(int(rep.status)) + ")");

    // expand skeleton decisions back to the primitives
    assignment.assign(n, -1);
    levels.assign(n, 0);
    seqs.assign(num_actors, {});
    const Schedule& sk = *rep.schedule;
    for (int k = 0; k < num_actors; ++k)
      for (int node : sk.sequences[k])
        for (int orig : skel.expansion[node]) {
          seqs[k].push_back(orig);
          assignment[orig] = k;
          levels[orig] = sk.level[node];
        }

    auto relaxed = apply_relaxation(buffered, plan, inst);
    auto times = propagate_times(inst, relaxed, assignment, seqs, levels);
    if (!times)
      throw IterationLimitError(
          "expanded bottom-session skeleton is temporally inconsistent");
    ViolationSet v = find_violations(inst, buffered, *times, assignment);
    if (v.empty()) {
      partial = *times;
      break;
    }

    bool progress = false;
    std::vector<int> elems;
    for (const auto& w : v)
      if (w.element >= 0) elems.push_back(w.element);
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    for (int e : elems)
      if (split_batches(plan, inst, e)) {
        progress = true;
        ++res.splits;
      }
    if (progress) {
      if (res.splits > cfg.max_splits)
        throw IterationLimitError("bottom-session split limit exceeded (" +
                                  std::to_string(res.splits) + " splits)");
      continue;
    }
    if (!strict_mode) {
      strict_mode = true;
      continue;
    }
    std::ostringstream os;
    os << "window violations persist at singleton batches:";
    for (const auto& w : v)
      os << " element=" << w.element << " over=" << w.overshoot << "s;";
    throw IterationLimitError(os.str());
  }

  // deferred screws drop into idle slots at or after their place level
  std::vector<int> deferred = plan.deferred;
  int max_elem = -1;
  for (const auto& t : inst.tasks) max_elem = std::max(max_elem, t.element);
  std::vector<int> place_of_elem(std::size_t(max_elem + 1), -1);
  for (const auto& t : inst.tasks)
    if (t.kind == TaskKind::Place && t.element >= 0)
      place_of_elem[t.element] = t.id;
  auto base_level = [&](int s) {
    int e = inst.tasks[s].element;
    int pl = e >= 0 ? place_of_elem[e] : -1;
    return pl >= 0 && assignment[pl] >= 0 ? levels[pl] : 0;
  };
  std::sort(deferred.begin(), deferred.end(), [&](int a, int b) {
    int la = base_level(a), lb = base_level(b);
    return la != lb ? la < lb : a < b;
  });

  for (int s : deferred) {
    int max_lvl = partial.max_level;
    bool placed = false;
    struct Slot {
      int lvl, actor;
      Seconds idle;
    };
    std::vector<Slot> slots;
    for (int lvl = base_level(s); lvl <= max_lvl; ++lvl)
      for (int k = 0; k < num_actors; ++k) {
        if (!inst.tasks[s].capable(k)) continue;
        Seconds last_end = lvl > 0 ? partial.barriers[lvl - 1] : 0;
        for (int t : seqs[k])
          if (assignment[t] == k && levels[t] == lvl)
            last_end = std::max(last_end, partial.end[t]);
        slots.push_back({lvl, k, partial.barriers[lvl] - last_end});
      }
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
      if (a.lvl != b.lvl) return a.lvl < b.lvl;
      if (a.idle != b.idle) return a.idle > b.idle;
      return a.actor < b.actor;
    });
    for (const auto& slot : slots) {
      auto& seq = seqs[slot.actor];
      std::size_t pos = 0;
      while (pos < seq.size() && levels[seq[pos]] <= slot.lvl) ++pos;
      int prev = pos > 0 ? seq[pos - 1] : -1;
      int next = pos < seq.size() ? int(seq[pos]) : -1;
      if (prev >= 0 && levels[prev] == slot.lvl &&
          inst.conflicts.edge(prev, s))
        continue;
      if (next >= 0 && levels[next] == slot.lvl &&
          inst.conflicts.edge(s, next))
        continue;
      bool clash = false;
      for (int u = 0; u < n && !clash; ++u)
        if (assignment[u] >= 0 && levels[u] == slot.lvl &&
            inst.conflicts.node(s, u, slot.actor, assignment[u]))
          clash = true;
      if (clash) continue;
      assignment[s] = slot.actor;
      levels[s] = slot.lvl;
      seq.insert(seq.begin() + pos, s);
      auto t2 = propagate_times(inst, buffered, assignment, seqs, levels);
      if (t2) {
        partial = *t2;
        placed = true;
        break;
      }
      seq.erase(seq.begin() + pos);
      assignment[s] = -1;
      levels[s] = 0;
    }
    if (placed) continue;

    // fall back to a fresh trailing level
    std::vector<int> actors;
    for (int k = 0; k < num_actors; ++k)
      if (inst.tasks[s].capable(k)) actors.push_back(k);
    std::sort(actors.begin(), actors.end(), [&](int a, int b) {
      Seconds da = inst.tasks[s].durations.at(a);
      Seconds db = inst.tasks[s].durations.at(b);
      return da != db ? da < db : a < b;
    });
    for (int k : actors) {
      assignment[s] = k;
      levels[s] = max_lvl + 1;
      seqs[k].push_back(s);
      auto t2 = propagate_times(inst, buffered, assignment, seqs, levels);
      if (t2) {
        partial = *t2;
        placed = true;
        break;
      }
      seqs[k].pop_back();
      assignment[s] = -1;
      levels[s] = 0;
    }
    if (!placed)
      throw InsertionError("deferred screw " + inst.tasks[s].external_id +
                           " cannot be inserted into any level");
  }

  res.schedule = partial;
  return res;
}

}  // namespace laser
