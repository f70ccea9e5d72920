#include "doctest.h"

#include "support.hpp"

#include "laser/generator.hpp"
#include "laser/sim.hpp"
#include "laser/solver.hpp"
#include "laser/top.hpp"
#include "laser/validate.hpp"

using namespace laser;

namespace {

// Deterministic two-actor, two-level fixture solved by the monolithic
// solver so the schedule is oracle-valid by construction.
struct Solved {
  ProblemInstance inst;
  Schedule sched;

  explicit Solved(int screws_per_level = 3) {
    inst.actors.push_back(support::make_actor(0));
    inst.actors.push_back(support::make_actor(1));
    int n = 2 * screws_per_level;
    for (int i = 0; i < n; ++i)
      inst.tasks.push_back(support::make_task(
          i, TaskKind::Screw, {double(i % screws_per_level), double(i % 2)},
          {{0, 16}, {1, 11}}));
    // one conflicting pair forces a second level
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) inst.conflicts.set_node(0, 1, a, b);
    support::finalize(inst);
    auto rep = solve_monolithic(make_model(inst, 1.0, 20.0));
    REQUIRE(rep.schedule);
    sched = *rep.schedule;
    REQUIRE(validate_schedule(inst, sched, true).empty());
    REQUIRE(sched.max_level >= 1);
  }
};

bool same_trace(const SimReport& a, const SimReport& b) {
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.task != y.task || x.actor != y.actor || x.level != y.level)
      return false;
    if (std::abs(x.start - y.start) > 1e-9 ||
        std::abs(x.end - y.end) > 1e-9)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("compile batches consecutive same-kind tasks of one level") {
  Schedule s;
  s.assignment = {0, 0, 0};
  s.sequences = {{0, 1, 2}};
  s.level = {0, 0, 0};
  s.start = {0, 16, 32};
  s.end = {16, 32, 48};
  s.barriers = {48};
  s.makespan = 48;
  s.max_level = 0;
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  for (int i = 0; i < 3; ++i)
    inst.tasks.push_back(
        support::make_task(i, TaskKind::Screw, {double(i), 0.0}, {{0, 16}}));
  support::finalize(inst);

  auto objects = compile_schedule(s, inst);
  REQUIRE(objects.size() == 1);
  CHECK(objects[0].tasks == std::vector<int>{0, 1, 2});

  // alternating kinds break the batch
  inst.tasks[1].kind = TaskKind::Glue;
  auto split = compile_schedule(s, inst);
  CHECK(split.size() == 3);

  // a level boundary breaks the batch too
  inst.tasks[1].kind = TaskKind::Screw;
  s.level = {0, 1, 1};
  s.barriers = {16, 48};
  s.max_level = 1;
  auto leveled = compile_schedule(s, inst);
  CHECK(leveled.size() == 2);
}

TEST_CASE("zero-noise replay is violation-free and barrier-safe") {
  Solved f;
  SimReport rep = simulate(f.inst, f.sched, {});
  CHECK(rep.window_violations.empty());
  CHECK_FALSE(rep.halted);
  CHECK(rep.completed == f.inst.task_count());
  CHECK(support::barrier_safe(rep.events));
  CHECK(rep.makespan >= double(f.sched.makespan) - 1e-9);
  CHECK(int(rep.barrier_release.size()) == f.sched.max_level + 1);
}

TEST_CASE("noisy runs stay barrier-safe and deterministic per seed") {
  Solved f;
  for (auto kind :
       {NoiseModel::Kind::Gaussian, NoiseModel::Kind::BoundedUniform}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      NoiseModel noise{kind, 0.05, seed};
      SimReport a = simulate(f.inst, f.sched, noise);
      SimReport b = simulate(f.inst, f.sched, noise);
      CHECK(same_trace(a, b));
      CHECK(support::barrier_safe(a.events));
      CHECK(a.completed == f.inst.task_count());
    }
  }
  NoiseModel n1{NoiseModel::Kind::BoundedUniform, 0.05, 1};
  NoiseModel n2{NoiseModel::Kind::BoundedUniform, 0.05, 2};
  CHECK_FALSE(same_trace(simulate(f.inst, f.sched, n1),
                         simulate(f.inst, f.sched, n2)));
}

TEST_CASE("event-loop and agent executors produce identical traces") {
  Solved f;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    NoiseModel noise{NoiseModel::Kind::Gaussian, 0.04, seed};
    SimReport a = simulate(f.inst, f.sched, noise);
    SimReport b = simulate_agents(f.inst, f.sched, noise);
    CHECK(same_trace(a, b));
    CHECK(a.barrier_release == b.barrier_release);
    CHECK(a.halted == b.halted);
  }
}

TEST_CASE("a stalled task pauses the level, never crosses the barrier") {
  Solved f;
  // stall a level-0 task by 10x
  int victim = -1;
  for (int i = 0; i < f.inst.task_count(); ++i)
    if (f.sched.level[i] == 0) victim = i;
  REQUIRE(victim >= 0);
  FaultSpec fault;
  fault.task = victim;
  fault.stall_factor = 10.0;
  SimReport rep = fault_inject(f.inst, f.sched, fault);
  CHECK_FALSE(rep.halted);
  CHECK(rep.completed == f.inst.task_count());
  CHECK(support::barrier_safe(rep.events));
  // the stall stretches the realized makespan
  SimReport clean = simulate(f.inst, f.sched, {});
  CHECK(rep.makespan > clean.makespan);
}

TEST_CASE("fail faults halt at the last fully completed level") {
  Solved f;
  int lvl0 = -1, lvl_last = -1;
  for (int i = 0; i < f.inst.task_count(); ++i) {
    if (f.sched.level[i] == 0) lvl0 = i;
    if (f.sched.level[i] == f.sched.max_level) lvl_last = i;
  }
  SUBCASE("fail on the first level") {
    FaultSpec fault;
    fault.task = lvl0;
    fault.fail = true;
    SimReport rep = fault_inject(f.inst, f.sched, fault);
    CHECK(rep.halted);
    CHECK(rep.checkpoint_level == -1);  // no level completed
    CHECK(support::barrier_safe(rep.events));
    // nothing from a later level ever starts
    for (const auto& e : rep.events) CHECK(e.level == 0);
  }
  SUBCASE("fail on the last level") {
    FaultSpec fault;
    fault.task = lvl_last;
    fault.fail = true;
    SimReport rep = fault_inject(f.inst, f.sched, fault);
    CHECK(rep.halted);
    CHECK(rep.checkpoint_level == f.sched.max_level - 1);
    CHECK(support::barrier_safe(rep.events));
  }
}

TEST_CASE("makespan grows monotonically when durations only grow") {
  Solved f;
  SimReport clean = simulate(f.inst, f.sched, {});
  for (double factor : {1.5, 2.0, 4.0}) {
    FaultSpec fault;
    fault.task = 2;
    fault.stall_factor = factor;
    SimReport rep = fault_inject(f.inst, f.sched, fault);
    CHECK(rep.makespan >= clean.makespan - 1e-9);
  }
}

TEST_CASE("buffered schedules survive 5 percent noise on a real instance") {
  SlabSpec spec;
  spec.session = "top";
  spec.top_screw_limit = 40;
  spec.buffer_fraction = 0.10;
  ProblemInstance inst = generate_slab_instance(spec, 2);
  TopConfig cfg;
  cfg.time_budget_s = 30.0;
  TopResult res = solve_top(inst, cfg);
  REQUIRE(validate_schedule(inst, res.schedule, false).empty());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    NoiseModel noise{NoiseModel::Kind::BoundedUniform, 0.05, seed};
    SimReport rep = simulate(inst, res.schedule, noise);
    CHECK(rep.window_violations.empty());
    CHECK(support::barrier_safe(rep.events));
  }
}
