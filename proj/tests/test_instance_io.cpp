#include "doctest.h"

#include "support.hpp"

#include "laser/generator.hpp"
#include "laser/instance_io.hpp"

using namespace laser;

namespace {

const char* kMinimal = R"({
  "schema": "laser/1",
  "actors": [{"id": "r1", "travel_speed": 1.0}],
  "tasks": [{"id": "t0", "kind": "screw", "coords": [[0.0, 0.0]],
             "durations": {"r1": 10}}]
})";

}  // namespace

TEST_CASE("minimal instance loads") {
  ProblemInstance inst = parse_instance(kMinimal);
  CHECK(inst.task_count() == 1);
  CHECK(inst.actor_count() == 1);
  CHECK(inst.tasks[0].external_id == "t0");
  CHECK(inst.tasks[0].durations.at(0) == 10);
  CHECK(inst.tasks[0].tool == default_tool(TaskKind::Screw));
}

TEST_CASE("empty durations map is a capability error") {
  std::string text = R"({
    "schema": "laser/1",
    "actors": [{"id": "r1"}],
    "tasks": [{"id": "t0", "kind": "screw", "coords": [[0,0]],
               "durations": {}}]
  })";
  CHECK_THROWS_AS(parse_instance(text), CapabilityError);
}

TEST_CASE("schema tag is mandatory") {
  CHECK_THROWS_AS(parse_instance("{\"actors\": [], \"tasks\": []}"),
                  ParseError);
  CHECK_THROWS_AS(parse_instance("not json"), ParseError);
}

TEST_CASE("decimal seconds round half up with a warning") {
  std::string text = R"({
    "schema": "laser/1",
    "actors": [{"id": "r1"}],
    "tasks": [{"id": "t0", "kind": "screw", "coords": [[0,0]],
               "durations": {"r1": 9.5}}]
  })";
  std::vector<std::string> warnings;
  ProblemInstance inst = parse_instance(text, &warnings);
  CHECK(inst.tasks[0].durations.at(0) == 10);
  CHECK(!warnings.empty());
}

TEST_CASE("transitions: same point, same tool, no prep gives zero") {
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.tasks.push_back(
      support::make_task(0, TaskKind::Screw, {1.0, 1.0}, {{0, 5}}));
  inst.tasks.push_back(
      support::make_task(1, TaskKind::Screw, {1.0, 1.0}, {{0, 5}}));
  compute_transitions(inst);
  CHECK(inst.transition(0, 0, 1) == 0);
  CHECK(inst.transition(0, 1, 0) == 0);
}

TEST_CASE("transitions: travel + tool switch + prep") {
  ProblemInstance inst;
  Actor a = support::make_actor(0, 1.0);
  a.tool_switch_times[{"glue_effector", "screw_effector"}] = 30;
  a.prep_times[TaskKind::Screw] = 5;
  inst.actors.push_back(a);
  inst.tasks.push_back(
      support::make_task(0, TaskKind::Glue, {0.0, 0.0}, {{0, 5}}));
  inst.tasks.push_back(
      support::make_task(1, TaskKind::Screw, {2.0, 0.0}, {{0, 5}}));
  compute_transitions(inst);
  // 2 m at 1 m/s + 30 s switch + 5 s prep
  CHECK(inst.transition(0, 0, 1) == 37);
  // reverse direction has no screw prep
  CHECK(inst.transition(0, 1, 0) == 32);
}

TEST_CASE("transitions are asymmetric when prep differs by kind") {
  ProblemInstance inst;
  Actor a = support::make_actor(0, 1.0);
  a.prep_times[TaskKind::Pick] = 11;
  inst.actors.push_back(a);
  inst.tasks.push_back(
      support::make_task(0, TaskKind::Pick, {0.0, 0.0}, {{0, 5}}));
  inst.tasks[0].tool = "gripper";
  inst.tasks.push_back(
      support::make_task(1, TaskKind::Place, {1.0, 0.0}, {{0, 5}}));
  inst.tasks[1].tool = "gripper";
  compute_transitions(inst);
  CHECK(inst.transition(0, 1, 0) - inst.transition(0, 0, 1) == 11);
}

TEST_CASE("explicit transition entries override computed values") {
  std::string text = R"({
    "schema": "laser/1",
    "actors": [{"id": "r1", "travel_speed": 1.0}],
    "tasks": [
      {"id": "t0", "kind": "screw", "coords": [[0,0]], "durations": {"r1": 5}},
      {"id": "t1", "kind": "screw", "coords": [[3,4]], "durations": {"r1": 5}}
    ],
    "transitions": [["r1", "t0", "t1", 99]]
  })";
  ProblemInstance inst = parse_instance(text);
  CHECK(inst.transition(0, 0, 1) == 99);
  CHECK(inst.transition(0, 1, 0) == 5);  // computed: 5 m at 1 m/s
}

TEST_CASE("instance JSON round-trips") {
  SlabSpec spec;
  spec.elements = 2;
  spec.screws_per_element = 3;
  ProblemInstance inst = generate_slab_instance(spec, 7);
  std::string once = instance_to_json(inst);
  ProblemInstance back = parse_instance(once);
  CHECK(instance_to_json(back) == once);
  CHECK(back.task_count() == inst.task_count());
  CHECK(back.conflicts.node_count() == inst.conflicts.node_count());
  CHECK(back.conflicts.edge_count() == inst.conflicts.edge_count());
}

TEST_CASE("validate_instance rejects broken invariants") {
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.tasks.push_back(
      support::make_task(0, TaskKind::Screw, {0.0, 0.0}, {{0, 5}}));

  SUBCASE("nonpositive duration") {
    inst.tasks[0].durations[0] = 0;
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
  }
  SUBCASE("screw with two coords") {
    inst.tasks[0].coords.push_back({1.0, 1.0});
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
  }
  SUBCASE("lower above upper") {
    inst.temporal.push_back({0, 0, Anchor::Start, Anchor::End, 10, 5});
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
  }
  SUBCASE("adhesive windows ordered") {
    inst.adhesive_open_s = 7200;
    inst.adhesive_close_s = 900;
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
  }
  SUBCASE("glue may carry two coords") {
    inst.tasks[0].kind = TaskKind::Glue;
    inst.tasks[0].coords.push_back({1.0, 1.0});
    CHECK_NOTHROW(validate_instance(inst));
  }
}
