#include "doctest.h"

#include <sstream>
#include <string>

#include "support.hpp"

#include "laser/benchmark.hpp"
#include "laser/gantt.hpp"
#include "laser/generator.hpp"
#include "laser/instance_io.hpp"
#include "laser/solver.hpp"
#include "laser/validate.hpp"

using namespace laser;

namespace {

int count_of(const std::string& haystack, const std::string& needle) {
  int n = 0;
  for (std::size_t at = haystack.find(needle); at != std::string::npos;
       at = haystack.find(needle, at + needle.size()))
    ++n;
  return n;
}

// Small solved fixture shared by the rendering tests.
struct Solved {
  ProblemInstance inst;
  Schedule sched;

  Solved() {
    inst.actors.push_back(support::make_actor(0));
    inst.actors.push_back(support::make_actor(1));
    for (int i = 0; i < 4; ++i)
      inst.tasks.push_back(support::make_task(
          i, TaskKind::Screw, {double(i), 0.0}, {{0, 16}, {1, 11}}));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) inst.conflicts.set_node(0, 1, a, b);
    support::finalize(inst);
    auto rep = solve_monolithic(make_model(inst, 1.0, 20.0));
    REQUIRE(rep.schedule);
    sched = *rep.schedule;
    REQUIRE(sched.max_level >= 1);
  }
};

}  // namespace

TEST_CASE("svg has one label per actor, one bar per task, one rule per level") {
  Solved f;
  std::string svg = gantt_svg(f.inst, f.sched);
  CHECK(count_of(svg, "<rect x=") == f.inst.task_count());
  CHECK(count_of(svg, "stroke-dasharray") == f.sched.max_level + 1);
  for (const auto& a : f.inst.actors)
    CHECK(svg.find(">" + a.external_id + "<") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("single-task svg draws one bar and one barrier rule") {
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.tasks.push_back(
      support::make_task(0, TaskKind::Screw, {0.0, 0.0}, {{0, 10}}));
  support::finalize(inst);
  auto rep = solve_monolithic(make_model(inst));
  REQUIRE(rep.schedule);
  std::string svg = gantt_svg(inst, *rep.schedule);
  CHECK(count_of(svg, "<rect x=") == 1);
  CHECK(count_of(svg, "stroke-dasharray") == 1);
}

TEST_CASE("csv header and row count match the schedule") {
  Solved f;
  std::string csv = gantt_csv(f.inst, f.sched);
  std::istringstream is(csv);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "actor,task,kind,element,level,start,end");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == f.inst.task_count());
  CHECK(csv.find("screw") != std::string::npos);
}

TEST_CASE("schedule json round-trips through parse_schedule") {
  Solved f;
  std::string json = schedule_to_json(f.sched, f.inst);
  Schedule back = parse_schedule(json, f.inst);
  CHECK(back.assignment == f.sched.assignment);
  CHECK(back.sequences == f.sched.sequences);
  CHECK(back.level == f.sched.level);
  CHECK(back.start == f.sched.start);
  CHECK(back.end == f.sched.end);
  CHECK(back.barriers == f.sched.barriers);
  CHECK(back.makespan == f.sched.makespan);
  CHECK(back.max_level == f.sched.max_level);
  CHECK(validate_schedule(f.inst, back, true).empty());
}

TEST_CASE("benchmark rows come back in job order with sane fields") {
  std::vector<BenchmarkJob> jobs;
  {
    BenchmarkJob j;
    j.name = "tiny-bottom";
    j.spec.elements = 2;
    j.spec.screws_per_element = 2;
    j.seed = 1;
    j.mode = "bottom";
    j.time_limit_s = 30.0;
    jobs.push_back(j);
  }
  {
    BenchmarkJob j;
    j.name = "tiny-top";
    j.spec.session = "top";
    j.spec.top_screw_limit = 20;
    j.seed = 1;
    j.mode = "top";
    j.time_limit_s = 30.0;
    jobs.push_back(j);
  }
  auto rows = run_benchmark(jobs, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].name == "tiny-bottom");
  CHECK(rows[1].name == "tiny-top");
  for (const auto& r : rows) {
    CHECK(r.tasks > 0);
    CHECK(r.valid);
    CHECK(r.makespan > 0);
    CHECK(r.levels >= 1);
    CHECK(r.wall_s >= 0.0);
    CHECK((r.status == "optimal" || r.status == "feasible"));
  }

  std::string csv = benchmark_csv(rows);
  std::istringstream is(csv);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line ==
        "name,tasks,mode,status,valid,wall_s,makespan,levels,objective,"
        "assigned_fraction");
  int n = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++n;
  CHECK(n == 2);
}

TEST_CASE("the default suite is nonempty and well-formed") {
  auto suite = default_suite();
  CHECK_FALSE(suite.empty());
  for (const auto& j : suite) {
    CHECK_FALSE(j.name.empty());
    CHECK(j.time_limit_s > 0.0);
    CHECK((j.mode == "auto" || j.mode == "monolithic" || j.mode == "bottom" ||
           j.mode == "top"));
  }
}
