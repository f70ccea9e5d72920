#include "laser/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "laser/bottom.hpp"
#include "laser/solver.hpp"
#include "laser/top.hpp"
#include "laser/validate.hpp"

namespace laser {

namespace {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Feasible:
      return "feasible";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Timeout:
      return "timeout";
  }
  return "unknown";
}

}  // namespace

std::vector<BenchmarkJob> default_suite() {
  std::vector<BenchmarkJob> jobs;
  for (int elems : {2, 4, 6, 8}) {
    BenchmarkJob j;
    j.spec.session = "bottom";
    j.spec.elements = elems;
    j.name = "bottom-" + std::to_string(elems);
    j.mode = "bottom";
    j.time_limit_s = 20.0;
    jobs.push_back(j);
  }
  {
    BenchmarkJob j;
    j.spec.session = "bottom";
    j.spec.elements = 2;
    j.spec.screws_per_element = 2;
    j.name = "bottom-2-monolithic";
    j.mode = "monolithic";
    j.time_limit_s = 30.0;
    jobs.push_back(j);
  }
  for (int limit : {27, 120, 654}) {
    BenchmarkJob j;
    j.spec.session = "top";
    j.spec.top_screw_limit = limit;
    j.name = "top-" + std::to_string(limit);
    j.mode = "top";
    j.time_limit_s = 60.0;
    jobs.push_back(j);
  }
  return jobs;
}

BenchmarkRow run_job(const BenchmarkJob& job) {
  BenchmarkRow row;
  row.name = job.name;
  row.mode = job.mode;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ProblemInstance inst = generate_slab_instance(job.spec, job.seed);
    row.tasks = inst.task_count();
    std::string mode = job.mode;
    if (mode == "auto") mode = job.spec.session == "top" ? "top" : "bottom";

    Schedule sched;
    if (mode == "monolithic") {
      CpModel model = make_model(inst, 1.0, job.time_limit_s);
      SolveReport rep = solve_monolithic(model);
      row.status = status_name(rep.status);
      if (!rep.schedule) return row;
      sched = *rep.schedule;
      row.objective = rep.objective;
    } else if (mode == "bottom") {
      BottomConfig cfg;
      cfg.cp_time_limit_s = job.time_limit_s;
      BottomResult r = solve_bottom(inst, cfg);
      sched = r.schedule;
      row.status = "feasible";
      row.objective = objective_value(sched, 1.0);
    } else if (mode == "top") {
      TopConfig cfg;
      cfg.time_budget_s = job.time_limit_s;
      TopResult r = solve_top(inst, cfg);
      sched = r.schedule;
      row.status = "feasible";
      row.objective = objective_value(sched, 1.0);
      row.assigned_fraction = r.assigned_fraction;
    } else {
      row.status = "error";
      return row;
    }
    row.makespan = sched.makespan;
    row.levels = sched.max_level + 1;
    row.valid = validate_schedule(inst, sched, true).empty();
  } catch (const Error&) {
    row.status = "error";
  }
  row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
                   .count();
  return row;
}

std::vector<BenchmarkRow> run_benchmark(const std::vector<BenchmarkJob>& jobs,
                                        int workers) {
  if (workers <= 0) {
    if (const char* env = std::getenv("LASER_WORKERS"))
      workers = std::atoi(env);
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, std::max(int(jobs.size()), 1));

  std::vector<BenchmarkRow> rows(jobs.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      rows[i] = run_job(jobs[i]);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "name,tasks,mode,status,valid,wall_s,makespan,levels,objective,"
        "assigned_fraction\n";
  for (const auto& r : rows)
    os << r.name << "," << r.tasks << "," << r.mode << "," << r.status << ","
       << (r.valid ? 1 : 0) << "," << r.wall_s << "," << r.makespan << ","
       << r.levels << "," << r.objective << "," << r.assigned_fraction
       << "\n";
  return os.str();
}

}  // namespace laser
