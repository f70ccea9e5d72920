#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "laser/benchmark.hpp"
#include "laser/bottom.hpp"
#include "laser/gantt.hpp"
#include "laser/generator.hpp"
#include "laser/instance_io.hpp"
#include "laser/sim.hpp"
#include "laser/solver.hpp"
#include "laser/top.hpp"
#include "laser/validate.hpp"

namespace {

int status_exit_code(laser::SolveStatus s) {
  switch (s) {
    case laser::SolveStatus::Optimal:
      return 0;
    case laser::SolveStatus::Feasible:
      return 2;
    case laser::SolveStatus::Infeasible:
      return 3;
    case laser::SolveStatus::Timeout:
      return 4;
  }
  return 4;
}

struct GlobalOpts {
  std::uint64_t seed = 1;
  double time_limit = 60.0;
  bool deterministic = false;
  bool verbose = false;
};

void log_verbose(const GlobalOpts& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"level-barrier assembly scheduling"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--time-limit", g.time_limit, "solver time limit, seconds");
  app.add_flag("--deterministic", g.deterministic,
               "single-threaded, fixed-order execution");
  app.add_flag("--verbose", g.verbose, "progress logging to stderr");

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "write a synthetic instance");
  laser::SlabSpec spec;
  std::string gen_out = "instance.json";
  int top_limit = 0;
  gen->add_option("--session", spec.session, "bottom | top");
  gen->add_option("--width", spec.width_m, "slab width, metres");
  gen->add_option("--length", spec.length_m, "slab length, metres");
  gen->add_option("--elements", spec.elements, "bottom: element count");
  gen->add_option("--screws-per-element", spec.screws_per_element,
                  "bottom: screws per element");
  gen->add_option("--crown-every", spec.crown_every,
                  "bottom: crown element spacing");
  gen->add_option("--screw-area", spec.screw_area_cm2,
                  "top: plate area per screw, cm^2");
  gen->add_option("--top-limit", top_limit,
                  "top: cap on the number of screws (0 = no cap)");
  gen->add_option("--priority-fraction", spec.priority_fraction,
                  "top: share of priority screws");
  gen->add_option("--open", spec.open_s, "adhesive open window, seconds");
  gen->add_option("--close", spec.close_s, "adhesive close window, seconds");
  gen->add_option("--buffer", spec.buffer_fraction,
                  "safety buffer fraction on window uppers");
  gen->add_option("--jitter", spec.duration_jitter,
                  "bottom: duration heterogeneity");
  gen->add_option("-o,--out", gen_out, "output instance path");

  // solve ------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "schedule an instance");
  std::string solve_in, solve_out = "schedule.json", mode = "auto";
  double lambda = 1.0;
  solve->add_option("instance", solve_in, "instance file")->required();
  solve->add_option("--mode", mode, "auto | monolithic | bottom | top");
  solve->add_option("--lambda", lambda, "level-compactness weight");
  solve->add_option("-o,--out", solve_out, "output schedule path");

  // validate ---------------------------------------------------------------
  auto* val = app.add_subcommand("validate", "check a schedule");
  std::string val_inst, val_sched;
  bool strict = false;
  val->add_option("instance", val_inst, "instance file")->required();
  val->add_option("schedule", val_sched, "schedule file")->required();
  val->add_flag("--strict", strict, "raw windows instead of buffered ones");

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "execute under noise");
  std::string sim_inst, sim_sched, noise_kind = "none";
  double magnitude = 0.05;
  int runs = 1;
  int fault_task = -1;
  bool fault_fail = false;
  double stall = 1.0;
  bool agents = false;
  sim->add_option("instance", sim_inst, "instance file")->required();
  sim->add_option("schedule", sim_sched, "schedule file")->required();
  sim->add_option("--noise", noise_kind, "none | gaussian | uniform");
  sim->add_option("--magnitude", magnitude, "noise magnitude (fraction)");
  sim->add_option("--runs", runs, "number of seeded runs");
  sim->add_option("--fault-task", fault_task, "task id to fault");
  sim->add_flag("--fail", fault_fail, "fault halts the actor");
  sim->add_option("--stall", stall, "fault stall factor");
  sim->add_flag("--agents", agents, "message-driven executor");

  // benchmark --------------------------------------------------------------
  auto* bench = app.add_subcommand("benchmark", "run the default suite");
  std::string bench_out;
  int workers = 0;
  bench->add_option("-o,--out", bench_out, "CSV output path (default stdout)");
  bench->add_option("--workers", workers,
                    "parallel jobs (0 = LASER_WORKERS or 1)");

  // gantt ------------------------------------------------------------------
  auto* gantt = app.add_subcommand("gantt", "export a schedule chart");
  std::string g_inst, g_sched, g_svg, g_csv;
  gantt->add_option("instance", g_inst, "instance file")->required();
  gantt->add_option("schedule", g_sched, "schedule file")->required();
  gantt->add_option("--svg", g_svg, "SVG output path");
  gantt->add_option("--csv", g_csv, "CSV output path");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (top_limit > 0) spec.top_screw_limit = top_limit;
      laser::ProblemInstance inst =
          laser::generate_slab_instance(spec, g.seed);
      laser::save_instance(inst, gen_out);
      log_verbose(g, "wrote " + gen_out + " (" +
                         std::to_string(inst.task_count()) + " tasks)");
      std::cout << gen_out << ": " << inst.task_count() << " tasks, "
                << inst.actor_count() << " actors\n";
      return 0;
    }

    if (*solve) {
      std::vector<std::string> warnings;
      laser::ProblemInstance inst = laser::load_instance(solve_in, &warnings);
      for (const auto& w : warnings) log_verbose(g, "warning: " + w);
      if (mode == "auto") {
        bool all_screws = true;
        for (const auto& t : inst.tasks)
          all_screws = all_screws && t.kind == laser::TaskKind::Screw;
        mode = all_screws ? "top" : "bottom";
      }
      laser::Schedule sched;
      int code = 2;
      if (mode == "monolithic") {
        laser::CpModel model = laser::make_model(inst, lambda, g.time_limit);
        laser::SolveReport rep = laser::solve_monolithic(model);
        code = status_exit_code(rep.status);
        log_verbose(g, "nodes explored: " +
                           std::to_string(rep.nodes_explored));
        if (!rep.schedule) {
          std::cerr << "no schedule ("
                    << (rep.status == laser::SolveStatus::Infeasible
                            ? "infeasible"
                            : "timeout")
                    << ")\n";
          return code;
        }
        sched = *rep.schedule;
      } else if (mode == "bottom") {
        laser::BottomConfig cfg;
        cfg.lambda = lambda;
        cfg.cp_time_limit_s = g.time_limit;
        laser::BottomResult r = laser::solve_bottom(inst, cfg);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        log_verbose(g, "iterations: " + std::to_string(r.iterations) +
                           ", splits: " + std::to_string(r.splits));
        sched = r.schedule;
      } else if (mode == "top") {
        laser::TopConfig cfg;
        cfg.lambda = lambda;
        cfg.time_budget_s = g.time_limit;
        laser::TopResult r = laser::solve_top(inst, cfg);
        log_verbose(g, "assigned fraction: " +
                           std::to_string(r.assigned_fraction) +
                           ", utilization: " +
                           std::to_string(r.utilization));
        sched = r.schedule;
      } else {
        std::cerr << "unknown mode: " << mode << "\n";
        return 1;
      }
      laser::save_schedule(sched, inst, solve_out);
      std::cout << solve_out << ": makespan " << sched.makespan << " s, "
                << sched.max_level + 1 << " levels\n";
      return code;
    }

    if (*val) {
      laser::ProblemInstance inst = laser::load_instance(val_inst);
      laser::Schedule sched = laser::load_schedule(val_sched, inst);
      auto violations = laser::validate_schedule(inst, sched, strict);
      if (violations.empty()) {
        std::cout << "valid\n";
        return 0;
      }
      std::cout << violations.size() << " violation(s)\n"
                << laser::describe(violations, inst);
      return 1;
    }

    if (*sim) {
      laser::ProblemInstance inst = laser::load_instance(sim_inst);
      laser::Schedule sched = laser::load_schedule(sim_sched, inst);
      laser::NoiseModel noise;
      if (noise_kind == "gaussian")
        noise.kind = laser::NoiseModel::Kind::Gaussian;
      else if (noise_kind == "uniform")
        noise.kind = laser::NoiseModel::Kind::BoundedUniform;
      else if (noise_kind != "none") {
        std::cerr << "unknown noise kind: " << noise_kind << "\n";
        return 1;
      }
      noise.magnitude = magnitude;
      std::optional<laser::FaultSpec> fault;
      if (fault_task >= 0) fault = laser::FaultSpec{fault_task, fault_fail,
                                                    stall};
      int violations_total = 0;
      for (int r = 0; r < runs; ++r) {
        noise.seed = g.seed + std::uint64_t(r);
        laser::SimReport rep =
            agents ? laser::simulate_agents(inst, sched, noise, fault)
                   : laser::simulate(inst, sched, noise, fault);
        violations_total += int(rep.window_violations.size());
        std::cout << "run " << r << ": makespan " << rep.makespan
                  << " s, completed " << rep.completed << "/"
                  << inst.task_count()
                  << (rep.halted ? ", halted at checkpoint level " +
                                       std::to_string(rep.checkpoint_level)
                                 : std::string())
                  << ", window violations "
                  << rep.window_violations.size() << "\n";
        for (const auto& w : rep.window_violations)
          log_verbose(g, "  " + w);
      }
      return violations_total == 0 ? 0 : 1;
    }

    if (*bench) {
      if (g.deterministic) workers = 1;
      auto rows = laser::run_benchmark(laser::default_suite(), workers);
      std::string csv = laser::benchmark_csv(rows);
      if (bench_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream os(bench_out);
        if (!os) throw laser::IoError("cannot write " + bench_out);
        os << csv;
        std::cout << "wrote " << bench_out << "\n";
      }
      return 0;
    }

    if (*gantt) {
      laser::ProblemInstance inst = laser::load_instance(g_inst);
      laser::Schedule sched = laser::load_schedule(g_sched, inst);
      if (g_svg.empty() && g_csv.empty()) {
        std::cout << laser::gantt_csv(inst, sched);
        return 0;
      }
      if (!g_svg.empty()) laser::write_gantt_svg(inst, sched, g_svg);
      if (!g_csv.empty()) laser::write_gantt_csv(inst, sched, g_csv);
      return 0;
    }
  } catch (const laser::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
