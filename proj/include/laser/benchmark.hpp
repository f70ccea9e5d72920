#ifndef LASER_BENCHMARK_HPP
#define LASER_BENCHMARK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "laser/generator.hpp"

namespace laser {

struct BenchmarkJob {
  std::string name;
  SlabSpec spec;
  std::uint64_t seed = 1;
  std::string mode = "auto";  // auto | monolithic | bottom | top
  double time_limit_s = 60.0;
};

struct BenchmarkRow {
  std::string name;
  int tasks = 0;
  std::string mode;
  std::string status;  // optimal | feasible | infeasible | timeout | error
  bool valid = false;  // strict oracle verdict
  double wall_s = 0.0;
  Seconds makespan = 0;
  int levels = 0;
  double objective = 0.0;
  double assigned_fraction = 1.0;
};

std::vector<BenchmarkJob> default_suite();

BenchmarkRow run_job(const BenchmarkJob& job);

// workers <= 0 picks LASER_WORKERS from the environment, then falls back
// to 1. Row order follows job order regardless of the fan-out.
std::vector<BenchmarkRow> run_benchmark(const std::vector<BenchmarkJob>& jobs,
                                        int workers = 0);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace laser

#endif  // LASER_BENCHMARK_HPP
