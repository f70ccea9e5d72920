#ifndef LASER_TOP_HPP
#define LASER_TOP_HPP

#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "laser/types.hpp"

namespace laser {

// Set-partitioning plus per-level routing for the homogeneous top
// session: screws are split across actors and levels so that per-level
// workloads balance within a tolerance, then each actor's share is
// ordered by a path-TSP heuristic with forbidden arcs from the edge
// conflict matrix.

struct PartitionResult {
  // task id -> (actor, local level index)
  std::unordered_map<int, std::pair<int, int>> assignment;
  std::vector<int> unassigned;
  std::vector<std::vector<Seconds>> workload;  // [level][actor]
  std::vector<Seconds> g;                      // per-level load spread
};

PartitionResult set_partition(const ProblemInstance& instance,
                              const std::vector<int>& screws, int num_levels,
                              Seconds delta, double delta_dist,
                              double time_budget_s);

struct RoutePlan {
  std::vector<std::vector<int>> routes;  // per actor, ordered task ids
  std::vector<int> bounced;              // dropped for lack of safe arcs
};

// Orders one level's assignment per actor. `anchor` is each actor's
// position after the previous level (nullopt = free start); the virtual
// route end is biased toward that actor's tasks on the next level.
RoutePlan solve_vrp_level(const ProblemInstance& instance,
                          const std::vector<std::vector<int>>& level_tasks,
                          const std::vector<std::optional<Point>>& anchor,
                          const std::vector<std::vector<int>>& next_tasks);

struct TopConfig {
  double lambda = 1.0;
  Seconds delta = 16;        // per-level workload tolerance
  double delta_dist = 1.0;   // proximity radius, metres
  double time_budget_s = 300.0;
  int levels_per_stage = 2;
};

struct TopResult {
  Schedule schedule;
  PartitionResult priority;
  PartitionResult reinforcement;
  double assigned_fraction = 0.0;  // by the partition, before insertion
  int bounced = 0;
  double utilization = 0.0;        // busy time / (makespan * actors)
};

TopResult solve_top(const ProblemInstance& instance,
                    const TopConfig& config = {});

}  // namespace laser

#endif  // LASER_TOP_HPP
