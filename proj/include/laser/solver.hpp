#ifndef LASER_SOLVER_HPP
#define LASER_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "laser/types.hpp"

namespace laser {

// Monolithic constraint model over assignment, sequencing and level
// decisions. Timestamps are derived, not branched: for fixed discrete
// decisions the earliest times come from longest-path propagation over
// the induced temporal network.
struct CpModel {
  const ProblemInstance* instance = nullptr;
  double lambda = 1.0;              // level-compactness weight (s per level)
  std::vector<TemporalConstraint> buffered;  // safety-buffered bounds
  Seconds horizon = 0;              // trivial serial upper bound
  double time_limit_s = 1800.0;
  bool relax_edge_conflicts = false;
  bool relax_assignment = false;    // partial-assignment mode (partitioning)
  std::optional<int> max_levels;    // cap on the number of levels
};

CpModel make_model(const ProblemInstance& instance, double lambda = 1.0,
                   double time_limit_s = 1800.0);

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout };

struct SolveReport {
  SolveStatus status = SolveStatus::Timeout;
  std::optional<Schedule> schedule;
  double objective = 0.0;
  std::int64_t nodes_explored = 0;
  double wall_time_s = 0.0;
};

// Branch-and-bound over (task -> actor, sequence position, level), depth
// first with chronological backtracking. Deterministic: ties break on
// lowest task id, then lowest actor id.
SolveReport solve_monolithic(const CpModel& model);

// max(critical-path bound over precedence lower bounds, total-work / |K|).
Seconds lower_bound(const CpModel& model);

// Earliest-time schedule for fixed decisions, or nullopt when the induced
// temporal network is inconsistent. `level` must use dense indices 0..L.
// Tasks with assignment -1 are treated as unscheduled: they get no edges
// and temporal constraints touching them are skipped.
std::optional<Schedule> propagate_times(
    const ProblemInstance& instance,
    const std::vector<TemporalConstraint>& temporal,
    const std::vector<int>& assignment,
    const std::vector<std::vector<int>>& sequences,
    const std::vector<int>& level);

double objective_value(const Schedule& schedule, double lambda);

}  // namespace laser

#endif  // LASER_SOLVER_HPP
