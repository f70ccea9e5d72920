#ifndef LASER_BOTTOM_HPP
#define LASER_BOTTOM_HPP

#include <string>
#include <vector>

#include "laser/solver.hpp"
#include "laser/types.hpp"

namespace laser {

// Iterative clustering and temporal relaxation for the heterogeneous
// bottom session: batch glue primitives, merge critical screws into
// placements, defer the rest, solve the relaxed skeleton, split violating
// batches until the strict windows hold, then reinsert deferred screws
// into barrier-respecting idle slots.

struct BatchPlan {
  std::vector<std::vector<int>> glue_batches;  // ordered glue ids per batch
  std::vector<std::vector<int>> place_merged;  // element -> merged screw ids
  std::vector<int> deferred;                   // remaining screw ids
};

struct SkeletonInstance {
  ProblemInstance instance;
  // skeleton task id -> ordered original task ids it expands to
  std::vector<std::vector<int>> expansion;
};

struct WindowViolation {
  int element = -1;
  int constraint_index = -1;  // into the original temporal set
  Seconds overshoot = 0;
};
using ViolationSet = std::vector<WindowViolation>;

BatchPlan initialize_batches(const ProblemInstance& instance);

// Replaces the open-window upper bounds of batched glue members by
// +infinity; everything else passes through unchanged.
std::vector<TemporalConstraint> apply_relaxation(
    const std::vector<TemporalConstraint>& temporal, const BatchPlan& plan,
    const ProblemInstance& instance);

// Builds the reduced instance over batched/merged nodes. With
// relax_windows the skeleton carries the relaxed temporal set, otherwise
// the original one (used for the final strict re-solve fallback).
SkeletonInstance build_skeleton(const ProblemInstance& instance,
                                const BatchPlan& plan,
                                bool relax_windows = true);

struct BottomConfig {
  double lambda = 1.0;
  double cp_time_limit_s = 30.0;
  int max_splits = 20;
};

struct BottomResult {
  Schedule schedule;
  int iterations = 0;  // CP solves performed
  int splits = 0;
  std::vector<std::string> warnings;
};

// Throws IterationLimitError when violations persist at singleton batches
// and InsertionError when a deferred screw cannot be placed at all.
BottomResult solve_bottom(const ProblemInstance& instance,
                          const BottomConfig& config = {});

}  // namespace laser

#endif  // LASER_BOTTOM_HPP
