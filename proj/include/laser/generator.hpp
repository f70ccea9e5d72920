#ifndef LASER_GENERATOR_HPP
#define LASER_GENERATOR_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "laser/types.hpp"

namespace laser {

// Parametric synthetic slab instances. Bottom sessions emit per-element
// glue/pick/place/screw chains under adhesive windows; top sessions emit
// a dense homogeneous screw field split into priority and reinforcement
// sets. Deterministic for a fixed (spec, seed).
struct SlabSpec {
  double width_m = 2.4;
  double length_m = 6.0;
  std::string session = "bottom";  // "bottom" | "top"

  // bottom session
  int elements = 8;
  int screws_per_element = 4;
  int crown_every = 5;  // every k-th element is a crown

  // top session: one screw per screw_area_cm2 of plate
  double screw_area_cm2 = 220.0;
  std::optional<int> top_screw_limit;  // design pruning cap
  double priority_fraction = 0.4;

  // actor cycle times (seconds)
  Seconds glue_s = 60;
  Seconds pick_s = 20;
  Seconds place_s = 40;
  Seconds screw_cycle_heavy = 16;  // all-rounder robot
  Seconds screw_cycle_light = 11;  // screw-only robot
  Seconds tool_switch_s = 30;
  Seconds screw_prep_s = 5;
  double travel_speed = 0.5;  // m/s
  double duration_jitter = 0.2;  // bottom-session heterogeneity

  // adhesive windows
  Seconds open_s = 900;     // 15 min
  Seconds close_s = 7200;   // 120 min
  double buffer_fraction = 0.0;

  // collision precompute
  double cell_size = 0.1;
  double margin = 0.05;
  double envelope_radius = 0.4;
};

ProblemInstance generate_slab_instance(const SlabSpec& spec,
                                       std::uint64_t seed);

// Number of candidate top-plate screw positions before pruning.
int top_screw_candidates(const SlabSpec& spec);

// Stable content hash, for determinism checks.
std::uint64_t instance_hash(const ProblemInstance& instance);

}  // namespace laser

#endif  // LASER_GENERATOR_HPP
