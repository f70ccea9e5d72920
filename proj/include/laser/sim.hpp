#ifndef LASER_SIM_HPP
#define LASER_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "laser/types.hpp"

namespace laser {

// Barrier-protocol executor. A schedule compiles into per-actor queues of
// execution objects (consecutive same-kind tasks of one level fold into
// one object); the simulator then plays them out under duration noise,
// releasing level l+1 only once every actor confirmed level l.

struct ExecTaskObject {
  int actor = 0;
  int level = 0;
  TaskKind kind = TaskKind::Screw;
  std::vector<int> tasks;  // ordered member task ids
};

std::vector<ExecTaskObject> compile_schedule(const Schedule& schedule,
                                             const ProblemInstance& instance);

struct NoiseModel {
  enum class Kind { None, Gaussian, BoundedUniform };
  Kind kind = Kind::None;
  double magnitude = 0.0;  // sigma, or half-width of the uniform band
  std::uint64_t seed = 0;
};

struct FaultSpec {
  int task = -1;
  bool fail = false;          // true: the owning actor halts on this task
  double stall_factor = 1.0;  // false: the task takes this much longer
};

struct SimTaskEvent {
  int task = -1;
  int actor = 0;
  int level = 0;
  double start = 0.0;
  double end = 0.0;
};

struct SimReport {
  double makespan = 0.0;
  std::vector<double> barrier_release;  // completion time of each level
  std::vector<double> actor_idle;       // barrier waiting per actor
  std::vector<SimTaskEvent> events;     // completed tasks, by task id
  std::vector<std::string> window_violations;  // strict bounds, realized
  bool halted = false;
  int checkpoint_level = -1;  // last fully completed level when halted
  int completed = 0;
};

SimReport simulate(const ProblemInstance& instance, const Schedule& schedule,
                   const NoiseModel& noise,
                   const std::optional<FaultSpec>& fault = std::nullopt);

// Message-driven implementation of the same protocol: actors are state
// machines exchanging confirm/release messages with a barrier manager.
// Produces the identical trace; kept as an independent cross-check.
SimReport simulate_agents(const ProblemInstance& instance,
                          const Schedule& schedule, const NoiseModel& noise,
                          const std::optional<FaultSpec>& fault = std::nullopt);

SimReport fault_inject(const ProblemInstance& instance,
                       const Schedule& schedule, const FaultSpec& fault,
                       const NoiseModel& noise = {});

}  // namespace laser

#endif  // LASER_SIM_HPP
