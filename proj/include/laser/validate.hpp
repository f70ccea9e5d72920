#ifndef LASER_VALIDATE_HPP
#define LASER_VALIDATE_HPP

#include <string>
#include <vector>

#include "laser/types.hpp"

namespace laser {

struct Violation {
  int equation = 0;  // 2..11, numbering of the constraint model
  int task_u = -1;
  int task_v = -1;
  Seconds amount = 0;
  std::string message;
};

// Independent schedule oracle. Checks every model constraint directly
// against the given timestamps; shares no code with the solver's
// propagation. strict_windows checks the raw temporal bounds, otherwise
// the safety-buffered ones.
std::vector<Violation> validate_schedule(const ProblemInstance& instance,
                                         const Schedule& schedule,
                                         bool strict_windows);

std::string describe(const std::vector<Violation>& violations,
                     const ProblemInstance& instance);

}  // namespace laser

#endif  // LASER_VALIDATE_HPP
