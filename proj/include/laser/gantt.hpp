#ifndef LASER_GANTT_HPP
#define LASER_GANTT_HPP

#include <string>

#include "laser/types.hpp"

namespace laser {

// Renders one row per actor, bars colored by task kind, with dashed
// vertical rules at the level barriers.
std::string gantt_svg(const ProblemInstance& instance,
                      const Schedule& schedule);

// actor,task,kind,element,level,start,end
std::string gantt_csv(const ProblemInstance& instance,
                      const Schedule& schedule);

void write_gantt_svg(const ProblemInstance& instance,
                     const Schedule& schedule, const std::string& path);
void write_gantt_csv(const ProblemInstance& instance,
                     const Schedule& schedule, const std::string& path);

}  // namespace laser

#endif  // LASER_GANTT_HPP
