#ifndef LASER_INSTANCE_IO_HPP
#define LASER_INSTANCE_IO_HPP

#include <string>
#include <vector>

#include "laser/types.hpp"

namespace laser {

// Instance files follow the "laser/1" JSON schema (see README). External
// task/actor ids are strings; internally ids are densified to 0..n-1 in
// file order.
ProblemInstance load_instance(const std::string& path,
                              std::vector<std::string>* warnings = nullptr);
ProblemInstance parse_instance(const std::string& json_text,
                               std::vector<std::string>* warnings = nullptr);

std::string instance_to_json(const ProblemInstance& instance);
void save_instance(const ProblemInstance& instance, const std::string& path);

// rho_k^{ij} = travel(exit i -> entry j) / speed + tool switch + prep(kind j).
// Fills every (k,i,j) where actor k is capable of both tasks; existing
// entries (file overrides) are kept.
void compute_transitions(ProblemInstance& instance,
                         std::vector<std::string>* warnings = nullptr);

// Validates all type invariants; throws ValidationError / CapabilityError.
void validate_instance(const ProblemInstance& instance);

// Schedule files ("laser/1").
std::string schedule_to_json(const Schedule& schedule,
                             const ProblemInstance& instance);
void save_schedule(const Schedule& schedule, const ProblemInstance& instance,
                   const std::string& path);
Schedule load_schedule(const std::string& path,
                       const ProblemInstance& instance);
Schedule parse_schedule(const std::string& json_text,
                        const ProblemInstance& instance);

}  // namespace laser

#endif  // LASER_INSTANCE_IO_HPP
