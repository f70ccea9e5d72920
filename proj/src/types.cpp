#include "laser/types.hpp"

namespace laser {

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::Glue: return "glue";
    case TaskKind::Pick: return "pick";
    case TaskKind::Place: return "place";
    case TaskKind::Screw: return "screw";
    case TaskKind::BatchedGlue: return "batched_glue";
    case TaskKind::Transition: return "transition";
  }
  return "?";
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "glue") return TaskKind::Glue;
  if (s == "pick") return TaskKind::Pick;
  if (s == "place") return TaskKind::Place;
  if (s == "screw") return TaskKind::Screw;
  if (s == "batched_glue") return TaskKind::BatchedGlue;
  if (s == "transition") return TaskKind::Transition;
  throw ParseError("unknown task kind: " + s);
}

std::string default_tool(TaskKind k) {
  switch (k) {
    case TaskKind::Glue:
    case TaskKind::BatchedGlue:
      return "glue_effector";
    case TaskKind::Pick:
    case TaskKind::Place:
      return "gripper";
    case TaskKind::Screw:
      return "screw_effector";
    case TaskKind::Transition:
      return "";
  }
  return "";
}

}  // namespace laser
