#include "laser/gantt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace laser {

namespace {

const char* kind_color(TaskKind k) {
  switch (k) {
    case TaskKind::Glue:
      return "#e07b39";
    case TaskKind::BatchedGlue:
      return "#b85c1e";
    case TaskKind::Pick:
      return "#3973ac";
    case TaskKind::Place:
      return "#3fa45b";
    case TaskKind::Screw:
      return "#8a8a8a";
    case TaskKind::Transition:
      return "#d0d0d0";
  }
  return "#000000";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << text;
}

}  // namespace

std::string gantt_svg(const ProblemInstance& inst, const Schedule& s) {
  const int m = inst.actor_count();
  const double row_h = 36.0, bar_h = 24.0, left = 90.0, top = 30.0;
  const double plot_w = 1100.0;
  Seconds span = std::max<Seconds>(1, s.makespan);
  auto x_of = [&](double t) { return left + t / double(span) * plot_w; };
  double height = top + m * row_h + 40.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << left + plot_w + 30 << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int k = 0; k < m; ++k) {
    double y = top + k * row_h;
    os << "<text x=\"6\" y=\"" << y + bar_h * 0.75
       << "\" font-size=\"12\" font-family=\"sans-serif\">"
       << inst.actors[k].external_id << "</text>\n";
    for (int t : s.sequences[k]) {
      double x0 = x_of(double(s.start[t]));
      double x1 = x_of(double(s.end[t]));
      os << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\""
         << std::max(1.0, x1 - x0) << "\" height=\"" << bar_h
         << "\" fill=\"" << kind_color(inst.tasks[t].kind)
         << "\" stroke=\"#333\" stroke-width=\"0.4\">";
      os << "<title>" << inst.tasks[t].external_id << " ("
         << to_string(inst.tasks[t].kind) << ") L" << s.level[t] << " ["
         << s.start[t] << "," << s.end[t] << "]</title></rect>\n";
    }
  }
  for (std::size_t l = 0; l < s.barriers.size(); ++l) {
    double x = x_of(double(s.barriers[l]));
    os << "<line x1=\"" << x << "\" y1=\"" << top - 8 << "\" x2=\"" << x
       << "\" y2=\"" << top + m * row_h
       << "\" stroke=\"#c23\" stroke-dasharray=\"4,3\"/>\n";
    os << "<text x=\"" << x + 2 << "\" y=\"" << top - 12
       << "\" font-size=\"10\" font-family=\"sans-serif\" fill=\"#c23\">L"
       << l << "</text>\n";
  }
  os << "<text x=\"" << left << "\" y=\"" << height - 12
     << "\" font-size=\"11\" font-family=\"sans-serif\">makespan "
     << s.makespan << " s, " << s.max_level + 1 << " levels</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string gantt_csv(const ProblemInstance& inst, const Schedule& s) {
  std::ostringstream os;
  os << "actor,task,kind,element,level,start,end\n";
  for (std::size_t k = 0; k < s.sequences.size(); ++k)
    for (int t : s.sequences[k])
      os << inst.actors[k].external_id << "," << inst.tasks[t].external_id
         << "," << to_string(inst.tasks[t].kind) << ","
         << inst.tasks[t].element << "," << s.level[t] << "," << s.start[t]
         << "," << s.end[t] << "\n";
  return os.str();
}

void write_gantt_svg(const ProblemInstance& inst, const Schedule& s,
                     const std::string& path) {
  write_file(path, gantt_svg(inst, s));
}

void write_gantt_csv(const ProblemInstance& inst, const Schedule& s,
                     const std::string& path) {
  write_file(path, gantt_csv(inst, s));
}

}  // namespace laser
