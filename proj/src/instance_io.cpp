#include "laser/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace laser {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void warn(std::vector<std::string>* sink, const std::string& msg) {
  if (sink) sink->push_back(msg);
}

Seconds parse_seconds(const json& j, const std::string& field,
                      std::vector<std::string>* warnings) {
  double v = j.get<double>();
  Seconds s = round_seconds(v);
  if (double(s) != v) {
    warn(warnings, "rounded " + field + " from " + std::to_string(v) + " to " +
                       std::to_string(s) + " s");
  }
  return s;
}

Anchor parse_anchor(const std::string& s) {
  if (s == "start") return Anchor::Start;
  if (s == "end") return Anchor::End;
  throw ParseError("unknown anchor: " + s);
}

std::string anchor_name(Anchor a) {
  return a == Anchor::Start ? "start" : "end";
}

struct IdMaps {
  std::unordered_map<std::string, int> task;
  std::unordered_map<std::string, int> actor;

  int task_id(const std::string& ext) const {
    if (ext == "origin") return kOrigin;
    auto it = task.find(ext);
    if (it == task.end()) throw ParseError("unknown task id: " + ext);
    return it->second;
  }
  int actor_id(const std::string& ext) const {
    auto it = actor.find(ext);
    if (it == actor.end()) throw ParseError("unknown actor id: " + ext);
    return it->second;
  }
};

}  // namespace

ProblemInstance parse_instance(const std::string& json_text,
                               std::vector<std::string>* warnings) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (root.value("schema", "") != "laser/1")
    throw ParseError("missing or unsupported schema tag (want \"laser/1\")");

  ProblemInstance inst;
  IdMaps ids;

  if (!root.contains("actors") || !root["actors"].is_array())
    throw ParseError("missing \"actors\" array");
  for (const auto& ja : root["actors"]) {
    Actor a;
    a.id = int(inst.actors.size());
    a.external_id = ja.at("id").get<std::string>();
    a.name = ja.value("name", a.external_id);
    a.travel_speed = ja.value("travel_speed", 1.0);
    if (ja.contains("tool_switch_times"))
      for (const auto& row : ja["tool_switch_times"])
        a.tool_switch_times[{row.at(0).get<std::string>(),
                             row.at(1).get<std::string>()}] =
            parse_seconds(row.at(2), "tool_switch", warnings);
    if (ja.contains("prep_times"))
      for (auto it = ja["prep_times"].begin(); it != ja["prep_times"].end();
           ++it)
        a.prep_times[task_kind_from_string(it.key())] =
            parse_seconds(it.value(), "prep_time", warnings);
    if (!ids.actor.emplace(a.external_id, a.id).second)
      throw ParseError("duplicate actor id: " + a.external_id);
    inst.actors.push_back(std::move(a));
  }

  if (!root.contains("tasks") || !root["tasks"].is_array())
    throw ParseError("missing \"tasks\" array");
  for (const auto& jt : root["tasks"]) {
    TaskPrimitive t;
    t.id = int(inst.tasks.size());
    t.external_id = jt.at("id").get<std::string>();
    t.kind = task_kind_from_string(jt.at("kind").get<std::string>());
    t.element = jt.value("element", -1);
    for (const auto& c : jt.at("coords"))
      t.coords.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    for (auto it = jt.at("durations").begin(); it != jt.at("durations").end();
         ++it)
      t.durations[ids.actor_id(it.key())] =
          parse_seconds(it.value(), "duration of " + t.external_id, warnings);
    if (jt.contains("footprint"))
      t.footprint = jt["footprint"].get<std::vector<int>>();
    if (jt.contains("priority")) {
      std::string p = jt["priority"].get<std::string>();
      if (p == "priority")
        t.priority = PriorityClass::Priority;
      else if (p == "reinforcement")
        t.priority = PriorityClass::Reinforcement;
      else
        throw ParseError("unknown priority class: " + p);
    }
    t.tool = jt.value("tool", default_tool(t.kind));
    if (!ids.task.emplace(t.external_id, t.id).second)
      throw ParseError("duplicate task id: " + t.external_id);
    inst.tasks.push_back(std::move(t));
  }

  // BatchedGlue members resolve after all tasks exist.
  {
    int i = 0;
    for (const auto& jt : root["tasks"]) {
      if (jt.contains("members"))
        for (const auto& m : jt["members"])
          inst.tasks[i].members.push_back(
              ids.task_id(m.get<std::string>()));
      ++i;
    }
  }

  if (root.contains("temporal_constraints"))
    for (const auto& jc : root["temporal_constraints"]) {
      TemporalConstraint c;
      c.u = ids.task_id(jc.at("u").get<std::string>());
      c.v = ids.task_id(jc.at("v").get<std::string>());
      c.eta_u = parse_anchor(jc.value("eta_u", "end"));
      c.eta_v = parse_anchor(jc.value("eta_v", "start"));
      c.lower = jc.contains("lower")
                    ? parse_seconds(jc["lower"], "lower", warnings)
                    : 0;
      c.upper = (jc.contains("upper") && !jc["upper"].is_null())
                    ? parse_seconds(jc["upper"], "upper", warnings)
                    : kInfinity;
      inst.temporal.push_back(c);
    }

  if (root.contains("grid")) {
    const auto& jg = root["grid"];
    GridInfo g;
    g.origin = {jg.at("origin").at(0).get<double>(),
                jg.at("origin").at(1).get<double>()};
    g.cell_size = jg.at("cell_size").get<double>();
    g.nx = jg.at("dims").at(0).get<int>();
    g.ny = jg.at("dims").at(1).get<int>();
    inst.grid = g;
  }

  if (root.contains("adhesive")) {
    const auto& ja = root["adhesive"];
    if (ja.contains("open_s"))
      inst.adhesive_open_s = parse_seconds(ja["open_s"], "open_s", warnings);
    if (ja.contains("close_s"))
      inst.adhesive_close_s =
          parse_seconds(ja["close_s"], "close_s", warnings);
    inst.safety_buffer_fraction = ja.value("buffer_fraction", 0.0);
  }

  if (root.contains("conflicts")) {
    const auto& jc = root["conflicts"];
    if (jc.contains("node"))
      for (const auto& row : jc["node"])
        inst.conflicts.set_node(ids.task_id(row.at(0).get<std::string>()),
                                ids.task_id(row.at(1).get<std::string>()),
                                ids.actor_id(row.at(2).get<std::string>()),
                                ids.actor_id(row.at(3).get<std::string>()));
    if (jc.contains("edge"))
      for (const auto& row : jc["edge"])
        inst.conflicts.set_edge(ids.task_id(row.at(0).get<std::string>()),
                                ids.task_id(row.at(1).get<std::string>()));
  }

  validate_instance(inst);
  compute_transitions(inst, warnings);

  if (root.contains("transitions"))
    for (const auto& row : root["transitions"])
      inst.set_transition(ids.actor_id(row.at(0).get<std::string>()),
                          ids.task_id(row.at(1).get<std::string>()),
                          ids.task_id(row.at(2).get<std::string>()),
                          parse_seconds(row.at(3), "transition", warnings));

  return inst;
}

ProblemInstance load_instance(const std::string& path,
                              std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), warnings);
}

void validate_instance(const ProblemInstance& inst) {
  for (const auto& a : inst.actors)
    if (a.travel_speed <= 0.0)
      throw ValidationError("actor " + a.external_id +
                            ": travel_speed must be > 0");
  for (const auto& t : inst.tasks) {
    if (t.durations.empty())
      throw CapabilityError("task " + t.external_id + ": no capable actor");
    for (const auto& [k, d] : t.durations) {
      if (k < 0 || k >= inst.actor_count())
        throw ValidationError("task " + t.external_id + ": bad actor id");
      if (d <= 0)
        throw ValidationError("task " + t.external_id +
                              ": durations must be > 0");
    }
    std::size_t want_min = 1, want_max = 1;
    if (t.kind == TaskKind::Glue || t.kind == TaskKind::BatchedGlue)
      want_max = 2;
    if (t.coords.size() < want_min || t.coords.size() > want_max)
      throw ValidationError("task " + t.external_id + ": " +
                            std::to_string(t.coords.size()) +
                            " coords not allowed for kind " +
                            to_string(t.kind));
    if (t.kind == TaskKind::BatchedGlue && t.members.empty())
      throw ValidationError("task " + t.external_id +
                            ": batched_glue requires members");
  }
  for (const auto& c : inst.temporal) {
    if (c.lower > c.upper)
      throw ValidationError("temporal constraint: lower > upper");
    auto check = [&](int id) {
      if (id != kOrigin && (id < 0 || id >= inst.task_count()))
        throw ValidationError("temporal constraint: unknown task id");
    };
    check(c.u);
    check(c.v);
  }
  if (inst.adhesive_open_s >= inst.adhesive_close_s)
    throw ValidationError("adhesive open_s must be < close_s");
  if (inst.safety_buffer_fraction < 0.0 || inst.safety_buffer_fraction >= 1.0)
    throw ValidationError("buffer_fraction must be in [0,1)");
}

void compute_transitions(ProblemInstance& inst,
                         std::vector<std::string>* warnings) {
  std::set<std::pair<std::string, std::string>> warned;
  for (const auto& a : inst.actors) {
    for (const auto& ti : inst.tasks) {
      if (!ti.capable(a.id)) continue;
      for (const auto& tj : inst.tasks) {
        if (tj.id == ti.id || !tj.capable(a.id)) continue;
        auto key = ProblemInstance::transition_key(a.id, ti.id, tj.id);
        if (inst.transitions.count(key)) continue;  // file override
        double travel = distance(ti.exit(), tj.entry()) / a.travel_speed;
        Seconds sw = 0;
        if (ti.tool != tj.tool) {
          sw = a.tool_switch(ti.tool, tj.tool);
          if (sw == 0 && !a.tool_switch_times.empty() &&
              warned.emplace(ti.tool, tj.tool).second)
            warn(warnings, "no tool-switch time for (" + ti.tool + ", " +
                               tj.tool + "); using 0");
        }
        inst.transitions[key] =
            round_seconds(travel + double(sw) + double(a.prep(tj.kind)));
      }
    }
  }
}

std::string instance_to_json(const ProblemInstance& inst) {
  ordered_json root;
  root["schema"] = "laser/1";

  root["actors"] = ordered_json::array();
  for (const auto& a : inst.actors) {
    ordered_json ja;
    ja["id"] = a.external_id;
    ja["name"] = a.name;
    ja["travel_speed"] = a.travel_speed;
    if (!a.tool_switch_times.empty()) {
      ja["tool_switch_times"] = ordered_json::array();
      for (const auto& [pair, s] : a.tool_switch_times)
        ja["tool_switch_times"].push_back({pair.first, pair.second, s});
    }
    if (!a.prep_times.empty()) {
      ordered_json jp;
      for (const auto& [k, s] : a.prep_times) jp[to_string(k)] = s;
      ja["prep_times"] = jp;
    }
    root["actors"].push_back(ja);
  }

  root["tasks"] = ordered_json::array();
  for (const auto& t : inst.tasks) {
    ordered_json jt;
    jt["id"] = t.external_id;
    jt["kind"] = to_string(t.kind);
    if (t.element >= 0) jt["element"] = t.element;
    jt["coords"] = ordered_json::array();
    for (const auto& c : t.coords) jt["coords"].push_back({c.x, c.y});
    ordered_json jd;
    for (const auto& [k, d] : t.durations)
      jd[inst.actors[k].external_id] = d;
    jt["durations"] = jd;
    if (!t.footprint.empty()) jt["footprint"] = t.footprint;
    if (t.priority == PriorityClass::Priority) jt["priority"] = "priority";
    if (t.priority == PriorityClass::Reinforcement)
      jt["priority"] = "reinforcement";
    if (t.tool != default_tool(t.kind)) jt["tool"] = t.tool;
    if (!t.members.empty()) {
      jt["members"] = ordered_json::array();
      for (int m : t.members)
        jt["members"].push_back(inst.tasks[m].external_id);
    }
    root["tasks"].push_back(jt);
  }

  root["temporal_constraints"] = ordered_json::array();
  auto ext = [&](int id) {
    return id == kOrigin ? std::string("origin")
                         : inst.tasks[id].external_id;
  };
  for (const auto& c : inst.temporal) {
    ordered_json jc;
    jc["u"] = ext(c.u);
    jc["eta_u"] = anchor_name(c.eta_u);
    jc["v"] = ext(c.v);
    jc["eta_v"] = anchor_name(c.eta_v);
    jc["lower"] = c.lower;
    if (c.bounded_above())
      jc["upper"] = c.upper;
    else
      jc["upper"] = nullptr;
    root["temporal_constraints"].push_back(jc);
  }

  if (inst.grid) {
    root["grid"] = {{"origin", {inst.grid->origin.x, inst.grid->origin.y}},
                    {"cell_size", inst.grid->cell_size},
                    {"dims", {inst.grid->nx, inst.grid->ny}}};
  }

  root["adhesive"] = {{"open_s", inst.adhesive_open_s},
                      {"close_s", inst.adhesive_close_s},
                      {"buffer_fraction", inst.safety_buffer_fraction}};

  {
    ordered_json jc;
    std::vector<std::uint64_t> nodes(inst.conflicts.node_entries().begin(),
                                     inst.conflicts.node_entries().end());
    std::sort(nodes.begin(), nodes.end());
    jc["node"] = ordered_json::array();
    for (auto key : nodes) {
      int i, j, a, b;
      ConflictMatrices::unpack_node(key, i, j, a, b);
      jc["node"].push_back({inst.tasks[i].external_id,
                            inst.tasks[j].external_id,
                            inst.actors[a].external_id,
                            inst.actors[b].external_id});
    }
    std::vector<std::uint64_t> edges(inst.conflicts.edge_entries().begin(),
                                     inst.conflicts.edge_entries().end());
    std::sort(edges.begin(), edges.end());
    jc["edge"] = ordered_json::array();
    for (auto key : edges) {
      int i, j;
      ConflictMatrices::unpack_edge(key, i, j);
      jc["edge"].push_back(
          {inst.tasks[i].external_id, inst.tasks[j].external_id});
    }
    root["conflicts"] = jc;
  }

  return root.dump(2) + "\n";
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write instance file: " + path);
  out << instance_to_json(inst);
}

std::string schedule_to_json(const Schedule& s, const ProblemInstance& inst) {
  ordered_json root;
  root["schema"] = "laser/1";
  ordered_json ja;
  for (std::size_t i = 0; i < s.assignment.size(); ++i)
    ja[inst.tasks[i].external_id] =
        inst.actors[s.assignment[i]].external_id;
  root["assignment"] = ja;
  ordered_json js;
  for (std::size_t k = 0; k < s.sequences.size(); ++k) {
    ordered_json row = ordered_json::array();
    for (int t : s.sequences[k]) row.push_back(inst.tasks[t].external_id);
    js[inst.actors[k].external_id] = row;
  }
  root["sequences"] = js;
  ordered_json jl;
  for (std::size_t i = 0; i < s.level.size(); ++i)
    jl[inst.tasks[i].external_id] = s.level[i];
  root["levels"] = jl;
  ordered_json jt;
  for (std::size_t i = 0; i < s.start.size(); ++i)
    jt[inst.tasks[i].external_id] = {{"start", s.start[i]},
                                     {"end", s.end[i]}};
  root["times"] = jt;
  root["barriers"] = s.barriers;
  root["objective"] = {{"makespan", s.makespan}, {"max_level", s.max_level}};
  return root.dump(2) + "\n";
}

void save_schedule(const Schedule& s, const ProblemInstance& inst,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write schedule file: " + path);
  out << schedule_to_json(s, inst);
}

Schedule parse_schedule(const std::string& json_text,
                        const ProblemInstance& inst) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("schedule is not valid JSON: ") + e.what());
  }
  if (root.value("schema", "") != "laser/1")
    throw ParseError("missing or unsupported schema tag (want \"laser/1\")");

  std::unordered_map<std::string, int> task_ids, actor_ids;
  for (const auto& t : inst.tasks) task_ids[t.external_id] = t.id;
  for (const auto& a : inst.actors) actor_ids[a.external_id] = a.id;
  auto tid = [&](const std::string& e) {
    auto it = task_ids.find(e);
    if (it == task_ids.end()) throw ReferenceError("unknown task id: " + e);
    return it->second;
  };
  auto aid = [&](const std::string& e) {
    auto it = actor_ids.find(e);
    if (it == actor_ids.end()) throw ReferenceError("unknown actor id: " + e);
    return it->second;
  };

  int n = inst.task_count();
  Schedule s;
  s.assignment.assign(n, -1);
  s.level.assign(n, 0);
  s.start.assign(n, 0);
  s.end.assign(n, 0);
  s.sequences.assign(inst.actor_count(), {});

  for (auto it = root.at("assignment").begin();
       it != root.at("assignment").end(); ++it)
    s.assignment[tid(it.key())] = aid(it.value().get<std::string>());
  for (auto it = root.at("sequences").begin();
       it != root.at("sequences").end(); ++it)
    for (const auto& e : it.value())
      s.sequences[aid(it.key())].push_back(tid(e.get<std::string>()));
  for (auto it = root.at("levels").begin(); it != root.at("levels").end();
       ++it)
    s.level[tid(it.key())] = it.value().get<int>();
  for (auto it = root.at("times").begin(); it != root.at("times").end();
       ++it) {
    int t = tid(it.key());
    s.start[t] = it.value().at("start").get<Seconds>();
    s.end[t] = it.value().at("end").get<Seconds>();
  }
  s.barriers = root.at("barriers").get<std::vector<Seconds>>();
  s.makespan = root.at("objective").at("makespan").get<Seconds>();
  s.max_level = root.at("objective").at("max_level").get<int>();
  return s;
}

Schedule load_schedule(const std::string& path, const ProblemInstance& inst) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schedule file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schedule(buf.str(), inst);
}

}  // namespace laser
