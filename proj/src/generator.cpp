#include "laser/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "laser/collision.hpp"
#include "laser/instance_io.hpp"

namespace laser {

namespace {

void check_spec(const SlabSpec& spec) {
  if (spec.width_m <= 0 || spec.length_m <= 0)
    throw SpecError("slab dimensions must be positive");
  if (spec.session != "bottom" && spec.session != "top")
    throw SpecError("session must be \"bottom\" or \"top\"");
  if (spec.session == "bottom" && spec.elements <= 0)
    throw SpecError("element count must be positive");
  if (spec.screws_per_element < 0)
    throw SpecError("screws_per_element must be >= 0");
  if (spec.screw_area_cm2 <= 0)
    throw SpecError("screw density area must be positive");
  if (spec.priority_fraction < 0 || spec.priority_fraction > 1)
    throw SpecError("priority_fraction must be in [0,1]");
  if (spec.open_s >= spec.close_s)
    throw SpecError("open window must be shorter than close window");
}

Seconds jittered(Seconds nominal, double jitter, std::mt19937_64& rng) {
  if (jitter <= 0) return nominal;
  std::uniform_real_distribution<double> u(-jitter, jitter);
  return std::max<Seconds>(1, round_seconds(double(nominal) * (1 + u(rng))));
}

std::vector<Actor> make_actors(const SlabSpec& spec) {
  Actor heavy;
  heavy.id = 0;
  heavy.external_id = "r1";
  heavy.name = "heavy all-rounder";
  heavy.travel_speed = spec.travel_speed;
  for (const char* a : {"glue_effector", "gripper", "screw_effector"})
    for (const char* b : {"glue_effector", "gripper", "screw_effector"})
      if (std::string(a) < std::string(b))
        heavy.tool_switch_times[{a, b}] = spec.tool_switch_s;
  heavy.prep_times[TaskKind::Screw] = spec.screw_prep_s;
  heavy.prep_times[TaskKind::Pick] = 3;

  Actor light;
  light.id = 1;
  light.external_id = "r2";
  light.name = "light screw robot";
  light.travel_speed = spec.travel_speed * 1.2;
  light.tool_switch_times[{"gripper", "screw_effector"}] = spec.tool_switch_s;
  light.prep_times[TaskKind::Screw] = spec.screw_prep_s;
  light.prep_times[TaskKind::Pick] = 3;

  return {heavy, light};
}

}  // namespace

int top_screw_candidates(const SlabSpec& spec) {
  return int(std::floor(spec.width_m * spec.length_m * 1e4 /
                        spec.screw_area_cm2));
}

ProblemInstance generate_slab_instance(const SlabSpec& spec,
                                       std::uint64_t seed) {
  check_spec(spec);
  std::mt19937_64 rng(seed);

  ProblemInstance inst;
  inst.actors = make_actors(spec);
  inst.adhesive_open_s = spec.open_s;
  inst.adhesive_close_s = spec.close_s;
  inst.safety_buffer_fraction = spec.buffer_fraction;

  auto add_task = [&](TaskPrimitive t) {
    t.id = int(inst.tasks.size());
    t.external_id = "t" + std::to_string(t.id);
    if (t.tool.empty()) t.tool = default_tool(t.kind);
    inst.tasks.push_back(std::move(t));
    return inst.tasks.back().id;
  };
  auto window = [&](int u, Anchor eu, int v, Anchor ev, Seconds lo,
                    Seconds hi) {
    inst.temporal.push_back({u, v, eu, ev, lo, hi});
  };

  if (spec.session == "bottom") {
    const double strip_len = spec.length_m / spec.elements;
    const Point magazine{-1.0, spec.length_m / 2.0};
    std::vector<int> place_ids(spec.elements, -1);
    std::vector<bool> is_crown(spec.elements, false);

    for (int e = 0; e < spec.elements; ++e) {
      bool crown = spec.crown_every > 0 && e % spec.crown_every == 0;
      is_crown[e] = crown;
      double y = (e + 0.5) * strip_len;
      Point left{0.2, y}, right{spec.width_m - 0.2, y};
      Point center{spec.width_m / 2.0, y};

      TaskPrimitive glue;
      glue.kind = TaskKind::Glue;
      glue.element = e;
      glue.coords = {left, right};
      glue.durations[0] = jittered(spec.glue_s, spec.duration_jitter, rng);
      int glue_id = add_task(glue);

      TaskPrimitive pick;
      pick.kind = TaskKind::Pick;
      pick.element = e;
      pick.coords = {magazine};
      pick.tool = "gripper";
      pick.durations[0] = jittered(spec.pick_s, spec.duration_jitter, rng);
      if (!crown)
        pick.durations[1] = jittered(spec.pick_s, spec.duration_jitter, rng);
      int pick_id = add_task(pick);

      TaskPrimitive place;
      place.kind = TaskKind::Place;
      place.element = e;
      place.coords = {center};
      place.tool = "gripper";
      place.durations[0] = jittered(spec.place_s, spec.duration_jitter, rng);
      if (!crown)
        place.durations[1] =
            jittered(spec.place_s, spec.duration_jitter, rng);
      int place_id = add_task(place);
      place_ids[e] = place_id;

      window(glue_id, Anchor::End, place_id, Anchor::Start, 0, spec.open_s);
      window(pick_id, Anchor::End, place_id, Anchor::Start, 0, kInfinity);
      window(glue_id, Anchor::End, pick_id, Anchor::Start, 0, kInfinity);

      for (int sidx = 0; sidx < spec.screws_per_element; ++sidx) {
        double frac = spec.screws_per_element == 1
                          ? 0.5
                          : double(sidx) / (spec.screws_per_element - 1);
        TaskPrimitive screw;
        screw.kind = TaskKind::Screw;
        screw.element = e;
        screw.coords = {
            {left.x + frac * (right.x - left.x), y}};
        screw.durations[0] = spec.screw_cycle_heavy;
        screw.durations[1] = spec.screw_cycle_light;
        int screw_id = add_task(screw);
        window(place_id, Anchor::End, screw_id, Anchor::Start, 0, kInfinity);
        window(place_id, Anchor::End, screw_id, Anchor::End, 0,
               spec.close_s);
      }
    }

    // a crown must be placed before its adjacent beams slot in
    for (int e = 0; e < spec.elements; ++e) {
      if (!is_crown[e]) continue;
      for (int nb : {e - 1, e + 1})
        if (nb >= 0 && nb < spec.elements && !is_crown[nb])
          window(place_ids[e], Anchor::End, place_ids[nb], Anchor::Start, 0,
                 kInfinity);
    }
  } else {
    int candidates = top_screw_candidates(spec);
    int count = spec.top_screw_limit
                    ? std::min(*spec.top_screw_limit, candidates)
                    : candidates;
    if (count <= 0) throw SpecError("top session with zero screws");
    int ny = std::max(1, int(std::lround(std::sqrt(
                              double(count) * spec.length_m / spec.width_m))));
    int nx = (count + ny - 1) / ny;
    int prio_cols = int(std::lround(spec.priority_fraction * 5));
    for (int i = 0; i < count; ++i) {
      int row = i / nx, col = i % nx;
      TaskPrimitive screw;
      screw.kind = TaskKind::Screw;
      screw.coords = {{(col + 0.5) * spec.width_m / nx,
                       (row + 0.5) * spec.length_m / ny}};
      screw.durations[0] = spec.screw_cycle_heavy;
      screw.durations[1] = spec.screw_cycle_light;
      screw.priority = (col % 5) < prio_cols ? PriorityClass::Priority
                                             : PriorityClass::Reinforcement;
      int id = add_task(screw);
      window(kOrigin, Anchor::End, id, Anchor::End, 0, spec.close_s);
    }
    // all priority screws fasten before any reinforcement screw
    for (const auto& p : inst.tasks) {
      if (p.priority != PriorityClass::Priority) continue;
      for (const auto& r : inst.tasks)
        if (r.priority == PriorityClass::Reinforcement)
          window(p.id, Anchor::End, r.id, Anchor::Start, 0, kInfinity);
    }
  }

  // workspace grid, footprints and conflicts
  GridInfo gi;
  gi.cell_size = spec.cell_size;
  gi.origin = {-1.5, -0.5};
  gi.nx = int(std::ceil((spec.width_m + 2.5) / spec.cell_size));
  gi.ny = int(std::ceil((spec.length_m + 1.0) / spec.cell_size));
  inst.grid = gi;
  VoxelGrid grid = VoxelGrid::from_instance(inst);
  ensure_footprints(inst, grid);
  if (spec.session == "bottom") {
    // places occupy the whole element strip
    double strip_len = spec.length_m / spec.elements;
    for (auto& t : inst.tasks) {
      if (t.kind != TaskKind::Place) continue;
      double y0 = t.element * strip_len, y1 = (t.element + 1) * strip_len;
      for (double x = 0.2; x <= spec.width_m - 0.2 + 1e-9;
           x += spec.cell_size)
        for (double y = y0 + 0.02; y < y1 - 0.02; y += spec.cell_size) {
          int cell = grid.cell_of({x, y});
          if (cell >= 0) t.footprint.push_back(cell);
        }
      std::sort(t.footprint.begin(), t.footprint.end());
      t.footprint.erase(
          std::unique(t.footprint.begin(), t.footprint.end()),
          t.footprint.end());
    }
  }
  CollisionConfig cc;
  cc.margin = spec.margin;
  cc.envelope_radius = spec.envelope_radius;
  inst.conflicts = build_conflicts(inst, grid, cc);

  validate_instance(inst);
  compute_transitions(inst);
  return inst;
}

std::uint64_t instance_hash(const ProblemInstance& inst) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  std::string text = instance_to_json(inst);
  for (unsigned char c : text) mix(c);
  return h;
}

}  // namespace laser
