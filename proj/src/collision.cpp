#include "laser/collision.hpp"

#include <algorithm>
#include <cmath>

namespace laser {

int VoxelGrid::cell_of(const Point& p) const {
  int cx = int(std::floor((p.x - origin.x) / cell_size));
  int cy = int(std::floor((p.y - origin.y) / cell_size));
  return in_bounds(cx, cy) ? index(cx, cy) : -1;
}

std::vector<int> VoxelGrid::supercover(const Point& a, const Point& b) const {
  // Amanatides-Woo traversal in grid coordinates; at exact corner
  // crossings both side cells are emitted.
  std::vector<int> cells;
  double ax = (a.x - origin.x) / cell_size, ay = (a.y - origin.y) / cell_size;
  double bx = (b.x - origin.x) / cell_size, by = (b.y - origin.y) / cell_size;
  int cx = int(std::floor(ax)), cy = int(std::floor(ay));
  int ex = int(std::floor(bx)), ey = int(std::floor(by));
  int step_x = bx > ax ? 1 : -1;
  int step_y = by > ay ? 1 : -1;
  double dx = std::abs(bx - ax), dy = std::abs(by - ay);
  double t_max_x = dx > 0
                       ? (step_x > 0 ? (cx + 1 - ax) : (ax - cx)) / dx
                       : std::numeric_limits<double>::infinity();
  double t_max_y = dy > 0
                       ? (step_y > 0 ? (cy + 1 - ay) : (ay - cy)) / dy
                       : std::numeric_limits<double>::infinity();
  double t_delta_x = dx > 0 ? 1.0 / dx : 0.0;
  double t_delta_y = dy > 0 ? 1.0 / dy : 0.0;

  auto emit = [&](int x, int y) {
    if (in_bounds(x, y)) cells.push_back(index(x, y));
  };
  emit(cx, cy);
  int guard = 4 * (nx + ny) + 8;
  while ((cx != ex || cy != ey) && guard-- > 0) {
    if (std::abs(t_max_x - t_max_y) < 1e-12) {
      // corner crossing: include both adjacent cells
      emit(cx + step_x, cy);
      emit(cx, cy + step_y);
      cx += step_x;
      cy += step_y;
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      cx += step_x;
      t_max_x += t_delta_x;
    } else {
      cy += step_y;
      t_max_y += t_delta_y;
    }
    emit(cx, cy);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

VoxelGrid VoxelGrid::from_instance(const ProblemInstance& inst,
                                   double cell_size, double pad_m) {
  if (inst.grid) {
    VoxelGrid g;
    g.origin = inst.grid->origin;
    g.cell_size = inst.grid->cell_size;
    g.nx = inst.grid->nx;
    g.ny = inst.grid->ny;
    return g;
  }
  double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
  bool first = true;
  for (const auto& t : inst.tasks)
    for (const auto& c : t.coords) {
      if (first) {
        min_x = max_x = c.x;
        min_y = max_y = c.y;
        first = false;
      }
      min_x = std::min(min_x, c.x);
      max_x = std::max(max_x, c.x);
      min_y = std::min(min_y, c.y);
      max_y = std::max(max_y, c.y);
    }
  VoxelGrid g;
  g.cell_size = cell_size;
  g.origin = {min_x - pad_m, min_y - pad_m};
  g.nx = int(std::ceil((max_x - min_x + 2 * pad_m) / cell_size)) + 1;
  g.ny = int(std::ceil((max_y - min_y + 2 * pad_m) / cell_size)) + 1;
  return g;
}

void ensure_footprints(ProblemInstance& inst, const VoxelGrid& grid) {
  for (auto& t : inst.tasks) {
    if (!t.footprint.empty()) continue;
    for (const auto& c : t.coords) {
      int cell = grid.cell_of(c);
      if (cell < 0)
        throw GridError("task " + t.external_id + " lies outside the grid");
      t.footprint.push_back(cell);
    }
    if (t.coords.size() == 2) {
      auto line = grid.supercover(t.coords[0], t.coords[1]);
      t.footprint.insert(t.footprint.end(), line.begin(), line.end());
    }
    std::sort(t.footprint.begin(), t.footprint.end());
    t.footprint.erase(std::unique(t.footprint.begin(), t.footprint.end()),
                      t.footprint.end());
  }
}

namespace {

// Offsets (dx, dy) whose center distance is within radius meters.
std::vector<std::pair<int, int>> disk_offsets(double radius_m,
                                              double cell_size) {
  std::vector<std::pair<int, int>> offs;
  int r = int(std::ceil(radius_m / cell_size));
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (std::hypot(dx, dy) * cell_size <= radius_m + 1e-9)
        offs.push_back({dx, dy});
  return offs;
}

Bitset dilate(const std::vector<int>& cells, const VoxelGrid& grid,
              const std::vector<std::pair<int, int>>& offs) {
  Bitset out(grid.cells());
  for (int cell : cells) {
    int cx = grid.cx_of(cell), cy = grid.cy_of(cell);
    for (const auto& [dx, dy] : offs)
      if (grid.in_bounds(cx + dx, cy + dy))
        out.set(grid.index(cx + dx, cy + dy));
  }
  return out;
}

struct Bounds {
  int min_cx, max_cx, min_cy, max_cy;
  bool overlaps(const Bounds& o) const {
    return min_cx <= o.max_cx && o.min_cx <= max_cx && min_cy <= o.max_cy &&
           o.min_cy <= max_cy;
  }
};

}  // namespace

ConflictMatrices build_conflicts(const ProblemInstance& inst,
                                 const VoxelGrid& grid,
                                 const CollisionConfig& config) {
  int n = inst.task_count();
  int num_actors = inst.actor_count();

  for (const auto& t : inst.tasks) {
    if (t.footprint.empty())
      throw GridError("task " + t.external_id + " has no footprint");
    for (int cell : t.footprint)
      if (cell < 0 || cell >= grid.cells())
        throw GridError("task " + t.external_id +
                        ": footprint cell outside the grid");
  }

  auto margin_offs = disk_offsets(config.margin, grid.cell_size);
  auto env_offs = disk_offsets(config.envelope_radius, grid.cell_size);

  // Per-task dilated footprint, plus per-(task, actor) occupancy with the
  // actor envelope around the task coordinates.
  std::vector<Bitset> dilated;
  std::vector<std::vector<Bitset>> occupancy(n);
  std::vector<Bounds> bounds(n);
  dilated.reserve(n);
  int pad = int(std::ceil(
      std::max(config.margin, config.envelope_radius) / grid.cell_size));
  for (int i = 0; i < n; ++i) {
    const auto& t = inst.tasks[i];
    dilated.push_back(dilate(t.footprint, grid, margin_offs));
    Bounds b{grid.nx, -1, grid.ny, -1};
    for (int cell : t.footprint) {
      b.min_cx = std::min(b.min_cx, grid.cx_of(cell));
      b.max_cx = std::max(b.max_cx, grid.cx_of(cell));
      b.min_cy = std::min(b.min_cy, grid.cy_of(cell));
      b.max_cy = std::max(b.max_cy, grid.cy_of(cell));
    }
    b.min_cx -= pad;
    b.min_cy -= pad;
    b.max_cx += pad;
    b.max_cy += pad;
    bounds[i] = b;

    occupancy[i].assign(num_actors, Bitset(0));
    std::vector<int> coord_cells;
    for (const auto& c : t.coords) {
      int cell = grid.cell_of(c);
      if (cell >= 0) coord_cells.push_back(cell);
    }
    for (int a = 0; a < num_actors; ++a) {
      if (!t.capable(a)) continue;
      Bitset occ = dilated[i];
      occ.merge(dilate(coord_cells, grid, env_offs));
      occupancy[i][a] = std::move(occ);
    }
  }

  ConflictMatrices out;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!bounds[i].overlaps(bounds[j])) continue;
      for (int a = 0; a < num_actors; ++a) {
        if (!inst.tasks[i].capable(a)) continue;
        for (int b = 0; b < num_actors; ++b) {
          // same actor executes serially; no simultaneity hazard
          if (a == b || !inst.tasks[j].capable(b)) continue;
          if (occupancy[i][a].intersects(occupancy[j][b]))
            out.set_node(i, j, a, b);
        }
      }
    }

  // Edge conflicts: corridor from exit(i) to entry(j), 2*margin wide,
  // against any third task's dilated footprint that could share a level.
  // Tasks of the element i or j belongs to are chained to the pair by the
  // element's process precedences and work the same designed zone, so
  // they do not count as corridor obstacles.
  std::vector<std::vector<int>> cell_tasks(grid.cells());
  Bitset union_fp(grid.cells());
  for (int t = 0; t < n; ++t) {
    for (int cell = 0; cell < grid.cells(); ++cell)
      if (dilated[t].test(cell)) cell_tasks[cell].push_back(t);
    union_fp.merge(dilated[t]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      auto excluded = [&](int t) {
        if (t == i || t == j) return true;
        int e = inst.tasks[t].element;
        if (e < 0) return false;
        return e == inst.tasks[i].element || e == inst.tasks[j].element;
      };
      auto line = grid.supercover(inst.tasks[i].exit(),
                                  inst.tasks[j].entry());
      bool hit = false;
      for (int cell : line) {
        int cx = grid.cx_of(cell), cy = grid.cy_of(cell);
        for (const auto& [dx, dy] : margin_offs) {
          if (!grid.in_bounds(cx + dx, cy + dy)) continue;
          int c = grid.index(cx + dx, cy + dy);
          if (!union_fp.test(c)) continue;
          for (int t : cell_tasks[c])
            if (!excluded(t)) {
              hit = true;
              break;
            }
          if (hit) break;
        }
        if (hit) break;
      }
      if (hit) out.set_edge(i, j);
    }

  return out;
}

}  // namespace laser
