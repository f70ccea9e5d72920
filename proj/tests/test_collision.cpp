#include "doctest.h"

#include <algorithm>
#include <random>

#include "support.hpp"

#include "laser/collision.hpp"

using namespace laser;

namespace {

ProblemInstance two_point_tasks(Point a, Point b) {
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.actors.push_back(support::make_actor(1));
  inst.tasks.push_back(
      support::make_task(0, TaskKind::Screw, a, {{0, 5}, {1, 5}}));
  inst.tasks.push_back(
      support::make_task(1, TaskKind::Screw, b, {{0, 5}, {1, 5}}));
  return inst;
}

VoxelGrid unit_grid(int nx, int ny, double cell = 1.0) {
  VoxelGrid g;
  g.origin = {0.0, 0.0};
  g.cell_size = cell;
  g.nx = nx;
  g.ny = ny;
  return g;
}

}  // namespace

TEST_CASE("supercover covers every densely sampled cell") {
  VoxelGrid g = unit_grid(20, 20, 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 9.8);
  for (int it = 0; it < 50; ++it) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    auto cover = g.supercover(a, b);
    auto sampled = support::sampled_segment_cells(g, a, b);
    CHECK(std::includes(cover.begin(), cover.end(), sampled.begin(),
                        sampled.end()));
    // every covered cell is near the segment (within one cell diagonal)
    for (int cell : cover)
      CHECK(support::segment_cell_distance(g, cell, a, b) < 1e-9);
  }
}

TEST_CASE("supercover endpoints and degenerate segments") {
  VoxelGrid g = unit_grid(10, 10);
  auto single = g.supercover({2.5, 2.5}, {2.5, 2.5});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == g.index(2, 2));
  auto line = g.supercover({0.5, 0.5}, {4.5, 0.5});
  CHECK(line.size() == 5);  // horizontal run of 5 cells
}

TEST_CASE("disjoint far-apart footprints never node-conflict") {
  ProblemInstance inst = two_point_tasks({1.0, 1.0}, {17.0, 17.0});
  VoxelGrid g = unit_grid(20, 20);
  ensure_footprints(inst, g);
  CollisionConfig cfg;
  cfg.margin = 1.0;
  cfg.envelope_radius = 2.0;
  auto c = build_conflicts(inst, g, cfg);
  CHECK(c.node_count() == 0);
}

TEST_CASE("identical footprints conflict for distinct actors only") {
  ProblemInstance inst = two_point_tasks({5.0, 5.0}, {5.0, 5.0});
  VoxelGrid g = unit_grid(10, 10);
  ensure_footprints(inst, g);
  auto c = build_conflicts(inst, g, {});
  CHECK(c.node(0, 1, 0, 1));
  CHECK(c.node(0, 1, 1, 0));
  CHECK_FALSE(c.node(0, 1, 0, 0));
  CHECK_FALSE(c.node(0, 1, 1, 1));
}

TEST_CASE("corridor through a third task flags the edge") {
  // A, B, C collinear; the A->C transition passes through B's cell
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.actors.push_back(support::make_actor(1));
  for (int i = 0; i < 3; ++i)
    inst.tasks.push_back(support::make_task(
        i, TaskKind::Screw, {1.5 + 3.0 * i, 5.0}, {{0, 5}, {1, 5}}));
  VoxelGrid g = unit_grid(12, 12);
  ensure_footprints(inst, g);
  CollisionConfig cfg;
  cfg.margin = 0.4;
  cfg.envelope_radius = 0.4;
  auto c = build_conflicts(inst, g, cfg);
  CHECK(c.edge(0, 2));
  CHECK(c.edge(2, 0));
  // neighboring hops have a clear corridor
  CHECK_FALSE(c.edge(0, 1));
  CHECK_FALSE(c.edge(1, 2));

  // cross-check with a geometric oracle: the A->C segment passes within
  // the corridor margin of B's footprint, the A->B segment does not pass
  // near any third footprint
  double to_b = 1e18;
  for (int fp : inst.tasks[1].footprint)
    to_b = std::min(to_b, support::segment_cell_distance(
                              g, fp, inst.tasks[0].coords[0],
                              inst.tasks[2].coords[0]));
  CHECK(to_b <= cfg.margin);
  double ab_to_c = 1e18;
  for (int fp : inst.tasks[2].footprint)
    ab_to_c = std::min(ab_to_c, support::segment_cell_distance(
                                    g, fp, inst.tasks[0].coords[0],
                                    inst.tasks[1].coords[0]));
  CHECK(ab_to_c > cfg.margin);
}

TEST_CASE("node conflicts are symmetric and margin-monotone") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.0, 15.0);
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.actors.push_back(support::make_actor(1));
  for (int i = 0; i < 8; ++i)
    inst.tasks.push_back(support::make_task(
        i, TaskKind::Screw, {u(rng), u(rng)}, {{0, 5}, {1, 5}}));
  VoxelGrid g = unit_grid(16, 16);
  ensure_footprints(inst, g);

  CollisionConfig small;
  small.margin = 0.5;
  small.envelope_radius = 1.0;
  CollisionConfig big = small;
  big.margin = 2.0;
  auto cs = build_conflicts(inst, g, small);
  auto cb = build_conflicts(inst, g, big);

  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (i == j) continue;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          CHECK(cs.node(i, j, a, b) == cs.node(j, i, b, a));
          if (cs.node(i, j, a, b)) CHECK(cb.node(i, j, a, b));
        }
    }
}

TEST_CASE("bitset intersection equals the naive double loop on small grids") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(2.0, 30.0);
  ProblemInstance inst;
  inst.actors.push_back(support::make_actor(0));
  inst.actors.push_back(support::make_actor(1));
  for (int i = 0; i < 6; ++i)
    inst.tasks.push_back(support::make_task(
        i, TaskKind::Screw, {u(rng), u(rng)}, {{0, 5}, {1, 5}}));
  VoxelGrid g = unit_grid(32, 32);
  ensure_footprints(inst, g);
  CollisionConfig cfg;
  cfg.margin = 1.2;
  cfg.envelope_radius = 2.5;
  auto c = build_conflicts(inst, g, cfg);

  // naive recomputation: dilate both footprints cell by cell and compare
  auto occupied = [&](const TaskPrimitive& t, double radius,
                      int cell) -> bool {
    double px = g.origin.x + (g.cx_of(cell) + 0.5) * g.cell_size;
    double py = g.origin.y + (g.cy_of(cell) + 0.5) * g.cell_size;
    for (int fp : t.footprint) {
      double qx = g.origin.x + (g.cx_of(fp) + 0.5) * g.cell_size;
      double qy = g.origin.y + (g.cy_of(fp) + 0.5) * g.cell_size;
      if (std::hypot(px - qx, py - qy) <= radius + 1e-9) return true;
    }
    return false;
  };
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      bool naive = false;
      for (int cell = 0; cell < g.cells() && !naive; ++cell)
        if (occupied(inst.tasks[i], cfg.envelope_radius, cell) &&
            occupied(inst.tasks[j], cfg.envelope_radius, cell))
          naive = true;
      CHECK(c.node(i, j, 0, 1) == naive);
    }
}

TEST_CASE("footprint outside the grid raises GridError") {
  ProblemInstance inst = two_point_tasks({1.0, 1.0}, {5.0, 5.0});
  VoxelGrid g = unit_grid(3, 3);
  CHECK_THROWS_AS(ensure_footprints(inst, g), GridError);
  inst.tasks[1].coords = {{2.0, 2.0}};
  ensure_footprints(inst, g);
  inst.tasks[0].footprint = {99};
  CHECK_THROWS_AS(build_conflicts(inst, g, {}), GridError);
}
