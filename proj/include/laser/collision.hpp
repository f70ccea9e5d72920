#ifndef LASER_COLLISION_HPP
#define LASER_COLLISION_HPP

#include <cstdint>
#include <vector>

#include "laser/types.hpp"

namespace laser {

class Bitset {
 public:
  explicit Bitset(int bits = 0) : bits_(bits), words_((bits + 63) / 64, 0) {}

  void set(int i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  bool test(int i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }
  bool intersects(const Bitset& other) const {
    std::size_t n = std::min(words_.size(), other.words_.size());
    for (std::size_t w = 0; w < n; ++w)
      if (words_[w] & other.words_[w]) return true;
    return false;
  }
  void merge(const Bitset& other) {
    for (std::size_t w = 0; w < words_.size(); ++w)
      words_[w] |= other.words_[w];
  }
  int size() const { return bits_; }

 private:
  int bits_;
  std::vector<std::uint64_t> words_;
};

struct VoxelGrid {
  Point origin;
  double cell_size = 0.1;
  int nx = 0;
  int ny = 0;

  int cells() const { return nx * ny; }
  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cy >= 0 && cx < nx && cy < ny;
  }
  int index(int cx, int cy) const { return cy * nx + cx; }
  int cx_of(int cell) const { return cell % nx; }
  int cy_of(int cell) const { return cell / nx; }

  // Cell containing p, or -1 when outside the grid.
  int cell_of(const Point& p) const;

  // All cells the segment a-b passes through (supercover: includes both
  // cells at exact corner crossings).
  std::vector<int> supercover(const Point& a, const Point& b) const;

  // Grid from instance metadata, or from the coordinate bounding box
  // padded by pad_m on every side.
  static VoxelGrid from_instance(const ProblemInstance& instance,
                                 double cell_size = 0.1, double pad_m = 2.0);
};

struct CollisionConfig {
  double margin = 0.2;           // safety margin dilation (m)
  double envelope_radius = 1.5;  // actor reach envelope disk (m)
};

// Gives coord-cell footprints to tasks that have none.
void ensure_footprints(ProblemInstance& instance, const VoxelGrid& grid);

// Node conflicts from dilated task footprints unioned with the acting
// robot's reach envelope; edge conflicts from margin-wide transition
// corridors crossing third-party footprints.
ConflictMatrices build_conflicts(const ProblemInstance& instance,
                                 const VoxelGrid& grid,
                                 const CollisionConfig& config = {});

}  // namespace laser

#endif  // LASER_COLLISION_HPP
