#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ratdyn/sphere.hpp"

namespace ratdyn {

// Static 3-d tree over the sphere embedding of a point cloud. Euclidean
// distance between embeddings is the chordal distance, so every query here
// is in the chordal metric, infinity included.
class CloudIndex {
 public:
  struct Hit {
    std::size_t index;
    double distance;
  };

  CloudIndex() = default;
  explicit CloudIndex(std::span<const SpherePoint> points);

  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }

  // Throws std::logic_error on an empty index.
  Hit nearest(const SpherePoint& p) const;
  // Sorted by distance; at most k hits.
  std::vector<Hit> k_nearest(const SpherePoint& p, std::size_t k) const;
  std::vector<std::size_t> within(const SpherePoint& p, double radius) const;

 private:
  using Vec3 = std::array<double, 3>;
  struct Node {
    std::size_t begin, end;  // range in order_
    int axis;                // -1 for a leaf
    double split;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);

  std::vector<Vec3> coords_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace ratdyn
