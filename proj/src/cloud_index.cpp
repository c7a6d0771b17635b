#include "ratdyn/cloud_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace ratdyn {

namespace {
constexpr std::size_t kLeafSize = 12;

double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}
}  // namespace

CloudIndex::CloudIndex(std::span<const SpherePoint> points) {
  coords_.reserve(points.size());
  for (const SpherePoint& p : points) coords_.push_back(p.embed());
  order_.resize(coords_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!coords_.empty()) build(0, coords_.size());
}

int CloudIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};
  for (std::size_t i = begin; i < end; ++i) {
    const Vec3& c = coords_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return coords_[a][axis] < coords_[b][axis]; });
  const double split = coords_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

CloudIndex::Hit CloudIndex::nearest(const SpherePoint& p) const {
  const auto hits = k_nearest(p, 1);
  if (hits.empty()) throw std::logic_error("CloudIndex::nearest on empty index");
  return hits.front();
}

std::vector<CloudIndex::Hit> CloudIndex::k_nearest(const SpherePoint& p, std::size_t k) const {
  std::vector<Hit> out;
  if (coords_.empty() || k == 0) return out;
  const Vec3 q = p.embed();
  // Max-heap of the best k squared distances.
  auto cmp = [](const Hit& a, const Hit& b) { return a.distance < b.distance; };
  std::priority_queue<Hit, std::vector<Hit>, decltype(cmp)> heap(cmp);
  auto worst = [&] {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().distance;
  };

  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const double d2 = dist2(coords_[order_[i]], q);
        if (d2 < worst()) {
          heap.push({order_[i], d2});
          if (heap.size() > k) heap.pop();
        }
      }
      continue;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta < 0 ? node.left : node.right;
    const int far = delta < 0 ? node.right : node.left;
    if (delta * delta < worst()) stack.push_back(far);
    stack.push_back(near);
  }
  while (!heap.empty()) {
    out.push_back({heap.top().index, std::sqrt(heap.top().distance)});
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> CloudIndex::within(const SpherePoint& p, double radius) const {
  std::vector<std::size_t> out;
  if (coords_.empty()) return out;
  const Vec3 q = p.embed();
  const double r2 = radius * radius;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        if (dist2(coords_[order_[i]], q) <= r2) out.push_back(order_[i]);
      }
      continue;
    }
    const double delta = q[node.axis] - node.split;
    if (delta <= radius) stack.push_back(node.left);
    if (delta >= -radius) stack.push_back(node.right);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ratdyn
