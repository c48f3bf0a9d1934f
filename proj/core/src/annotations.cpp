#include "agkmap/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace agkmap {

Point2 midpoint(const LineLabel& line) noexcept {
  return {(line.a.x + line.b.x) / 2.0, (line.a.y + line.b.y) / 2.0};
}

double line_length(const LineLabel& line) noexcept {
  return std::hypot(line.b.x - line.a.x, line.b.y - line.a.y);
}

std::vector<Point2> sample_points(const LineLabel& line) {
  const double dx = line.b.x - line.a.x;
  const double dy = line.b.y - line.a.y;
  const auto n = static_cast<std::size_t>(std::ceil(std::max(std::abs(dx), std::abs(dy)))) + 1;

  std::vector<Point2> points;
  points.reserve(n);
  if (n == 1) {
    points.push_back(line.a);
    return points;
  }
  const auto last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / last;
    points.push_back({line.a.x + t * dx, line.a.y + t * dy});
  }
  points.back() = line.b;
  return points;
}

double slope_angle(const LineLabel& line) {
  if (line.degenerate()) throw std::invalid_argument("zero-length label");
  double theta = std::atan2(line.b.y - line.a.y, line.b.x - line.a.x);
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (theta >= half_pi) theta -= std::numbers::pi;
  if (theta < -half_pi) theta += std::numbers::pi;
  return theta;
}

std::vector<std::size_t> clamp_to_bounds(AnnotationSet& ann) {
  const double max_x = std::max(0, ann.width - 1);
  const double max_y = std::max(0, ann.height - 1);
  auto clamp_point = [&](Point2& p) {
    const Point2 before = p;
    p.x = std::clamp(p.x, 0.0, max_x);
    p.y = std::clamp(p.y, 0.0, max_y);
    return !(p == before);
  };

  std::vector<std::size_t> changed;
  for (std::size_t i = 0; i < ann.labels.size(); ++i) {
    const bool moved_a = clamp_point(ann.labels[i].a);
    const bool moved_b = clamp_point(ann.labels[i].b);
    if (moved_a || moved_b) changed.push_back(i);
  }
  return changed;
}

}  // namespace agkmap
