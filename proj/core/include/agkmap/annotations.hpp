#pragma once

#include <string>
#include <vector>

namespace agkmap {

// Pixel coordinates, origin top-left, x rightward, y downward. Sub-pixel
// values are allowed.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// One annotated object, drawn tail to head. Endpoint order carries no
// meaning downstream.
struct LineLabel {
  Point2 a;
  Point2 b;

  [[nodiscard]] bool degenerate() const noexcept { return a == b; }
  [[nodiscard]] LineLabel reversed() const noexcept { return {b, a}; }

  friend bool operator==(const LineLabel&, const LineLabel&) = default;
};

struct AnnotationSet {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<LineLabel> labels;

  [[nodiscard]] std::size_t count() const noexcept { return labels.size(); }
};

Point2 midpoint(const LineLabel& line) noexcept;

double line_length(const LineLabel& line) noexcept;

/// Evenly spaced points from a to b inclusive. The count is
/// ceil(max(|dx|, |dy|)) + 1, so a 20-pixel diagonal yields 21 points and a
/// vertical line is sampled as densely as a horizontal one.
std::vector<Point2> sample_points(const LineLabel& line);

/// Orientation of the undirected line in [-pi/2, pi/2). Throws
/// std::invalid_argument("zero-length label") when a == b.
double slope_angle(const LineLabel& line);

/// Clamps both endpoints of every label into [0, width-1] x [0, height-1].
/// Returns the indices of labels that were modified.
std::vector<std::size_t> clamp_to_bounds(AnnotationSet& ann);

}  // namespace agkmap
