#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ppl {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using Field = std::function<double(Point)>;

// Axis-aligned rectangular observation window.
class Window {
 public:
  Window() = default;  // unit square
  Window(double x_min, double x_max, double y_min, double y_max);

  static Window unit_square() { return {}; }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  double shorter_side() const;

  bool contains(Point u) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  double y_min_ = 0.0;
  double y_max_ = 1.0;
};

// A finite simple point pattern observed in a window.
//
// Construction checks that every point is finite, lies in the window and
// that no two points coincide exactly. Subsets of an existing pattern skip
// the checks since they inherit them.
class PointPattern {
 public:
  explicit PointPattern(Window window = {});
  PointPattern(std::vector<Point> points, Window window);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const Point> points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const Window& window() const { return window_; }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  PointPattern subset(std::span<const std::size_t> indices) const;

 private:
  struct Unchecked {};
  PointPattern(Unchecked, std::vector<Point> points, Window window);

  std::vector<Point> points_;
  Window window_;
};

inline constexpr std::size_t kDefaultGridResolution = 128;

// Uniform G x G midpoint grid over a window. Cell (col, row) has index
// row * G + col; rows run along y.
class QuadratureGrid {
 public:
  QuadratureGrid(const Window& window, std::size_t resolution = kDefaultGridResolution);

  const Window& window() const { return window_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t cell_count() const { return centers_.size(); }
  double cell_area() const { return cell_width_ * cell_height_; }
  double cell_width() const { return cell_width_; }
  double cell_height() const { return cell_height_; }
  std::span<const Point> centers() const { return centers_; }
  const Point& center(std::size_t i) const { return centers_[i]; }

  // Bounds of cell i.
  double cell_x0(std::size_t i) const;
  double cell_y0(std::size_t i) const;

 private:
  Window window_;
  std::size_t resolution_;
  double cell_width_;
  double cell_height_;
  std::vector<Point> centers_;
};

double distance(Point a, Point b);
double squared_distance(Point a, Point b);

// Smallest distance between two distinct points. Throws ValidationError
// for fewer than two points.
double min_pairwise_distance(const PointPattern& x);

// Midpoint rule: sum over cells of f(center) * cell_area.
double integrate_on_window(const Field& f, const QuadratureGrid& grid);
double integrate_on_window(const Field& f, const Window& w, const QuadratureGrid& grid);

// Midpoint sum of precomputed values at the grid cell centers.
double integrate_values(std::span<const double> values, const QuadratureGrid& grid);

// Nearest-point distance of every grid cell center, truncated at a radius.
// Answers |W \ U b(x, R)| for any R up to the truncation radius without
// touching the points again. A cell is covered when its center lies at
// distance < R from some point.
class CoverageProfile {
 public:
  CoverageProfile(std::span<const Point> points, const QuadratureGrid& grid, double max_radius);

  double max_radius() const { return max_radius_; }
  double uncovered_area(double range) const;

 private:
  double cell_area_;
  std::size_t cell_count_;
  double max_radius_;
  std::vector<double> sorted_distances_;  // finite distances <= max_radius
};

double uncovered_area(const PointPattern& x, double range, const QuadratureGrid& grid);

}  // namespace ppl
