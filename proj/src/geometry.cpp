#include "ppl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ppl/error.hpp"

namespace ppl {

Window::Window(double x_min, double x_max, double y_min, double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) ||
      !std::isfinite(y_max)) {
    throw ValidationError("window bounds must be finite");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw ValidationError("window requires x_min < x_max and y_min < y_max");
  }
}

double Window::shorter_side() const { return std::min(width(), height()); }

bool Window::contains(Point u) const {
  return u.x >= x_min_ && u.x <= x_max_ && u.y >= y_min_ && u.y <= y_max_;
}

PointPattern::PointPattern(Window window) : window_(window) {}

PointPattern::PointPattern(std::vector<Point> points, Window window)
    : points_(std::move(points)), window_(window) {
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("point pattern contains a non-finite coordinate");
    }
    if (!window_.contains(p)) {
      std::ostringstream msg;
      msg << "point (" << p.x << ", " << p.y << ") lies outside the window";
      throw ValidationError(msg.str());
    }
  }
  std::vector<Point> sorted = points_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("point pattern contains coincident points");
  }
}

PointPattern::PointPattern(Unchecked, std::vector<Point> points, Window window)
    : points_(std::move(points)), window_(window) {}

PointPattern PointPattern::subset(std::span<const std::size_t> indices) const {
  std::vector<Point> pts;
  pts.reserve(indices.size());
  for (auto i : indices) pts.push_back(points_.at(i));
  return PointPattern(Unchecked{}, std::move(pts), window_);
}

QuadratureGrid::QuadratureGrid(const Window& window, std::size_t resolution)
    : window_(window), resolution_(resolution) {
  if (resolution == 0) throw ValidationError("grid resolution must be positive");
  cell_width_ = window.width() / static_cast<double>(resolution);
  cell_height_ = window.height() / static_cast<double>(resolution);
  centers_.reserve(resolution * resolution);
  for (std::size_t row = 0; row < resolution; ++row) {
    const double y = window.y_min() + (static_cast<double>(row) + 0.5) * cell_height_;
    for (std::size_t col = 0; col < resolution; ++col) {
      const double x = window.x_min() + (static_cast<double>(col) + 0.5) * cell_width_;
      centers_.push_back({x, y});
    }
  }
}

double QuadratureGrid::cell_x0(std::size_t i) const {
  return window_.x_min() + static_cast<double>(i % resolution_) * cell_width_;
}

double QuadratureGrid::cell_y0(std::size_t i) const {
  return window_.y_min() + static_cast<double>(i / resolution_) * cell_height_;
}

double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }

double min_pairwise_distance(const PointPattern& x) {
  if (x.size() < 2) throw ValidationError("insufficient points");
  double best = std::numeric_limits<double>::infinity();
  const auto pts = x.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::min(best, squared_distance(pts[i], pts[j]));
    }
  }
  return std::sqrt(best);
}

double integrate_on_window(const Field& f, const QuadratureGrid& grid) {
  double sum = 0.0;
  for (const auto& c : grid.centers()) {
    const double v = f(c);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite integrand at (" << c.x << ", " << c.y << ")";
      throw ComputationError(msg.str());
    }
    sum += v;
  }
  return sum * grid.cell_area();
}

double integrate_on_window(const Field& f, const Window& w, const QuadratureGrid& grid) {
  if (!(grid.window() == w)) throw ValidationError("quadrature grid does not cover the window");
  return integrate_on_window(f, grid);
}

double integrate_values(std::span<const double> values, const QuadratureGrid& grid) {
  if (values.size() != grid.cell_count()) {
    throw ValidationError("value count does not match the quadrature grid");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_area();
}

CoverageProfile::CoverageProfile(std::span<const Point> points, const QuadratureGrid& grid,
                                 double max_radius)
    : cell_area_(grid.cell_area()), cell_count_(grid.cell_count()), max_radius_(max_radius) {
  if (!(max_radius >= 0.0)) throw ValidationError("coverage radius must be nonnegative");
  if (max_radius == 0.0 || points.empty()) return;

  const auto g = grid.resolution();
  const auto& w = grid.window();
  std::vector<double> nearest(cell_count_, std::numeric_limits<double>::infinity());
  const double r2 = max_radius * max_radius;
  auto clamp_index = [g](double v) {
    if (v < 0.0) return std::size_t{0};
    const auto i = static_cast<std::size_t>(v);
    return std::min(i, g - 1);
  };
  for (const auto& p : points) {
    const auto c0 = clamp_index((p.x - max_radius - w.x_min()) / grid.cell_width());
    const auto c1 = clamp_index((p.x + max_radius - w.x_min()) / grid.cell_width());
    const auto r0 = clamp_index((p.y - max_radius - w.y_min()) / grid.cell_height());
    const auto r1 = clamp_index((p.y + max_radius - w.y_min()) / grid.cell_height());
    for (auto row = r0; row <= r1; ++row) {
      for (auto col = c0; col <= c1; ++col) {
        const auto idx = row * g + col;
        const double d2 = squared_distance(grid.center(idx), p);
        if (d2 <= r2 && d2 < nearest[idx]) nearest[idx] = d2;
      }
    }
  }
  for (double d2 : nearest) {
    if (std::isfinite(d2)) sorted_distances_.push_back(std::sqrt(d2));
  }
  std::sort(sorted_distances_.begin(), sorted_distances_.end());
}

double CoverageProfile::uncovered_area(double range) const {
  if (!(range >= 0.0)) throw ValidationError("range must be nonnegative");
  if (range > max_radius_) throw ValidationError("range exceeds the coverage profile radius");
  const auto covered = static_cast<std::size_t>(
      std::lower_bound(sorted_distances_.begin(), sorted_distances_.end(), range) -
      sorted_distances_.begin());
  return static_cast<double>(cell_count_ - covered) * cell_area_;
}

double uncovered_area(const PointPattern& x, double range, const QuadratureGrid& grid) {
  return CoverageProfile(x.points(), grid, range).uncovered_area(range);
}

}  // namespace ppl
