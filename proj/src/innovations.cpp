#include "ppl/innovations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ppl/error.hpp"

namespace ppl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void throw_non_finite(const char* what, Point u) {
  std::ostringstream msg;
  msg << "non-finite " << what << " at (" << u.x << ", " << u.y << ")";
  throw ComputationError(msg.str());
}

double nearest_squared_distance(Point u, const PointPattern& y, std::optional<std::size_t> skip) {
  double best = kInf;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (skip && *skip == i) continue;
    best = std::min(best, squared_distance(u, y[i]));
  }
  return best;
}

// Integral over one axis interval of t^gamma.
double power_integral(double a, double b, double gamma) {
  if (gamma == 0.0) return b - a;
  return (std::pow(b, gamma + 1.0) - std::pow(a, gamma + 1.0)) / (gamma + 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::constant(double c) {
  if (!std::isfinite(c)) throw ValidationError("constant test function must be finite");
  return {Kind::Constant, c, 1.0};
}

TestFunction TestFunction::coord_power(double gamma) {
  if (!std::isfinite(gamma)) throw ValidationError("test function exponent must be finite");
  return {Kind::CoordPower, gamma, 1.0};
}

TestFunction TestFunction::xi_transform(double exponent) {
  if (!std::isfinite(exponent)) throw ValidationError("transform exponent must be finite");
  return {Kind::XiTransform, exponent, 1.0};
}

std::string TestFunction::name() const {
  std::ostringstream s;
  switch (kind_) {
    case Kind::Constant:
      s << "constant(" << parameter_ << ")";
      break;
    case Kind::CoordPower:
      s << "coord_power(" << parameter_ << ")";
      break;
    case Kind::XiTransform:
      if (parameter_ == -1.0) {
        s << "inverse";
      } else if (parameter_ == -0.5) {
        s << "inverse_sqrt";
      } else {
        s << "xi_power(" << parameter_ << ")";
      }
      break;
  }
  return s.str();
}

double TestFunction::operator()(Point u) const {
  switch (kind_) {
    case Kind::Constant:
      return parameter_;
    case Kind::CoordPower:
      if (parameter_ == 0.0) return scale_;
      return scale_ * std::pow(u.x, parameter_) * std::pow(u.y, parameter_);
    case Kind::XiTransform:
      break;
  }
  throw ValidationError("test function depends on the estimator; use transform()");
}

double TestFunction::transform(double value) const {
  if (kind_ != Kind::XiTransform) throw ValidationError("transform() needs an XiTransform");
  if (value == 0.0 && parameter_ < 0.0) return kInf;
  if (parameter_ == -1.0) return scale_ / value;
  if (parameter_ == -0.5) return scale_ / std::sqrt(value);
  return scale_ * std::pow(value, parameter_);
}

std::vector<double> TestFunction::cell_integrals(const QuadratureGrid& grid) const {
  if (kind_ == Kind::XiTransform) {
    throw ValidationError("cell integrals need a pattern-free test function");
  }
  const auto g = grid.resolution();
  std::vector<double> out(grid.cell_count());
  if (kind_ == Kind::Constant) {
    std::fill(out.begin(), out.end(), parameter_ * grid.cell_area());
    return out;
  }
  const double gamma = parameter_;
  if (gamma <= -1.0) {
    // Divergent integral: midpoint nodes stay off the singular axes.
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Point c = grid.center(i);
      out[i] = (*this)(c)*grid.cell_area();
      if (!std::isfinite(out[i])) throw_non_finite("test function", c);
    }
    return out;
  }
  const auto& w = grid.window();
  std::vector<double> ax(g);
  std::vector<double> ay(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double x0 = w.x_min() + double(j) * grid.cell_width();
    const double y0 = w.y_min() + double(j) * grid.cell_height();
    const double x1 = j + 1 == g ? w.x_max() : x0 + grid.cell_width();
    const double y1 = j + 1 == g ? w.y_max() : y0 + grid.cell_height();
    ax[j] = power_integral(x0, x1, gamma);
    ay[j] = power_integral(y0, y1, gamma);
    if (!std::isfinite(ax[j]) || !std::isfinite(ay[j])) {
      throw ValidationError(
          "coordinate power test function needs a window in the positive quadrant");
    }
  }
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) out[r * g + c] = scale_ * ax[c] * ay[r];
  }
  return out;
}

double TestFunction::integral(const QuadratureGrid& grid) const {
  const auto v = cell_integrals(grid);
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

TestFunction TestFunction::squared() const {
  switch (kind_) {
    case Kind::Constant:
      return {Kind::Constant, parameter_ * parameter_, 1.0};
    case Kind::CoordPower:
      return {Kind::CoordPower, 2.0 * parameter_, scale_ * scale_};
    case Kind::XiTransform:
      break;
  }
  return {Kind::XiTransform, 2.0 * parameter_, scale_ * scale_};
}

// ---------------------------------------------------------------------------
// Estimator families

double evaluate(const EstimatorFamily& xi, Point u, const PointPattern& y,
                std::optional<std::size_t> exclude) {
  struct Visitor {
    Point u;
    const PointPattern& y;
    std::optional<std::size_t> exclude;

    double operator()(const ConstantIntensity& c) const { return c.theta; }
    double operator()(const ParametricIntensity& p) const {
      const double v = p.rho(u);
      if (!std::isfinite(v) || v < 0.0) throw_non_finite("intensity", u);
      return v;
    }
    double operator()(const HardCorePapangelou& h) const {
      // Compared as distances so that the boundary agrees with
      // hardcore_feasible_range and CoverageProfile.
      const double d = std::sqrt(nearest_squared_distance(u, y, exclude));
      return d < h.range ? 0.0 : h.beta;
    }
    double operator()(const KernelIntensity& k) const {
      return kernel_intensity(y, k.bandwidth, u, k.edge, exclude);
    }
  };
  return std::visit(Visitor{u, y, exclude}, xi);
}

bool is_pattern_free(const EstimatorFamily& xi) {
  return std::holds_alternative<ConstantIntensity>(xi) ||
         std::holds_alternative<ParametricIntensity>(xi);
}

bool is_strictly_positive(const EstimatorFamily& xi, const PointPattern& y) {
  if (const auto* c = std::get_if<ConstantIntensity>(&xi)) return c->theta > 0.0;
  if (std::holds_alternative<KernelIntensity>(xi)) return !y.empty();
  if (const auto* h = std::get_if<HardCorePapangelou>(&xi)) {
    return h->beta > 0.0 && (y.empty() || h->range == 0.0);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Innovations

double InnovationValue::weighted() const {
  if (!indicator) return 0.0;
  return infeasible ? kInf : value;
}

double innovation_weight(WeightKind kind, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("retention p must lie in (0, 1)");
  return kind == WeightKind::ProductDensity ? 1.0 - p : p / (1.0 - p);
}

bool fold_indicator(const CvSplit& split, WeightKind kind, IndicatorMode mode) {
  if (mode == IndicatorMode::AlwaysOne) return true;
  const auto nt = split.training.size();
  if (kind == WeightKind::ProductDensity) return nt >= 1;
  return nt >= 1 && nt + 1 <= split.source_size;
}

namespace {

// Integral over the window of h(u; y) * xi(u; y) where h uses weight w
// inside f(w xi).
double integral_term(const EstimatorFamily& xi, const TestFunction& h, const PointPattern& y,
                     double w, const QuadratureGrid& grid, SupportMode support) {
  const auto& centers = grid.centers();
  double total = 0.0;
  if (!h.depends_on_estimator()) {
    if (const auto* c = std::get_if<ConstantIntensity>(&xi)) return c->theta * h.integral(grid);
    const auto cells = h.cell_integrals(grid);
    for (std::size_t i = 0; i < cells.size(); ++i) total += cells[i] * evaluate(xi, centers[i], y);
  } else {
    if (h.parameter() == -1.0 &&
        (support == SupportMode::Window || is_strictly_positive(xi, y))) {
      // f(w xi) xi = 1 / w on the support.
      return grid.window().area() / w;
    }
    for (const auto& c : centers) {
      const double v = evaluate(xi, c, y);
      if (v > 0.0) total += h.transform(w * v) * v;
    }
    total *= grid.cell_area();
  }
  if (!std::isfinite(total)) throw ComputationError("non-finite innovation integral");
  return total;
}

// h(x; y) for the sum part, or +inf when f(w xi) diverges.
double sum_term(const EstimatorFamily& xi, const TestFunction& h, Point x, const PointPattern& y,
                std::optional<std::size_t> exclude, double w) {
  double v = 0.0;
  if (h.depends_on_estimator()) {
    v = h.transform(w * evaluate(xi, x, y, exclude));
  } else {
    v = h(x);
  }
  if (std::isnan(v) || v == -kInf) throw_non_finite("test function", x);
  return v;
}

}  // namespace

double univariate_innovation(const EstimatorFamily& xi, const TestFunction& h,
                             const PointPattern& x, const QuadratureGrid& grid) {
  if (!(grid.window() == x.window())) throw ValidationError("grid does not cover the window");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = sum_term(xi, h, x[i], x, i, 1.0);
    if (!std::isfinite(v)) throw_non_finite("innovation term", x[i]);
    sum += v;
  }
  return sum - integral_term(xi, h, x, 1.0, grid, SupportMode::Exact);
}

InnovationValue bivariate_innovation(const EstimatorFamily& xi, const TestFunction& h,
                                     const CvSplit& split, WeightKind kind,
                                     const QuadratureGrid& grid,
                                     const InnovationOptions& options) {
  if (!(grid.window() == split.training.window())) {
    throw ValidationError("grid does not cover the window");
  }
  const double w = innovation_weight(kind, split.p);
  InnovationValue out;
  out.fold = split.fold;
  out.indicator = fold_indicator(split, kind, options.indicator);
  const PointPattern& t = split.training;
  double sum = 0.0;
  if (kind == WeightKind::ProductDensity) {
    if (!is_pattern_free(xi) || h.depends_on_estimator()) {
      throw ValidationError("product density innovations need a pattern-free estimator and h");
    }
    for (const auto& x : t) sum += sum_term(xi, h, x, t, std::nullopt, w);
  } else {
    for (const auto& v : split.validation) {
      const double term = sum_term(xi, h, v, t, std::nullopt, w);
      if (term == kInf) {
        out.infeasible = true;
        out.value = kInf;
        return out;
      }
      sum += term;
    }
  }
  out.value = sum - w * integral_term(xi, h, t, w, grid, options.support);
  return out;
}

double hardcore_feasible_range(std::span<const CvSplit> splits, IndicatorMode mode) {
  double best = kInf;
  bool counted = false;
  for (const auto& s : splits) {
    if (!fold_indicator(s, WeightKind::Papangelou, mode)) continue;
    counted = true;
    for (const auto& v : s.validation) {
      best = std::min(best, nearest_squared_distance(v, s.training, std::nullopt));
    }
  }
  if (!counted) throw ValidationError("no admissible folds");
  return std::sqrt(best);
}

}  // namespace ppl
