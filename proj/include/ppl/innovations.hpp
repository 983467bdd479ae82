#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ppl/cv.hpp"
#include "ppl/geometry.hpp"
#include "ppl/kernel.hpp"

namespace ppl {

// First-order test functions h(u; y).
//
//   Constant(c)      h = c
//   CoordPower(g)    h = u_1^g * u_2^g
//   XiTransform(e)   h = f(w * xi(u; y)) with f(x) = x^e; e = -1 gives the
//                    inverse (Stoyan-Grabarnik) choice, e = -1/2 the
//                    inverse square root.
class TestFunction {
 public:
  enum class Kind { Constant, CoordPower, XiTransform };

  static TestFunction constant(double c = 1.0);
  static TestFunction coord_power(double gamma);
  static TestFunction xi_transform(double exponent);
  static TestFunction inverse() { return xi_transform(-1.0); }
  static TestFunction inverse_sqrt() { return xi_transform(-0.5); }

  Kind kind() const { return kind_; }
  // c for Constant, gamma for CoordPower, the exponent for XiTransform.
  double parameter() const { return parameter_; }
  bool depends_on_estimator() const { return kind_ == Kind::XiTransform; }
  std::string name() const;

  // Pattern-free evaluation. Throws for XiTransform.
  double operator()(Point u) const;
  // f(value) for XiTransform; f(0) = +inf for negative exponents.
  double transform(double value) const;

  // Integral of h over each grid cell (pattern-free kinds). CoordPower uses
  // the exact antiderivative when gamma > -1 and midpoint nodes otherwise.
  std::vector<double> cell_integrals(const QuadratureGrid& grid) const;
  double integral(const QuadratureGrid& grid) const;
  // h^2 as a test function of the same kind.
  TestFunction squared() const;

 private:
  TestFunction(Kind kind, double parameter, double scale)
      : kind_(kind), parameter_(parameter), scale_(scale) {}

  Kind kind_;
  double parameter_;
  double scale_;  // multiplies CoordPower; set by squared()
};

struct ConstantIntensity {
  double theta = 1.0;
};

struct ParametricIntensity {
  Field rho;
};

// Papangelou conditional intensity beta * 1{d(u, y) >= range}.
struct HardCorePapangelou {
  double beta = 100.0;
  double range = 0.05;
};

struct KernelIntensity {
  double bandwidth = 0.1;
  EdgeCorrection edge = EdgeCorrection::None;
};

using EstimatorFamily =
    std::variant<ConstantIntensity, ParametricIntensity, HardCorePapangelou, KernelIntensity>;

// xi(u; y), optionally with point `exclude` of y removed.
double evaluate(const EstimatorFamily& xi, Point u, const PointPattern& y,
                std::optional<std::size_t> exclude = std::nullopt);
bool is_pattern_free(const EstimatorFamily& xi);
// True when xi(.; y) > 0 on the whole window for this y.
bool is_strictly_positive(const EstimatorFamily& xi, const PointPattern& y);

enum class WeightKind { ProductDensity, Papangelou, NonParametric };

enum class IndicatorMode { Standard, AlwaysOne };

// How the integral of f(w xi) xi treats the zero set of xi. Exact integrates
// over the grid cells where xi > 0; Window replaces the support by the whole
// window (only differs for the inverse transform).
enum class SupportMode { Exact, Window };

struct InnovationOptions {
  IndicatorMode indicator = IndicatorMode::Standard;
  SupportMode support = SupportMode::Exact;
};

struct InnovationValue {
  double value = 0.0;
  std::size_t fold = 0;
  bool indicator = true;
  bool infeasible = false;

  // I_i times the innovation; +inf for a counted infeasible fold.
  double weighted() const;
};

// (1 - p) for product densities, p / (1 - p) otherwise.
double innovation_weight(WeightKind kind, double p);

bool fold_indicator(const CvSplit& split, WeightKind kind, IndicatorMode mode);

// Sum over x of h(x; x \ {x}) minus the integral of h(u; x) xi(u; x).
double univariate_innovation(const EstimatorFamily& xi, const TestFunction& h,
                             const PointPattern& x, const QuadratureGrid& grid);

// n = 1 bivariate innovation of a CV split.
//   ProductDensity: sum_{x in T} h(x) - (1 - p) int h xi
//   otherwise:      sum_{x in V} h(x; T) - p / (1 - p) int h(u; T) xi(u; T)
InnovationValue bivariate_innovation(const EstimatorFamily& xi, const TestFunction& h,
                                     const CvSplit& split, WeightKind kind,
                                     const QuadratureGrid& grid,
                                     const InnovationOptions& options = {});

// Supremum of the hard-core ranges that keep every counted fold finite: the
// smallest validation-to-training distance over those folds. Throws when no
// fold is counted.
double hardcore_feasible_range(std::span<const CvSplit> splits,
                               IndicatorMode mode = IndicatorMode::Standard);

}  // namespace ppl
