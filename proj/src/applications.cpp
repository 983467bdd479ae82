#include "ppl/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ppl/error.hpp"

namespace ppl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_pattern_free(const TestFunction& h) {
  if (h.depends_on_estimator()) {
    throw ValidationError("constant-intensity fits need a pattern-free test function");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Constant intensity

double classical_intensity(const PointPattern& x) {
  return static_cast<double>(x.size()) / x.window().area();
}

double h_weighted_estimate(const PointPattern& x, const TestFunction& h,
                           const QuadratureGrid& grid) {
  require_pattern_free(h);
  const double denom = h.integral(grid);
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw ValidationError("test function integral must be finite and nonzero");
  }
  double num = 0.0;
  for (const auto& p : x) num += h(p);
  return num / denom;
}

ConstantIntensityResult fit_constant_intensity(const PointPattern& x,
                                               std::span<const CvSplit> splits,
                                               const TestFunction& h, const QuadratureGrid& grid,
                                               IndicatorMode indicator) {
  require_pattern_free(h);
  const double integral = h.integral(grid);
  if (integral == 0.0 || !std::isfinite(integral)) {
    throw ValidationError("test function integral must be finite and nonzero");
  }
  std::vector<double> hx(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    hx[i] = h(x[i]);
    if (!std::isfinite(hx[i])) {
      std::ostringstream msg;
      msg << "non-finite test function at (" << x[i].x << ", " << x[i].y << ")";
      throw ComputationError(msg.str());
    }
    total += hx[i];
  }
  ConstantIntensityResult out;
  out.classical = classical_intensity(x);
  out.h_weighted = total / integral;
  for (const auto& s : splits) {
    if (s.source_size != x.size()) throw ValidationError("split does not belong to the pattern");
    if (!fold_indicator(s, WeightKind::ProductDensity, indicator)) continue;
    double sum = 0.0;
    for (auto i : s.training_index) sum += hx[i];
    out.fold_estimates.push_back(sum / integral / (1.0 - s.p));
  }
  if (out.fold_estimates.empty()) {
    throw ValidationError("every fold has an empty training set");
  }
  out.counted_folds = out.fold_estimates.size();
  out.theta_median = median(out.fold_estimates);
  out.theta_mean = mean(out.fold_estimates);
  return out;
}

ConstantIntensityResult fit_constant_intensity(const PointPattern& x, const CvScheme& scheme,
                                               RngSeed seed, const TestFunction& h,
                                               const QuadratureGrid& grid,
                                               IndicatorMode indicator) {
  const auto splits = make_splits(x, scheme, seed);
  return fit_constant_intensity(x, splits, h, grid, indicator);
}

double constant_intensity_variance_oracle(double theta0, const TestFunction& h, double p,
                                          std::size_t k, const QuadratureGrid& grid) {
  require_pattern_free(h);
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("retention p must lie in (0, 1)");
  if (k < 1) throw ValidationError("k must be positive");
  const double ih = h.integral(grid);
  const double ih2 = h.squared().integral(grid);
  return (p / ((1.0 - p) * static_cast<double>(k)) + 1.0) * theta0 * ih2 / (ih * ih);
}

// ---------------------------------------------------------------------------
// Hard-core process

PseudolikelihoodFit fit_hardcore_pseudolikelihood(const PointPattern& x,
                                                  const QuadratureGrid& grid) {
  if (x.size() < 2) throw ValidationError("insufficient points");
  const double n = static_cast<double>(x.size());
  PseudolikelihoodFit out;
  out.range = min_pairwise_distance(x) * n / (n + 1.0);
  const double free_area = uncovered_area(x, out.range, grid);
  if (!(free_area > 0.0)) throw ComputationError("window fully covered by hard-core balls");
  out.beta = n / free_area;
  return out;
}

namespace {

void check_transform(const TestFunction& f) {
  if (f.kind() != TestFunction::Kind::XiTransform) {
    throw ValidationError("hard-core fits take an estimator transform test function");
  }
}

// f(c) (nv - c a), c = w beta.
double reduced_value(const TestFunction& f, double c, double nv, double area) {
  return f.transform(c) * (nv - c * area);
}

}  // namespace

InnovationValue hardcore_reduced_innovation(const CvSplit& split, double beta, double range,
                                            const TestFunction& f, const QuadratureGrid& grid) {
  check_transform(f);
  InnovationValue out;
  out.fold = split.fold;
  out.indicator = fold_indicator(split, WeightKind::Papangelou, IndicatorMode::Standard);
  for (const auto& v : split.validation) {
    for (const auto& t : split.training) {
      if (distance(v, t) < range) {
        out.infeasible = true;
        out.value = kInf;
        return out;
      }
    }
  }
  const double c = innovation_weight(WeightKind::Papangelou, split.p) * beta;
  const double area = uncovered_area(split.training, range, grid);
  out.value = reduced_value(f, c, static_cast<double>(split.validation.size()), area);
  return out;
}

HardCoreFit fit_hardcore(const PointPattern& x, std::span<const CvSplit> splits,
                         const TestFunction& f, LossKind loss_kind, const QuadratureGrid& grid,
                         const HardCoreSearch& search) {
  check_transform(f);
  if (x.size() < 2) throw ValidationError("insufficient points");
  if (search.range_candidates < 1) throw ValidationError("need at least one range candidate");
  HardCoreFit out;
  out.feasible_upper = hardcore_feasible_range(splits);

  struct Fold {
    double nv;
    double w;
    CoverageProfile profile;
  };
  std::vector<Fold> folds;
  for (const auto& s : splits) {
    if (!fold_indicator(s, WeightKind::Papangelou, IndicatorMode::Standard)) continue;
    folds.push_back({static_cast<double>(s.validation.size()),
                     innovation_weight(WeightKind::Papangelou, s.p),
                     CoverageProfile(s.training.points(), grid, out.feasible_upper)});
  }
  out.counted_folds = folds.size();
  // Folds not counted contribute zero innovations but still enter 1/k.
  const std::size_t zeros = splits.size() - folds.size();

  std::vector<double> area(folds.size());
  std::vector<InnovationValue> values(splits.size());
  auto loss_at = [&](double beta) {
    for (std::size_t i = 0; i < folds.size(); ++i) {
      values[i].value = reduced_value(f, folds[i].w * beta, folds[i].nv, area[i]);
      values[i].indicator = true;
    }
    for (std::size_t i = 0; i < zeros; ++i) values[folds.size() + i] = {0.0, 0, false, false};
    return loss(values, loss_kind);
  };

  const double widen = f.parameter() == -1.0 ? 2.0 : 10.0;
  bool have = false;
  for (std::size_t j = 1; j <= search.range_candidates; ++j) {
    const double range = out.feasible_upper * double(j) / double(search.range_candidates);
    double lo = kInf;
    double hi = 0.0;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      area[i] = folds[i].profile.uncovered_area(range);
      if (folds[i].nv > 0.0 && area[i] > 0.0) {
        const double root = folds[i].nv / (folds[i].w * area[i]);
        lo = std::min(lo, root);
        hi = std::max(hi, root);
      }
    }
    if (!(lo < kInf)) {
      const double scale = std::max(1.0, double(x.size())) / x.window().area();
      lo = 1e-3 * scale;
      hi = 1e3 * scale;
    }
    lo /= widen;
    hi *= widen;
    if (!(lo < hi)) hi = lo * 4.0;
    auto spec = SearchSpec::golden(lo, hi, search.beta_tolerance, true);
    const auto r = minimize([&](std::span<const double> b) { return loss_at(b[0]); }, spec);
    out.landscape.push_back({range, r.argmin[0], r.value});
    if (!have || r.value < out.loss) {
      have = true;
      out.loss = r.value;
      out.beta = r.argmin[0];
      out.range = range;
    }
  }
  const auto pl = fit_hardcore_pseudolikelihood(x, grid);
  out.beta_pl = pl.beta;
  out.range_pl = pl.range;
  return out;
}

// ---------------------------------------------------------------------------
// Kernel bandwidth selection

std::string to_string(BandwidthSelector s) {
  switch (s) {
    case BandwidthSelector::PplL1:
      return "ppl_L1";
    case BandwidthSelector::PplL2:
      return "ppl_L2";
    case BandwidthSelector::PplL3:
      return "ppl_L3";
    case BandwidthSelector::CvL:
      return "cvl";
    case BandwidthSelector::PoissonLikCv:
      return "poisson_lik_cv";
  }
  return "ppl_L2";
}

BandwidthSelector ppl_selector(LossKind loss) {
  switch (loss) {
    case LossKind::L1:
      return BandwidthSelector::PplL1;
    case LossKind::L2:
      return BandwidthSelector::PplL2;
    case LossKind::L3:
      return BandwidthSelector::PplL3;
  }
  return BandwidthSelector::PplL2;
}

BandwidthSearch default_bandwidth_search(const Window& w) {
  const double l = w.shorter_side();
  return {0.01 * l, 0.7 * l, 1e-3, 17};
}

namespace {

// Squared distances between all pairs of pattern points, reused for every
// bandwidth the search visits.
class PairwiseKernel {
 public:
  explicit PairwiseKernel(const PointPattern& x) : n_(x.size()), d2_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) d2_[i * n_ + j] = squared_distance(x[i], x[j]);
    }
  }

  // Unnormalized kernel exp(-d^2 / (2 h^2)) for every pair.
  void set_bandwidth(double h) {
    const double a = 0.5 / (h * h);
    a_ = a;
    norm_ = 1.0 / (2.0 * std::numbers::pi * h * h);
    e_.resize(d2_.size());
    for (std::size_t i = 0; i < d2_.size(); ++i) e_[i] = std::exp(-a * d2_[i]);
  }

  double norm() const { return norm_; }

  // sum over j in cols of exp(-a d2(i, j)).
  double row_sum(std::size_t i, std::span<const std::size_t> cols) const {
    const double* row = e_.data() + i * n_;
    double s = 0.0;
    for (auto j : cols) s += row[j];
    return s;
  }

  double row_sum_all(std::size_t i) const {
    const double* row = e_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += row[j];
    return s;
  }

  // log of row_sum, accurate when every term underflows.
  double log_row_sum(std::size_t i, std::span<const std::size_t> cols) const {
    const double s = row_sum(i, cols);
    if (s > 0.0) return std::log(s);
    const double* row = d2_.data() + i * n_;
    double m = kInf;
    for (auto j : cols) m = std::min(m, row[j]);
    double acc = 0.0;
    for (auto j : cols) acc += std::exp(-a_ * (row[j] - m));
    return -a_ * m + std::log(acc);
  }

 private:
  std::size_t n_;
  std::vector<double> d2_;
  std::vector<double> e_;
  double a_ = 0.0;
  double norm_ = 0.0;
};

void check_splits(const PointPattern& x, std::span<const CvSplit> splits) {
  if (splits.empty()) throw ValidationError("no CV splits");
  for (const auto& s : splits) {
    if (s.source_size != x.size()) throw ValidationError("split does not belong to the pattern");
  }
}

std::vector<InnovationValue> ppl_values(const PointPattern& x, std::span<const CvSplit> splits,
                                        const TestFunction& f, double bandwidth,
                                        const PairwiseKernel& kern, const QuadratureGrid& grid) {
  const double area = x.window().area();
  const double e = f.parameter();
  std::vector<InnovationValue> out(splits.size());
  for (std::size_t i = 0; i < splits.size(); ++i) {
    const auto& s = splits[i];
    auto& v = out[i];
    v.fold = s.fold;
    v.indicator = fold_indicator(s, WeightKind::NonParametric, IndicatorMode::Standard);
    if (!v.indicator) continue;
    const double w = innovation_weight(WeightKind::NonParametric, s.p);
    double sum = 0.0;
    for (auto j : s.validation_index) {
      const double rho = kern.norm() * kern.row_sum(j, s.training_index);
      const double term = f.transform(w * rho);
      if (term == kInf) {
        v.infeasible = true;
        break;
      }
      sum += term;
    }
    if (v.infeasible) {
      v.value = kInf;
      continue;
    }
    double integral = 0.0;
    if (e == -1.0) {
      // Gaussian estimate is positive on all of W: int f(w rho) rho = |W| / w.
      integral = area / w;
    } else {
      const auto surface = kernel_surface(s.training, bandwidth, grid, EdgeCorrection::None);
      for (double r : surface) {
        if (r > 0.0) integral += f.transform(w * r) * r;
      }
      integral *= grid.cell_area();
    }
    v.value = sum - w * integral;
  }
  return out;
}

double cvl_value(const PointPattern& x, const PairwiseKernel& kern) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += 1.0 / (kern.norm() * kern.row_sum_all(i));
  const double d = sum - x.window().area();
  return d * d;
}

// Negative of the mean fold log-likelihood.
double poisson_lik_value(const PointPattern& x, std::span<const CvSplit> splits,
                         double bandwidth, const PairwiseKernel& kern) {
  double total = 0.0;
  bool counted = false;
  const double log_norm = std::log(kern.norm());
  for (const auto& s : splits) {
    if (!fold_indicator(s, WeightKind::NonParametric, IndicatorMode::Standard)) continue;
    counted = true;
    const double w = innovation_weight(WeightKind::NonParametric, s.p);
    const double log_w = std::log(w);
    double ll = 0.0;
    for (auto j : s.validation_index) ll += log_w + log_norm + kern.log_row_sum(j, s.training_index);
    double mass = 0.0;
    for (const auto& t : s.training) mass += local_edge_weight(t, bandwidth, x.window());
    total += ll - w * mass;
  }
  if (!counted) throw ValidationError("no admissible folds");
  return -total / static_cast<double>(splits.size());
}

template <typename Value>
BandwidthFit run_bandwidth_search(const BandwidthSearch& search, BandwidthSelector selector,
                                  double f_exponent, Value&& value) {
  if (!(search.lower > 0.0) || !(search.upper > search.lower)) {
    throw ValidationError("bandwidth bounds must satisfy 0 < lower < upper");
  }
  auto spec = SearchSpec::golden(search.lower, search.upper, search.tolerance, true);
  spec.scan_points = search.scan_points;
  auto r = minimize([&](std::span<const double> h) { return value(h[0]); }, spec);
  BandwidthFit fit;
  fit.bandwidth = r.argmin[0];
  fit.selector = selector;
  fit.f_exponent = f_exponent;
  fit.loss = r.value;
  fit.trace = std::move(r.trace);
  return fit;
}

}  // namespace

std::vector<InnovationValue> ppl_fold_innovations(const PointPattern& x,
                                                  std::span<const CvSplit> splits,
                                                  const TestFunction& f, double bandwidth,
                                                  const QuadratureGrid& grid) {
  check_transform(f);
  check_splits(x, splits);
  PairwiseKernel kern(x);
  kern.set_bandwidth(bandwidth);
  return ppl_values(x, splits, f, bandwidth, kern, grid);
}

BandwidthFit select_bandwidth_ppl(const PointPattern& x, std::span<const CvSplit> splits,
                                  const TestFunction& f, LossKind loss_kind,
                                  const BandwidthSearch& search, const QuadratureGrid& grid) {
  check_transform(f);
  check_splits(x, splits);
  PairwiseKernel kern(x);
  return run_bandwidth_search(search, ppl_selector(loss_kind), f.parameter(), [&](double h) {
    kern.set_bandwidth(h);
    return loss(ppl_values(x, splits, f, h, kern, grid), loss_kind);
  });
}

double cvl_objective(const PointPattern& x, double bandwidth) {
  if (x.empty()) throw ValidationError("bandwidth selection needs at least one point");
  PairwiseKernel kern(x);
  kern.set_bandwidth(bandwidth);
  return cvl_value(x, kern);
}

BandwidthFit select_bandwidth_cvl(const PointPattern& x, const BandwidthSearch& search) {
  if (x.empty()) throw ValidationError("bandwidth selection needs at least one point");
  PairwiseKernel kern(x);
  return run_bandwidth_search(search, BandwidthSelector::CvL, -1.0, [&](double h) {
    kern.set_bandwidth(h);
    return cvl_value(x, kern);
  });
}

double poisson_lik_cv_objective(const PointPattern& x, std::span<const CvSplit> splits,
                                double bandwidth) {
  check_splits(x, splits);
  PairwiseKernel kern(x);
  kern.set_bandwidth(bandwidth);
  return -poisson_lik_value(x, splits, bandwidth, kern);
}

BandwidthFit select_bandwidth_poisson_lik_cv(const PointPattern& x,
                                             std::span<const CvSplit> splits,
                                             const BandwidthSearch& search) {
  check_splits(x, splits);
  PairwiseKernel kern(x);
  auto fit = run_bandwidth_search(search, BandwidthSelector::PoissonLikCv, 0.0, [&](double h) {
    kern.set_bandwidth(h);
    return poisson_lik_value(x, splits, h, kern);
  });
  fit.loss = -fit.loss;
  return fit;
}

}  // namespace ppl
