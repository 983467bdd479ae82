#include "ppl/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppl/error.hpp"

namespace ppl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_search(double v, const ParameterBounds& b) { return b.log_scale ? std::log(v) : v; }
double from_search(double s, const ParameterBounds& b) { return b.log_scale ? std::exp(s) : s; }

void check_bounds(const ParameterBounds& b) {
  if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
    throw ValidationError("search bounds must be finite with lower < upper");
  }
  if (b.log_scale && !(b.lower > 0.0)) {
    throw ValidationError("log-scale search needs a positive lower bound");
  }
}

class Recorder {
 public:
  explicit Recorder(const Objective& f) : f_(f) {}

  double operator()(const std::vector<double>& theta) {
    const double v = f_(theta);
    if (std::isnan(v)) throw ComputationError("objective returned NaN");
    result_.trace.push_back({theta, v});
    ++result_.evaluations;
    if (result_.argmin.empty() || v < result_.value) {
      result_.argmin = theta;
      result_.value = v;
    }
    return v;
  }

  SearchResult finish() {
    if (result_.argmin.empty() || result_.value == kInf) {
      throw ComputationError("no feasible parameter");
    }
    return std::move(result_);
  }

 private:
  const Objective& f_;
  SearchResult result_;
};

SearchResult grid_refine(const Objective& f, const SearchSpec& s) {
  const auto dims = s.bounds.size();
  if (dims == 0 || dims > 3) throw ValidationError("grid refinement supports 1 to 3 dimensions");
  if (s.grid_points < 2 || s.levels < 1 || !(s.zoom > 1.0)) {
    throw ValidationError("invalid grid refinement settings");
  }
  Recorder rec(f);
  std::vector<double> lo(dims);
  std::vector<double> hi(dims);
  std::vector<double> glo(dims);
  std::vector<double> ghi(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    glo[d] = lo[d] = to_search(s.bounds[d].lower, s.bounds[d]);
    ghi[d] = hi[d] = to_search(s.bounds[d].upper, s.bounds[d]);
  }
  const auto m = s.grid_points;
  std::vector<double> best_s;
  double best_v = kInf;
  for (std::size_t level = 0; level < s.levels; ++level) {
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= m;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> sp(dims);
      std::vector<double> theta(dims);
      std::size_t rem = idx;
      for (std::size_t d = 0; d < dims; ++d) {
        const auto j = rem % m;
        rem /= m;
        sp[d] = lo[d] + (hi[d] - lo[d]) * double(j) / double(m - 1);
        theta[d] = from_search(sp[d], s.bounds[d]);
      }
      const double v = rec(theta);
      if (v < best_v) {
        best_v = v;
        best_s = sp;
      }
    }
    if (best_s.empty()) break;
    for (std::size_t d = 0; d < dims; ++d) {
      const double half = 0.5 * (hi[d] - lo[d]) / s.zoom;
      lo[d] = std::max(glo[d], best_s[d] - half);
      hi[d] = std::min(ghi[d], best_s[d] + half);
    }
  }
  return rec.finish();
}

SearchResult golden_section(const Objective& f, const SearchSpec& s) {
  if (s.bounds.size() != 1) throw ValidationError("golden section search is one-dimensional");
  if (!(s.tolerance > 0.0)) throw ValidationError("search tolerance must be positive");
  if (s.scan_points < 3) throw ValidationError("golden section needs at least 3 scan points");
  const auto& b = s.bounds[0];
  Recorder rec(f);
  auto eval = [&](double sp) { return rec({from_search(sp, b)}); };
  const double lo = to_search(b.lower, b);
  const double hi = to_search(b.upper, b);
  const auto m = s.scan_points;
  std::vector<double> xs(m);
  std::vector<double> vs(m);
  std::size_t best = 0;
  for (std::size_t j = 0; j < m; ++j) {
    xs[j] = lo + (hi - lo) * double(j) / double(m - 1);
    vs[j] = eval(xs[j]);
    if (vs[j] < vs[best]) best = j;
  }
  if (vs[best] == kInf) return rec.finish();
  double a = xs[best == 0 ? 0 : best - 1];
  double c = xs[best + 1 == m ? m - 1 : best + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = c - inv_phi * (c - a);
  double x2 = a + inv_phi * (c - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (c - a > s.tolerance) {
    if (f1 <= f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - inv_phi * (c - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (c - a);
      f2 = eval(x2);
    }
  }
  return rec.finish();
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::L1:
      return "L1";
    case LossKind::L2:
      return "L2";
    case LossKind::L3:
      return "L3";
  }
  return "L2";
}

LossKind parse_loss(std::string_view name) {
  if (name == "L1" || name == "l1") return LossKind::L1;
  if (name == "L2" || name == "l2") return LossKind::L2;
  if (name == "L3" || name == "l3") return LossKind::L3;
  throw ValidationError("unknown loss '" + std::string(name) + "'");
}

double loss(std::span<const InnovationValue> values, LossKind kind) {
  if (values.empty()) throw ValidationError("loss of an empty innovation list");
  const double k = static_cast<double>(values.size());
  double acc = 0.0;
  for (const auto& v : values) {
    const double x = v.weighted();
    if (x == kInf) return kInf;
    switch (kind) {
      case LossKind::L1:
        acc += std::abs(x);
        break;
      case LossKind::L2:
        acc += x * x;
        break;
      case LossKind::L3:
        acc += x;
        break;
    }
  }
  acc /= k;
  return kind == LossKind::L3 ? acc * acc : acc;
}

SearchSpec SearchSpec::golden(double lower, double upper, double tolerance, bool log_scale) {
  SearchSpec s;
  s.bounds = {{lower, upper, log_scale}};
  s.method = SearchMethod::GoldenSection;
  s.tolerance = tolerance;
  return s;
}

SearchSpec SearchSpec::grid(std::vector<ParameterBounds> bounds) {
  SearchSpec s;
  s.bounds = std::move(bounds);
  return s;
}

SearchResult minimize(const Objective& objective, const SearchSpec& search) {
  if (search.bounds.empty()) throw ValidationError("search needs at least one parameter");
  for (const auto& b : search.bounds) check_bounds(b);
  if (search.method == SearchMethod::GoldenSection) return golden_section(objective, search);
  return grid_refine(objective, search);
}

double median(std::span<const double> values) {
  if (values.empty()) throw ValidationError("median of an empty list");
  std::vector<double> v(values.begin(), values.end());
  const auto n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double FoldEstimates::combine(Combiner combiner) const {
  if (estimates.empty()) throw ValidationError("no counted folds");
  return combiner == Combiner::Median ? median(estimates) : mean(estimates);
}

std::vector<InnovationValue> fold_innovations(std::span<const CvSplit> splits,
                                              const EstimatorFamily& xi, const TestFunction& h,
                                              WeightKind kind, const QuadratureGrid& grid,
                                              const InnovationOptions& options) {
  std::vector<InnovationValue> out;
  out.reserve(splits.size());
  for (const auto& s : splits) out.push_back(bivariate_innovation(xi, h, s, kind, grid, options));
  return out;
}

FoldEstimates per_fold_estimates(std::span<const CvSplit> splits, const FamilyFactory& family,
                                 const TestFunction& h, WeightKind kind,
                                 const SearchSpec& search, const QuadratureGrid& grid,
                                 const InnovationOptions& options) {
  FoldEstimates out;
  for (const auto& s : splits) {
    if (!fold_indicator(s, kind, options.indicator)) continue;
    auto objective = [&](std::span<const double> theta) {
      const auto v = bivariate_innovation(family(theta), h, s, kind, grid, options);
      return v.infeasible ? kInf : v.value * v.value;
    };
    auto r = minimize(objective, search);
    out.folds.push_back(s.fold);
    out.estimates.push_back(r.argmin.front());
    out.minimizers.push_back(std::move(r.argmin));
  }
  if (out.folds.empty()) throw ValidationError("no counted folds");
  return out;
}

}  // namespace ppl
