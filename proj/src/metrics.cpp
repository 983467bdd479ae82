#include "ppl/metrics.hpp"

#include <cmath>

#include "ppl/error.hpp"

namespace ppl {

ScalarMetricSet scalar_metrics(std::span<const double> estimates, double truth) {
  if (estimates.size() < 2) throw ValidationError("metrics need at least 2 estimates");
  const double m = static_cast<double>(estimates.size());
  ScalarMetricSet out;
  out.replicates = estimates.size();
  for (double e : estimates) out.mean += e;
  out.mean /= m;
  double se_sum = 0.0;
  for (double e : estimates) {
    out.variance += (e - out.mean) * (e - out.mean);
    se_sum += (e - truth) * (e - truth);
  }
  out.variance /= m;
  out.mse = se_sum / m;
  out.bias = out.mean - truth;
  out.abs_bias = std::abs(out.bias);
  double var_of_sq = 0.0;
  double var_of_dev = 0.0;
  for (double e : estimates) {
    const double sq = (e - truth) * (e - truth);
    var_of_sq += (sq - out.mse) * (sq - out.mse);
    const double dv = (e - out.mean) * (e - out.mean);
    var_of_dev += (dv - out.variance) * (dv - out.variance);
  }
  out.bias_se = std::sqrt(out.variance / (m - 1.0));
  out.mse_se = std::sqrt(var_of_sq / (m - 1.0) / m);
  out.variance_se = std::sqrt(var_of_dev / (m - 1.0) / m);
  return out;
}

SurfaceMetricSet surface_metrics(std::span<const std::vector<double>> surfaces,
                                 std::span<const double> truth, const QuadratureGrid& grid) {
  if (surfaces.empty()) throw ValidationError("surface metrics need at least one replicate");
  const auto n = grid.cell_count();
  if (truth.size() != n) throw ValidationError("truth surface does not match the grid");
  for (const auto& s : surfaces) {
    if (s.size() != n) throw ValidationError("estimated surface does not match the grid");
  }
  const double m = static_cast<double>(surfaces.size());
  SurfaceMetricSet out;
  out.replicates = surfaces.size();
  for (std::size_t c = 0; c < n; ++c) {
    double mu = 0.0;
    for (const auto& s : surfaces) mu += s[c];
    mu /= m;
    double var = 0.0;
    for (const auto& s : surfaces) var += (s[c] - mu) * (s[c] - mu);
    var /= m;
    const double b = mu - truth[c];
    out.iab += std::abs(b);
    out.isb += b * b;
    out.iv += var;
  }
  const double a = grid.cell_area();
  out.iab *= a;
  out.isb *= a;
  out.iv *= a;
  out.mise = out.isb + out.iv;
  return out;
}

void SurfaceAccumulator::add(std::span<const double> surface) {
  if (surface.size() != mean_.size()) {
    throw ValidationError("estimated surface does not match the grid");
  }
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t c = 0; c < mean_.size(); ++c) {
    const double d = surface[c] - mean_[c];
    mean_[c] += d / n;
    m2_[c] += d * (surface[c] - mean_[c]);
  }
}

SurfaceMetricSet SurfaceAccumulator::metrics(std::span<const double> truth,
                                             const QuadratureGrid& grid) const {
  if (count_ == 0) throw ValidationError("surface metrics need at least one replicate");
  if (truth.size() != mean_.size() || grid.cell_count() != mean_.size()) {
    throw ValidationError("truth surface does not match the grid");
  }
  SurfaceMetricSet out;
  out.replicates = count_;
  const double n = static_cast<double>(count_);
  for (std::size_t c = 0; c < mean_.size(); ++c) {
    const double b = mean_[c] - truth[c];
    out.iab += std::abs(b);
    out.isb += b * b;
    out.iv += m2_[c] / n;
  }
  const double a = grid.cell_area();
  out.iab *= a;
  out.isb *= a;
  out.iv *= a;
  out.mise = out.isb + out.iv;
  return out;
}

std::vector<double> sample_field(const Field& f, const QuadratureGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.cell_count());
  for (const auto& c : grid.centers()) out.push_back(f(c));
  return out;
}

}  // namespace ppl
