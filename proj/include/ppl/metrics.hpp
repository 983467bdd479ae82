#pragma once

#include <span>
#include <vector>

#include "ppl/geometry.hpp"

namespace ppl {

// Replicate metrics of a scalar estimator. Variances divide by the number
// of replicates so that mse == bias^2 + variance.
struct ScalarMetricSet {
  double mean = 0.0;
  double bias = 0.0;
  double abs_bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  double bias_se = 0.0;
  double variance_se = 0.0;
  double mse_se = 0.0;
  std::size_t replicates = 0;
};

ScalarMetricSet scalar_metrics(std::span<const double> estimates, double truth);

struct SurfaceMetricSet {
  double iab = 0.0;
  double isb = 0.0;
  double iv = 0.0;
  double mise = 0.0;
  std::size_t replicates = 0;
};

// Integrated absolute bias, squared bias and variance of replicate
// surfaces sampled at the grid cell centres.
SurfaceMetricSet surface_metrics(std::span<const std::vector<double>> surfaces,
                                 std::span<const double> truth, const QuadratureGrid& grid);

// Streaming version of surface_metrics: surfaces are folded in one at a
// time (Welford updates per cell), so replicates need not be kept.
class SurfaceAccumulator {
 public:
  explicit SurfaceAccumulator(std::size_t cells) : mean_(cells, 0.0), m2_(cells, 0.0) {}

  void add(std::span<const double> surface);
  std::size_t count() const { return count_; }
  SurfaceMetricSet metrics(std::span<const double> truth, const QuadratureGrid& grid) const;

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

// Truth evaluated at the grid cell centres.
std::vector<double> sample_field(const Field& f, const QuadratureGrid& grid);

}  // namespace ppl
