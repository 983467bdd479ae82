#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "ppl/geometry.hpp"
#include "ppl/random.hpp"

namespace ppl {

// Homogeneous Poisson process: N ~ Poi(intensity |W|) uniform points.
PointPattern simulate_poisson(double intensity, const Window& w, RngSeed seed);

// Inhomogeneous Poisson process by thinning a homogeneous process of rate
// `bound` with retention intensity(u) / bound. Without an explicit bound the
// maximum over a bound_grid x bound_grid midpoint grid, times 1.01, is used.
PointPattern simulate_poisson(const Field& intensity, const Window& w, RngSeed seed,
                              std::optional<double> bound = std::nullopt,
                              std::size_t bound_grid = kDefaultGridResolution);

// Gaussian random field with mean function and exponential covariance
// variance * exp(-decay * |u - v|), sampled at the centers of a
// grid_resolution x grid_resolution lattice.
struct GaussianFieldSpec {
  Field mean;
  double variance = 1.0;
  double decay = 1.0;
  std::size_t grid_resolution = 64;
};

// Samples log-Gaussian Cox process patterns. The field factorization is
// computed once (circulant embedding, Cholesky fallback) and reused across
// seeds; the intensity is piecewise constant on the field lattice.
class LgcpSimulator {
 public:
  LgcpSimulator(GaussianFieldSpec spec, const Window& w);
  ~LgcpSimulator();
  LgcpSimulator(LgcpSimulator&&) noexcept;
  LgcpSimulator& operator=(LgcpSimulator&&) noexcept;

  PointPattern operator()(RngSeed seed) const;

  // One realization of the Gaussian field at the lattice centers
  // (row-major, rows along y).
  std::vector<double> sample_field(Rng& rng) const;

  const QuadratureGrid& lattice() const;
  bool uses_circulant_embedding() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PointPattern simulate_lgcp(const GaussianFieldSpec& spec, const Window& w, RngSeed seed);

// Hard-core Gibbs process: Papangelou intensity beta * 1{u not within
// `range` of any point}. Sampled by Metropolis-Hastings birth-death.
struct HardCoreSpec {
  double beta = 100.0;
  double range = 0.05;
  std::size_t burn_in = 100000;  // proposals
};

PointPattern simulate_hardcore(const HardCoreSpec& spec, const Window& w, RngSeed seed);

// Stationary determinantal point process with kernel
// variance * exp(-decay * |u - v|), approximated by the Fourier expansion of
// its periodic version on the window. truncation = K keeps the modes with
// |k_1|, |k_2| <= K; 0 picks the smallest K retaining 99% of the mass.
struct DppSpec {
  double variance = 250.0;
  double decay = 50.0;
  std::size_t truncation = 0;
};

class DppSimulator {
 public:
  DppSimulator(DppSpec spec, const Window& w);

  PointPattern operator()(RngSeed seed) const;

  std::size_t truncation() const { return truncation_; }
  // Sum of retained eigenvalues divided by variance * |W|.
  double retained_mass() const { return retained_mass_; }
  // Expected point count of the approximation.
  double expected_count() const { return expected_count_; }
  // Count variance of the approximation, sum of lambda (1 - lambda).
  double count_variance() const { return count_variance_; }

 private:
  struct Mode {
    double frequency_x;
    double frequency_y;
    double eigenvalue;
  };

  Window window_;
  std::size_t truncation_ = 0;
  double retained_mass_ = 0.0;
  double expected_count_ = 0.0;
  double count_variance_ = 0.0;
  std::vector<Mode> modes_;
};

PointPattern simulate_dpp(const DppSpec& spec, const Window& w, RngSeed seed);

struct ThinningResult {
  PointPattern retained;
  PointPattern removed;
  std::vector<std::size_t> retained_index;
  std::vector<std::size_t> removed_index;
};

// Keeps each point independently with probability retention(point).
ThinningResult thin_independent(const PointPattern& x, const Field& retention, RngSeed seed);
ThinningResult thin_independent(const PointPattern& x, double retention, RngSeed seed);

}  // namespace ppl
