#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ppl/cv.hpp"
#include "ppl/innovations.hpp"
#include "ppl/kernel.hpp"
#include "ppl/learning.hpp"

namespace ppl {

// ---------------------------------------------------------------------------
// Constant intensity

// #x / |W|.
double classical_intensity(const PointPattern& x);

// sum_{x} h(x) / int_W h. Throws when the integral vanishes.
double h_weighted_estimate(const PointPattern& x, const TestFunction& h,
                           const QuadratureGrid& grid);

struct ConstantIntensityResult {
  double theta_median = 0.0;  // L1 minimizer
  double theta_mean = 0.0;    // L2 and L3 minimizer
  double classical = 0.0;
  double h_weighted = 0.0;
  std::size_t counted_folds = 0;
  std::vector<double> fold_estimates;  // h-weighted training estimate / (1 - p)

  double estimate(LossKind loss) const {
    return loss == LossKind::L1 ? theta_median : theta_mean;
  }
};

// Closed-form fit from per-fold roots of the product-density innovation.
ConstantIntensityResult fit_constant_intensity(const PointPattern& x,
                                               std::span<const CvSplit> splits,
                                               const TestFunction& h, const QuadratureGrid& grid,
                                               IndicatorMode indicator = IndicatorMode::Standard);
ConstantIntensityResult fit_constant_intensity(const PointPattern& x, const CvScheme& scheme,
                                               RngSeed seed, const TestFunction& h,
                                               const QuadratureGrid& grid,
                                               IndicatorMode indicator = IndicatorMode::Standard);

// Variance of the mean-combined estimate for a Poisson process of intensity
// theta0: (p / ((1 - p) k) + 1) theta0 int h^2 / (int h)^2.
double constant_intensity_variance_oracle(double theta0, const TestFunction& h, double p,
                                          std::size_t k, const QuadratureGrid& grid);

// ---------------------------------------------------------------------------
// Hard-core process

struct PseudolikelihoodFit {
  double beta = 0.0;
  double range = 0.0;
};

// R = Rbar n / (n + 1), beta = n / |W \ U b(x, R)|.
PseudolikelihoodFit fit_hardcore_pseudolikelihood(const PointPattern& x,
                                                  const QuadratureGrid& grid);

// Closed form of the Papangelou-weighted fold innovation of the hard-core
// family with h = f(w xi), f(x) = x^e: f(c) (#V - c |W \ U b(T, R)|),
// c = p beta / (1 - p). +inf flagged when the fold is infeasible.
InnovationValue hardcore_reduced_innovation(const CvSplit& split, double beta, double range,
                                            const TestFunction& f, const QuadratureGrid& grid);

struct HardCoreSearch {
  std::size_t range_candidates = 64;
  double beta_tolerance = 1e-6;  // golden-section bracket in log(beta)
};

struct HardCoreLandscapePoint {
  double range;
  double beta;
  double loss;
};

struct HardCoreFit {
  double beta = 0.0;
  double range = 0.0;
  double feasible_upper = 0.0;
  double loss = 0.0;
  std::size_t counted_folds = 0;
  double beta_pl = 0.0;
  double range_pl = 0.0;
  std::vector<HardCoreLandscapePoint> landscape;
};

HardCoreFit fit_hardcore(const PointPattern& x, std::span<const CvSplit> splits,
                         const TestFunction& f, LossKind loss, const QuadratureGrid& grid,
                         const HardCoreSearch& search = {});

// ---------------------------------------------------------------------------
// Kernel bandwidth selection

enum class BandwidthSelector { PplL1, PplL2, PplL3, CvL, PoissonLikCv };

std::string to_string(BandwidthSelector s);
BandwidthSelector ppl_selector(LossKind loss);

struct BandwidthSearch {
  double lower = 0.01;
  double upper = 0.7;
  double tolerance = 1e-3;  // in log(bandwidth)
  std::size_t scan_points = 17;
};

// [0.01 l, 0.7 l] for the shorter window side l.
BandwidthSearch default_bandwidth_search(const Window& w);

struct BandwidthFit {
  double bandwidth = 0.0;
  BandwidthSelector selector = BandwidthSelector::PplL2;
  double f_exponent = -1.0;
  double loss = 0.0;
  EdgeCorrection final_edge = EdgeCorrection::Local;
  std::vector<SearchEvaluation> trace;
};

// Innovation loss of kernel estimates fitted on training sets and tested
// on validation sets with h = f(p rho / (1 - p)), no edge correction.
// Inverse-square-root transforms need `grid` for the window integral.
BandwidthFit select_bandwidth_ppl(const PointPattern& x, std::span<const CvSplit> splits,
                                  const TestFunction& f, LossKind loss,
                                  const BandwidthSearch& search, const QuadratureGrid& grid);

// (sum_x 1 / rho(x; x) - |W|)^2 with the point itself included.
BandwidthFit select_bandwidth_cvl(const PointPattern& x, const BandwidthSearch& search);

// Maximizes the mean over folds of sum_V log rt - int_W rt, with
// rt = p / (1 - p) rho(.; T).
BandwidthFit select_bandwidth_poisson_lik_cv(const PointPattern& x,
                                             std::span<const CvSplit> splits,
                                             const BandwidthSearch& search);

// Loss values used by the selectors, exposed for diagnostics and tests.
double cvl_objective(const PointPattern& x, double bandwidth);
std::vector<InnovationValue> ppl_fold_innovations(const PointPattern& x,
                                                  std::span<const CvSplit> splits,
                                                  const TestFunction& f, double bandwidth,
                                                  const QuadratureGrid& grid);
double poisson_lik_cv_objective(const PointPattern& x, std::span<const CvSplit> splits,
                                double bandwidth);

}  // namespace ppl
