#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ppl/applications.hpp"
#include "ppl/error.hpp"
#include "ppl/simulators.hpp"

using namespace ppl;

namespace {

// Area of the union of two discs of radius r with centres d apart.
double two_disc_union(double r, double d) {
  if (d >= 2.0 * r) return 2.0 * M_PI * r * r;
  const double lens = 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
  return 2.0 * M_PI * r * r - lens;
}

}  // namespace

TEST_CASE("constant intensity estimates") {
  const QuadratureGrid g(Window{}, 64);
  const PointPattern x({{0.25, 0.5}, {0.5, 0.5}, {0.75, 0.25}}, Window(0, 2, 0, 1));
  CHECK(classical_intensity(x) == doctest::Approx(1.5));
  const QuadratureGrid g2(Window(0, 2, 0, 1), 64);
  CHECK(h_weighted_estimate(x, TestFunction::constant(4.0), g2) == doctest::Approx(1.5));
  // sum x*y / (int x dx * int y dy) = (0.125 + 0.25 + 0.1875) / (2 * 0.5)
  CHECK(h_weighted_estimate(x, TestFunction::coord_power(1.0), g2) ==
        doctest::Approx(0.5625));
  CHECK_THROWS_AS(h_weighted_estimate(x, TestFunction::constant(0.0), g2), ValidationError);
  (void)g;
}

TEST_CASE("closed-form constant intensity fit") {
  const QuadratureGrid g(Window{}, 64);
  const auto x = simulate_poisson(300.0, Window{}, 3);
  const auto h = TestFunction::coord_power(-0.2);
  const auto splits = mccv_splits(x, 0.3, 51, 9);
  const auto fit = fit_constant_intensity(x, splits, h, g);

  // Independent oracle: per-fold training sum over the integral, rescaled.
  const double ih = std::pow(1.0 / 0.8, 2);
  std::vector<double> est;
  for (const auto& s : splits) {
    double sum = 0.0;
    for (const auto& u : s.training) sum += std::pow(u.x * u.y, -0.2);
    est.push_back(sum / ih / 0.7);
  }
  std::vector<double> sorted = est;
  std::sort(sorted.begin(), sorted.end());
  double m = 0.0;
  for (double e : est) m += e;
  m /= double(est.size());
  CHECK(fit.counted_folds == 51);
  CHECK(fit.theta_median == doctest::Approx(sorted[25]).epsilon(1e-9));
  CHECK(fit.theta_mean == doctest::Approx(m).epsilon(1e-9));
  CHECK(fit.estimate(LossKind::L1) == fit.theta_median);
  CHECK(fit.estimate(LossKind::L3) == fit.theta_mean);
  CHECK(fit.classical == doctest::Approx(double(x.size())));

  // Multinomial folds with h = 1: the mean of the fold estimates equals #x.
  const auto mn = fit_constant_intensity(x, CvScheme::multinomial(5), 4,
                                         TestFunction::constant(1.0), g);
  CHECK(mn.theta_mean == doctest::Approx(double(x.size())).epsilon(1e-9));
}

TEST_CASE("variance oracle") {
  const QuadratureGrid g(Window{}, 32);
  CHECK(constant_intensity_variance_oracle(250.0, TestFunction::constant(1.0), 0.5, 400, g) ==
        doctest::Approx(250.625));
  // int h^2 / (int h)^2 for h = (xy)^g is ((g+1)^2 / (2g+1))^2.
  const double gam = -0.2;
  const double ratio = std::pow((gam + 1) * (gam + 1) / (2 * gam + 1), 2);
  CHECK(constant_intensity_variance_oracle(100.0, TestFunction::coord_power(gam), 0.2, 10, g) ==
        doctest::Approx((0.2 / (0.8 * 10) + 1.0) * 100.0 * ratio));
}

TEST_CASE("hard-core pseudolikelihood") {
  const QuadratureGrid g(Window{}, 512);
  const PointPattern x({{0.3, 0.5}, {0.7, 0.5}}, Window{});
  const auto pl = fit_hardcore_pseudolikelihood(x, g);
  CHECK(pl.range == doctest::Approx(0.4 * 2.0 / 3.0));
  const double free_area = 1.0 - two_disc_union(pl.range, 0.4);
  CHECK(pl.beta == doctest::Approx(2.0 / free_area).epsilon(5e-3));
}

TEST_CASE("hard-core fit recovers the range ordering") {
  const QuadratureGrid g(Window{}, 128);
  const auto x = simulate_hardcore({100.0, 0.05, 100000}, Window{}, 21);
  const auto splits = mccv_splits(x, 0.1, 100, 2);
  const auto fit = fit_hardcore(x, splits, TestFunction::inverse(), LossKind::L2, g);
  CHECK(fit.range > 0.0);
  CHECK(fit.range <= fit.feasible_upper + 1e-12);
  CHECK(fit.feasible_upper <= min_pairwise_distance(x) + 1e-12);
  CHECK(fit.beta > 0.0);
  CHECK(std::isfinite(fit.loss));
  CHECK(fit.landscape.size() == 64);
  CHECK(fit.range_pl < min_pairwise_distance(x));
  // The landscape minimum is the reported fit.
  double best = fit.landscape.front().loss;
  for (const auto& p : fit.landscape) best = std::min(best, p.loss);
  CHECK(fit.loss == doctest::Approx(best));
}

TEST_CASE("kernel estimator") {
  CHECK(gaussian_kernel(0.0, 0.2) == doctest::Approx(1.0 / (2.0 * M_PI * 0.04)));
  CHECK(gaussian_kernel(0.04, 0.2) ==
        doctest::Approx(std::exp(-0.5) / (2.0 * M_PI * 0.04)));
  CHECK(local_edge_weight({0.5, 0.5}, 0.01, Window{}) == doctest::Approx(1.0));
  CHECK(local_edge_weight({0.0, 0.0}, 0.01, Window{}) == doctest::Approx(0.25));
  CHECK(local_edge_weight({0.0, 0.5}, 0.05, Window{}) == doctest::Approx(0.5));

  // The edge-corrected surface integrates to the number of points.
  const auto x = simulate_poisson(50.0, Window{}, 6);
  const QuadratureGrid g(Window{}, 256);
  const auto surface = kernel_surface(x, 0.08, g, EdgeCorrection::Local);
  CHECK(integrate_values(surface, g) == doctest::Approx(double(x.size())).epsilon(2e-3));

  // The surface matches pointwise evaluation.
  const QuadratureGrid g8(Window{}, 8);
  const auto s8 = kernel_surface(x, 0.08, g8, EdgeCorrection::None);
  const Point c = g8.center(3 * 8 + 5);
  CHECK(s8[3 * 8 + 5] == doctest::Approx(kernel_intensity(x, 0.08, c)));
  CHECK(kernel_intensity(x, 0.08, x[0], EdgeCorrection::None, 0) ==
        doctest::Approx(kernel_intensity(x, 0.08, x[0]) - gaussian_kernel(0.0, 0.08)));
}

TEST_CASE("bandwidth objectives against direct evaluation") {
  const auto x = simulate_poisson(80.0, Window{}, 31);
  const double h = 0.06;

  double sum = 0.0;
  for (const auto& u : x) sum += 1.0 / kernel_intensity(x, h, u);
  CHECK(cvl_objective(x, h) == doctest::Approx((sum - 1.0) * (sum - 1.0)).epsilon(1e-9));

  const auto splits = mccv_splits(x, 0.4, 5, 8);
  const QuadratureGrid g(Window{}, 64);
  const auto inv = ppl_fold_innovations(x, splits, TestFunction::inverse(), h, g);
  double lik = 0.0;
  const double w = 0.4 / 0.6;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    const auto& s = splits[i];
    double direct = 0.0;
    double ll = 0.0;
    for (const auto& v : s.validation) {
      const double rho = kernel_intensity(s.training, h, v);
      direct += 1.0 / (w * rho);
      ll += std::log(w * rho);
    }
    direct -= 1.0;
    CHECK(inv[i].value == doctest::Approx(direct).epsilon(1e-9));
    double mass = 0.0;
    for (const auto& t : s.training) mass += local_edge_weight(t, h, Window{});
    lik += ll - w * mass;
  }
  CHECK(poisson_lik_cv_objective(x, splits, h) == doctest::Approx(lik / 5.0).epsilon(1e-9));

  // Inverse square root: sum (w rho)^-1/2 - w int rho^1/2 w^-1/2.
  const auto isq = ppl_fold_innovations(x, splits, TestFunction::inverse_sqrt(), h, g);
  const auto& s = splits[0];
  double direct = 0.0;
  for (const auto& v : s.validation) direct += 1.0 / std::sqrt(w * kernel_intensity(s.training, h, v));
  const auto surf = kernel_surface(s.training, h, g, EdgeCorrection::None);
  std::vector<double> root(surf.size());
  for (std::size_t i = 0; i < surf.size(); ++i) root[i] = std::sqrt(surf[i]);
  direct -= std::sqrt(w) * integrate_values(root, g);
  CHECK(isq[0].value == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("bandwidth selectors return values inside the search range") {
  const auto x = simulate_poisson(150.0, Window{}, 14);
  const auto search = default_bandwidth_search(Window{});
  CHECK(search.lower == doctest::Approx(0.01));
  CHECK(search.upper == doctest::Approx(0.7));
  const auto splits = mccv_splits(x, 0.5, 20, 3);
  const QuadratureGrid g(Window{}, 32);
  for (const auto& fit :
       {select_bandwidth_ppl(x, splits, TestFunction::inverse(), LossKind::L2, search, g),
        select_bandwidth_cvl(x, search), select_bandwidth_poisson_lik_cv(x, splits, search)}) {
    CHECK(fit.bandwidth >= 0.01);
    CHECK(fit.bandwidth <= 0.7);
    CHECK(std::isfinite(fit.loss));
  }
  CHECK(to_string(BandwidthSelector::PplL3) == "ppl_L3");
  CHECK(to_string(BandwidthSelector::PoissonLikCv) == "poisson_lik_cv");
  CHECK(ppl_selector(LossKind::L1) == BandwidthSelector::PplL1);
}
