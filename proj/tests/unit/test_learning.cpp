#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ppl/error.hpp"
#include "ppl/learning.hpp"

using namespace ppl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

InnovationValue iv(double value, bool indicator = true, bool infeasible = false) {
  InnovationValue v;
  v.value = value;
  v.indicator = indicator;
  v.infeasible = infeasible;
  return v;
}

}  // namespace

TEST_CASE("losses of a two-fold example") {
  const std::vector<InnovationValue> v{iv(3.0), iv(-4.0)};
  CHECK(loss(v, LossKind::L1) == doctest::Approx(3.5));
  CHECK(loss(v, LossKind::L2) == doctest::Approx(12.5));
  CHECK(loss(v, LossKind::L3) == doctest::Approx(0.25));

  // Uncounted folds contribute zero but still count in the average.
  const std::vector<InnovationValue> w{iv(3.0), iv(-4.0, false)};
  CHECK(loss(w, LossKind::L1) == doctest::Approx(1.5));
  CHECK(loss(w, LossKind::L3) == doctest::Approx(2.25));

  const std::vector<InnovationValue> bad{iv(1.0), iv(kInf, true, true)};
  CHECK(loss(bad, LossKind::L2) == kInf);
  const std::vector<InnovationValue> skipped{iv(1.0), iv(kInf, false, true)};
  CHECK(loss(skipped, LossKind::L2) == doctest::Approx(0.5));

  CHECK_THROWS_AS(loss(std::vector<InnovationValue>{}, LossKind::L1), ValidationError);
}

TEST_CASE("loss names") {
  CHECK(to_string(LossKind::L1) == "L1");
  CHECK(parse_loss("L3") == LossKind::L3);
  CHECK_THROWS_AS(parse_loss("L4"), ValidationError);
}

TEST_CASE("median and mean") {
  const std::vector<double> odd{5.0, 1.0, 3.0};
  const std::vector<double> even{4.0, 1.0, 3.0, 2.0};
  CHECK(median(odd) == 3.0);
  CHECK(median(even) == 2.5);
  CHECK(mean(even) == 2.5);
  const std::vector<double> ties{2.0, 2.0, 7.0, 2.0};
  CHECK(median(ties) == 2.0);
  CHECK_THROWS_AS(median(std::vector<double>{}), ValidationError);
}

TEST_CASE("golden-section search on a quadratic") {
  const auto f = [](std::span<const double> t) { return (t[0] - 3.7) * (t[0] - 3.7); };
  const auto r = minimize(f, SearchSpec::golden(0.0, 10.0, 1e-8));
  CHECK(r.argmin[0] == doctest::Approx(3.7).epsilon(1e-6));

  const auto g = [](std::span<const double> t) {
    const double l = std::log(t[0] / 42.0);
    return l * l;
  };
  const auto rl = minimize(g, SearchSpec::golden(1.0, 1e4, 1e-9, true));
  CHECK(rl.argmin[0] == doctest::Approx(42.0).epsilon(1e-6));
}

TEST_CASE("grid refinement in two dimensions") {
  const auto f = [](std::span<const double> t) {
    return (t[0] - 0.3) * (t[0] - 0.3) + 2.0 * (t[1] + 0.6) * (t[1] + 0.6);
  };
  const auto r = minimize(f, SearchSpec::grid({{0.0, 1.0}, {-1.0, 1.0}}));
  CHECK(r.argmin[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(r.argmin[1] == doctest::Approx(-0.6).epsilon(1e-3));
}

TEST_CASE("infeasible regions") {
  // Feasible only below 2; the minimum of the feasible part sits at the edge.
  const auto f = [](std::span<const double> t) { return t[0] < 2.0 ? (t[0] - 5.0) * (t[0] - 5.0) : kInf; };
  const auto r = minimize(f, SearchSpec::golden(0.0, 10.0, 1e-8));
  CHECK(r.argmin[0] < 2.0);
  CHECK(r.argmin[0] == doctest::Approx(2.0).epsilon(1e-3));

  const auto none = [](std::span<const double>) { return kInf; };
  CHECK_THROWS_WITH_AS(minimize(none, SearchSpec::golden(0.0, 1.0, 1e-6)), "no feasible parameter",
                       ComputationError);
  const auto nan = [](std::span<const double>) { return std::nan(""); };
  CHECK_THROWS(minimize(nan, SearchSpec::golden(0.0, 1.0, 1e-6)));
}

TEST_CASE("per-fold estimates solve each fold innovation") {
  std::vector<Point> pts;
  for (int i = 0; i < 80; ++i) pts.push_back({(i + 0.5) / 80.0, 0.5});
  const PointPattern x(pts, Window{});
  CvSplit s{x, x, std::nullopt, 0.5, 0, x.size(), {}, {}, {}};
  for (std::size_t i = 0; i < x.size(); ++i) {
    (i < 45 ? s.training_index : s.validation_index).push_back(i);
  }
  s.training = x.subset(s.training_index);
  s.validation = x.subset(s.validation_index);
  const std::vector<CvSplit> splits{s};
  const QuadratureGrid g(Window{}, 16);
  const FamilyFactory fam = [](std::span<const double> t) -> EstimatorFamily {
    return ConstantIntensity{t[0]};
  };
  auto search = SearchSpec::golden(1.0, 1000.0, 1e-9);
  const auto est = per_fold_estimates(splits, fam, TestFunction::constant(1.0),
                                      WeightKind::ProductDensity, search, g);
  REQUIRE(est.estimates.size() == 1);
  CHECK(est.estimates[0] == doctest::Approx(90.0).epsilon(1e-6));

  // Papangelou: 35 validation points, p / (1 - p) = 1, so theta = 35.
  const auto pap = per_fold_estimates(splits, fam, TestFunction::constant(1.0),
                                      WeightKind::Papangelou, search, g);
  CHECK(pap.estimates[0] == doctest::Approx(35.0).epsilon(1e-6));

  FoldEstimates fe;
  fe.estimates = {1.0, 9.0, 2.0};
  CHECK(fe.combine(Combiner::Median) == 2.0);
  CHECK(fe.combine(Combiner::Mean) == 4.0);
}

TEST_CASE("fold innovations follow the split order") {
  std::vector<Point> pts{{0.1, 0.1}, {0.9, 0.9}, {0.5, 0.5}};
  const PointPattern x(pts, Window{});
  const auto splits = multinomial_splits(x, 3, 4);
  const QuadratureGrid g(Window{}, 8);
  const auto v = fold_innovations(splits, ConstantIntensity{2.0}, TestFunction::constant(1.0),
                                  WeightKind::NonParametric, g);
  REQUIRE(v.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(v[i].fold == i);
    const double nv = double(splits[i].validation.size());
    CHECK(v[i].value == doctest::Approx(nv - 0.5 * 2.0));
  }
}
