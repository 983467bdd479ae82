#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppl/cv.hpp"
#include "ppl/innovations.hpp"

namespace ppl {

// L1: mean absolute, L2: mean square, L3: square of the mean of the
// indicator-weighted fold innovations.
enum class LossKind { L1, L2, L3 };

std::string to_string(LossKind kind);
LossKind parse_loss(std::string_view name);

// +inf when a counted fold is infeasible. Throws on an empty list.
double loss(std::span<const InnovationValue> values, LossKind kind);

struct ParameterBounds {
  double lower = 0.0;
  double upper = 1.0;
  bool log_scale = false;
};

enum class SearchMethod { GridRefine, GoldenSection };

struct SearchSpec {
  std::vector<ParameterBounds> bounds;
  SearchMethod method = SearchMethod::GridRefine;
  // Grid refinement: points per dimension and level, refinement levels and
  // the shrink factor of the box around the incumbent.
  std::size_t grid_points = 33;
  std::size_t levels = 3;
  double zoom = 5.0;
  // Golden section: width of the final bracket in search coordinates
  // (log units when log_scale is set) and the size of the initial scan.
  double tolerance = 1e-6;
  std::size_t scan_points = 17;

  static SearchSpec golden(double lower, double upper, double tolerance,
                           bool log_scale = false);
  static SearchSpec grid(std::vector<ParameterBounds> bounds);
};

struct SearchEvaluation {
  std::vector<double> theta;
  double value;
};

struct SearchResult {
  std::vector<double> argmin;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::vector<SearchEvaluation> trace;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free minimization over a box. +inf marks infeasible points;
// NaN is an error. Throws ComputationError("no feasible parameter") when
// every evaluation is +inf.
SearchResult minimize(const Objective& objective, const SearchSpec& search);

enum class Combiner { Median, Mean };

// Midpoint of the two central order statistics for even sizes.
double median(std::span<const double> values);
double mean(std::span<const double> values);

struct FoldEstimates {
  std::vector<std::size_t> folds;  // counted folds
  std::vector<double> estimates;   // first coordinate of each fold minimizer
  std::vector<std::vector<double>> minimizers;

  double combine(Combiner combiner) const;
};

using FamilyFactory = std::function<EstimatorFamily(std::span<const double>)>;

// Per-fold minimizers of the squared fold innovation over the search box,
// for every fold whose indicator is 1.
FoldEstimates per_fold_estimates(std::span<const CvSplit> splits, const FamilyFactory& family,
                                 const TestFunction& h, WeightKind kind,
                                 const SearchSpec& search, const QuadratureGrid& grid,
                                 const InnovationOptions& options = {});

// Fold innovations of one parameter value.
std::vector<InnovationValue> fold_innovations(std::span<const CvSplit> splits,
                                              const EstimatorFamily& xi, const TestFunction& h,
                                              WeightKind kind, const QuadratureGrid& grid,
                                              const InnovationOptions& options = {});

}  // namespace ppl
