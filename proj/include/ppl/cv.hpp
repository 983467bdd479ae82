#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppl/geometry.hpp"
#include "ppl/random.hpp"

namespace ppl {

// One training/validation (and optionally evaluation) partition of a
// source pattern. The index vectors refer to positions in the source.
struct CvSplit {
  PointPattern training;
  PointPattern validation;
  std::optional<PointPattern> evaluation;
  double p = 0.5;  // validation retention probability
  std::size_t fold = 0;
  std::size_t source_size = 0;
  std::vector<std::size_t> training_index;
  std::vector<std::size_t> validation_index;
  std::vector<std::size_t> evaluation_index;
};

struct CvScheme {
  enum class Kind { Mccv, Multinomial };

  Kind kind = Kind::Mccv;
  double p = 0.5;  // ignored for multinomial
  std::size_t k = 400;

  static CvScheme mccv(double p, std::size_t k) { return {Kind::Mccv, p, k}; }
  static CvScheme multinomial(std::size_t k) { return {Kind::Multinomial, 1.0 / double(k), k}; }

  // Throws ValidationError on out-of-range parameters.
  void validate() const;
  // Validation retention of every fold: p for MCCV, 1/k for multinomial.
  double retention() const;
  std::string name() const;  // "mccv" or "multinomial"
};

// k independent p-thinnings; validation is the retained part.
std::vector<CvSplit> mccv_splits(const PointPattern& x, double p, std::size_t k, RngSeed seed);

// iid uniform fold labels in {0..k-1}; validation fold i holds label i.
std::vector<CvSplit> multinomial_splits(const PointPattern& x, std::size_t k, RngSeed seed);

std::vector<CvSplit> make_splits(const PointPattern& x, const CvScheme& scheme, RngSeed seed);

// A single p_E-thinning picks the evaluation set; the scheme then splits the
// remainder into training and validation. Every split shares the same
// evaluation set.
std::vector<CvSplit> nested_triples(const PointPattern& x, double p_eval, const CvScheme& scheme,
                                    RngSeed seed);

namespace detail {

// Multinomial labels built by sequential thinning: fold i takes each
// still-unlabeled point with probability 1/(k - i). Equal in distribution
// to iid uniform labels.
std::vector<std::size_t> sequential_multinomial_labels(std::size_t n, std::size_t k,
                                                       RngSeed seed);

}  // namespace detail

}  // namespace ppl
