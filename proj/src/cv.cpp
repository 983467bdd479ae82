#include "ppl/cv.hpp"

#include <sstream>

#include "ppl/error.hpp"

namespace ppl {

void CvScheme::validate() const {
  if (kind == Kind::Mccv) {
    if (!(p > 0.0 && p < 1.0)) {
      std::ostringstream msg;
      msg << "MCCV retention p must lie in (0, 1), got " << p;
      throw ValidationError(msg.str());
    }
    if (k < 1) throw ValidationError("MCCV requires k >= 1");
  } else if (k < 2) {
    throw ValidationError("multinomial CV requires k >= 2");
  }
}

double CvScheme::retention() const {
  return kind == Kind::Mccv ? p : 1.0 / static_cast<double>(k);
}

std::string CvScheme::name() const { return kind == Kind::Mccv ? "mccv" : "multinomial"; }

namespace {

CvSplit build_split(const PointPattern& x, std::vector<std::size_t> validation_index,
                    std::vector<std::size_t> training_index, double p, std::size_t fold) {
  CvSplit s{x.subset(training_index),
            x.subset(validation_index),
            std::nullopt,
            p,
            fold,
            x.size(),
            std::move(training_index),
            std::move(validation_index),
            {}};
  return s;
}

}  // namespace

std::vector<CvSplit> mccv_splits(const PointPattern& x, double p, std::size_t k, RngSeed seed) {
  CvScheme::mccv(p, k).validate();
  std::vector<CvSplit> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Rng rng(derive_seed(seed, i));
    std::vector<std::size_t> val;
    std::vector<std::size_t> train;
    for (std::size_t j = 0; j < x.size(); ++j) {
      (rng.uniform() < p ? val : train).push_back(j);
    }
    out.push_back(build_split(x, std::move(val), std::move(train), p, i));
  }
  return out;
}

std::vector<CvSplit> multinomial_splits(const PointPattern& x, std::size_t k, RngSeed seed) {
  CvScheme::multinomial(k).validate();
  Rng rng(seed);
  std::vector<std::size_t> label(x.size());
  for (auto& l : label) l = rng.uniform_index(k);
  std::vector<CvSplit> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> val;
    std::vector<std::size_t> train;
    for (std::size_t j = 0; j < x.size(); ++j) (label[j] == i ? val : train).push_back(j);
    out.push_back(build_split(x, std::move(val), std::move(train), 1.0 / double(k), i));
  }
  return out;
}

std::vector<CvSplit> make_splits(const PointPattern& x, const CvScheme& scheme, RngSeed seed) {
  scheme.validate();
  if (scheme.kind == CvScheme::Kind::Mccv) return mccv_splits(x, scheme.p, scheme.k, seed);
  return multinomial_splits(x, scheme.k, seed);
}

std::vector<CvSplit> nested_triples(const PointPattern& x, double p_eval, const CvScheme& scheme,
                                    RngSeed seed) {
  if (!(p_eval > 0.0 && p_eval < 1.0)) {
    throw ValidationError("evaluation retention p_E must lie in (0, 1)");
  }
  scheme.validate();
  Rng rng(derive_seed(seed, 0xE7A1ULL));
  std::vector<std::size_t> eval;
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < x.size(); ++j) (rng.uniform() < p_eval ? eval : rest).push_back(j);
  const PointPattern remainder = x.subset(rest);
  const PointPattern evaluation = x.subset(eval);
  auto inner = make_splits(remainder, scheme, seed);
  for (auto& s : inner) {
    for (auto& i : s.training_index) i = rest[i];
    for (auto& i : s.validation_index) i = rest[i];
    s.evaluation = evaluation;
    s.evaluation_index = eval;
    s.source_size = x.size();
  }
  return inner;
}

namespace detail {

std::vector<std::size_t> sequential_multinomial_labels(std::size_t n, std::size_t k,
                                                       RngSeed seed) {
  if (k < 2) throw ValidationError("multinomial CV requires k >= 2");
  Rng rng(seed);
  std::vector<std::size_t> label(n, k - 1);
  std::vector<bool> taken(n, false);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double q = 1.0 / static_cast<double>(k - i);
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      if (rng.uniform() < q) {
        label[j] = i;
        taken[j] = true;
      }
    }
  }
  return label;
}

}  // namespace detail

}  // namespace ppl
