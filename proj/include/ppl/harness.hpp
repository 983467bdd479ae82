#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppl/applications.hpp"
#include "ppl/cv.hpp"
#include "ppl/learning.hpp"
#include "ppl/models.hpp"

namespace ppl {

enum class StudyKind { ConstantIntensity, HardCore, Bandwidth };

// One bandwidth selector configuration of a bandwidth study.
struct SelectorSpec {
  BandwidthSelector selector = BandwidthSelector::PplL2;
  std::optional<CvScheme> cv;  // required by the CV-based selectors
  TestFunction f = TestFunction::inverse();
};

struct ExperimentSpec {
  StudyKind study = StudyKind::ConstantIntensity;
  std::vector<ModelSpec> models;
  std::size_t replicates = 100;
  RngSeed seed = 1;
  std::size_t threads = 1;
  std::size_t grid_resolution = kDefaultGridResolution;
  std::vector<CvScheme> cv;
  std::vector<TestFunction> test_functions;  // gamma grid or f choices
  std::vector<LossKind> losses;
  std::vector<SelectorSpec> selectors;
  HardCoreSearch hardcore_search;
  std::optional<BandwidthSearch> bandwidth_search;  // default from the window
  bool replicate_rows = true;
};

// Parses the experiment JSON document. Throws ValidationError with a
// message naming the offending field.
ExperimentSpec parse_experiment(const nlohmann::json& j);

// Reads a CV scheme: {"kind": "mccv", "p": 0.5, "k": 400} or
// {"kind": "multinomial", "k": 5}.
CvScheme parse_cv(const nlohmann::json& j);
// "inverse", "inverse_sqrt", "constant", {"gamma": g} or a bare number g.
TestFunction parse_test_function(const nlohmann::json& j);

struct ResultRow {
  std::string row_type;  // estimate, metric or error
  std::string model;
  std::string method;
  std::string loss;
  std::string cv;
  double p = std::numeric_limits<double>::quiet_NaN();
  std::size_t k = 0;
  std::string test_function;
  std::optional<std::size_t> replicate;
  std::optional<RngSeed> seed;
  std::string quantity;
  double value = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;  // replicates entering a metric row
  std::size_t grid = 0;
  std::string note;
};

using ProgressCallback = std::function<void(const std::string& model, std::size_t done,
                                            std::size_t total)>;

// Runs the full factorial design. Rows are ordered by model, then replicate
// (estimate rows), then configuration (metric rows). Replicate seeds are
// derive_seed(master, model index, replicate); CV splits of configuration
// c use derive_seed(replicate seed, 1 + c).
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const ProgressCallback& progress = {});

inline constexpr const char* kSchemaLine = "# ppl-lab schema v1";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Writes n patterns pattern_0000.csv ... and window.json into `dir`.
// Pattern i uses derive_seed(seed, i).
std::vector<std::filesystem::path> simulate_to_directory(const ModelSpec& model, std::size_t n,
                                                         RngSeed seed,
                                                         const std::filesystem::path& dir);

enum class FitTask { Constant, HardCore, Bandwidth };

struct FitOptions {
  FitTask task = FitTask::Constant;
  CvScheme cv = CvScheme::mccv(0.5, 400);
  RngSeed seed = 1;
  LossKind loss = LossKind::L2;
  TestFunction h = TestFunction::constant(1.0);  // constant task
  TestFunction f = TestFunction::inverse();      // hard-core and bandwidth tasks
  BandwidthSelector selector = BandwidthSelector::PplL2;
  std::size_t grid_resolution = kDefaultGridResolution;
  bool include_landscape = false;
};

// Single-pattern fit as a JSON record with estimates and baselines.
nlohmann::json run_fit(const PointPattern& x, const FitOptions& options);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace ppl
