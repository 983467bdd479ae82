// ppl_lab: simulate point patterns, fit single patterns and run seeded
// Monte-Carlo studies from JSON configs.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "ppl/error.hpp"
#include "ppl/harness.hpp"
#include "ppl/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ppl::ValidationError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ppl::ValidationError(path.string() + ": " + e.what());
  }
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> grid_resolution;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--threads", c.threads, "Worker threads");
  cmd->add_option("--grid-resolution", c.grid_resolution, "Quadrature grid cells per axis")
      ->check(CLI::PositiveNumber);
}

int cmd_simulate(const Common& c, std::optional<std::size_t> count) {
  const auto j = read_json(c.config);
  const json& model_json = j.contains("model") ? j.at("model") : j;
  const auto model = ppl::parse_model(model_json);
  const std::size_t n = count.value_or(j.value("count", std::size_t{1}));
  const std::uint64_t seed = c.seed.value_or(j.value("seed", std::uint64_t{1}));
  const auto paths = ppl::simulate_to_directory(model, n, seed, c.out);
  std::cout << "wrote " << paths.size() << " patterns to " << c.out << '\n';
  return 0;
}

int cmd_experiment(const Common& c, bool quiet) {
  auto spec = ppl::parse_experiment(read_json(c.config));
  if (c.seed) spec.seed = *c.seed;
  if (c.threads) spec.threads = std::max<std::size_t>(1, *c.threads);
  if (c.grid_resolution) spec.grid_resolution = *c.grid_resolution;
  ppl::ProgressCallback progress;
  if (!quiet) {
    progress = [](const std::string& model, std::size_t done, std::size_t total) {
      if (done == total || done % 10 == 0) {
        std::cerr << model << ": " << done << "/" << total << " replicates\n";
      }
    };
  }
  const auto rows = ppl::run_experiment(spec, progress);
  if (c.out.empty() || c.out == "-") {
    ppl::write_results_csv(std::cout, rows);
  } else {
    std::ofstream out(c.out, std::ios::binary);
    if (!out) throw ppl::ComputationError("cannot write " + c.out);
    ppl::write_results_csv(out, rows);
  }
  return 0;
}

struct FitArgs {
  std::string pattern;
  std::string window;
  std::string task = "constant";
  std::string cv = "mccv";
  double p = 0.5;
  std::size_t k = 400;
  double gamma = 0.0;
  std::string f = "inverse";
  std::string loss = "L2";
  std::string selector = "ppl";
  bool landscape = false;
};

void emit_json(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream o(out);
    if (!o) throw ppl::ComputationError("cannot write " + out);
    o << j.dump(2) << '\n';
  }
}

int cmd_fit(const Common& c, const FitArgs& a) {
  try {
    fs::path window_path = a.window;
    if (window_path.empty()) {
      const auto sidecar = fs::path(a.pattern).parent_path() / "window.json";
      if (fs::exists(sidecar)) window_path = sidecar;
    }
    const ppl::Window w = window_path.empty() ? ppl::Window{} : ppl::read_window_json(window_path);
    const auto x = ppl::read_pattern_csv(a.pattern, w);

    ppl::FitOptions o;
    if (a.task == "constant") {
      o.task = ppl::FitTask::Constant;
    } else if (a.task == "hardcore") {
      o.task = ppl::FitTask::HardCore;
    } else if (a.task == "bandwidth") {
      o.task = ppl::FitTask::Bandwidth;
    } else {
      throw ppl::ValidationError("unknown task '" + a.task + "'");
    }
    if (a.cv == "mccv") {
      o.cv = ppl::CvScheme::mccv(a.p, a.k);
    } else if (a.cv == "multinomial") {
      o.cv = ppl::CvScheme::multinomial(a.k);
    } else {
      throw ppl::ValidationError("unknown cv scheme '" + a.cv + "'");
    }
    o.cv.validate();
    o.seed = c.seed.value_or(1);
    o.loss = ppl::parse_loss(a.loss);
    o.h = a.gamma == 0.0 ? ppl::TestFunction::constant(1.0)
                         : ppl::TestFunction::coord_power(a.gamma);
    o.f = ppl::parse_test_function(json(a.f));
    if (a.selector == "ppl") {
      o.selector = ppl::ppl_selector(o.loss);
    } else if (a.selector == "cvl") {
      o.selector = ppl::BandwidthSelector::CvL;
    } else if (a.selector == "poisson_lik_cv") {
      o.selector = ppl::BandwidthSelector::PoissonLikCv;
    } else {
      throw ppl::ValidationError("unknown selector '" + a.selector + "'");
    }
    if (c.grid_resolution) o.grid_resolution = *c.grid_resolution;
    o.include_landscape = a.landscape;
    emit_json(ppl::run_fit(x, o), c.out);
    return 0;
  } catch (const ppl::ValidationError& e) {
    emit_json({{"error", {{"type", "validation"}, {"message", e.what()}}}}, c.out);
    return kExitValidation;
  } catch (const std::exception& e) {
    emit_json({{"error", {{"type", "runtime"}, {"message", e.what()}}}}, c.out);
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point process learning: simulation, fitting and Monte-Carlo studies"};
  app.require_subcommand(1);

  Common sim;
  std::optional<std::size_t> count;
  auto* simulate = app.add_subcommand("simulate", "Write simulated patterns as CSV files");
  simulate->add_option("--config", sim.config, "Model JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("-n,--count", count, "Number of patterns");
  add_common(simulate, sim);

  Common exp;
  bool quiet = false;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo study");
  experiment->add_option("--config", exp.config, "Experiment JSON")
      ->required()
      ->check(CLI::ExistingFile);
  experiment->add_option("--out", exp.out, "Results CSV (default stdout)");
  experiment->add_flag("-q,--quiet", quiet, "No progress output");
  add_common(experiment, exp);

  Common fitc;
  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a single pattern");
  fit->add_option("--pattern", fa.pattern, "Pattern CSV with header x,y")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--window", fa.window, "Window JSON (default: window.json beside the pattern)");
  fit->add_option("--task", fa.task, "constant, hardcore or bandwidth")
      ->check(CLI::IsMember({"constant", "hardcore", "bandwidth"}));
  fit->add_option("--cv", fa.cv, "mccv or multinomial")->check(CLI::IsMember({"mccv", "multinomial"}));
  fit->add_option("--p", fa.p, "MCCV retention probability");
  fit->add_option("--k", fa.k, "Number of CV folds");
  fit->add_option("--gamma", fa.gamma, "Coordinate power test function exponent (constant task)");
  fit->add_option("--f", fa.f, "inverse or inverse_sqrt")
      ->check(CLI::IsMember({"inverse", "inverse_sqrt"}));
  fit->add_option("--loss", fa.loss, "L1, L2 or L3")->check(CLI::IsMember({"L1", "L2", "L3"}));
  fit->add_option("--selector", fa.selector, "ppl, cvl or poisson_lik_cv")
      ->check(CLI::IsMember({"ppl", "cvl", "poisson_lik_cv"}));
  fit->add_flag("--landscape", fa.landscape, "Include the loss landscape");
  fit->add_option("--out", fitc.out, "Output JSON (default stdout)");
  add_common(fit, fitc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(sim, count);
    if (*experiment) return cmd_experiment(exp, quiet);
    if (*fit) return cmd_fit(fitc, fa);
  } catch (const ppl::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
