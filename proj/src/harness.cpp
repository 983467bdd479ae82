#include "ppl/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ppl/error.hpp"
#include "ppl/io.hpp"
#include "ppl/metrics.hpp"

namespace ppl {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::vector<CvScheme> parse_cv_list(const json& j) {
  std::vector<CvScheme> out;
  auto one = [&](const json& c) {
    // "p" may be a list, expanding into one scheme per value.
    if (c.is_object() && c.contains("p") && c.at("p").is_array()) {
      for (const auto& p : c.at("p")) {
        json copy = c;
        copy["p"] = p;
        out.push_back(parse_cv(copy));
      }
    } else {
      out.push_back(parse_cv(c));
    }
  };
  if (j.is_array()) {
    for (const auto& c : j) one(c);
  } else {
    one(j);
  }
  return out;
}

BandwidthSelector parse_selector_name(const std::string& s) {
  if (s == "cvl") return BandwidthSelector::CvL;
  if (s == "poisson_lik_cv") return BandwidthSelector::PoissonLikCv;
  if (s == "ppl_L1") return BandwidthSelector::PplL1;
  if (s == "ppl_L2") return BandwidthSelector::PplL2;
  if (s == "ppl_L3") return BandwidthSelector::PplL3;
  throw ValidationError("unknown bandwidth selector '" + s + "'");
}

LossKind selector_loss(BandwidthSelector s) {
  switch (s) {
    case BandwidthSelector::PplL1:
      return LossKind::L1;
    case BandwidthSelector::PplL3:
      return LossKind::L3;
    default:
      return LossKind::L2;
  }
}

bool is_ppl(BandwidthSelector s) {
  return s == BandwidthSelector::PplL1 || s == BandwidthSelector::PplL2 ||
         s == BandwidthSelector::PplL3;
}

std::vector<SelectorSpec> parse_selectors(const json& j) {
  if (!j.is_array()) throw ValidationError("'selectors' must be a list");
  std::vector<SelectorSpec> out;
  for (const auto& s : j) {
    const auto method = require(s, "method").get<std::string>();
    std::vector<BandwidthSelector> kinds;
    if (method == "ppl") {
      std::vector<LossKind> losses;
      if (s.contains("loss") && s.at("loss").is_array()) {
        for (const auto& l : s.at("loss")) losses.push_back(parse_loss(l.get<std::string>()));
      } else {
        losses.push_back(parse_loss(s.value("loss", std::string("L2"))));
      }
      for (auto l : losses) kinds.push_back(ppl_selector(l));
    } else {
      kinds.push_back(parse_selector_name(method));
    }
    std::vector<std::optional<CvScheme>> cvs;
    if (s.contains("cv")) {
      for (const auto& c : parse_cv_list(s.at("cv"))) cvs.emplace_back(c);
    } else {
      cvs.emplace_back(std::nullopt);
    }
    const TestFunction f =
        s.contains("f") ? parse_test_function(s.at("f")) : TestFunction::inverse();
    for (const auto& cv : cvs) {
      for (auto k : kinds) {
        if (k != BandwidthSelector::CvL && !cv) {
          throw ValidationError("selector '" + to_string(k) + "' needs a 'cv' scheme");
        }
        if (is_ppl(k) && f.kind() != TestFunction::Kind::XiTransform) {
          throw ValidationError("ppl selectors take f = inverse or inverse_sqrt");
        }
        out.push_back({k, k == BandwidthSelector::CvL ? std::nullopt : cv, f});
      }
    }
  }
  return out;
}

}  // namespace

CvScheme parse_cv(const json& j) {
  if (!j.is_object()) throw ValidationError("cv scheme must be an object");
  const auto kind = require(j, "kind").get<std::string>();
  CvScheme s;
  if (kind == "mccv") {
    s = CvScheme::mccv(get_number(j, "p", 0.5), get_count(j, "k", 400));
  } else if (kind == "multinomial") {
    s = CvScheme::multinomial(get_count(j, "k", 2));
    if (s.k < 2) throw ValidationError("multinomial CV requires k >= 2");
  } else {
    throw ValidationError("unknown cv kind '" + kind + "'");
  }
  s.validate();
  return s;
}

TestFunction parse_test_function(const json& j) {
  if (j.is_number()) return TestFunction::coord_power(j.get<double>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inverse") return TestFunction::inverse();
    if (s == "inverse_sqrt") return TestFunction::inverse_sqrt();
    if (s == "constant") return TestFunction::constant(1.0);
    throw ValidationError("unknown test function '" + s + "'");
  }
  if (j.is_object()) {
    if (j.contains("gamma")) return TestFunction::coord_power(get_number(j, "gamma", 0.0));
    if (j.contains("constant")) return TestFunction::constant(get_number(j, "constant", 1.0));
    if (j.contains("xi_power")) return TestFunction::xi_transform(get_number(j, "xi_power", -1));
  }
  throw ValidationError("cannot parse test function");
}

ExperimentSpec parse_experiment(const json& j) {
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentSpec s;
  const auto study = require(j, "study").get<std::string>();
  if (study == "constant_intensity") {
    s.study = StudyKind::ConstantIntensity;
  } else if (study == "hardcore") {
    s.study = StudyKind::HardCore;
  } else if (study == "bandwidth") {
    s.study = StudyKind::Bandwidth;
  } else {
    throw ValidationError("unknown study '" + study + "'");
  }
  const auto& models = require(j, "models");
  if (!models.is_array() || models.empty()) throw ValidationError("'models' must be a list");
  for (const auto& m : models) s.models.push_back(parse_model(m));
  s.replicates = get_count(j, "replicates", s.replicates);
  if (s.replicates < 1) throw ValidationError("'replicates' must be at least 1");
  s.seed = get_count(j, "seed", s.seed);
  s.threads = std::max<std::size_t>(1, get_count(j, "threads", s.threads));
  s.grid_resolution = get_count(j, "grid_resolution", s.grid_resolution);
  if (s.grid_resolution < 1) throw ValidationError("'grid_resolution' must be positive");
  s.replicate_rows = j.value("replicate_rows", true);

  if (s.study != StudyKind::Bandwidth) {
    s.cv = parse_cv_list(require(j, "cv"));
    if (s.cv.empty()) throw ValidationError("'cv' must list at least one scheme");
    const auto& losses = j.contains("losses") ? j.at("losses") : json::array({"L2"});
    for (const auto& l : losses) s.losses.push_back(parse_loss(l.get<std::string>()));
  }
  if (s.study == StudyKind::ConstantIntensity) {
    if (j.contains("gammas")) {
      for (const auto& g : j.at("gammas")) {
        s.test_functions.push_back(TestFunction::coord_power(g.get<double>()));
      }
    }
    if (j.contains("test_functions")) {
      for (const auto& t : j.at("test_functions")) {
        s.test_functions.push_back(parse_test_function(t));
      }
    }
    if (s.test_functions.empty()) s.test_functions.push_back(TestFunction::constant(1.0));
    for (const auto& t : s.test_functions) {
      if (t.depends_on_estimator()) {
        throw ValidationError("constant-intensity studies take pattern-free test functions");
      }
    }
  } else if (s.study == StudyKind::HardCore) {
    const auto& fs = j.contains("test_functions") ? j.at("test_functions")
                                                  : json::array({"inverse"});
    for (const auto& t : fs) s.test_functions.push_back(parse_test_function(t));
    for (const auto& t : s.test_functions) {
      if (!t.depends_on_estimator()) {
        throw ValidationError("hard-core studies take f = inverse or inverse_sqrt");
      }
    }
    if (j.contains("hardcore_search")) {
      const auto& h = j.at("hardcore_search");
      s.hardcore_search.range_candidates =
          get_count(h, "range_candidates", s.hardcore_search.range_candidates);
      s.hardcore_search.beta_tolerance =
          get_number(h, "beta_tolerance", s.hardcore_search.beta_tolerance);
    }
  } else {
    s.selectors = parse_selectors(require(j, "selectors"));
    if (s.selectors.empty()) throw ValidationError("'selectors' must not be empty");
  }
  if (j.contains("bandwidth_search")) {
    const auto& b = j.at("bandwidth_search");
    BandwidthSearch bs;
    bs.lower = get_number(b, "lower", bs.lower);
    bs.upper = get_number(b, "upper", bs.upper);
    bs.tolerance = get_number(b, "tolerance", bs.tolerance);
    bs.scan_points = get_count(b, "scan_points", bs.scan_points);
    s.bandwidth_search = bs;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Parallel execution

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const auto i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Experiment driver

namespace {

// One reported quantity of one method configuration.
struct Slot {
  std::string method;
  std::string loss;
  std::string cv;
  double p = kNaN;
  std::size_t k = 0;
  std::string test_function;
  std::string quantity;
  std::optional<double> truth;
};

struct ReplicateOutput {
  std::vector<double> values;                 // one per slot, NaN on failure
  std::vector<std::vector<double>> surfaces;  // bandwidth studies, one per selector
  std::vector<ResultRow> errors;
};

void describe_cv(Slot& s, const CvScheme& cv) {
  s.cv = cv.name();
  s.p = cv.retention();
  s.k = cv.k;
}

std::string what_of(const std::exception& e) { return e.what(); }

class StudyRunner {
 public:
  StudyRunner(const ExperimentSpec& spec, std::size_t model_index)
      : spec_(spec),
        index_(model_index),
        model_(spec.models[model_index]),
        grid_(model_.spec().window, spec.grid_resolution) {
    build_slots();
  }

  const std::vector<Slot>& slots() const { return slots_; }
  const Model& model() const { return model_; }
  const QuadratureGrid& grid() const { return grid_; }

  RngSeed replicate_seed(std::size_t r) const { return derive_seed(spec_.seed, index_, r); }

  ReplicateOutput run(std::size_t r) const {
    ReplicateOutput out;
    out.values.assign(slots_.size(), kNaN);
    const RngSeed seed = replicate_seed(r);
    std::optional<PointPattern> x;
    try {
      x = model_.simulate(seed);
    } catch (const std::exception& e) {
      out.errors.push_back(error_row(r, seed, "simulate", {}, what_of(e)));
      if (spec_.study == StudyKind::Bandwidth) out.surfaces.clear();
      return out;
    }
    switch (spec_.study) {
      case StudyKind::ConstantIntensity:
        run_constant(*x, r, seed, out);
        break;
      case StudyKind::HardCore:
        run_hardcore(*x, r, seed, out);
        break;
      case StudyKind::Bandwidth:
        run_bandwidth(*x, r, seed, out);
        break;
    }
    return out;
  }

 private:
  ResultRow error_row(std::size_t r, RngSeed seed, const std::string& method,
                      const std::optional<CvScheme>& cv, const std::string& message) const {
    ResultRow row;
    row.row_type = "error";
    row.model = model_.name();
    row.method = method;
    if (cv) {
      row.cv = cv->name();
      row.p = cv->retention();
      row.k = cv->k;
    }
    row.replicate = r;
    row.seed = seed;
    row.grid = spec_.grid_resolution;
    row.note = message;
    return row;
  }

  void build_slots() {
    switch (spec_.study) {
      case StudyKind::ConstantIntensity: {
        const auto truth = model_.constant_intensity();
        slots_.push_back({"classical", "", "", kNaN, 0, "", "theta", truth});
        for (const auto& t : spec_.test_functions) {
          slots_.push_back({"h_weighted", "", "", kNaN, 0, t.name(), "theta", truth});
        }
        for (const auto& c : spec_.cv) {
          for (const auto& t : spec_.test_functions) {
            for (auto l : spec_.losses) {
              Slot s{"ppl", to_string(l), "", kNaN, 0, t.name(), "theta", truth};
              describe_cv(s, c);
              slots_.push_back(s);
            }
          }
        }
        break;
      }
      case StudyKind::HardCore: {
        std::optional<double> beta;
        std::optional<double> range;
        if (const auto* h = std::get_if<HardCoreModel>(&model_.spec().parameters)) {
          beta = h->spec.beta;
          range = h->spec.range;
        }
        slots_.push_back({"pseudolikelihood", "", "", kNaN, 0, "", "beta", beta});
        slots_.push_back({"pseudolikelihood", "", "", kNaN, 0, "", "range", range});
        for (const auto& c : spec_.cv) {
          for (const auto& t : spec_.test_functions) {
            for (auto l : spec_.losses) {
              for (const char* q : {"beta", "range"}) {
                Slot s{"ppl", to_string(l), "", kNaN, 0, t.name(), q,
                       std::string(q) == "beta" ? beta : range};
                describe_cv(s, c);
                slots_.push_back(s);
              }
            }
          }
        }
        break;
      }
      case StudyKind::Bandwidth: {
        truth_surface_ = sample_field(model_.intensity(), grid_);
        for (const auto& sel : spec_.selectors) {
          Slot s{to_string(sel.selector), "", "", kNaN, 0, "", "bandwidth", std::nullopt};
          if (is_ppl(sel.selector)) {
            s.loss = to_string(selector_loss(sel.selector));
            s.test_function = sel.f.name();
          }
          if (sel.cv) describe_cv(s, *sel.cv);
          slots_.push_back(s);
        }
        break;
      }
    }
  }

  void run_constant(const PointPattern& x, std::size_t r, RngSeed seed,
                    ReplicateOutput& out) const {
    std::size_t slot = 0;
    out.values[slot++] = classical_intensity(x);
    for (const auto& t : spec_.test_functions) {
      try {
        out.values[slot] = h_weighted_estimate(x, t, grid_);
      } catch (const std::exception& e) {
        out.errors.push_back(error_row(r, seed, "h_weighted", {}, what_of(e)));
      }
      ++slot;
    }
    for (std::size_t c = 0; c < spec_.cv.size(); ++c) {
      const auto& cv = spec_.cv[c];
      const auto splits = make_splits(x, cv, derive_seed(seed, 1 + c));
      for (const auto& t : spec_.test_functions) {
        try {
          const auto fit = fit_constant_intensity(x, splits, t, grid_);
          for (std::size_t l = 0; l < spec_.losses.size(); ++l) {
            out.values[slot + l] = fit.estimate(spec_.losses[l]);
          }
        } catch (const std::exception& e) {
          out.errors.push_back(error_row(r, seed, "ppl", cv, t.name() + ": " + what_of(e)));
        }
        slot += spec_.losses.size();
      }
    }
  }

  void run_hardcore(const PointPattern& x, std::size_t r, RngSeed seed,
                    ReplicateOutput& out) const {
    std::size_t slot = 0;
    try {
      const auto pl = fit_hardcore_pseudolikelihood(x, grid_);
      out.values[0] = pl.beta;
      out.values[1] = pl.range;
    } catch (const std::exception& e) {
      out.errors.push_back(error_row(r, seed, "pseudolikelihood", {}, what_of(e)));
    }
    slot = 2;
    for (std::size_t c = 0; c < spec_.cv.size(); ++c) {
      const auto& cv = spec_.cv[c];
      const auto splits = make_splits(x, cv, derive_seed(seed, 1 + c));
      for (const auto& t : spec_.test_functions) {
        for (auto l : spec_.losses) {
          try {
            const auto fit = fit_hardcore(x, splits, t, l, grid_, spec_.hardcore_search);
            out.values[slot] = fit.beta;
            out.values[slot + 1] = fit.range;
          } catch (const std::exception& e) {
            out.errors.push_back(
                error_row(r, seed, "ppl", cv, t.name() + " " + to_string(l) + ": " + what_of(e)));
          }
          slot += 2;
        }
      }
    }
  }

  void run_bandwidth(const PointPattern& x, std::size_t r, RngSeed seed,
                     ReplicateOutput& out) const {
    const auto search =
        spec_.bandwidth_search.value_or(default_bandwidth_search(model_.spec().window));
    out.surfaces.resize(spec_.selectors.size());
    for (std::size_t i = 0; i < spec_.selectors.size(); ++i) {
      const auto& sel = spec_.selectors[i];
      try {
        BandwidthFit fit;
        if (sel.selector == BandwidthSelector::CvL) {
          fit = select_bandwidth_cvl(x, search);
        } else {
          const auto splits = make_splits(x, *sel.cv, derive_seed(seed, 1 + i));
          if (sel.selector == BandwidthSelector::PoissonLikCv) {
            fit = select_bandwidth_poisson_lik_cv(x, splits, search);
          } else {
            fit = select_bandwidth_ppl(x, splits, sel.f, selector_loss(sel.selector), search,
                                       grid_);
          }
        }
        out.values[i] = fit.bandwidth;
        out.surfaces[i] = kernel_surface(x, fit.bandwidth, grid_, EdgeCorrection::Local);
      } catch (const std::exception& e) {
        out.errors.push_back(error_row(r, seed, to_string(sel.selector), sel.cv, what_of(e)));
      }
    }
  }

 public:
  const std::vector<double>& truth_surface() const { return truth_surface_; }

 private:
  const ExperimentSpec& spec_;
  std::size_t index_;
  Model model_;
  QuadratureGrid grid_;
  std::vector<Slot> slots_;
  std::vector<double> truth_surface_;
};

ResultRow slot_row(const Slot& s, const std::string& model, std::size_t grid) {
  ResultRow row;
  row.model = model;
  row.method = s.method;
  row.loss = s.loss;
  row.cv = s.cv;
  row.p = s.p;
  row.k = s.k;
  row.test_function = s.test_function;
  row.quantity = s.quantity;
  row.grid = grid;
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const ProgressCallback& progress) {
  std::vector<ResultRow> rows;
  for (std::size_t mi = 0; mi < spec.models.size(); ++mi) {
    StudyRunner runner(spec, mi);
    const auto& slots = runner.slots();
    const auto reps = spec.replicates;
    const auto grid_size = spec.grid_resolution;

    std::vector<std::vector<double>> values(reps);
    std::vector<std::vector<ResultRow>> errors(reps);
    std::vector<SurfaceAccumulator> surfaces;
    if (spec.study == StudyKind::Bandwidth) {
      surfaces.assign(spec.selectors.size(), SurfaceAccumulator(runner.grid().cell_count()));
    }

    // Replicates finish in any order but are folded in replicate order so
    // that accumulated surface metrics are bit-reproducible.
    std::mutex mutex;
    std::map<std::size_t, ReplicateOutput> pending;
    std::size_t next_merge = 0;
    parallel_for(reps, spec.threads, [&](std::size_t r) {
      auto out = runner.run(r);
      std::lock_guard lock(mutex);
      pending.emplace(r, std::move(out));
      while (!pending.empty() && pending.begin()->first == next_merge) {
        auto node = pending.extract(pending.begin());
        auto& res = node.mapped();
        values[next_merge] = std::move(res.values);
        errors[next_merge] = std::move(res.errors);
        for (std::size_t i = 0; i < res.surfaces.size(); ++i) {
          if (!res.surfaces[i].empty()) surfaces[i].add(res.surfaces[i]);
        }
        ++next_merge;
        if (progress) progress(runner.model().name(), next_merge, reps);
      }
    });

    for (std::size_t r = 0; r < reps; ++r) {
      const RngSeed seed = runner.replicate_seed(r);
      if (spec.replicate_rows) {
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (std::isnan(values[r][s])) continue;
          auto row = slot_row(slots[s], runner.model().name(), grid_size);
          row.row_type = "estimate";
          row.replicate = r;
          row.seed = seed;
          row.value = values[r][s];
          rows.push_back(std::move(row));
        }
      }
      for (auto& e : errors[r]) rows.push_back(std::move(e));
    }

    for (std::size_t s = 0; s < slots.size(); ++s) {
      std::vector<double> est;
      for (std::size_t r = 0; r < reps; ++r) {
        if (!std::isnan(values[r][s])) est.push_back(values[r][s]);
      }
      auto base = slot_row(slots[s], runner.model().name(), grid_size);
      base.row_type = "metric";
      base.n = est.size();
      if (est.empty()) continue;
      auto emit = [&](const std::string& quantity, double value, double se) {
        auto row = base;
        row.quantity = quantity;
        row.value = value;
        row.se = se;
        rows.push_back(std::move(row));
      };
      double m = 0.0;
      for (double e : est) m += e;
      m /= double(est.size());
      emit(slots[s].quantity + "_mean", m, kNaN);
      if (slots[s].truth && est.size() >= 2) {
        const auto sm = scalar_metrics(est, *slots[s].truth);
        const auto q = slots[s].quantity;
        emit(q + "_bias", sm.bias, sm.bias_se);
        emit(q + "_abs_bias", sm.abs_bias, sm.bias_se);
        emit(q + "_variance", sm.variance, sm.variance_se);
        emit(q + "_mse", sm.mse, sm.mse_se);
      }
      if (spec.study == StudyKind::Bandwidth && surfaces[s].count() > 0) {
        const auto sm = surfaces[s].metrics(runner.truth_surface(), runner.grid());
        base.n = surfaces[s].count();
        emit("iab", sm.iab, kNaN);
        emit("isb", sm.isb, kNaN);
        emit("iv", sm.iv, kNaN);
        emit("mise", sm.mise, kNaN);
      }
    }
  }
  return rows;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kSchemaLine << '\n';
  out << "row_type,model,method,loss,cv,p,k,test_function,replicate,seed,quantity,value,se,n,"
         "grid,note\n";
  for (const auto& r : rows) {
    out << r.row_type << ',' << csv_escape(r.model) << ',' << r.method << ',' << r.loss << ','
        << r.cv << ',' << format_double(r.p) << ',';
    if (r.k) out << r.k;
    out << ',' << csv_escape(r.test_function) << ',';
    if (r.replicate) out << *r.replicate;
    out << ',';
    if (r.seed) out << *r.seed;
    out << ',' << r.quantity << ',' << format_double(r.value) << ',' << format_double(r.se)
        << ',';
    if (r.n) out << r.n;
    out << ',';
    if (r.grid) out << r.grid;
    out << ',' << csv_escape(r.note) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Simulation and single fits

std::vector<std::filesystem::path> simulate_to_directory(const ModelSpec& spec, std::size_t n,
                                                         RngSeed seed,
                                                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Model model(spec);
  write_window_json(dir / "window.json", spec.window);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < n; ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "pattern_%04zu.csv", i);
    const auto path = dir / name;
    write_pattern_csv(path, model.simulate(derive_seed(seed, i)));
    paths.push_back(path);
  }
  return paths;
}

namespace {

json cv_json(const CvScheme& cv) {
  json j{{"kind", cv.name()}, {"k", cv.k}};
  j["p"] = cv.retention();
  return j;
}

}  // namespace

json run_fit(const PointPattern& x, const FitOptions& o) {
  const QuadratureGrid grid(x.window(), o.grid_resolution);
  json j;
  j["n"] = x.size();
  j["window"] = to_json(x.window());
  j["seed"] = o.seed;
  j["grid_resolution"] = o.grid_resolution;
  switch (o.task) {
    case FitTask::Constant: {
      const auto splits = make_splits(x, o.cv, o.seed);
      const auto r = fit_constant_intensity(x, splits, o.h, grid);
      j["task"] = "constant";
      j["cv"] = cv_json(o.cv);
      j["test_function"] = o.h.name();
      j["loss"] = to_string(o.loss);
      j["estimate"] = r.estimate(o.loss);
      j["theta_median"] = r.theta_median;
      j["theta_mean"] = r.theta_mean;
      j["counted_folds"] = r.counted_folds;
      j["baseline"] = {{"classical", r.classical}, {"h_weighted", r.h_weighted}};
      break;
    }
    case FitTask::HardCore: {
      const auto splits = make_splits(x, o.cv, o.seed);
      const auto r = fit_hardcore(x, splits, o.f, o.loss, grid);
      j["task"] = "hardcore";
      j["cv"] = cv_json(o.cv);
      j["test_function"] = o.f.name();
      j["loss"] = to_string(o.loss);
      j["beta"] = r.beta;
      j["range"] = r.range;
      j["feasible_upper"] = r.feasible_upper;
      j["loss_value"] = r.loss;
      j["counted_folds"] = r.counted_folds;
      j["min_pairwise_distance"] = min_pairwise_distance(x);
      j["baseline"] = {{"beta_pl", r.beta_pl}, {"range_pl", r.range_pl}};
      if (o.include_landscape) {
        auto& l = j["landscape"] = json::array();
        for (const auto& p : r.landscape) {
          l.push_back({{"range", p.range}, {"beta", p.beta}, {"loss", p.loss}});
        }
      }
      break;
    }
    case FitTask::Bandwidth: {
      const auto search = default_bandwidth_search(x.window());
      BandwidthFit r;
      if (o.selector == BandwidthSelector::CvL) {
        r = select_bandwidth_cvl(x, search);
      } else {
        const auto splits = make_splits(x, o.cv, o.seed);
        j["cv"] = cv_json(o.cv);
        if (o.selector == BandwidthSelector::PoissonLikCv) {
          r = select_bandwidth_poisson_lik_cv(x, splits, search);
        } else {
          r = select_bandwidth_ppl(x, splits, o.f, selector_loss(o.selector), search, grid);
          j["test_function"] = o.f.name();
          j["loss"] = to_string(selector_loss(o.selector));
        }
      }
      j["task"] = "bandwidth";
      j["selector"] = to_string(r.selector);
      j["bandwidth"] = r.bandwidth;
      j["loss_value"] = r.loss;
      j["evaluations"] = r.trace.size();
      j["final_edge_correction"] = "local";
      j["baseline"] = {{"cvl_bandwidth", select_bandwidth_cvl(x, search).bandwidth}};
      if (o.include_landscape) {
        auto& l = j["landscape"] = json::array();
        for (const auto& p : r.trace) l.push_back({{"bandwidth", p.theta[0]}, {"loss", p.value}});
      }
      break;
    }
  }
  return j;
}

}  // namespace ppl
