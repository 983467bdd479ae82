#include "ppl/models.hpp"

#include <cmath>

#include "ppl/error.hpp"

namespace ppl {
namespace {

using nlohmann::json;

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::size_t count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

LinearField parse_linear(const json& j) {
  if (!j.is_object()) throw ValidationError("linear field must be an object");
  return {number(j, "intercept", 0.0), number(j, "slope", 0.0), number(j, "scale", 1.0)};
}

json linear_json(const LinearField& f) {
  return {{"intercept", f.intercept}, {"slope", f.slope}, {"scale", f.scale}};
}

std::variant<double, LinearField> parse_scalar_or_linear(const json& j) {
  if (j.is_number()) return j.get<double>();
  return parse_linear(j);
}

json scalar_or_linear_json(const std::variant<double, LinearField>& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return linear_json(std::get<LinearField>(v));
}

Field to_field(const std::variant<double, LinearField>& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    const double c = *d;
    return [c](Point) { return c; };
  }
  const auto f = std::get<LinearField>(v);
  return [f](Point u) { return f(u); };
}

}  // namespace

Window parse_window(const json& j) {
  if (!j.is_object()) throw ValidationError("window must be an object");
  for (const char* key : {"x_min", "x_max", "y_min", "y_max"}) {
    if (!j.contains(key)) throw ValidationError(std::string("window is missing '") + key + "'");
  }
  return {number(j, "x_min", 0), number(j, "x_max", 1), number(j, "y_min", 0),
          number(j, "y_max", 1)};
}

json to_json(const Window& w) {
  return {{"x_min", w.x_min()}, {"x_max", w.x_max()}, {"y_min", w.y_min()}, {"y_max", w.y_max()}};
}

ModelSpec parse_model(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ValidationError("model needs a string 'type'");
  }
  ModelSpec m;
  const auto type = j.at("type").get<std::string>();
  m.name = j.value("name", type);
  if (j.contains("window")) m.window = parse_window(j.at("window"));
  if (type == "poisson") {
    PoissonModel p;
    if (j.contains("intensity")) p.intensity = parse_scalar_or_linear(j.at("intensity"));
    m.parameters = p;
  } else if (type == "lgcp") {
    LgcpModel p;
    if (j.contains("mean") && j.contains("log_mean")) {
      throw ValidationError("lgcp takes either 'mean' or 'log_mean'");
    }
    if (j.contains("mean")) p.mean = number(j, "mean", 3.5);
    if (j.contains("log_mean")) p.mean = parse_linear(j.at("log_mean"));
    p.variance = number(j, "variance", p.variance);
    p.decay = number(j, "decay", p.decay);
    p.grid_resolution = count(j, "grid", p.grid_resolution);
    m.parameters = p;
  } else if (type == "hardcore") {
    HardCoreModel p;
    p.spec.beta = number(j, "beta", p.spec.beta);
    p.spec.range = number(j, "range", p.spec.range);
    p.spec.burn_in = count(j, "burn_in", p.spec.burn_in);
    if (!(p.spec.beta > 0.0)) throw ValidationError("hardcore 'beta' must be positive");
    if (!(p.spec.range > 0.0)) throw ValidationError("hardcore 'range' must be positive");
    if (p.spec.burn_in < 1) throw ValidationError("hardcore 'burn_in' must be at least 1");
    m.parameters = p;
  } else if (type == "dpp") {
    DppModel p;
    p.spec.variance = number(j, "variance", p.spec.variance);
    p.spec.decay = number(j, "decay", p.spec.decay);
    p.spec.truncation = count(j, "truncation", p.spec.truncation);
    if (j.contains("thinning")) p.thinning = parse_linear(j.at("thinning"));
    m.parameters = p;
  } else {
    throw ValidationError("unknown model type '" + type + "'");
  }
  return m;
}

json to_json(const ModelSpec& m) {
  json j;
  j["name"] = m.name;
  j["window"] = to_json(m.window);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PoissonModel>) {
          j["type"] = "poisson";
          j["intensity"] = scalar_or_linear_json(p.intensity);
        } else if constexpr (std::is_same_v<T, LgcpModel>) {
          j["type"] = "lgcp";
          if (const auto* d = std::get_if<double>(&p.mean)) {
            j["mean"] = *d;
          } else {
            j["log_mean"] = linear_json(std::get<LinearField>(p.mean));
          }
          j["variance"] = p.variance;
          j["decay"] = p.decay;
          j["grid"] = p.grid_resolution;
        } else if constexpr (std::is_same_v<T, HardCoreModel>) {
          j["type"] = "hardcore";
          j["beta"] = p.spec.beta;
          j["range"] = p.spec.range;
          j["burn_in"] = p.spec.burn_in;
        } else {
          j["type"] = "dpp";
          j["variance"] = p.spec.variance;
          j["decay"] = p.spec.decay;
          j["truncation"] = p.spec.truncation;
          if (p.thinning) j["thinning"] = linear_json(*p.thinning);
        }
      },
      m.parameters);
  return j;
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
  if (const auto* l = std::get_if<LgcpModel>(&spec_.parameters)) {
    GaussianFieldSpec g;
    if (const auto* d = std::get_if<double>(&l->mean)) {
      const double c = *d;
      g.mean = [c](Point) { return c; };
    } else {
      const auto f = std::get<LinearField>(l->mean);
      g.mean = [f](Point u) {
        const double v = f(u);
        if (!(v > 0.0)) throw ValidationError("log-mean field must be positive");
        return std::log(v);
      };
    }
    g.variance = l->variance;
    g.decay = l->decay;
    g.grid_resolution = l->grid_resolution;
    lgcp_ = std::make_shared<const LgcpSimulator>(std::move(g), spec_.window);
  } else if (const auto* d = std::get_if<DppModel>(&spec_.parameters)) {
    dpp_ = std::make_shared<const DppSimulator>(d->spec, spec_.window);
  } else if (const auto* h = std::get_if<HardCoreModel>(&spec_.parameters)) {
    if (!(h->spec.beta > 0.0) || !(h->spec.range >= 0.0)) {
      throw ValidationError("hard-core model needs beta > 0 and range >= 0");
    }
  }
}

std::string Model::type() const {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PoissonModel>) return "poisson";
        if constexpr (std::is_same_v<T, LgcpModel>) return "lgcp";
        if constexpr (std::is_same_v<T, HardCoreModel>) return "hardcore";
        return "dpp";
      },
      spec_.parameters);
}

PointPattern Model::simulate(RngSeed seed) const {
  const auto& w = spec_.window;
  if (const auto* p = std::get_if<PoissonModel>(&spec_.parameters)) {
    if (const auto* c = std::get_if<double>(&p->intensity)) return simulate_poisson(*c, w, seed);
    return simulate_poisson(to_field(p->intensity), w, seed);
  }
  if (lgcp_) return (*lgcp_)(seed);
  if (const auto* h = std::get_if<HardCoreModel>(&spec_.parameters)) {
    return simulate_hardcore(h->spec, w, seed);
  }
  const auto& d = std::get<DppModel>(spec_.parameters);
  auto x = (*dpp_)(derive_seed(seed, 0));
  if (!d.thinning) return x;
  const auto f = *d.thinning;
  return thin_independent(x, [f](Point u) { return f(u); }, derive_seed(seed, 1)).retained;
}

Field Model::intensity() const {
  if (const auto* p = std::get_if<PoissonModel>(&spec_.parameters)) return to_field(p->intensity);
  if (const auto* l = std::get_if<LgcpModel>(&spec_.parameters)) {
    const double lift = std::exp(0.5 * l->variance);
    if (const auto* d = std::get_if<double>(&l->mean)) {
      const double c = std::exp(*d) * lift;
      return [c](Point) { return c; };
    }
    const auto f = std::get<LinearField>(l->mean);
    return [f, lift](Point u) { return f(u) * lift; };
  }
  if (std::holds_alternative<HardCoreModel>(spec_.parameters)) {
    throw ValidationError("hard-core intensity has no closed form");
  }
  const auto& d = std::get<DppModel>(spec_.parameters);
  const double s = d.spec.variance;
  if (!d.thinning) return [s](Point) { return s; };
  const auto f = *d.thinning;
  return [s, f](Point u) { return s * f(u); };
}

std::optional<double> Model::constant_intensity() const {
  if (const auto* p = std::get_if<PoissonModel>(&spec_.parameters)) {
    if (const auto* c = std::get_if<double>(&p->intensity)) return *c;
    return std::nullopt;
  }
  if (const auto* l = std::get_if<LgcpModel>(&spec_.parameters)) {
    if (const auto* d = std::get_if<double>(&l->mean)) return std::exp(*d + 0.5 * l->variance);
    return std::nullopt;
  }
  if (const auto* d = std::get_if<DppModel>(&spec_.parameters)) {
    if (!d->thinning) return d->spec.variance;
  }
  return std::nullopt;
}

}  // namespace ppl
