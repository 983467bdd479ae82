#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "ppl/geometry.hpp"
#include "ppl/random.hpp"
#include "ppl/simulators.hpp"

namespace ppl {

// scale * (intercept + slope * u_1).
struct LinearField {
  double intercept = 0.0;
  double slope = 0.0;
  double scale = 1.0;

  double operator()(Point u) const { return scale * (intercept + slope * u.x); }
};

struct PoissonModel {
  std::variant<double, LinearField> intensity = 250.0;
};

// Gaussian field mean is either a constant or the log of a linear field.
struct LgcpModel {
  std::variant<double, LinearField> mean = 3.5;
  double variance = 4.0;
  double decay = 0.1;
  std::size_t grid_resolution = 64;
};

struct HardCoreModel {
  HardCoreSpec spec;
};

// DPP, optionally followed by an independent thinning with retention given
// by a linear field.
struct DppModel {
  DppSpec spec;
  std::optional<LinearField> thinning;
};

using ModelParameters = std::variant<PoissonModel, LgcpModel, HardCoreModel, DppModel>;

struct ModelSpec {
  std::string name;
  ModelParameters parameters;
  Window window;
};

// JSON form:
//   {"name": "...", "type": "poisson", "intensity": 250}
//   {"type": "poisson", "intensity": {"intercept": 10, "slope": 480}}
//   {"type": "lgcp", "mean": 3.5, "variance": 4, "decay": 0.1, "grid": 64}
//   {"type": "lgcp", "log_mean": {"intercept": 10, "slope": 80}, ...}
//   {"type": "hardcore", "beta": 100, "range": 0.05, "burn_in": 100000}
//   {"type": "dpp", "variance": 250, "decay": 50, "truncation": 0,
//    "thinning": {"intercept": 10, "slope": 80, "scale": 0.0111}}
// plus an optional "window": {"x_min": .., "x_max": .., "y_min": .., "y_max": ..}.
ModelSpec parse_model(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& m);

Window parse_window(const nlohmann::json& j);
nlohmann::json to_json(const Window& w);

// A model ready to sample: simulators needing setup are built once.
class Model {
 public:
  explicit Model(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  std::string type() const;

  PointPattern simulate(RngSeed seed) const;
  // First-order intensity of the model.
  Field intensity() const;
  // Intensity when it is constant.
  std::optional<double> constant_intensity() const;

 private:
  ModelSpec spec_;
  std::shared_ptr<const LgcpSimulator> lgcp_;
  std::shared_ptr<const DppSimulator> dpp_;
};

}  // namespace ppl
