#pragma once

// Run configuration documents (JSON). Every object is checked against its
// allowed keys before anything is computed; schema problems raise
// ErrorCode::ConfigError, while model preconditions keep their own codes.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hive/cyclic.hpp"
#include "hive/errors.hpp"
#include "hive/io.hpp"
#include "hive/pmf.hpp"
#include "hive/simulator.hpp"
#include "hive/skew_normal.hpp"
#include "hive/stationary.hpp"

namespace hive::config {

using json = nlohmann::json;

namespace detail {

inline void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, ctx + " must be an object");
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
  require_object(j, ctx);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw Error(ErrorCode::ConfigError, "unknown key '" + k + "' in " + ctx);
}

inline const json& need(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw Error(ErrorCode::ConfigError, ctx + "." + key + " is required");
  return j.at(key);
}

inline double number(const json& v, const std::string& ctx) {
  if (!v.is_number()) throw Error(ErrorCode::ConfigError, ctx + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::ConfigError, ctx + " must be finite");
  return x;
}

inline std::int64_t integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) throw Error(ErrorCode::ConfigError, ctx + " must be an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const json& v, const std::string& ctx) {
  if (!v.is_boolean()) throw Error(ErrorCode::ConfigError, ctx + " must be true or false");
  return v.get<bool>();
}

inline std::vector<double> number_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw Error(ErrorCode::ConfigError, ctx + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ctx + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

struct Distribution {
  IntegerPmf pmf;
  std::optional<double> poisson_lambda;
};

/// {"point": k} | {"pmf": {"min_value", "probs"}} | {"poisson": lambda, "tail"?}
/// | {"skew_normal": {"xi", "omega", "alpha"}, "tail_eps"?}
inline Distribution parse_distribution(const json& j, const std::string& ctx) {
  detail::require_object(j, ctx);
  if (j.contains("point")) {
    detail::check_keys(j, {"point"}, ctx);
    return {IntegerPmf::point(detail::integer(j.at("point"), ctx + ".point")), std::nullopt};
  }
  if (j.contains("pmf")) {
    detail::check_keys(j, {"pmf"}, ctx);
    return {io::pmf_from_json(j.at("pmf")), std::nullopt};
  }
  if (j.contains("poisson")) {
    detail::check_keys(j, {"poisson", "tail"}, ctx);
    const double lambda = detail::number(j.at("poisson"), ctx + ".poisson");
    const double tail = j.contains("tail") ? detail::number(j.at("tail"), ctx + ".tail") : 1e-12;
    return {poisson_pmf(lambda, tail), lambda};
  }
  if (j.contains("skew_normal")) {
    detail::check_keys(j, {"skew_normal", "tail_eps"}, ctx);
    const auto p = io::skew_normal_from_json(j.at("skew_normal"));
    const double eps = j.contains("tail_eps") ? detail::number(j.at("tail_eps"), ctx + ".tail_eps") : 1e-10;
    return {discretize_skew_normal(p, eps), std::nullopt};
  }
  throw Error(ErrorCode::ConfigError, ctx + " needs one of point, pmf, poisson, skew_normal");
}

/// Everything needed to rebuild a profile-driven cyclic model, so sweeps can
/// vary the base hatch rate.
struct CyclicRecipe {
  std::string label;
  SeasonalProfile profile;
  double amplitude = 0.0;
  double base = 0.0;
  double r = 1.0;
  IntegerPmf eta = IntegerPmf::point(0);

  CyclicModel build() const { return cyclic_model_from_profile(profile, amplitude, base, r, eta); }
  CyclicModel build_with_base(double b) const { return cyclic_model_from_profile(profile, amplitude, b, r, eta); }
};

struct ModelConfig {
  std::variant<ColonyModel, CyclicRecipe> model;
  std::vector<CyclicRecipe> variants;  // cyclic only

  bool is_cyclic() const noexcept { return std::holds_alternative<CyclicRecipe>(model); }
  AnyModel build() const {
    if (const auto* h = std::get_if<ColonyModel>(&model)) return *h;
    return std::get<CyclicRecipe>(model).build();
  }
};

struct SimulationSettings {
  std::int64_t horizon = 365;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  std::int64_t start_day = 1;
  std::optional<SwarmRule> swarm;
  std::optional<std::int64_t> extinction_threshold;
  std::optional<DayWindow> extinction_window;
  bool hard_stop = false;
  double recovery_band = 0.05;
  bool write_traces = true;
};

struct ExtinctionSettings {
  std::optional<std::int64_t> threshold;
  DayWindow window;
  std::vector<double> sweep;  // hatched mean per day (homogeneous) or base offset (cyclic)
};

struct DensitySettings {
  double xi = 63.0;
  double alpha = -6.0;
  std::vector<double> omegas;
  double from = 0.0;
  double to = 120.0;
  double step = 0.5;
};

struct ValidationSettings {
  double renewal_perturbation = 0.0;
  std::int64_t samples = 20000;
  std::uint64_t seed = 20240601;
};

struct RunConfig {
  std::string description;
  std::optional<ModelConfig> model;
  SimulationSettings simulation;
  std::optional<ExtinctionSettings> extinction;
  std::optional<DensitySettings> density;
  ValidationSettings validation;
};

namespace detail {

inline DayWindow parse_window(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::ConfigError, ctx + " must be [first_day, last_day]");
  DayWindow w{integer(v[0], ctx + "[0]"), integer(v[1], ctx + "[1]")};
  if (w.first < 1 || w.last < w.first) throw Error(ErrorCode::ConfigError, ctx + " must satisfy 1 <= first <= last");
  return w;
}

inline SeasonalProfile parse_profile(const json& j, std::optional<std::int64_t> period, const std::filesystem::path& base_dir,
                                     const std::string& ctx) {
  require_object(j, ctx);
  SeasonalProfile p;
  if (j.contains("builtin")) {
    check_keys(j, {"builtin"}, ctx);
    if (!boolean(j.at("builtin"), ctx + ".builtin")) throw Error(ErrorCode::ConfigError, ctx + ".builtin must be true");
    p = builtin_seasonal_profile(period.value_or(365));
  } else if (j.contains("values")) {
    check_keys(j, {"values"}, ctx);
    p = SeasonalProfile{number_list(j.at("values"), ctx + ".values"), ProfileSource::Tabulated};
  } else if (j.contains("csv")) {
    check_keys(j, {"csv"}, ctx);
    if (!j.at("csv").is_string()) throw Error(ErrorCode::ConfigError, ctx + ".csv must be a path");
    std::filesystem::path path = j.at("csv").get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    p = SeasonalProfile{io::read_profile_csv(path), ProfileSource::Tabulated};
  } else {
    throw Error(ErrorCode::ConfigError, ctx + " needs one of builtin, values, csv");
  }
  if (period && static_cast<std::int64_t>(p.values.size()) != *period)
    throw Error(ErrorCode::ConfigError, ctx + " has " + std::to_string(p.values.size()) + " days but period is " +
                                            std::to_string(*period));
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, ctx + ": " + e.what());
  }
  return p;
}

inline ModelConfig parse_model(const json& j, const std::filesystem::path& base_dir) {
  require_object(j, "model");
  if (!j.contains("type") || !j.at("type").is_string()) throw Error(ErrorCode::ConfigError, "model.type is required");
  const auto type = j.at("type").get<std::string>();
  if (type == "homogeneous") {
    check_keys(j, {"type", "tau", "zeta", "r", "eta"}, "model");
    ColonyModel m;
    m.tau = j.contains("tau") ? parse_distribution(j.at("tau"), "model.tau").pmf : IntegerPmf::point(1);
    const auto zeta = parse_distribution(need(j, "zeta", "model"), "model.zeta");
    m.zeta = zeta.pmf;
    m.poisson_lambda = zeta.poisson_lambda;
    m.r = number(need(j, "r", "model"), "model.r");
    m.eta = parse_distribution(need(j, "eta", "model"), "model.eta").pmf;
    m.validate();
    return ModelConfig{m, {}};
  }
  if (type == "cyclic") {
    check_keys(j, {"type", "period", "profile", "amplitude", "base", "r", "eta", "variants"}, "model");
    std::optional<std::int64_t> period;
    if (j.contains("period")) {
      period = integer(j.at("period"), "model.period");
      if (*period < 1) throw Error(ErrorCode::ConfigError, "model.period must be >= 1");
    }
    CyclicRecipe base;
    base.label = "base";
    base.profile = parse_profile(need(j, "profile", "model"), period, base_dir, "model.profile");
    base.amplitude = number(need(j, "amplitude", "model"), "model.amplitude");
    base.base = number(need(j, "base", "model"), "model.base");
    base.r = j.contains("r") ? number(j.at("r"), "model.r") : 1.0;
    base.eta = parse_distribution(need(j, "eta", "model"), "model.eta").pmf;
    base.build();
    ModelConfig mc{base, {}};
    if (j.contains("variants")) {
      const auto& vs = j.at("variants");
      if (!vs.is_array()) throw Error(ErrorCode::ConfigError, "model.variants must be an array");
      std::set<std::string> labels;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string ctx = "model.variants[" + std::to_string(i) + "]";
        check_keys(vs[i], {"label", "amplitude", "base", "r", "eta"}, ctx);
        const auto& label = need(vs[i], "label", ctx);
        if (!label.is_string() || label.get<std::string>().empty())
          throw Error(ErrorCode::ConfigError, ctx + ".label must be a non-empty string");
        CyclicRecipe v = base;
        v.label = label.get<std::string>();
        for (char c : v.label)
          if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            throw Error(ErrorCode::ConfigError, ctx + ".label may only use letters, digits, '_', '-', '.'");
        if (!labels.insert(v.label).second) throw Error(ErrorCode::ConfigError, "duplicate variant label " + v.label);
        if (vs[i].contains("amplitude")) v.amplitude = number(vs[i].at("amplitude"), ctx + ".amplitude");
        if (vs[i].contains("base")) v.base = number(vs[i].at("base"), ctx + ".base");
        if (vs[i].contains("r")) v.r = number(vs[i].at("r"), ctx + ".r");
        if (vs[i].contains("eta")) v.eta = parse_distribution(vs[i].at("eta"), ctx + ".eta").pmf;
        v.build();
        mc.variants.push_back(std::move(v));
      }
    }
    return mc;
  }
  throw Error(ErrorCode::ConfigError, "model.type must be homogeneous or cyclic");
}

inline SimulationSettings parse_simulation(const json& j) {
  check_keys(j, {"horizon", "replications", "seed", "start_day", "swarm", "extinction_threshold", "extinction_window",
                 "hard_stop", "recovery_band", "write_traces"},
             "simulation");
  SimulationSettings s;
  if (j.contains("horizon")) s.horizon = integer(j.at("horizon"), "simulation.horizon");
  if (s.horizon < 1) throw Error(ErrorCode::ConfigError, "simulation.horizon must be >= 1");
  if (j.contains("replications")) s.replications = integer(j.at("replications"), "simulation.replications");
  if (s.replications < 1) throw Error(ErrorCode::ConfigError, "simulation.replications must be >= 1");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(ErrorCode::ConfigError, "simulation.seed must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("start_day")) s.start_day = integer(j.at("start_day"), "simulation.start_day");
  if (s.start_day < 1) throw Error(ErrorCode::ConfigError, "simulation.start_day must be >= 1");
  if (j.contains("swarm")) {
    const auto& w = j.at("swarm");
    check_keys(w, {"threshold", "leave_probability", "mode", "max_events"}, "simulation.swarm");
    SwarmRule rule;
    rule.threshold = integer(need(w, "threshold", "simulation.swarm"), "simulation.swarm.threshold");
    if (rule.threshold <= 0) throw Error(ErrorCode::ConfigError, "simulation.swarm.threshold must be positive");
    if (w.contains("leave_probability")) {
      rule.leave_probability = number(w.at("leave_probability"), "simulation.swarm.leave_probability");
      if (rule.leave_probability < 0.0 || rule.leave_probability > 1.0)
        throw Error(ErrorCode::ConfigError, "simulation.swarm.leave_probability must lie in [0, 1]");
    }
    if (w.contains("mode")) {
      const auto& mode = w.at("mode");
      if (mode == "bernoulli") rule.mode = SwarmMode::Bernoulli;
      else if (mode == "halve") rule.mode = SwarmMode::Halve;
      else throw Error(ErrorCode::ConfigError, "simulation.swarm.mode must be bernoulli or halve");
    }
    if (w.contains("max_events")) {
      rule.max_events = integer(w.at("max_events"), "simulation.swarm.max_events");
      if (*rule.max_events < 0) throw Error(ErrorCode::ConfigError, "simulation.swarm.max_events must be >= 0");
    }
    s.swarm = rule;
  }
  if (j.contains("extinction_threshold")) {
    s.extinction_threshold = integer(j.at("extinction_threshold"), "simulation.extinction_threshold");
    if (*s.extinction_threshold < 0) throw Error(ErrorCode::ConfigError, "simulation.extinction_threshold must be >= 0");
  }
  if (j.contains("extinction_window")) {
    s.extinction_window = parse_window(j.at("extinction_window"), "simulation.extinction_window");
    if (s.extinction_window->last > s.horizon)
      throw Error(ErrorCode::ConfigError, "simulation.extinction_window must end within the horizon");
  }
  if (j.contains("hard_stop")) s.hard_stop = boolean(j.at("hard_stop"), "simulation.hard_stop");
  if (j.contains("recovery_band")) {
    s.recovery_band = number(j.at("recovery_band"), "simulation.recovery_band");
    if (s.recovery_band < 0.0) throw Error(ErrorCode::ConfigError, "simulation.recovery_band must be >= 0");
  }
  if (j.contains("write_traces")) s.write_traces = boolean(j.at("write_traces"), "simulation.write_traces");
  return s;
}

inline ExtinctionSettings parse_extinction(const json& j, const SimulationSettings& sim) {
  check_keys(j, {"threshold", "window", "sweep"}, "extinction");
  ExtinctionSettings e;
  if (j.contains("threshold")) {
    e.threshold = integer(j.at("threshold"), "extinction.threshold");
    if (*e.threshold < 0) throw Error(ErrorCode::ConfigError, "extinction.threshold must be >= 0");
  } else {
    e.threshold = sim.extinction_threshold;
  }
  e.window = parse_window(need(j, "window", "extinction"), "extinction.window");
  if (e.window.last > sim.horizon) throw Error(ErrorCode::ConfigError, "extinction.window must end within simulation.horizon");
  const auto& sw = need(j, "sweep", "extinction");
  if (sw.is_array()) {
    e.sweep = number_list(sw, "extinction.sweep");
  } else {
    check_keys(sw, {"from", "to", "step"}, "extinction.sweep");
    const double from = number(need(sw, "from", "extinction.sweep"), "extinction.sweep.from");
    const double to = number(need(sw, "to", "extinction.sweep"), "extinction.sweep.to");
    const double step = number(need(sw, "step", "extinction.sweep"), "extinction.sweep.step");
    if (!(step > 0.0) || to < from) throw Error(ErrorCode::ConfigError, "extinction.sweep needs step > 0 and to >= from");
    const auto count = static_cast<std::int64_t>(std::floor((to - from) / step + 1e-9)) + 1;
    for (std::int64_t i = 0; i < count; ++i) e.sweep.push_back(from + static_cast<double>(i) * step);
  }
  if (e.sweep.empty()) throw Error(ErrorCode::ConfigError, "extinction.sweep is empty");
  for (double L : e.sweep)
    if (L < 0.0) throw Error(ErrorCode::ConfigError, "extinction.sweep values must be >= 0");
  std::sort(e.sweep.begin(), e.sweep.end());
  return e;
}

inline DensitySettings parse_density(const json& j) {
  check_keys(j, {"xi", "alpha", "omegas", "from", "to", "step"}, "density");
  DensitySettings d;
  if (j.contains("xi")) d.xi = number(j.at("xi"), "density.xi");
  if (j.contains("alpha")) d.alpha = number(j.at("alpha"), "density.alpha");
  d.omegas = number_list(need(j, "omegas", "density"), "density.omegas");
  for (double w : d.omegas)
    if (!(w > 0.0)) throw Error(ErrorCode::ConfigError, "density.omegas must be positive");
  if (j.contains("from")) d.from = number(j.at("from"), "density.from");
  if (j.contains("to")) d.to = number(j.at("to"), "density.to");
  if (j.contains("step")) d.step = number(j.at("step"), "density.step");
  if (!(d.step > 0.0) || d.to <= d.from) throw Error(ErrorCode::ConfigError, "density needs step > 0 and to > from");
  return d;
}

inline ValidationSettings parse_validation(const json& j) {
  check_keys(j, {"renewal_perturbation", "samples", "seed"}, "validation");
  ValidationSettings v;
  if (j.contains("renewal_perturbation"))
    v.renewal_perturbation = number(j.at("renewal_perturbation"), "validation.renewal_perturbation");
  if (j.contains("samples")) v.samples = integer(j.at("samples"), "validation.samples");
  if (v.samples < 100) throw Error(ErrorCode::ConfigError, "validation.samples must be >= 100");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(ErrorCode::ConfigError, "validation.seed must be a non-negative integer");
    v.seed = j.at("seed").get<std::uint64_t>();
  }
  return v;
}

}  // namespace detail

/// `base_dir` resolves relative file references (profile CSVs).
inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = ".") {
  detail::check_keys(j, {"description", "model", "simulation", "extinction", "density", "validation"}, "config");
  RunConfig c;
  if (j.contains("description")) {
    if (!j.at("description").is_string()) throw Error(ErrorCode::ConfigError, "description must be a string");
    c.description = j.at("description").get<std::string>();
  }
  if (j.contains("simulation")) c.simulation = detail::parse_simulation(j.at("simulation"));
  if (j.contains("model")) c.model = detail::parse_model(j.at("model"), base_dir);
  if (j.contains("extinction")) c.extinction = detail::parse_extinction(j.at("extinction"), c.simulation);
  if (j.contains("density")) c.density = detail::parse_density(j.at("density"));
  if (j.contains("validation")) c.validation = detail::parse_validation(j.at("validation"));
  if (c.model && c.model->is_cyclic()) {
    const auto period = std::get<CyclicRecipe>(c.model->model).profile.values.size();
    if (c.simulation.start_day > static_cast<std::int64_t>(period))
      throw Error(ErrorCode::ConfigError, "simulation.start_day must lie in [1, period]");
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

inline SimConfig make_sim_config(const RunConfig& c) {
  if (!c.model) throw Error(ErrorCode::ConfigError, "config has no model");
  const auto& s = c.simulation;
  SimConfig cfg{c.model->build()};
  cfg.horizon = s.horizon;
  cfg.replications = s.replications;
  cfg.seed = s.seed;
  cfg.start_day = s.start_day;
  cfg.swarm = s.swarm;
  cfg.extinction_threshold = s.extinction_threshold;
  cfg.extinction_window = s.extinction_window;
  cfg.hard_stop = s.hard_stop;
  return cfg;
}

}  // namespace hive::config
