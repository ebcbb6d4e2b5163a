#pragma once

// Subcommands of the hivesim front end. Each takes a parsed RunConfig and an
// output directory, writes its artifacts, and returns a one-line summary.
// Errors propagate as hive::Error; exit_code_for maps them to process codes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hive/config.hpp"
#include "hive/cyclic.hpp"
#include "hive/errors.hpp"
#include "hive/io.hpp"
#include "hive/simulator.hpp"
#include "hive/skew_normal.hpp"
#include "hive/stationary.hpp"
#include "hive/validation.hpp"

namespace hive::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kModelError = 3 };

inline int exit_code_for(const Error& e) { return e.code() == ErrorCode::ConfigError ? kConfigError : kModelError; }

struct CommandResult {
  int exit_code = kOk;
  std::string summary;
};

struct RunOptions {
  fs::path out_dir = ".";
  unsigned threads = 1;
};

namespace detail {

inline const ColonyModel& homogeneous(const config::RunConfig& c) {
  if (!c.model) throw Error(ErrorCode::ConfigError, "config has no model");
  const auto* m = std::get_if<ColonyModel>(&c.model->model);
  if (!m) throw Error(ErrorCode::ConfigError, "this command needs a homogeneous model");
  return *m;
}

inline const config::CyclicRecipe& cyclic(const config::RunConfig& c) {
  if (!c.model) throw Error(ErrorCode::ConfigError, "config has no model");
  const auto* m = std::get_if<config::CyclicRecipe>(&c.model->model);
  if (!m) throw Error(ErrorCode::ConfigError, "this command needs a cyclic model");
  return *m;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::ConfigError, "cannot create output directory " + dir.string());
}

}  // namespace detail

/// stationary.json (mean, variance, poisson_mean), renewal.csv, and for a
/// fixed laying interval stationary_pmf.csv.
inline CommandResult cmd_stationary(const config::RunConfig& c, const RunOptions& opt) {
  const auto& m = detail::homogeneous(c);
  detail::ensure_dir(opt.out_dir);
  const auto law = stationary_law(m, true);
  io::json j{{"mean", law.mean}, {"variance", law.variance}};
  j["poisson_mean"] = law.poisson_mean ? io::json(*law.poisson_mean) : io::json(nullptr);
  io::write_json(opt.out_dir / "stationary.json", j);
  io::write_renewal_csv(opt.out_dir / "renewal.csv", renewal_function(RenewalSpec(m.tau), m.max_lifetime() + 1));
  if (law.pmf) io::write_pmf_csv(opt.out_dir / "stationary_pmf.csv", *law.pmf);
  return {kOk, "mean " + io::format_number(law.mean) + " variance " + io::format_number(law.variance) + " -> " +
                   (opt.out_dir / "stationary.json").string()};
}

/// mean_profile.csv (day, mean) and, for Poisson batches, poisson_mean.csv;
/// each variant adds mean_profile_<label>.csv.
inline CommandResult cmd_cyclic(const config::RunConfig& c, const RunOptions& opt) {
  const auto& recipe = detail::cyclic(c);
  detail::ensure_dir(opt.out_dir);
  auto write = [&](const config::CyclicRecipe& r, const std::string& suffix) {
    const auto model = r.build();
    const auto profile = cyclic_mean_profile(model);
    io::write_mean_profile_csv(opt.out_dir / ("mean_profile" + suffix + ".csv"), profile);
    if (model.poisson_lambda) {
      std::vector<double> pm(static_cast<std::size_t>(model.period));
      for (std::int64_t n = 1; n <= model.period; ++n) pm[static_cast<std::size_t>(n - 1)] = cyclic_poisson_mean(model, n);
      io::write_day_series_csv(opt.out_dir / ("poisson_mean" + suffix + ".csv"), "poisson_mean", pm);
    }
    return *std::max_element(profile.begin(), profile.end());
  };
  const double peak = write(recipe, "");
  for (const auto& v : c.model->variants) write(v, "_" + v.label);
  return {kOk, "peak mean " + io::format_number(peak) + ", " + std::to_string(1 + c.model->variants.size()) +
                   " profile(s) -> " + (opt.out_dir / "mean_profile.csv").string()};
}

/// traces.csv, summary.csv, summary.json.
inline CommandResult cmd_simulate(const config::RunConfig& c, const RunOptions& opt) {
  const auto cfg = config::make_sim_config(c);
  cfg.validate();
  detail::ensure_dir(opt.out_dir);
  const bool traces = c.simulation.write_traces;
  const auto summary = run_ensemble(cfg, opt.threads, traces, c.simulation.recovery_band);
  if (traces) io::write_traces_csv(opt.out_dir / "traces.csv", summary.traces);
  io::write_summary_csv(opt.out_dir / "summary.csv", summary);
  io::write_json(opt.out_dir / "summary.json", io::summary_json(summary));
  std::string line = "extinction_fraction " + io::format_number(summary.extinction_fraction) + " swarm_events " +
                     std::to_string(summary.swarm_events);
  if (summary.recovery) {
    line += " recovered " + std::to_string(summary.recovery->recovered) + "/" + std::to_string(summary.recovery->events) +
            " max_delay " + std::to_string(summary.recovery->max_delay);
  }
  return {kOk, line + " -> " + (opt.out_dir / "summary.csv").string()};
}

/// extinction.csv (L, probability, std_error, analytic_lower_bound), one row
/// per sweep value in increasing order. For homogeneous models L is the daily
/// hatched mean (batch sizes become Pn(L / r)); for cyclic models L replaces
/// the base offset.
inline CommandResult cmd_extinction(const config::RunConfig& c, const RunOptions& opt) {
  if (!c.extinction) throw Error(ErrorCode::ConfigError, "config has no extinction section");
  if (!c.model) throw Error(ErrorCode::ConfigError, "config has no model");
  const auto& e = *c.extinction;
  if (!e.threshold) throw Error(ErrorCode::MissingThreshold, "extinction threshold not set");
  detail::ensure_dir(opt.out_dir);
  std::vector<io::ExtinctionRow> rows;
  for (double L : e.sweep) {
    auto cfg = config::make_sim_config(c);
    if (const auto* h = std::get_if<ColonyModel>(&c.model->model)) {
      cfg.model = make_poisson_model(h->tau, L / h->r, h->r, h->eta);
    } else {
      cfg.model = std::get<config::CyclicRecipe>(c.model->model).build_with_base(L);
    }
    cfg.extinction_threshold = e.threshold;
    rows.push_back({L, extinction_probability(cfg, e.window, opt.threads)});
  }
  io::write_extinction_csv(opt.out_dir / "extinction.csv", rows);
  return {kOk, std::to_string(rows.size()) + " sweep point(s) -> " + (opt.out_dir / "extinction.csv").string()};
}

/// validation.json; exit 1 when any check fails.
inline CommandResult cmd_validate(const config::RunConfig& c, const RunOptions& opt) {
  detail::ensure_dir(opt.out_dir);
  const auto report = run_validation(c.validation);
  const auto path = opt.out_dir / "validation.json";
  io::write_json(path, report.to_json());
  std::size_t passed = 0;
  for (const auto& k : report.checks) passed += k.passed ? 1 : 0;
  return {report.all_passed() ? kOk : kValidationFailed,
          std::to_string(passed) + "/" + std::to_string(report.checks.size()) + " checks passed -> " + path.string()};
}

/// density_<omega>.csv (x, density) for each skew-normal scale in the config.
inline CommandResult cmd_density(const config::RunConfig& c, const RunOptions& opt) {
  if (!c.density) throw Error(ErrorCode::ConfigError, "config has no density section");
  const auto& d = *c.density;
  detail::ensure_dir(opt.out_dir);
  const auto count = static_cast<std::int64_t>(std::floor((d.to - d.from) / d.step + 1e-9)) + 1;
  std::vector<double> x(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) x[static_cast<std::size_t>(i)] = d.from + static_cast<double>(i) * d.step;
  for (double omega : d.omegas) {
    const SkewNormalParams p{d.xi, omega, d.alpha};
    p.validate();
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = skew_normal_pdf(p, x[i]);
    io::write_density_csv(opt.out_dir / ("density_" + io::format_number(omega) + ".csv"), x, y);
  }
  return {kOk, std::to_string(d.omegas.size()) + " density curve(s) -> " + opt.out_dir.string()};
}

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"stationary", "cyclic", "simulate", "extinction", "validate", "density"};
  return names;
}

/// Dispatches by name. An empty config path means an empty document, which
/// only `validate` accepts.
inline CommandResult run_command(const std::string& name, const fs::path& config_path, const RunOptions& opt,
                                 std::optional<std::uint64_t> seed_override = std::nullopt) {
  auto c = config_path.empty() ? config::RunConfig{} : config::load_config(config_path);
  if (seed_override) {
    c.simulation.seed = *seed_override;
    c.validation.seed = *seed_override;
  }
  if (name == "stationary") return cmd_stationary(c, opt);
  if (name == "cyclic") return cmd_cyclic(c, opt);
  if (name == "simulate") return cmd_simulate(c, opt);
  if (name == "extinction") return cmd_extinction(c, opt);
  if (name == "validate") return cmd_validate(c, opt);
  if (name == "density") return cmd_density(c, opt);
  throw Error(ErrorCode::ConfigError, "unknown subcommand " + name);
}

}  // namespace hive::cli
