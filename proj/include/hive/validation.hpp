#pragma once

// Self-check suite behind `hivesim validate`. Each check compares a library
// result with something computed another way: exhaustive enumeration, a
// closed form, or Monte Carlo with a standard-error allowance.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hive/config.hpp"
#include "hive/cyclic.hpp"
#include "hive/pmf.hpp"
#include "hive/renewal.hpp"
#include "hive/rng.hpp"
#include "hive/simulator.hpp"
#include "hive/skew_normal.hpp"
#include "hive/stationary.hpp"

namespace hive {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // the measured discrepancy
  double tolerance = 0.0;  // pass when value <= tolerance
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }

  nlohmann::json to_json() const {
    nlohmann::json list = nlohmann::json::array();
    std::size_t failed = 0;
    for (const auto& c : checks) {
      list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});
      if (!c.passed) ++failed;
    }
    return {{"passed", all_passed()}, {"total", checks.size()}, {"failed", failed}, {"checks", list}};
  }
};

namespace validation_detail {

/// H(n) as the expected number of epochs in [1, n], summed over every path
/// of inter-batch gaps that stays within n.
inline double enumerate_renewal(const IntegerPmf& tau, std::int64_t n) {
  std::function<double(std::int64_t, double)> walk = [&](std::int64_t t, double prob) {
    double acc = 0.0;
    for (std::int64_t k = tau.min_value(); k <= tau.max_value(); ++k) {
      if (tau[k] == 0.0 || t + k > n) continue;
      const double p = prob * tau[k];
      acc += p + walk(t + k, p);
    }
    return acc;
  };
  return walk(0, 1.0);
}

/// Var of the stationary colony size by enumerating every configuration of
/// equilibrium epochs in [1, max eta + 1] and conditioning on it: given the
/// epochs, batches are independent mixed binomials.
inline double enumerate_variance(const ColonyModel& m) {
  const auto reach = m.eta.max_value() + 1;
  const auto first = equilibrium_distribution(m.tau);
  const double ez = moments(m.zeta).mean;
  const double vz = moments(m.zeta).variance;
  auto keep = [&](std::int64_t s) { return m.r * m.eta.survival(s - 1); };
  double e_cond_var = 0.0, e_mean = 0.0, e_mean_sq = 0.0;
  std::function<void(std::int64_t, double, double, double)> walk = [&](std::int64_t s, double prob, double mean, double var) {
    const double p = keep(s);
    mean += ez * p;
    var += ez * p * (1.0 - p) + p * p * vz;
    double stop = 1.0;
    for (std::int64_t k = m.tau.min_value(); k <= m.tau.max_value(); ++k) {
      if (m.tau[k] == 0.0 || s + k > reach) continue;
      stop -= m.tau[k];
      walk(s + k, prob * m.tau[k], mean, var);
    }
    e_cond_var += prob * stop * var;
    e_mean += prob * stop * mean;
    e_mean_sq += prob * stop * mean * mean;
  };
  for (std::int64_t s = first.min_value(); s <= first.max_value(); ++s) {
    if (first[s] == 0.0) continue;
    if (s > reach) {
      // No epoch inside the window: contributes zero mean and variance.
      continue;
    }
    walk(s, first[s], 0.0, 0.0);
  }
  return e_cond_var + e_mean_sq - e_mean * e_mean;
}

inline CheckResult make(std::string name, double value, double tolerance, std::string detail = {}) {
  return CheckResult{std::move(name), std::isfinite(value) && value <= tolerance, value, tolerance, std::move(detail)};
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  SampleStats s;
  for (double v : x) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - s.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  s.variance = m2 / (n - 1.0);
  m4 /= n;
  s.se_mean = std::sqrt(s.variance / n);
  s.se_variance = std::sqrt(std::max(0.0, m4 - (m2 / n) * (m2 / n)) / n);
  return s;
}

}  // namespace validation_detail

/// Runs every check. A nonzero `renewal_perturbation` is added to each H(n),
/// n >= 1, wherever a check consumes a renewal table; the suite must then fail.
inline ValidationReport run_validation(const config::ValidationSettings& settings) {
  namespace vd = validation_detail;
  ValidationReport report;
  auto run = [&](const std::string& name, const std::function<CheckResult()>& check) {
    try {
      report.checks.push_back(check());
    } catch (const std::exception& e) {
      report.checks.push_back(CheckResult{name, false, std::nan(""), 0.0, e.what()});
    }
  };
  auto perturbed = [&](const RenewalTable& t) {
    auto h = t.values();
    for (std::size_t n = 1; n < h.size(); ++n) h[n] += settings.renewal_perturbation;
    return RenewalTable(std::move(h));
  };
  const auto tau12 = IntegerPmf::from_weights(1, {0.5, 0.5});

  run("worked_means", [&] {
    const double a = stationary_mean(ColonyModel{IntegerPmf::point(1), IntegerPmf::point(1875), 0.8, IntegerPmf::point(63), {}});
    const double b = stationary_mean(ColonyModel{IntegerPmf::point(1), IntegerPmf::point(1600), 0.75, IntegerPmf::point(63), {}});
    const double c = stationary_mean(ColonyModel{IntegerPmf::point(1), IntegerPmf::point(1600), 0.75, IntegerPmf::point(50), {}});
    const double err = std::abs(a - 96000.0) + std::abs(b - 76800.0) + std::abs(c - 61200.0);
    return vd::make("worked_means", err, 0.0, "96000 / 76800 / 61200");
  });

  run("renewal_enumeration", [&] {
    const auto table = perturbed(renewal_function(RenewalSpec(tau12), 12));
    double worst = 0.0;
    for (std::int64_t n = 1; n <= 12; ++n) worst = std::max(worst, std::abs(table[n] - vd::enumerate_renewal(tau12, n)));
    return vd::make("renewal_enumeration", worst, 1e-12, "tau uniform on {1,2}, n <= 12");
  });

  run("elementary_renewal", [&] {
    const auto tau = IntegerPmf::from_weights(1, {0.2, 0.0, 0.5, 0.3});
    const auto table = perturbed(renewal_function(RenewalSpec(tau), 2000));
    const double ratio = table[2000] / 2000.0 * moments(tau).mean;
    return vd::make("elementary_renewal", std::abs(ratio - 1.0), 0.01, "H(2000)/2000 vs 1/E tau");
  });

  run("equilibrium_identity", [&] {
    const auto tau = IntegerPmf::from_weights(1, {0.2, 0.0, 0.5, 0.3});
    const auto pi = equilibrium_distribution(tau);
    const double mu = moments(tau).mean;
    double worst = 0.0;
    for (std::int64_t k = 1; k <= tau.max_value(); ++k) worst = std::max(worst, std::abs(pi[k] * mu - tau.survival(k)));
    return vd::make("equilibrium_identity", worst, 1e-14, "pi_k E tau = P(tau >= k)");
  });

  const auto eta_sn = discretize_skew_normal({63.0, 10.0, -6.0});

  run("skew_normal_mean", [&] {
    const SkewNormalParams p{63.0, 10.0, -6.0};
    const double closed = skew_normal_mean(p);
    double err = 0.0;
    const double integrated = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double x) { return x * skew_normal_pdf(p, x); }, p.xi - 40.0 * p.omega, p.xi + 40.0 * p.omega, 15, 1e-12, &err);
    const double discrete = moments(eta_sn).mean;
    const double gap = std::max(std::abs(closed - integrated) * 1e5, std::abs(discrete - closed) / 0.6);
    return vd::make("skew_normal_mean", gap, 1.0, "closed form vs quadrature; discretized mean within 0.6");
  });

  run("poisson_variance", [&] {
    const auto m = make_poisson_model(IntegerPmf::point(1), 100.0, 0.8, eta_sn);
    const auto table = perturbed(renewal_function(RenewalSpec(m.tau), m.max_lifetime() + 1));
    return vd::make("poisson_variance", vd::rel(stationary_variance(m, table), stationary_mean(m)) , 1e-6,
                    "Var = E for Poisson batches");
  });

  run("poisson_pmf_tv", [&] {
    const auto m = make_poisson_model(IntegerPmf::point(1), 100.0, 0.8, eta_sn);
    const auto pmf = stationary_pmf_via_cf(m);
    return vd::make("poisson_pmf_tv", tv_distance(pmf, poisson_pmf(stationary_mean(m))), 1e-7,
                    "CF inversion vs Poisson PMF");
  });

  run("cf_closed_form", [&] {
    const auto m = make_poisson_model(IntegerPmf::point(1), 5.0, 0.5, IntegerPmf::point(3));
    const double mu = 0.5 * 5.0 * 4.0;
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) {
      const double u = 2.0 * std::numbers::pi * j / 64.0;
      const auto ref = std::exp(mu * (std::polar(1.0, u) - 1.0));
      worst = std::max(worst, std::abs(stationary_cf(m, u) - ref));
    }
    return vd::make("cf_closed_form", worst, 1e-9, "CF vs Poisson CF on 64 points");
  });

  const ColonyModel mixed{tau12, IntegerPmf::from_weights(0, {0.5, 0.0, 0.0, 0.0, 0.5}), 0.7,
                          IntegerPmf::from_weights(0, {0.2, 0.1, 0.0, 0.3, 0.1, 0.0, 0.1, 0.2}), {}};

  run("variance_enumeration", [&] {
    const auto table = perturbed(renewal_function(RenewalSpec(mixed.tau), mixed.max_lifetime() + 1));
    const double oracle = vd::enumerate_variance(mixed);
    return vd::make("variance_enumeration", vd::rel(stationary_variance(mixed, table), oracle), 1e-9,
                    "closed form vs epoch enumeration");
  });

  auto draws = [&](const ColonyModel& m, std::uint64_t salt) {
    auto rng = make_rng(settings.seed, salt, Stream::Validation);
    StationarySampler sampler(m);
    std::vector<double> x(static_cast<std::size_t>(settings.samples));
    for (auto& v : x) v = static_cast<double>(sampler(rng));
    return vd::sample_stats(x);
  };

  run("variance_monte_carlo", [&] {
    const auto s = draws(mixed, 1);
    const auto table = perturbed(renewal_function(RenewalSpec(mixed.tau), mixed.max_lifetime() + 1));
    const double z = std::abs(s.variance - stationary_variance(mixed, table)) / s.se_variance;
    return vd::make("variance_monte_carlo", z, 4.0, "standard errors");
  });

  run("mean_monte_carlo", [&] {
    const auto s = draws(mixed, 2);
    return vd::make("mean_monte_carlo", std::abs(s.mean - stationary_mean(mixed)) / s.se_mean, 4.0, "standard errors");
  });

  run("convergence_bound", [&] {
    const auto m = make_poisson_model(IntegerPmf::point(1), 1.0, 0.9, eta_sn);
    double rises = 0.0;
    double prev = convergence_bound(m, 0);
    for (std::int64_t n = 1; n <= m.max_lifetime() + 1; ++n) {
      const double b = convergence_bound(m, n);
      rises = std::max(rises, b - prev);
      prev = b;
    }
    return vd::make("convergence_bound", rises + prev, 0.0, "non-increasing and zero at max eta + 1");
  });

  run("cyclic_reduction", [&] {
    const auto m = make_poisson_model(IntegerPmf::point(1), 40.0, 0.6, eta_sn);
    const auto c = constant_cyclic_model(m, 7);
    double worst = 0.0;
    for (double v : cyclic_mean_profile(c)) worst = std::max(worst, vd::rel(v, stationary_mean(m)));
    for (double t : {0.01, 0.1, 0.7, 2.0})
      worst = std::max(worst, std::abs(cyclic_cf(c, c.K + 4, t) - stationary_cf(m, t)));
    return vd::make("cyclic_reduction", worst, 1e-12, "constant cyclic model vs homogeneous");
  });

  run("min_pair_bruteforce", [&] {
    const auto eta = IntegerPmf::from_weights(2, {0.1, 0.3, 0.05, 0.25, 0.2, 0.1});
    const auto got = min_pair_pmf(eta);
    std::vector<double> brute(eta.size(), 0.0);
    for (auto a = eta.min_value(); a <= eta.max_value(); ++a)
      for (auto b = eta.min_value(); b <= eta.max_value(); ++b)
        brute[static_cast<std::size_t>(std::min(a, b) - eta.min_value())] += eta[a] * eta[b];
    double worst = 0.0;
    for (auto k = eta.min_value(); k <= eta.max_value(); ++k)
      worst = std::max(worst, std::abs(got[k] - brute[static_cast<std::size_t>(k - eta.min_value())]));
    return vd::make("min_pair_bruteforce", worst, 1e-15, "min of two copies");
  });

  run("simulator_mean", [&] {
    const auto m = make_poisson_model(IntegerPmf::point(1), 3.0, 0.8, IntegerPmf::from_weights(0, {0.1, 0.2, 0.3, 0.2, 0.2}));
    SimConfig cfg{m};
    cfg.horizon = m.max_lifetime() + 3;
    cfg.replications = std::max<std::int64_t>(200, settings.samples / 10);
    cfg.seed = settings.seed;
    const auto s = run_ensemble(cfg);
    const double se = s.sd.back() / std::sqrt(static_cast<double>(cfg.replications));
    return vd::make("simulator_mean", std::abs(s.mean.back() - stationary_mean(m)) / se, 4.0,
                    "ensemble mean after max lifetime + 1 days, standard errors");
  });

  return report;
}

}  // namespace hive
