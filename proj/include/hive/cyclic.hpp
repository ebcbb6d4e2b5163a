#pragma once

// D-periodic seasonal model with daily laying (tau = 1) and lifetimes bounded
// by K. Day i of the cycle is batch i; absolute days wrap with 1-based modulo.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hive/errors.hpp"
#include "hive/pmf.hpp"
#include "hive/stationary.hpp"

namespace hive {

struct CyclicModel {
  std::int64_t period = 1;
  std::vector<IntegerPmf> zeta;
  std::vector<double> r;
  std::vector<IntegerPmf> eta;
  std::int64_t K = 0;
  /// Per-day Poisson means when every zeta_i is a truncated Poisson law.
  std::optional<std::vector<double>> poisson_lambda;

  void validate() const {
    if (period < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
    const auto d = static_cast<std::size_t>(period);
    if (zeta.size() != d || r.size() != d || eta.size() != d)
      throw Error(ErrorCode::InvalidArgument, "per-day lists must all have length " + std::to_string(period));
    if (poisson_lambda && poisson_lambda->size() != d)
      throw Error(ErrorCode::InvalidArgument, "Poisson means must have one entry per day");
    for (std::size_t i = 0; i < d; ++i) {
      HatchProbability check(r[i]);
      if (zeta[i].min_value() < 0) throw Error(ErrorCode::InvalidArgument, "batch size law has negative support");
      if (eta[i].min_value() < 0) throw Error(ErrorCode::InvalidArgument, "lifetime law has negative support");
      if (eta[i].max_value() > K)
        throw Error(ErrorCode::InvalidArgument, "lifetime support exceeds K = " + std::to_string(K));
    }
  }

  /// 0-based slot of (1-based, possibly non-positive) absolute day i.
  std::size_t slot(std::int64_t day) const noexcept {
    return static_cast<std::size_t>((((day - 1) % period) + period) % period);
  }
};

/// The same (zeta, r, eta) on every day of a cycle of length `period`.
inline CyclicModel constant_cyclic_model(const ColonyModel& m, std::int64_t period = 1) {
  if (!m.degenerate_tau() || m.tau.min_value() != 1)
    throw Error(ErrorCode::InvalidArgument, "cyclic models lay one batch per day");
  const auto d = static_cast<std::size_t>(period);
  CyclicModel c{period, std::vector<IntegerPmf>(d, m.zeta), std::vector<double>(d, m.r),
                std::vector<IntegerPmf>(d, m.eta), m.eta.max_value(), std::nullopt};
  if (m.poisson_lambda) c.poisson_lambda = std::vector<double>(d, *m.poisson_lambda);
  c.validate();
  return c;
}

enum class ProfileSource { Tabulated, Builtin };

/// seas(i) for i = 1..D, each in [0, 1].
struct SeasonalProfile {
  std::vector<double> values;
  ProfileSource source = ProfileSource::Tabulated;

  void validate() const {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "seasonal profile is empty");
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw Error(ErrorCode::InvalidArgument, "seasonal profile values must lie in [0, 1]");
  }
};

/// Stand-in seasonal egg-laying shape: zero through winter and a raised-cosine
/// bump over days 60..300 of a 365-day year (rescaled for other D), peaking
/// at 1 on day 180. It reproduces the qualitative shape only; exact seasonal
/// constants should be supplied as a tabulated profile.
inline SeasonalProfile builtin_seasonal_profile(std::int64_t period = 365) {
  if (period < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  const double scale = static_cast<double>(period) / 365.0;
  const double start = 60.0 * scale;
  const double end = 300.0 * scale;
  SeasonalProfile p{std::vector<double>(static_cast<std::size_t>(period), 0.0), ProfileSource::Builtin};
  for (std::int64_t i = 1; i <= period; ++i) {
    const double x = static_cast<double>(i);
    if (x > start && x < end)
      p.values[static_cast<std::size_t>(i - 1)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (x - start) / (end - start)));
  }
  return p;
}

/// Daily Poisson batches whose hatched mean is amplitude * seas(i) + base,
/// with constant hatch probability r and lifetime law eta.
inline CyclicModel cyclic_model_from_profile(const SeasonalProfile& profile, double amplitude, double base, double r,
                                             const IntegerPmf& eta, double tail = 1e-12) {
  profile.validate();
  if (!(amplitude >= 0.0) || !(base >= 0.0)) throw Error(ErrorCode::InvalidRate, "amplitude and base must be >= 0");
  if (!(r > 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidRate, "hatch probability must lie in (0, 1]");
  const auto d = profile.values.size();
  CyclicModel c;
  c.period = static_cast<std::int64_t>(d);
  c.r.assign(d, r);
  c.eta.assign(d, eta);
  c.K = eta.max_value();
  std::vector<double> lambda(d);
  c.zeta.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    lambda[i] = (amplitude * profile.values[i] + base) / r;
    c.zeta.push_back(poisson_pmf(lambda[i], tail));
  }
  c.poisson_lambda = std::move(lambda);
  c.validate();
  return c;
}

/// Characteristic function of M at absolute day n > K:
/// prod_{i=n-K}^{n} psi_{zeta,i}(r_i (e^{it} - 1) P(eta_i >= n - i) + 1).
inline std::complex<double> cyclic_cf(const CyclicModel& m, std::int64_t day, double t) {
  if (day <= m.K) throw Error(ErrorCode::DayBeforeStationarity, "day must exceed K = " + std::to_string(m.K));
  const std::complex<double> z = std::polar(1.0, t) - 1.0;
  std::complex<double> phi = 1.0;
  for (std::int64_t i = day - m.K; i <= day; ++i) {
    const auto s = m.slot(i);
    const double a = m.r[s] * m.eta[s].survival(day - i);
    if (a > 0.0) phi *= detail::pgf(m.zeta[s], a * z + 1.0);
  }
  return phi;
}

namespace detail {

inline std::int64_t representative_day(const CyclicModel& m, std::int64_t n) {
  std::int64_t day = n;
  while (day <= m.K) day += m.period;
  return day;
}

}  // namespace detail

/// Stationary mean colony size on each day 1..D of the cycle.
inline std::vector<double> cyclic_mean_profile(const CyclicModel& m) {
  std::vector<double> hatched(static_cast<std::size_t>(m.period));
  for (std::size_t s = 0; s < hatched.size(); ++s) hatched[s] = m.r[s] * moments(m.zeta[s]).mean;
  std::vector<double> out(static_cast<std::size_t>(m.period));
  for (std::int64_t n = 1; n <= m.period; ++n) {
    const auto day = detail::representative_day(m, n);
    long double acc = 0.0L;
    for (std::int64_t i = day - m.K; i <= day; ++i) {
      const auto s = m.slot(i);
      acc += static_cast<long double>(m.eta[s].survival(day - i)) * hatched[s];
    }
    out[static_cast<std::size_t>(n - 1)] = static_cast<double>(acc);
  }
  return out;
}

/// Mean of the Poisson law of M at day n of the cycle.
inline double cyclic_poisson_mean(const CyclicModel& m, std::int64_t n) {
  if (!m.poisson_lambda) throw Error(ErrorCode::NotPoissonModel, "batch sizes are not Poisson-typed");
  const auto day = detail::representative_day(m, n);
  long double acc = 0.0L;
  for (std::int64_t i = day - m.K; i <= day; ++i) {
    const auto s = m.slot(i);
    acc += static_cast<long double>(m.r[s]) * (*m.poisson_lambda)[s] * m.eta[s].survival(day - i);
  }
  return static_cast<double>(acc);
}

}  // namespace hive
