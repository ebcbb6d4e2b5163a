#pragma once

// Finite probability mass functions on the integers, stored densely over
// [min_value, max_value]. All lifetime, batch-size and inter-batch laws of
// the colony model are carried by this one type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hive/errors.hpp"
#include "hive/rng.hpp"

namespace hive {

class IntegerPmf {
 public:
  /// Normalizes `weights` (for values min_value, min_value+1, ...) and trims
  /// zero weights at both ends.
  static IntegerPmf from_weights(std::int64_t min_value, std::vector<double> weights) {
    long double total = 0.0L;
    for (double w : weights) {
      if (!std::isfinite(w)) throw Error(ErrorCode::NonFinite, "weight is not finite");
      if (w < 0.0) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(w) + " < 0");
      total += w;
    }
    if (total <= 0.0L) throw Error(ErrorCode::AllZero, "no positive weight");

    const auto first = std::find_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
    const auto last = std::find_if(weights.rbegin(), weights.rend(), [](double w) { return w > 0.0; }).base();
    const auto offset = static_cast<std::int64_t>(first - weights.begin());
    std::vector<double> probs(first, last);
    for (double& p : probs) p = static_cast<double>(p / total);
    return IntegerPmf(min_value + offset, std::move(probs));
  }

  static IntegerPmf point(std::int64_t value) { return IntegerPmf(value, {1.0}); }

  std::int64_t min_value() const noexcept { return min_; }
  std::int64_t max_value() const noexcept { return min_ + static_cast<std::int64_t>(probs_.size()) - 1; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  bool is_point() const noexcept { return probs_.size() == 1; }

  /// P(X = k); zero outside the support.
  double operator[](std::int64_t k) const noexcept {
    if (k < min_ || k > max_value()) return 0.0;
    return probs_[static_cast<std::size_t>(k - min_)];
  }

  /// P(X <= k).
  double cdf(std::int64_t k) const noexcept {
    if (k < min_) return 0.0;
    if (k >= max_value()) return 1.0;
    return cumulative_[static_cast<std::size_t>(k - min_)];
  }

  /// P(X >= k), summed from the top so small upper tails stay accurate.
  double survival(std::int64_t k) const noexcept {
    if (k <= min_) return 1.0;
    if (k > max_value()) return 0.0;
    return upper_[static_cast<std::size_t>(k - min_)];
  }

  /// Inverse-CDF draw.
  template <class Rng>
  std::int64_t sample(Rng& rng) const {
    if (probs_.size() == 1) return min_;
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, u);
    return min_ + static_cast<std::int64_t>(it - cumulative_.begin());
  }

  friend bool operator==(const IntegerPmf& a, const IntegerPmf& b) {
    return a.min_ == b.min_ && a.probs_ == b.probs_;
  }

 private:
  IntegerPmf(std::int64_t min_value, std::vector<double> probs)
      : min_(min_value), probs_(std::move(probs)) {
    const std::size_t n = probs_.size();
    cumulative_.resize(n);
    upper_.resize(n);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      acc += probs_[i];
      cumulative_[i] = static_cast<double>(acc);
    }
    cumulative_.back() = 1.0;
    acc = 0.0L;
    for (std::size_t i = n; i-- > 0;) {
      acc += probs_[i];
      upper_[i] = static_cast<double>(acc);
    }
    upper_.front() = 1.0;
  }

  std::int64_t min_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<double> upper_;
};

struct Moments {
  double mean;
  double variance;
};

inline Moments moments(const IntegerPmf& pmf) {
  long double mean = 0.0L;
  for (std::int64_t k = pmf.min_value(); k <= pmf.max_value(); ++k) mean += static_cast<long double>(k) * pmf[k];
  long double var = 0.0L;
  for (std::int64_t k = pmf.min_value(); k <= pmf.max_value(); ++k) {
    const long double d = static_cast<long double>(k) - mean;
    var += d * d * pmf[k];
  }
  return {static_cast<double>(mean), static_cast<double>(var)};
}

inline double cdf(const IntegerPmf& pmf, std::int64_t x) { return pmf.cdf(x); }

template <class Rng>
std::int64_t sample(const IntegerPmf& pmf, Rng& rng) {
  return pmf.sample(rng);
}

/// Probability that an egg hatches.
class HatchProbability {
 public:
  explicit HatchProbability(double r) : r_(r) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0)
      throw Error(ErrorCode::InvalidRate, "hatch probability must lie in [0, 1]");
  }
  double value() const noexcept { return r_; }
  operator double() const noexcept { return r_; }

 private:
  double r_;
};

inline std::int64_t gcd_of_support(const IntegerPmf& pmf) {
  if (pmf.min_value() <= 0) throw Error(ErrorCode::ZeroSupport, "support must be positive integers");
  std::int64_t g = 0;
  for (std::int64_t k = pmf.min_value(); k <= pmf.max_value(); ++k)
    if (pmf[k] > 0.0) g = std::gcd(g, k);
  return g;
}

/// Law of the time to the next renewal under stationarity:
/// pi_k = P(tau >= k) / E tau, k >= 1.
inline IntegerPmf equilibrium_distribution(const IntegerPmf& tau) {
  if (tau.min_value() <= 0) throw Error(ErrorCode::ZeroSupport, "inter-batch law puts mass on 0");
  if (const auto d = gcd_of_support(tau); d != 1)
    throw Error(ErrorCode::PeriodicSupport, "gcd of inter-batch support is " + std::to_string(d));
  const double mu = moments(tau).mean;
  std::vector<double> w(static_cast<std::size_t>(tau.max_value()));
  for (std::int64_t k = 1; k <= tau.max_value(); ++k) w[static_cast<std::size_t>(k - 1)] = tau.survival(k) / mu;
  return IntegerPmf::from_weights(1, std::move(w));
}

/// Mean and variance of Binomial(zeta, r) with random zeta.
inline Moments mixed_binomial_moments(const IntegerPmf& zeta, HatchProbability r) {
  const auto m = moments(zeta);
  const double p = r.value();
  return {p * m.mean, p * (1.0 - p) * m.mean + p * p * m.variance};
}

/// Law of min(X, X') for independent copies: q'_u = q_u^2 + 2 q_u P(X > u).
inline IntegerPmf min_pair_pmf(const IntegerPmf& eta) {
  std::vector<double> w(eta.size());
  for (std::int64_t k = eta.min_value(); k <= eta.max_value(); ++k) {
    const double q = eta[k];
    w[static_cast<std::size_t>(k - eta.min_value())] = q * q + 2.0 * q * eta.survival(k + 1);
  }
  return IntegerPmf::from_weights(eta.min_value(), std::move(w));
}

/// Binomial(n, p) probabilities for m = 0..n, evaluated outward from the mode
/// and cut once terms drop below 1e-300 relative to it.
inline std::vector<double> binomial_probs(std::int64_t n, double p) {
  std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
  if (p <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (p >= 1.0) {
    out.back() = 1.0;
    return out;
  }
  const auto mode = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor((n + 1) * p)));
  const double log_mode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(n - mode + 1.0) +
                          mode * std::log(p) + (n - mode) * std::log1p(-p);
  const double odds = p / (1.0 - p);
  out[static_cast<std::size_t>(mode)] = std::exp(log_mode);
  double v = out[static_cast<std::size_t>(mode)];
  for (std::int64_t m = mode + 1; m <= n && v > 0.0; ++m) {
    v *= odds * static_cast<double>(n - m + 1) / static_cast<double>(m);
    out[static_cast<std::size_t>(m)] = v;
  }
  v = out[static_cast<std::size_t>(mode)];
  for (std::int64_t m = mode - 1; m >= 0 && v > 0.0; --m) {
    v *= static_cast<double>(m + 1) / (odds * static_cast<double>(n - m));
    out[static_cast<std::size_t>(m)] = v;
  }
  return out;
}

/// Law of Binomial(X, p): each unit of X kept independently with probability p.
inline IntegerPmf thin(const IntegerPmf& pmf, double p) {
  if (p >= 1.0) return pmf;
  if (p <= 0.0) return IntegerPmf::point(0);
  if (pmf.min_value() < 0) throw Error(ErrorCode::InvalidArgument, "thinning needs a non-negative law");
  std::vector<long double> acc(static_cast<std::size_t>(pmf.max_value() + 1), 0.0L);
  for (std::int64_t k = pmf.min_value(); k <= pmf.max_value(); ++k) {
    const double pk = pmf[k];
    if (pk == 0.0) continue;
    const auto b = binomial_probs(k, p);
    for (std::size_t m = 0; m < b.size(); ++m) acc[m] += pk * b[m];
  }
  std::vector<double> w(acc.begin(), acc.end());
  return IntegerPmf::from_weights(0, std::move(w));
}

inline IntegerPmf convolve(const IntegerPmf& a, const IntegerPmf& b) {
  std::vector<long double> acc(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] += static_cast<long double>(a.probs()[i]) * b.probs()[j];
  return IntegerPmf::from_weights(a.min_value() + b.min_value(), std::vector<double>(acc.begin(), acc.end()));
}

/// Poisson(lambda) truncated on both sides so each discarded tail is below
/// tail / 2, then renormalized.
inline IntegerPmf poisson_pmf(double lambda, double tail = 1e-12) {
  if (!std::isfinite(lambda) || lambda < 0.0) throw Error(ErrorCode::InvalidRate, "Poisson mean must be >= 0");
  if (lambda == 0.0) return IntegerPmf::point(0);
  const auto mode = static_cast<std::int64_t>(std::floor(lambda));
  const double log_mode = mode * std::log(lambda) - lambda - std::lgamma(mode + 1.0);
  const double peak = std::exp(log_mode);

  std::vector<double> up{peak};
  double v = peak;
  for (std::int64_t k = mode + 1; v > 0.0; ++k) {
    v *= lambda / static_cast<double>(k);
    up.push_back(v);
    if (v < 1e-300) break;
  }
  std::vector<double> down;
  v = peak;
  for (std::int64_t k = mode; k > 0 && v > 0.0; --k) {
    v *= static_cast<double>(k) / lambda;
    down.push_back(v);
    if (v < 1e-300) break;
  }
  // Cut each side where the discarded mass drops below tail / 2.
  auto cut = [&](const std::vector<double>& side) {
    long double acc = 0.0L;
    std::size_t keep = side.size();
    while (keep > 0 && acc + side[keep - 1] < tail / 2) acc += side[--keep];
    return keep;
  };
  const std::size_t keep_up = std::max<std::size_t>(1, cut(up));
  const std::size_t keep_down = cut(down);
  std::vector<double> w;
  w.reserve(keep_down + keep_up);
  for (std::size_t i = keep_down; i-- > 0;) w.push_back(down[i]);
  w.insert(w.end(), up.begin(), up.begin() + static_cast<std::ptrdiff_t>(keep_up));
  return IntegerPmf::from_weights(mode - static_cast<std::int64_t>(keep_down), std::move(w));
}

/// Removes same-day batches (tau = 0) by merging them into the batch that
/// opens the day: the new batch size is a sum of 1 + G iid copies of zeta with
/// G ~ Geometric(P(tau = 0)), and the new gap law is tau conditioned on > 0.
inline std::pair<IntegerPmf, IntegerPmf> merge_same_day_batches(const IntegerPmf& tau, const IntegerPmf& zeta) {
  const double p0 = tau[0];
  if (p0 == 0.0) return {tau, zeta};
  if (p0 >= 1.0) throw Error(ErrorCode::ZeroSupport, "all batches fall on the same day");
  std::vector<double> gaps;
  for (std::int64_t k = 1; k <= tau.max_value(); ++k) gaps.push_back(tau[k]);
  auto new_tau = IntegerPmf::from_weights(1, std::move(gaps));

  // Mixture over the number of extra batches, stopped at negligible weight.
  std::vector<long double> acc;
  std::int64_t acc_min = 0;
  IntegerPmf power = zeta;
  double weight = 1.0 - p0;
  for (int g = 0; weight > 1e-17; ++g) {
    if (g == 0) {
      acc_min = power.min_value();
      acc.assign(static_cast<std::size_t>(power.max_value() - acc_min + 1), 0.0L);
    }
    const auto needed = static_cast<std::size_t>(power.max_value() - acc_min + 1);
    if (acc.size() < needed) acc.resize(needed, 0.0L);
    for (std::int64_t k = power.min_value(); k <= power.max_value(); ++k)
      acc[static_cast<std::size_t>(k - acc_min)] += weight * power[k];
    weight *= p0;
    power = convolve(power, zeta);
  }
  return {new_tau, IntegerPmf::from_weights(acc_min, std::vector<double>(acc.begin(), acc.end()))};
}

}  // namespace hive
