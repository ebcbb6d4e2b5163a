#pragma once

// Stationary law of the daily colony size for the time-homogeneous model:
// closed-form mean and variance, a direct sampler of the stationary variable,
// the characteristic function for fixed laying intervals and its numerical
// inversion to a PMF, and the explicit total-variation convergence bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "hive/errors.hpp"
#include "hive/fft.hpp"
#include "hive/pmf.hpp"
#include "hive/renewal.hpp"
#include "hive/rng.hpp"

namespace hive {

/// (tau, zeta, r, eta): inter-batch days, eggs per batch, hatch probability,
/// bee lifetime in days. `poisson_lambda` is set when zeta is a truncated
/// Poisson law built from that mean.
struct ColonyModel {
  IntegerPmf tau = IntegerPmf::point(1);
  IntegerPmf zeta = IntegerPmf::point(0);
  double r = 1.0;
  IntegerPmf eta = IntegerPmf::point(0);
  std::optional<double> poisson_lambda;

  /// Throws on any violated model precondition.
  void validate() const {
    RenewalSpec check(tau);
    HatchProbability check_r(r);
    if (zeta.min_value() < 0) throw Error(ErrorCode::InvalidArgument, "batch size law has negative support");
    if (eta.min_value() < 0) throw Error(ErrorCode::InvalidArgument, "lifetime law has negative support");
    if (poisson_lambda && !(*poisson_lambda >= 0.0)) throw Error(ErrorCode::InvalidRate, "Poisson mean must be >= 0");
  }

  bool degenerate_tau() const noexcept { return tau.is_point(); }
  /// Largest lifetime with positive mass.
  std::int64_t max_lifetime() const noexcept { return eta.max_value(); }
};

inline ColonyModel make_poisson_model(IntegerPmf tau, double lambda, double r, IntegerPmf eta,
                                      double tail = 1e-12) {
  ColonyModel m{std::move(tau), poisson_pmf(lambda, tail), r, std::move(eta), lambda};
  m.validate();
  return m;
}

struct StationaryLaw {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<IntegerPmf> pmf;
  std::optional<double> poisson_mean;
};

/// E M = r E zeta (E eta + 1) / E tau.
inline double stationary_mean(const ColonyModel& m) {
  return m.r * moments(m.zeta).mean * (moments(m.eta).mean + 1.0) / moments(m.tau).mean;
}

/// Variance of the stationary colony size given a renewal table covering
/// 0..max lifetime. Evaluated as
///   E M + r^2 (Var zeta - E zeta)(E min(eta, eta') + 1) / E tau
///       + (r E zeta)^2 sum_{v1,v2} q_v1 q_v2 Cov(N_{v1+1}, N_{v2+1}),
/// which is the four-term closed form with -(E M)^2 distributed over the
/// double sum; each covariance vanishes exactly for daily laying.
inline double stationary_variance(const ColonyModel& m, const RenewalTable& table) {
  const RenewalSpec spec(m.tau);
  const auto zm = moments(m.zeta);
  const double mu_tau = spec.mean_tau();
  const double em = stationary_mean(m);
  const double hatched = m.r * zm.mean;
  const double min_term = (moments(min_pair_pmf(m.eta)).mean + 1.0) / mu_tau;
  const double batch_term = m.r * m.r * (zm.variance - zm.mean) * min_term;

  const auto lo = m.eta.min_value();
  const auto hi = m.eta.max_value();
  auto cov = [&](std::int64_t u, std::int64_t v) {
    return equilibrium_count_cross_moment(spec, table, u, v) -
           static_cast<double>(u) * static_cast<double>(v) / (mu_tau * mu_tau);
  };
  long double pair_sum = 0.0L;
  for (std::int64_t v1 = lo; v1 <= hi; ++v1) {
    const double q1 = m.eta[v1];
    if (q1 == 0.0) continue;
    pair_sum += static_cast<long double>(q1) * q1 * cov(v1 + 1, v1 + 1);
    for (std::int64_t v2 = v1 + 1; v2 <= hi; ++v2) {
      const double q2 = m.eta[v2];
      if (q2 == 0.0) continue;
      pair_sum += 2.0L * q1 * q2 * cov(v1 + 1, v2 + 1);
    }
  }
  const double var = em + batch_term + hatched * hatched * static_cast<double>(pair_sum);
  const double scale = 1.0 + em + std::abs(batch_term) + hatched * hatched * std::abs(static_cast<double>(pair_sum));
  if (var < -1e-9 * scale) throw Error(ErrorCode::NegativeVarianceComputed, "variance evaluated to " + std::to_string(var));
  return std::max(0.0, var);
}

inline double stationary_variance(const ColonyModel& m) {
  const RenewalSpec spec(m.tau);
  return stationary_variance(m, renewal_function(spec, m.max_lifetime() + 1));
}

/// Draws the stationary colony size directly. Batch i sits at equilibrium
/// epoch S_i; each of its eggs counts when it hatches and lives at least
/// S_i - 1 days, so batch i contributes Binomial(zeta_i, r P(eta >= S_i - 1)).
class StationarySampler {
 public:
  explicit StationarySampler(const ColonyModel& m) : model_(m), epochs_(RenewalSpec(m.tau)) {
    const auto reach = m.max_lifetime() + 1;
    keep_.resize(static_cast<std::size_t>(reach + 1), 0.0);
    for (std::int64_t s = 1; s <= reach; ++s) keep_[static_cast<std::size_t>(s)] = m.r * m.eta.survival(s - 1);
  }

  template <class Rng>
  std::int64_t operator()(Rng& rng) const {
    const auto reach = static_cast<std::int64_t>(keep_.size()) - 1;
    std::int64_t total = 0;
    std::int64_t s = epochs_.first_gap().sample(rng);
    while (s <= reach) {
      total += binomial(rng, model_.zeta.sample(rng), keep_[static_cast<std::size_t>(s)]);
      s += epochs_.gap().sample(rng);
    }
    return total;
  }

 private:
  ColonyModel model_;
  EquilibriumEpochSampler epochs_;
  std::vector<double> keep_;
};

template <class Rng>
std::int64_t sample_stationary(const ColonyModel& m, Rng& rng) {
  return StationarySampler(m)(rng);
}

namespace detail {

/// Probability generating function sum_k P(X = k) s^k by Horner's scheme.
inline std::complex<double> pgf(const IntegerPmf& pmf, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  const auto p = pmf.probs();
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * s + p[i];
  if (pmf.min_value() != 0) acc *= std::pow(s, static_cast<double>(pmf.min_value()));
  return acc;
}

inline std::int64_t require_degenerate(const ColonyModel& m) {
  if (!m.degenerate_tau()) throw Error(ErrorCode::NonDegenerateTau, "inter-batch law is not a point mass");
  return m.tau.min_value();
}

/// Per-batch survivor probabilities a_i = r P(eta >= i c - 1) for the epochs
/// i c, i = 1, 2, ..., while positive.
inline std::vector<double> batch_keep_probabilities(const ColonyModel& m, std::int64_t c) {
  std::vector<double> a;
  for (std::int64_t i = 1;; ++i) {
    const double keep = m.r * m.eta.survival(i * c - 1);
    if (keep <= 0.0) break;
    a.push_back(keep);
  }
  return a;
}

}  // namespace detail

/// phi(u) = prod_i psi_zeta(r (e^{iu} - 1)(1 - F_eta(S_i - 2)) + 1), S_i = i c.
inline std::complex<double> stationary_cf(const ColonyModel& m, double u) {
  const auto c = detail::require_degenerate(m);
  const std::complex<double> z = std::polar(1.0, u) - 1.0;
  std::complex<double> phi = 1.0;
  for (double a : detail::batch_keep_probabilities(m, c)) phi *= detail::pgf(m.zeta, a * z + 1.0);
  return phi;
}

/// Smallest power of two exceeding min(mean + 12 sd + 16, 24 sd + 32): wide
/// enough for [0, mean + 12 sd] or for mean -/+ 12 sd, whichever is shorter.
inline std::size_t inversion_grid_size(double mean, double variance) {
  const double sd = std::sqrt(std::max(0.0, variance));
  const double need = std::min(mean + 12.0 * sd + 16.0, 24.0 * sd + 32.0);
  std::size_t n = 1;
  while (static_cast<double>(n) <= need) n <<= 1;
  return n;
}

/// The characteristic function on u_j = 2 pi j / n, j = 0..n-1. Each batch
/// factor is the transform of that batch's survivor law, so the grid costs
/// one FFT per distinct factor instead of a polynomial evaluation per point.
inline std::vector<std::complex<double>> stationary_cf_grid(const ColonyModel& m, std::size_t n) {
  const auto c = detail::require_degenerate(m);
  std::vector<std::complex<double>> phi(n, 1.0);
  const auto keep = detail::batch_keep_probabilities(m, c);
  std::size_t i = 0;
  while (i < keep.size()) {
    std::size_t j = i;
    while (j < keep.size() && keep[j] == keep[i]) ++j;
    const auto multiplicity = static_cast<int>(j - i);
    const IntegerPmf survivors = thin(m.zeta, keep[i]);
    std::vector<std::complex<double>> f(n, 0.0);
    for (std::int64_t k = survivors.min_value(); k <= survivors.max_value(); ++k)
      f[static_cast<std::size_t>(k) % n] += survivors[k];
    detail::fft(f, +1);
    for (std::size_t t = 0; t < n; ++t) {
      std::complex<double> factor = f[t];
      for (int e = 1; e < multiplicity; ++e) factor *= f[t];
      phi[t] *= factor;
    }
    i = j;
  }
  return phi;
}

/// PMF of the stationary colony size recovered from its characteristic
/// function by an inverse discrete transform on the grid sized by
/// `inversion_grid_size`. The transform gives the law folded modulo n, which
/// is unfolded onto the n values starting at max(0, floor(mean) - n / 2).
/// Negative round-off atoms are clipped; more than 1e-7 clipped mass, or any
/// atom below -1e-9, is reported as an error. Edge atoms below 1e-15 are
/// treated as round-off and dropped.
inline IntegerPmf stationary_pmf_via_cf(const ColonyModel& m) {
  detail::require_degenerate(m);
  const double mean = stationary_mean(m);
  const std::size_t n = inversion_grid_size(mean, stationary_variance(m));
  const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mean)) - static_cast<std::int64_t>(n / 2));
  auto phi = stationary_cf_grid(m, n);
  detail::fft(phi, -1);
  std::vector<double> w(n);
  double clipped = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = (static_cast<std::size_t>(lo) + i) % n;
    double v = phi[k].real() / static_cast<double>(n);
    if (v < 0.0) {
      if (v < -1e-9) throw Error(ErrorCode::InversionResidual, "negative atom " + std::to_string(v));
      clipped -= v;
      v = 0.0;
    }
    w[i] = v;
  }
  if (clipped > 1e-7) throw Error(ErrorCode::InversionResidual, "clipped mass " + std::to_string(clipped));
  for (auto& v : w) {
    if (v >= 1e-15) break;
    v = 0.0;
  }
  for (auto it = w.rbegin(); it != w.rend() && *it < 1e-15; ++it) *it = 0.0;
  return IntegerPmf::from_weights(lo, std::move(w));
}

/// r lambda sum_{i>=1} (1 - F_eta(i c - 2)): the mean of the Poisson
/// stationary law when zeta ~ Pn(lambda) and batches are c days apart.
inline double stationary_poisson_mean(double lambda, HatchProbability r, std::int64_t c, const IntegerPmf& eta) {
  if (lambda < 0.0) throw Error(ErrorCode::InvalidRate, "Poisson mean must be >= 0");
  if (c < 1) throw Error(ErrorCode::InvalidArgument, "laying interval must be >= 1");
  long double sum = 0.0L;
  for (std::int64_t i = 1; i * c - 2 < eta.max_value(); ++i) sum += eta.survival(i * c - 1);
  return r.value() * lambda * static_cast<double>(sum);
}

/// Half the L1 distance between two integer laws.
inline double tv_distance(const IntegerPmf& a, const IntegerPmf& b) {
  const auto lo = std::min(a.min_value(), b.min_value());
  const auto hi = std::max(a.max_value(), b.max_value());
  long double acc = 0.0L;
  for (std::int64_t k = lo; k <= hi; ++k) acc += std::abs(a[k] - b[k]);
  return static_cast<double>(acc / 2.0L);
}

/// r E zeta E max(eta + 1 - n, 0): bounds d_TV(M_n, stationary law) when the
/// laying interval is fixed.
inline double convergence_bound(const ColonyModel& m, std::int64_t n) {
  detail::require_degenerate(m);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
  long double excess = 0.0L;
  for (std::int64_t k = std::max(m.eta.min_value(), n); k <= m.eta.max_value(); ++k)
    excess += static_cast<long double>(k + 1 - n) * m.eta[k];
  return m.r * moments(m.zeta).mean * static_cast<double>(excess);
}

/// Mean and variance, plus the PMF and Poisson mean when the laying interval
/// is fixed.
inline StationaryLaw stationary_law(const ColonyModel& m, bool with_pmf = true) {
  m.validate();
  StationaryLaw law;
  law.mean = stationary_mean(m);
  law.variance = stationary_variance(m);
  if (m.degenerate_tau()) {
    if (with_pmf) law.pmf = stationary_pmf_via_cf(m);
    if (m.poisson_lambda)
      law.poisson_mean = stationary_poisson_mean(*m.poisson_lambda, HatchProbability(m.r), m.tau.min_value(), m.eta);
  }
  return law;
}

}  // namespace hive
