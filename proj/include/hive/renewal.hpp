#pragma once

// Discrete renewal machinery: the renewal function H(n) = E N_n and the
// first two moments of the equilibrium (stationary-delay) counting process.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hive/errors.hpp"
#include "hive/pmf.hpp"
#include "hive/rng.hpp"

namespace hive {

/// Inter-batch law with cached mean. Support must be positive and aperiodic.
class RenewalSpec {
 public:
  explicit RenewalSpec(IntegerPmf tau) : tau_(std::move(tau)) {
    if (tau_.min_value() <= 0) throw Error(ErrorCode::ZeroSupport, "inter-batch law puts mass on 0");
    if (const auto d = gcd_of_support(tau_); d != 1)
      throw Error(ErrorCode::PeriodicSupport, "gcd of inter-batch support is " + std::to_string(d));
    mean_tau_ = moments(tau_).mean;
  }

  const IntegerPmf& tau() const noexcept { return tau_; }
  double mean_tau() const noexcept { return mean_tau_; }

 private:
  IntegerPmf tau_;
  double mean_tau_ = 1.0;
};

/// H(0..n_max) together with prefix sums S(n) = H(1) + ... + H(n).
class RenewalTable {
 public:
  RenewalTable() = default;

  /// Wraps precomputed values; h[0] is the value at n = 0.
  explicit RenewalTable(std::vector<double> h) : h_(std::move(h)) {
    if (h_.empty()) throw Error(ErrorCode::InvalidArgument, "renewal table needs at least H(0)");
    prefix_.assign(h_.size(), 0.0);
    long double acc = 0.0L;
    for (std::size_t n = 1; n < h_.size(); ++n) {
      acc += h_[n];
      prefix_[n] = static_cast<double>(acc);
    }
  }

  std::int64_t n_max() const noexcept { return static_cast<std::int64_t>(h_.size()) - 1; }
  std::size_t size() const noexcept { return h_.size(); }
  double operator[](std::int64_t n) const { return h_.at(static_cast<std::size_t>(n)); }
  const std::vector<double>& values() const noexcept { return h_; }

  /// H(1) + ... + H(n); zero for n <= 0.
  double prefix(std::int64_t n) const {
    if (n <= 0) return 0.0;
    return prefix_.at(static_cast<std::size_t>(n));
  }

  /// H(a) + ... + H(b); zero when a > b.
  double range_sum(std::int64_t a, std::int64_t b) const {
    if (a > b) return 0.0;
    return prefix(b) - prefix(a - 1);
  }

 private:
  std::vector<double> h_;
  std::vector<double> prefix_;
};

/// Forward recursion H(n) = F(n) + sum_{k=1}^{n} H(n-k) f_k.
inline RenewalTable renewal_function(const RenewalSpec& spec, std::int64_t n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 0");
  const auto& tau = spec.tau();
  std::vector<double> h(static_cast<std::size_t>(n_max + 1), 0.0);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    long double acc = tau.cdf(n);
    const std::int64_t top = std::min(n, tau.max_value());
    for (std::int64_t k = tau.min_value(); k <= top; ++k) acc += static_cast<long double>(h[static_cast<std::size_t>(n - k)]) * tau[k];
    h[static_cast<std::size_t>(n)] = static_cast<double>(acc);
  }
  return RenewalTable(std::move(h));
}

/// E N_v for the equilibrium process.
inline double equilibrium_count_mean(const RenewalSpec& spec, std::int64_t v) {
  return static_cast<double>(v) / spec.mean_tau();
}

/// E N_u^2 = (2 sum_{i=1}^{u-1} H(i) + u) / E tau.
inline double equilibrium_count_second_moment(const RenewalSpec& spec, const RenewalTable& table, std::int64_t u) {
  if (u < 0) throw Error(ErrorCode::InvalidArgument, "u must be >= 0");
  if (u - 1 > table.n_max())
    throw Error(ErrorCode::TableTooShort, "need H up to " + std::to_string(u - 1));
  return (2.0 * table.prefix(u - 1) + static_cast<double>(u)) / spec.mean_tau();
}

/// E N_u N_v = (sum_{i=1}^{u-1} H(i) + u + sum_{i=v-u}^{v-1} H(i)) / E tau, u < v.
inline double equilibrium_count_cross_moment(const RenewalSpec& spec, const RenewalTable& table, std::int64_t u,
                                             std::int64_t v) {
  if (u > v) throw Error(ErrorCode::BadOrder, "u must not exceed v");
  if (u == v) return equilibrium_count_second_moment(spec, table, u);
  if (u < 0) throw Error(ErrorCode::InvalidArgument, "u must be >= 0");
  if (v - 1 > table.n_max())
    throw Error(ErrorCode::TableTooShort, "need H up to " + std::to_string(v - 1));
  return (table.prefix(u - 1) + static_cast<double>(u) + table.range_sum(v - u, v - 1)) / spec.mean_tau();
}

/// Draws the epochs of the equilibrium renewal process: the first from the
/// equilibrium law, later gaps iid tau.
class EquilibriumEpochSampler {
 public:
  explicit EquilibriumEpochSampler(const RenewalSpec& spec)
      : tau_(spec.tau()), first_(equilibrium_distribution(spec.tau())) {}

  /// Appends every epoch <= horizon to `out` (cleared first).
  template <class Rng>
  void sample(std::int64_t horizon, Rng& rng, std::vector<std::int64_t>& out) const {
    out.clear();
    if (horizon <= 0) return;
    std::int64_t t = first_.sample(rng);
    while (t <= horizon) {
      out.push_back(t);
      t += tau_.sample(rng);
    }
  }

  const IntegerPmf& first_gap() const noexcept { return first_; }
  const IntegerPmf& gap() const noexcept { return tau_; }

 private:
  IntegerPmf tau_;
  IntegerPmf first_;
};

template <class Rng>
std::vector<std::int64_t> sample_equilibrium_epochs(const RenewalSpec& spec, std::int64_t horizon, Rng& rng) {
  std::vector<std::int64_t> out;
  EquilibriumEpochSampler(spec).sample(horizon, rng, out);
  return out;
}

}  // namespace hive
