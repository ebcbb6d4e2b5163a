#pragma once

// Skew-normal SN(xi, omega^2, alpha) bee lifetimes and their discretization
// to whole days: X is rounded up, and anything at or below one day becomes 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hive/errors.hpp"
#include "hive/pmf.hpp"

namespace hive {

struct SkewNormalParams {
  double xi = 0.0;     // location, days
  double omega = 0.0;  // scale, days
  double alpha = 0.0;  // slant

  void validate() const {
    if (!std::isfinite(xi) || !std::isfinite(omega) || !std::isfinite(alpha))
      throw Error(ErrorCode::NonFinite, "skew-normal parameters must be finite");
    if (omega < 0.0) throw Error(ErrorCode::InvalidScale, "omega must be >= 0");
  }
};

/// Standard normal CDF through the C library's erfc, which is accurate to a
/// few ulp over the whole real line (well inside 1e-12 absolute).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2); }

/// (2 / omega) phi(z) Phi(alpha z), z = (x - xi) / omega; omega > 0.
inline double skew_normal_pdf(const SkewNormalParams& p, double x) {
  const double z = (x - p.xi) / p.omega;
  return 2.0 / p.omega * normal_pdf(z) * normal_cdf(p.alpha * z);
}

inline double skew_normal_mean(const SkewNormalParams& p) {
  const double delta = p.alpha / std::sqrt(1.0 + p.alpha * p.alpha);
  return p.xi + p.omega * delta * std::sqrt(2.0 / std::numbers::pi);
}

namespace detail {

// Beyond 40 scale units either side the density is below 1e-300.
constexpr double kSkewNormalReach = 40.0;

inline double integrate_density(const SkewNormalParams& p, double a, double b) {
  if (b <= a) return 0.0;
  auto f = [&p](double x) { return skew_normal_pdf(p, x); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, 1e-13, &err);
}

// Integration breakpoints: every integer in [lo, hi] plus a half-scale grid
// around xi, so no panel is wider than the density's own length scale.
inline std::vector<double> breakpoints(const SkewNormalParams& p, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  for (double k = std::ceil(lo); k <= hi; k += 1.0) pts.push_back(k);
  const double h = p.omega / 2.0;
  const int n = static_cast<int>(2.0 * kSkewNormalReach);
  for (int j = -n; j <= n; ++j) {
    const double x = p.xi + j * h;
    if (x > lo && x < hi) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

/// P(X <= x) by adaptive Gauss-Kronrod quadrature of the density.
inline double skew_normal_cdf(const SkewNormalParams& p, double x) {
  p.validate();
  if (p.omega == 0.0) return x >= p.xi ? 1.0 : 0.0;
  const double lo = p.xi - detail::kSkewNormalReach * p.omega;
  const double hi = p.xi + detail::kSkewNormalReach * p.omega;
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const auto pts = detail::breakpoints(p, lo, x);
  long double acc = 0.0L;
  for (std::size_t i = 1; i < pts.size(); ++i) acc += detail::integrate_density(p, pts[i - 1], pts[i]);
  return std::min(1.0, static_cast<double>(acc));
}

/// Lifetime law in whole days: P(1) = P(X <= 1), P(k) = P(k-1 < X <= k) for
/// k >= 2. The support stops at the smallest K_max whose upper tail is below
/// tail_eps; that tail is folded into the K_max atom.
inline IntegerPmf discretize_skew_normal(const SkewNormalParams& p, double tail_eps = 1e-10) {
  p.validate();
  if (!(tail_eps > 0.0 && tail_eps <= 1e-6))
    throw Error(ErrorCode::InvalidArgument, "tail_eps must lie in (0, 1e-6]");
  if (p.omega == 0.0) return IntegerPmf::point(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(p.xi))));

  const double lo = p.xi - detail::kSkewNormalReach * p.omega;
  const double hi = p.xi + detail::kSkewNormalReach * p.omega;
  const auto top = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(hi)));
  std::vector<long double> cell(static_cast<std::size_t>(top + 1), 0.0L);  // cell[k], k = 1..top

  const auto pts = detail::breakpoints(p, lo, hi);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1];
    const double b = pts[i];
    const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(0.5 * (a + b))));
    cell[static_cast<std::size_t>(k)] += detail::integrate_density(p, a, b);
  }

  // Smallest k whose mass strictly above k is below tail_eps.
  long double above = 0.0L;
  std::int64_t k_max = top;
  for (std::int64_t k = top; k >= 1; --k) {
    if (above >= tail_eps) break;
    k_max = k;
    above += cell[static_cast<std::size_t>(k)];
  }
  long double folded = 0.0L;
  for (std::int64_t k = k_max + 1; k <= top; ++k) folded += cell[static_cast<std::size_t>(k)];
  std::vector<double> w(static_cast<std::size_t>(k_max));
  for (std::int64_t k = 1; k <= k_max; ++k) w[static_cast<std::size_t>(k - 1)] = static_cast<double>(cell[static_cast<std::size_t>(k)]);
  w.back() += static_cast<double>(folded);
  return IntegerPmf::from_weights(1, std::move(w));
}

}  // namespace hive
