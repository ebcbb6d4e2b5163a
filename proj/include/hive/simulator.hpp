#pragma once

// Day-stepping Monte Carlo of the colony size M_t for homogeneous and cyclic
// models, with optional swarming and extinction tracking.
//
// Each day applies, in order: scheduled deaths, the day's batch (if any), then
// the swarm rule. counts[t-1] is the population at the end of day t. A bee laid
// on day s with lifetime eta is alive on days s..s+eta and is removed at the
// start of day s+eta+1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "hive/cyclic.hpp"
#include "hive/errors.hpp"
#include "hive/pmf.hpp"
#include "hive/renewal.hpp"
#include "hive/rng.hpp"
#include "hive/stationary.hpp"

namespace hive {

enum class SwarmMode {
  Bernoulli,  // every bee leaves independently with leave_probability
  Halve,      // floor(M / 2) bees chosen uniformly without replacement leave
};

struct SwarmRule {
  std::int64_t threshold = 80000;
  double leave_probability = 0.5;
  SwarmMode mode = SwarmMode::Bernoulli;
  std::optional<std::int64_t> max_events;
};

struct DayWindow {
  std::int64_t first = 1;
  std::int64_t last = 1;
};

using AnyModel = std::variant<ColonyModel, CyclicModel>;

struct SimConfig {
  SimConfig() = default;
  explicit SimConfig(AnyModel m) : model(std::move(m)) {}

  AnyModel model;
  std::int64_t horizon = 1;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  std::int64_t start_day = 1;  // cycle day of simulated day 1
  std::optional<SwarmRule> swarm;
  std::optional<std::int64_t> extinction_threshold;
  std::optional<DayWindow> extinction_window;  // defaults to the whole horizon
  bool hard_stop = false;                      // zero the colony once extinct
  bool record_events = true;
  bool accounting = false;  // keep per-day births and deaths

  void validate() const {
    if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
    std::visit([](const auto& m) { m.validate(); }, model);
    if (const auto* c = std::get_if<CyclicModel>(&model); c && (start_day < 1 || start_day > c->period))
      throw Error(ErrorCode::InvalidArgument, "start_day must lie in [1, period]");
    if (swarm) {
      if (swarm->threshold <= 0) throw Error(ErrorCode::InvalidArgument, "swarm threshold must be positive");
      if (!(swarm->leave_probability >= 0.0 && swarm->leave_probability <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "leave probability must lie in [0, 1]");
    }
    if (extinction_threshold && *extinction_threshold < 0)
      throw Error(ErrorCode::InvalidArgument, "extinction threshold must be >= 0");
    if (extinction_window &&
        (extinction_window->first < 1 || extinction_window->last > horizon || extinction_window->first > extinction_window->last))
      throw Error(ErrorCode::InvalidArgument, "extinction window must lie within the horizon");
  }

  std::int64_t max_lifetime() const {
    if (const auto* h = std::get_if<ColonyModel>(&model)) return h->max_lifetime();
    return std::get<CyclicModel>(model).K;
  }
};

struct SimTrace {
  std::vector<std::int64_t> counts;  // counts[t-1] = M_t
  std::vector<std::int64_t> swarm_days;
  std::optional<std::int64_t> extinct_day;
  std::vector<std::int64_t> births;  // filled in accounting mode
  std::vector<std::int64_t> deaths;  // includes bees lost to swarming
};

/// Living bees grouped by the day they disappear.
class LifetimeBuckets {
 public:
  explicit LifetimeBuckets(std::int64_t max_lifetime)
      : ring_(static_cast<std::size_t>(max_lifetime + 2), 0) {}

  void add(std::int64_t death_day, std::int64_t n) {
    ring_[slot(death_day)] += n;
    alive_ += n;
  }

  /// Removes and returns the bees scheduled to disappear on `day`.
  std::int64_t expire(std::int64_t day) {
    auto& b = ring_[slot(day)];
    const auto n = b;
    b = 0;
    alive_ -= n;
    return n;
  }

  std::int64_t alive() const noexcept { return alive_; }
  std::vector<std::int64_t>& buckets() noexcept { return ring_; }
  const std::vector<std::int64_t>& buckets() const noexcept { return ring_; }

  void recount() {
    alive_ = 0;
    for (auto b : ring_) alive_ += b;
  }

 private:
  std::size_t slot(std::int64_t day) const noexcept {
    return static_cast<std::size_t>(day % static_cast<std::int64_t>(ring_.size()));
  }

  std::vector<std::int64_t> ring_;
  std::int64_t alive_ = 0;
};

/// Fires the swarm rule when the population exceeds the threshold, removing
/// departing bees from their expiry buckets. Returns whether it fired.
template <class Rng>
bool apply_swarm(LifetimeBuckets& bees, const SwarmRule& rule, Rng& rng) {
  if (bees.alive() <= rule.threshold) return false;
  auto& ring = bees.buckets();
  if (rule.mode == SwarmMode::Bernoulli) {
    for (auto& b : ring) b -= binomial(rng, b, rule.leave_probability);
  } else {
    // Selection sampling: each bee leaves with probability (still to remove) / (still to visit).
    std::int64_t to_remove = bees.alive() / 2;
    std::int64_t to_visit = bees.alive();
    for (auto& b : ring) {
      const auto n = b;
      for (std::int64_t j = 0; j < n && to_remove > 0; ++j, --to_visit) {
        if (static_cast<double>(to_remove) > uniform01(rng) * static_cast<double>(to_visit)) {
          --b;
          --to_remove;
        }
      }
      if (to_remove == 0) break;
    }
  }
  bees.recount();
  return true;
}

namespace detail {

/// Schedules `n` bees laid on `day` with lifetimes from `eta`: one draw per
/// bee for small batches, a multinomial split by conditional binomials for
/// large ones.
template <class Rng>
void schedule_lifetimes(const IntegerPmf& eta, std::int64_t n, std::int64_t day, LifetimeBuckets& bees, Rng& rng) {
  if (n <= 0) return;
  if (eta.is_point()) {
    bees.add(day + eta.min_value() + 1, n);
    return;
  }
  if (n <= static_cast<std::int64_t>(eta.size())) {
    for (std::int64_t j = 0; j < n; ++j) bees.add(day + eta.sample(rng) + 1, 1);
    return;
  }
  std::int64_t left = n;
  double mass_left = 1.0;
  for (std::int64_t k = eta.min_value(); k <= eta.max_value() && left > 0; ++k) {
    const double q = eta[k];
    if (q <= 0.0) continue;
    const std::int64_t x = (k == eta.max_value() || q >= mass_left) ? left : binomial(rng, left, q / mass_left);
    if (x > 0) bees.add(day + k + 1, x);
    left -= x;
    mass_left -= q;
  }
}

struct DayLaws {
  const IntegerPmf* zeta;
  double r;
  const IntegerPmf* eta;
};

}  // namespace detail

/// One replication; its random stream is fixed by (seed, replication).
inline SimTrace simulate_colony(const SimConfig& cfg, std::int64_t replication) {
  auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(replication), Stream::Simulation);
  const auto* homogeneous = std::get_if<ColonyModel>(&cfg.model);
  const auto* cyclic = std::get_if<CyclicModel>(&cfg.model);

  LifetimeBuckets bees(cfg.max_lifetime());
  SimTrace trace;
  trace.counts.assign(static_cast<std::size_t>(cfg.horizon), 0);
  if (cfg.accounting) {
    trace.births.assign(static_cast<std::size_t>(cfg.horizon), 0);
    trace.deaths.assign(static_cast<std::size_t>(cfg.horizon), 0);
  }
  const DayWindow window = cfg.extinction_window.value_or(DayWindow{1, cfg.horizon});
  std::int64_t next_batch = homogeneous ? homogeneous->tau.sample(rng) : 1;
  std::int64_t swarms = 0;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const auto idx = static_cast<std::size_t>(t - 1);
    const auto died = bees.expire(t);
    std::int64_t hatched = 0;
    if (t == next_batch) {
      detail::DayLaws laws{};
      if (homogeneous) {
        laws = {&homogeneous->zeta, homogeneous->r, &homogeneous->eta};
        next_batch += homogeneous->tau.sample(rng);
      } else {
        const auto s = cyclic->slot(cfg.start_day + t - 1);
        laws = {&cyclic->zeta[s], cyclic->r[s], &cyclic->eta[s]};
        next_batch = t + 1;
      }
      hatched = binomial(rng, laws.zeta->sample(rng), laws.r);
      detail::schedule_lifetimes(*laws.eta, hatched, t, bees, rng);
    }
    std::int64_t departed = 0;
    if (cfg.swarm && (!cfg.swarm->max_events || swarms < *cfg.swarm->max_events)) {
      const auto before = bees.alive();
      if (apply_swarm(bees, *cfg.swarm, rng)) {
        ++swarms;
        departed = before - bees.alive();
        if (cfg.record_events) trace.swarm_days.push_back(t);
      }
    }
    trace.counts[idx] = bees.alive();
    if (cfg.accounting) {
      trace.births[idx] = hatched;
      trace.deaths[idx] = died + departed;
    }
    if (cfg.extinction_threshold && !trace.extinct_day && t >= window.first && t <= window.last &&
        bees.alive() < *cfg.extinction_threshold) {
      trace.extinct_day = t;
      if (cfg.hard_stop) break;  // remaining counts stay 0
    }
  }
  return trace;
}

/// Mean of M_t without swarming. Exact for every model: batches arrive with
/// the renewal density H(s) - H(s-1) for homogeneous models and daily for
/// cyclic ones.
inline double expected_count(const SimConfig& cfg, std::int64_t day) {
  long double acc = 0.0L;
  if (const auto* h = std::get_if<ColonyModel>(&cfg.model)) {
    const auto table = renewal_function(RenewalSpec(h->tau), day);
    const double hatched = h->r * moments(h->zeta).mean;
    for (std::int64_t s = std::max<std::int64_t>(1, day - h->max_lifetime()); s <= day; ++s)
      acc += static_cast<long double>(table[s] - table[s - 1]) * hatched * h->eta.survival(day - s);
  } else {
    const auto& c = std::get<CyclicModel>(cfg.model);
    for (std::int64_t s = std::max<std::int64_t>(1, day - c.K); s <= day; ++s) {
      const auto slot = c.slot(cfg.start_day + s - 1);
      acc += static_cast<long double>(c.r[slot]) * moments(c.zeta[slot]).mean * c.eta[slot].survival(day - s);
    }
  }
  return static_cast<double>(acc);
}

/// For each swarm day s, the smallest d in [0, K+1] with counts at day s+d
/// within `band` (relative) of the no-swarm mean; nullopt when the trace
/// does not get there within K+1 days or before the horizon ends.
inline std::vector<std::optional<std::int64_t>> recovery_time_after_swarm(const SimConfig& cfg, const SimTrace& trace,
                                                                        double band = 0.05) {
  if (trace.swarm_days.empty()) throw Error(ErrorCode::NoSwarmEvents, "trace has no swarm events");
  const auto cap = cfg.max_lifetime() + 1;
  const auto horizon = static_cast<std::int64_t>(trace.counts.size());
  std::vector<std::optional<std::int64_t>> out;
  for (const auto s : trace.swarm_days) {
    std::optional<std::int64_t> found;
    for (std::int64_t d = 0; d <= cap && s + d <= horizon; ++d) {
      const double target = expected_count(cfg, s + d);
      const auto count = static_cast<double>(trace.counts[static_cast<std::size_t>(s + d - 1)]);
      if (std::abs(count - target) <= band * target) {
        found = d;
        break;
      }
    }
    out.push_back(found);
  }
  return out;
}

struct RecoveryStats {
  std::int64_t events = 0;
  std::int64_t recovered = 0;
  std::int64_t max_delay = 0;
  double mean_delay = 0.0;
};

struct EnsembleSummary {
  std::vector<double> mean;  // per day
  std::vector<double> sd;    // per day, n - 1 denominator (0 for one replication)
  double extinction_fraction = 0.0;
  std::int64_t swarm_events = 0;
  std::optional<RecoveryStats> recovery;
  std::vector<SimTrace> traces;  // filled when requested
};

/// Runs every replication, split into contiguous blocks across `threads`
/// workers. Per-day sums are kept in exact integer arithmetic, so the summary
/// does not depend on the number of workers.
inline EnsembleSummary run_ensemble(const SimConfig& cfg, unsigned threads = 1, bool keep_traces = false,
                                    double recovery_band = 0.05) {
  cfg.validate();
  const auto reps = cfg.replications;
  const auto days = static_cast<std::size_t>(cfg.horizon);
  struct Partial {
    std::vector<std::uint64_t> sum;
    std::vector<uint128> sumsq;
    std::int64_t extinct = 0;
    std::int64_t swarms = 0;
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  std::vector<Partial> partial(threads, Partial{std::vector<std::uint64_t>(days, 0),
                                                std::vector<uint128>(days, 0), 0, 0});
  std::vector<SimTrace> traces(keep_traces || cfg.swarm ? static_cast<std::size_t>(reps) : 0);
  const bool store = !traces.empty();

  auto work = [&](unsigned w) {
    const std::int64_t begin = reps * w / threads;
    const std::int64_t end = reps * (w + 1) / threads;
    auto& p = partial[w];
    for (std::int64_t rep = begin; rep < end; ++rep) {
      auto tr = simulate_colony(cfg, rep);
      for (std::size_t t = 0; t < days; ++t) {
        const auto c = static_cast<std::uint64_t>(tr.counts[t]);
        p.sum[t] += c;
        p.sumsq[t] += static_cast<uint128>(c) * c;
      }
      if (tr.extinct_day) ++p.extinct;
      p.swarms += static_cast<std::int64_t>(tr.swarm_days.size());
      if (store) traces[static_cast<std::size_t>(rep)] = std::move(tr);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  EnsembleSummary out;
  out.mean.assign(days, 0.0);
  out.sd.assign(days, 0.0);
  const auto n = static_cast<long double>(reps);
  for (std::size_t t = 0; t < days; ++t) {
    uint128 s = 0, ss = 0;
    for (const auto& p : partial) {
      s += p.sum[t];
      ss += p.sumsq[t];
    }
    const long double mean = static_cast<long double>(s) / n;
    out.mean[t] = static_cast<double>(mean);
    if (reps > 1) {
      const long double var = (static_cast<long double>(ss) - n * mean * mean) / (n - 1.0L);
      out.sd[t] = static_cast<double>(std::sqrt(std::max(0.0L, var)));
    }
  }
  std::int64_t extinct = 0;
  for (const auto& p : partial) {
    extinct += p.extinct;
    out.swarm_events += p.swarms;
  }
  out.extinction_fraction = static_cast<double>(extinct) / static_cast<double>(reps);

  if (cfg.swarm && out.swarm_events > 0) {
    RecoveryStats stats;
    long double total = 0.0L;
    for (const auto& tr : traces) {
      if (tr.swarm_days.empty()) continue;
      for (const auto& d : recovery_time_after_swarm(cfg, tr, recovery_band)) {
        ++stats.events;
        if (!d) continue;
        ++stats.recovered;
        stats.max_delay = std::max(stats.max_delay, *d);
        total += *d;
      }
    }
    if (stats.recovered > 0) stats.mean_delay = static_cast<double>(total / stats.recovered);
    out.recovery = stats;
  }
  if (keep_traces) out.traces = std::move(traces);
  return out;
}

struct ExtinctionEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  /// max over the window of P(M_t < threshold) under the Poisson law of M_t,
  /// when that law is available (daily laying, Poisson batch sizes).
  std::optional<double> analytic_lower_bound;
};

namespace detail {

/// P(Pn(mu) < threshold).
inline double poisson_below(double mu, std::int64_t threshold) {
  if (threshold <= 0) return 0.0;
  if (mu <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(threshold), mu);
}

inline bool poisson_daily(const SimConfig& cfg) {
  if (const auto* h = std::get_if<ColonyModel>(&cfg.model))
    return h->poisson_lambda.has_value() && h->degenerate_tau() && h->tau.min_value() == 1;
  return std::get<CyclicModel>(cfg.model).poisson_lambda.has_value();
}

}  // namespace detail

/// Fraction of replications whose minimum over `window` falls below the
/// extinction threshold, with its binomial standard error.
inline ExtinctionEstimate extinction_probability(const SimConfig& cfg, DayWindow window, unsigned threads = 1) {
  if (!cfg.extinction_threshold) throw Error(ErrorCode::MissingThreshold, "extinction threshold not set");
  SimConfig run = cfg;
  run.extinction_window = window;
  run.hard_stop = false;
  run.validate();
  const auto summary = run_ensemble(run, threads);
  ExtinctionEstimate out;
  out.estimate = summary.extinction_fraction;
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(cfg.replications));
  if (detail::poisson_daily(cfg)) {
    double best = 0.0;
    for (std::int64_t t = window.first; t <= window.last; ++t)
      best = std::max(best, detail::poisson_below(expected_count(cfg, t), *cfg.extinction_threshold));
    out.analytic_lower_bound = best;
  }
  return out;
}

/// Empirical law of a sample of counts.
inline IntegerPmf empirical_pmf(const std::vector<std::int64_t>& values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> w(static_cast<std::size_t>(*hi - *lo + 1), 0.0);
  for (auto v : values) w[static_cast<std::size_t>(v - *lo)] += 1.0;
  return IntegerPmf::from_weights(*lo, std::move(w));
}

/// Empirical law of M_day over `samples` independent replications.
inline IntegerPmf empirical_day_law(const SimConfig& cfg, std::int64_t day, std::int64_t samples) {
  if (day < 1 || day > cfg.horizon) throw Error(ErrorCode::InvalidArgument, "day must lie within the horizon");
  SimConfig run = cfg;
  run.horizon = day;
  run.extinction_window.reset();
  run.hard_stop = false;
  std::vector<std::int64_t> values(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) values[static_cast<std::size_t>(i)] = simulate_colony(run, i).counts.back();
  return empirical_pmf(values);
}

}  // namespace hive
