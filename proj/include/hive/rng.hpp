#pragma once

// Counter-based random streams. Every replication of every experiment gets
// its own (seed, replication, stream) key, so results do not depend on the
// order or the thread in which replications are executed.

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace hive {

__extension__ typedef unsigned __int128 uint128;

/// Philox4x64-10 (Salmon et al. 2011). Output order matches the reference
/// implementation: the counter's low word is incremented before each block.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  Philox4x64(Key key, Counter counter) : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) {
      increment();
      block_ = generate(counter_, key_);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  static Counter generate(Counter ctr, Key key) {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static Counter round(const Counter& c, const Key& k) {
    const uint128 p0 = static_cast<uint128>(kMul0) * c[0];
    const uint128 p1 = static_cast<uint128>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  void increment() {
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
  }

  Key key_;
  Counter counter_;
  Counter block_{};
  int pos_ = 4;
};

/// Named sub-streams of one replication.
enum class Stream : std::uint64_t {
  Simulation = 1,
  Stationary = 2,
  Epochs = 3,
  Swarm = 4,
  Validation = 5,
  User = 100,
};

/// A Philox stream keyed by (seed, stream) with the replication index in the
/// second counter word; the first counter word is the block counter.
inline Philox4x64 make_rng(std::uint64_t seed, std::uint64_t replication,
                           Stream stream = Stream::User) {
  return Philox4x64({seed, static_cast<std::uint64_t>(stream)}, {0, replication, 0, 0});
}

/// Uniform on [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Rng>
std::int64_t binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

/// Uniform integer on [0, n) by rejection; n > 0.
template <class Rng>
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace hive
