#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace quantguard {

/// Philox4x64-10 counter-based PRNG (Salmon, Moraes, Dror, Shaw 2011).
/// A pure bijection of a 256-bit counter under a 128-bit key; all streams in
/// this library are keyed as (master_seed, stream_id). Golden test vectors
/// live in the test suite and match numpy.random.Philox block-for-block
/// (numpy increments its counter before generating, so numpy's first block
/// corresponds to counter = [1,0,0,0]).
class Philox4x64 {
 public:
  using Block = std::array<std::uint64_t, 4>;

  Philox4x64(std::uint64_t key0, std::uint64_t key1) : key_{key0, key1} {}

  Block operator()(const Block& counter) const {
    std::uint64_t k0 = key_[0];
    std::uint64_t k1 = key_[1];
    Block c = counter;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kWeyl0;
        k1 += kWeyl1;
      }
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMult0, c[0], hi0, lo0);
      mulhilo(kMult1, c[2], hi1, lo1);
      c = Block{hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    }
    return c;
  }

 private:
  static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  std::array<std::uint64_t, 2> key_;
};

/// Substream address space: high byte selects the purpose, low 56 bits the
/// index, so per-trial streams are independent and schedule-free.
enum class StreamDomain : std::uint64_t {
  validation = 1,
  training_trial = 2,
  split_trial = 3,
  dataset_gen = 4,
  aux = 5,
};

constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) {
  return (static_cast<std::uint64_t>(domain) << 56) | (index & ((1ULL << 56) - 1));
}

/// Buffered uniform stream over one Philox key. Counter starts at zero and
/// the block for the current counter is produced before incrementing.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream)
      : engine_(master_seed, stream) {}

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  /// Uniform on [0,1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer on [0, bound) (Lemire's multiply-shift with
  /// rejection). bound must be >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t cutoff = (0 - bound) % bound;
      while (lo < cutoff) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  void refill() {
    buffer_ = engine_(counter_);
    for (int i = 0; i < 4; ++i) {
      if (++counter_[static_cast<std::size_t>(i)] != 0) break;
    }
    pos_ = 0;
  }

  Philox4x64 engine_;
  Philox4x64::Block counter_{{0, 0, 0, 0}};
  Philox4x64::Block buffer_{};
  int pos_ = 4;
};

/// Standard normal draws via the Marsaglia polar method with spare caching.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t stream)
      : rng_(master_seed, stream) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.next_uniform() - 1.0;
      v = 2.0 * rng_.next_uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  RandomStream& raw() { return rng_; }

 private:
  RandomStream rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace quantguard
