#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace probshap {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: maps (counter, key) to four 32-bit words.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

// What a stream is used for. Streams with different purposes never overlap.
enum class Purpose : std::uint32_t {
  pool_build = 1,
  game_draw = 2,
  permutation = 3,
  player_setup = 4,
  shuffle = 5,
  realization = 6,
  generic = 7,
};

// A value-semantic random stream backed by Philox4x32-10.
//
// The key is derived from (seed, purpose); the upper 64 bits of the counter
// carry (game, player) and the lower 64 bits are the block position. Two
// streams with distinct (seed, purpose, game, player) produce independent
// sequences, so results never depend on which thread consumes which stream.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream() : Stream(0, Purpose::generic) {}
  Stream(std::uint64_t seed, Purpose purpose, std::uint32_t game = 0,
         std::uint32_t player = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  std::uint64_t operator()() { return next_u64(); }
  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [0, bound) without modulo bias. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller (one value per call).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Number of 128-bit blocks consumed so far.
  std::uint64_t position() const { return position_; }

  bool operator==(const Stream&) const = default;

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint32_t game_ = 0;
  std::uint32_t player_ = 0;
  std::uint64_t position_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

// Stream derivation used throughout the estimators.
inline Stream derive_stream(std::uint64_t master_seed, Purpose purpose,
                            std::uint32_t game = 0, std::uint32_t player = 0) {
  return Stream(master_seed, purpose, game, player);
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Uniform permutation of {0, ..., n-1} by Fisher-Yates over `rng`.
std::vector<int> sample_permutation(Stream& rng, int n);

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> values, Stream& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace probshap
