#pragma once

#include <array>
#include <cstdint>

namespace dimlab {

// Philox4x32-10 counter-based generator (Salmon et al.). Pure function of
// (counter, key), so any node of a random tree can draw its randomness
// without reference to traversal order.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

std::uint64_t mix64(std::uint64_t z);

// Stable hash of a word path; extend one symbol at a time from kRootWordHash.
inline constexpr std::uint64_t kRootWordHash = 0x243F6A8885A308D3ULL;
std::uint64_t child_word_hash(std::uint64_t parent, std::uint32_t symbol);

// Seed for the i-th member of a batch derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Domain tags keep streams for different purposes disjoint.
enum class StreamTag : std::uint32_t {
  Offspring = 1,
  MeasureLevel = 2,
  MonteCarlo = 3,
};

// Sequential view over philox blocks at a fixed (seed, id, tag).
class CounterStream {
 public:
  using result_type = std::uint32_t;

  CounterStream(std::uint64_t seed, std::uint64_t id, StreamTag tag);

  std::uint32_t next_u32();
  // Uniform in [0, 1) with 53 random bits.
  double next_double();
  // Uniform integer in [0, n), n > 0.
  std::uint64_t next_below(std::uint64_t n);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()() { return next_u32(); }

 private:
  void refill();

  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 4;
};

// Probability p as a 32-bit threshold: u32 < threshold has probability p
// up to 2^-32.
std::uint64_t bernoulli_threshold(double p);

}  // namespace dimlab
