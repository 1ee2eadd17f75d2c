#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "dimlab/rng.hpp"

using namespace dimlab;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and separated by tag and id") {
  CounterStream a(7, 11, StreamTag::Offspring), b(7, 11, StreamTag::Offspring);
  CounterStream c(7, 11, StreamTag::MonteCarlo), d(7, 12, StreamTag::Offspring);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    differs_c |= x != c.next_u32();
    differs_d |= x != d.next_u32();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform doubles lie in [0,1) with mean near 1/2") {
  CounterStream s(1, 2, StreamTag::MonteCarlo);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of the mean is 1/sqrt(12 n)
  CHECK(std::fabs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("next_below covers its range uniformly") {
  CounterStream s(3, 4, StreamTag::MonteCarlo);
  std::array<int, 7> hist{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = s.next_below(7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  double chi2 = 0.0;
  for (int h : hist) chi2 += (h - n / 7.0) * (h - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.5);  // 6 dof, p ~ 0.001
}

TEST_CASE("word hashes are distinct along a small tree") {
  std::set<std::uint64_t> seen{kRootWordHash};
  std::vector<std::uint64_t> frontier{kRootWordHash};
  for (int level = 0; level < 4; ++level) {
    std::vector<std::uint64_t> next;
    for (auto h : frontier) {
      for (std::uint32_t s = 0; s < 9; ++s) {
        next.push_back(child_word_hash(h, s));
        CHECK(seen.insert(next.back()).second);
      }
    }
    frontier = std::move(next);
  }
  CHECK(derive_seed(5, 0) != derive_seed(5, 1));
  CHECK(derive_seed(5, 0) == derive_seed(5, 0));
}

TEST_CASE("bernoulli thresholds") {
  CHECK(bernoulli_threshold(0.0) == 0);
  CHECK(bernoulli_threshold(-1.0) == 0);
  CHECK(bernoulli_threshold(1.0) == 0x100000000ULL);
  CHECK(bernoulli_threshold(0.5) == 0x80000000ULL);
}
