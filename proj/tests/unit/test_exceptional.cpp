#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dimlab/catalog.hpp"
#include "dimlab/exceptional.hpp"
#include "../oracles.hpp"

using namespace dimlab;

namespace {

ExceptionalParams small_params(int N) {
  ExceptionalParams p;
  p.r = 0.5;
  p.gamma = 0.3;
  p.b = 1.0;
  p.theta = 1.0;
  p.q = 2;
  p.k = 2;
  p.N = N;
  p.delta = 1.0 / 3.0;
  p.tau_grid_size = 64;
  return p;
}

}  // namespace

TEST_CASE("threshold and grids") {
  const auto p = small_params(10);
  CHECK(p.threshold() == doctest::Approx(std::pow(0.5, 8) / 15));
  CHECK(p.ell() == 16.0);
  const auto t = tau_grid(p);
  CHECK(t.size() == 64);
  CHECK(t.front() == 1.0);
  CHECK(t.back() == 16.0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] / t[i - 1] == doctest::Approx(std::pow(16.0, 1.0 / 63)));
  const auto b = beta_grid(8);
  CHECK(b[4] == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("validation") {
  auto p = small_params(10);
  p.delta = 0.6;
  CHECK_THROWS_AS(p.validate(), Error);
  p.diagnostic = true;
  CHECK_NOTHROW(p.validate());
  p = small_params(1);
  CHECK_THROWS_AS(p.validate(), Error);
  p = small_params(10);
  p.b = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.r = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("canonical beta is 2 pi periodic") {
  for (double b : {0.0, 0.3, 2.0, 6.0}) {
    CHECK(canonical_beta(b) == canonical_beta(b + 2 * std::numbers::pi));
    CHECK(canonical_beta(b) == canonical_beta(b - 4 * std::numbers::pi));
    CHECK(std::fabs(canonical_beta(b) - b) < 1e-12);
  }
  CHECK(std::ldexp(canonical_beta(1.2345), 40) == std::round(std::ldexp(canonical_beta(1.2345), 40)));
}

TEST_CASE("membership agrees with the direct multiprecision loop") {
  for (int N : {5, 30, 80}) {
    const auto p = small_params(N);
    const auto taus = tau_grid(p);
    for (double beta : {0.1, 1.0, 2.5}) {
      const auto fast = membership_fraction(p, beta);
      const auto slow = oracle::naive_membership(p, canonical_beta(beta), taus);
      CAPTURE(N);
      CAPTURE(beta);
      CHECK(std::fabs(fast.max_fraction - slow.max_fraction) <= 1e-12);
      CHECK(fast.is_member == (slow.max_fraction > 1 - p.delta));
    }
  }
}

TEST_CASE("smaller delta gives a subset") {
  auto p = small_params(20);
  auto q = p;
  q.delta = 0.1;
  const auto betas = beta_grid(64);
  const auto a = grid_scan(p, betas), b = grid_scan(q, betas);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (b.results[i].is_member) CHECK(a.results[i].is_member);
  }
  CHECK(b.member_fraction <= a.member_fraction);
}

TEST_CASE("zero offset is always a member") {
  auto p = small_params(10);
  p.b = 0.0;
  p.diagnostic = true;
  CHECK(membership_fraction(p, 0.7).max_fraction == 1.0);
}

TEST_CASE("parameters from a catalog system") {
  const Ifs rot = catalog::rotational();
  const auto p = params_from_ifs(rot, 1, 0, 2, 2, 0.3, 50);
  CHECK(p.r == 0.5);
  CHECK(p.b == doctest::Approx(1.0));
  CHECK(p.gamma == doctest::Approx(1.0));
  CHECK(p.theta == doctest::Approx(1.0));
  CHECK_THROWS_AS(params_from_ifs(rot, 1, 1, 2, 2, 0.3, 50), Error);
  const Ifs line({Similarity(1.0 / 3, 0.0, Vec{0.0}), Similarity(1.0 / 3, 0.0, Vec{2.0 / 3})}, 1);
  CHECK_THROWS_AS(params_from_ifs(line, 0, 1, 2, 2, 0.3, 50), Error);
}
