#pragma once

// Slow, independent reference computations shared by the unit and
// acceptance tests.

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dimlab/exceptional.hpp"

namespace oracle {

// N(x, 3^-n) for the carpet with vertical lines: the level-n cells of column
// i number prod over ternary digits of i of (digit == 1 ? 2 : 3); a cell's
// disk has radius sqrt(2)/2 * 3^-n around the cell centre.
inline std::uint64_t carpet_column_count(double x, int n) {
  const auto cols = static_cast<std::int64_t>(std::llround(std::pow(3.0, n)));
  const double w = 1.0 / static_cast<double>(cols);
  const double rad = std::sqrt(0.5) * w;
  std::uint64_t total = 0;
  for (std::int64_t i = 0; i < cols; ++i) {
    if (std::fabs(x - (static_cast<double>(i) + 0.5) * w) > rad) continue;
    std::uint64_t prod = 1;
    for (std::int64_t j = i, k = 0; k < n; ++k, j /= 3) prod *= j % 3 == 1 ? 2 : 3;
    total += prod;
  }
  return total;
}

struct NaiveMembership {
  double max_fraction = 0.0;
  std::vector<double> distances;  // [n * taus + j], n = 1..N
};

// Direct loop: every coefficient b tau r^{q-qk(N-n)} cos(beta + gamma - n qk theta)
// evaluated from scratch with MPFR cos and pow at generous precision.
inline NaiveMembership naive_membership(const dimlab::ExceptionalParams& p, double beta,
                                        const std::vector<double>& taus) {
  const long qk = static_cast<long>(p.q) * p.k;
  const double mag_bits =
      (p.q - qk * (p.N - 1)) * std::log2(p.r) + std::log2(p.ell()) + std::log2(std::max(p.b, 1.0)) + 8;
  const auto prec = static_cast<mpfr_prec_t>(std::max(0.0, mag_bits) + 256);
  mpfr_t ang, c, pw, x, rnd;
  mpfr_inits2(prec, ang, c, pw, x, rnd, nullptr);
  NaiveMembership out;
  std::vector<int> hits(taus.size(), 0);
  const double thr = p.threshold();
  for (int n = 1; n <= p.N; ++n) {
    mpfr_set_d(ang, p.theta, MPFR_RNDN);
    mpfr_mul_si(ang, ang, -n * qk, MPFR_RNDN);
    mpfr_add_d(ang, ang, beta, MPFR_RNDN);
    mpfr_add_d(ang, ang, p.gamma, MPFR_RNDN);
    mpfr_cos(c, ang, MPFR_RNDN);
    mpfr_set_d(pw, p.r, MPFR_RNDN);
    mpfr_pow_si(pw, pw, p.q - qk * (p.N - n), MPFR_RNDN);
    mpfr_mul_d(pw, pw, p.b, MPFR_RNDN);
    mpfr_mul(c, c, pw, MPFR_RNDN);
    for (std::size_t j = 0; j < taus.size(); ++j) {
      mpfr_mul_d(x, c, taus[j], MPFR_RNDN);
      mpfr_round(rnd, x);
      mpfr_sub(x, x, rnd, MPFR_RNDN);
      const double d = std::fabs(mpfr_get_d(x, MPFR_RNDN));
      out.distances.push_back(d);
      if (d <= thr) ++hits[j];
    }
  }
  mpfr_clears(ang, c, pw, x, rnd, nullptr);
  int best = 0;
  for (int h : hits) best = std::max(best, h);
  out.max_fraction = static_cast<double>(best) / p.N;
  return out;
}

}  // namespace oracle
