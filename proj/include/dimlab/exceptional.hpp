#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dimlab/ifs.hpp"

namespace dimlab {

// Parameters of the exceptional direction set E_{q,k}(delta, N).
struct ExceptionalParams {
  double r = 0.5;
  double gamma = 0.0;
  double b = 1.0;
  double theta = 1.0;
  int q = 1;
  int k = 1;
  int N = 2;
  double delta = 0.25;
  int tau_grid_size = 4096;
  // Skips the delta in (0, 1/2) and b > 0 checks.
  bool diagnostic = false;

  void validate() const;
  // r^{2qk} / 15
  double threshold() const;
  // r^{-qk}
  double ell() const;
};

// Geometric grid of tau_grid_size points spanning [1, r^{-qk}].
std::vector<double> tau_grid(const ExceptionalParams& params);

struct MembershipResult {
  double beta = 0.0;
  double max_fraction = 0.0;
  double witness_tau = 1.0;
  bool is_member = false;
};

// beta reduced modulo 2 pi and rounded to a multiple of 2^-40. The counted
// quantity multiplies cos(beta + ...) by up to r^{-qkN}, so the last bits of a
// double beta decide the answer; fixing a representative keeps beta and
// beta + 2 pi equivalent.
double canonical_beta(double beta);

// max over the tau grid of (1/N) #{n in [N] :
//   || b tau r^{q - qk(N-n)} cos(beta + gamma - n q k theta) || <= r^{2qk}/15 }.
// The huge multipliers are handled in multiprecision so the distance to the
// nearest integer is exact to double precision.
// beta is replaced by canonical_beta(beta) before evaluation.
MembershipResult membership_fraction(const ExceptionalParams& params, double beta);

struct ScanResult {
  double member_fraction = 0.0;
  std::vector<MembershipResult> results;
  std::vector<double> members;
};

ScanResult grid_scan(const ExceptionalParams& params, std::span<const double> betas);

// `size` points j * pi / size in [0, pi).
std::vector<double> beta_grid(std::size_t size);

// gamma = ang(a_i - a_j) + theta and b = |a_i - a_j| for an equal-ratio,
// equal-angle planar IFS.
ExceptionalParams params_from_ifs(const Ifs& ifs, std::size_t i, std::size_t j, int q, int k,
                                  double delta, int N);

}  // namespace dimlab
