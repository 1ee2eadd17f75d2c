#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dimlab/ifs.hpp"
#include "dimlab/regression.hpp"
#include "dimlab/sections.hpp"

namespace dimlab {

// Law of the random probability vector X attached to every level.
class RandomWeightLaw {
 public:
  enum class Kind { SubsetUniform, Discrete };

  // Two distinct symbols chosen uniformly are always kept; each other symbol
  // is kept with probability `retain`; weights are uniform on the kept set.
  static RandomWeightLaw subset_uniform(std::size_t arity, double retain);
  // Finitely supported law over probability vectors.
  static RandomWeightLaw discrete(std::vector<std::vector<double>> vectors,
                                  std::vector<double> probabilities);
  static RandomWeightLaw point_mass(std::vector<double> vector);
  static RandomWeightLaw uniform(std::size_t arity);

  Kind kind() const { return kind_; }
  std::size_t arity() const { return arity_; }
  double retain() const { return retain_; }
  // P(i in S) for the subset kind: 2/M + (1 - 2/M) * retain.
  double symbol_retention() const;

  const std::vector<std::vector<double>>& vectors() const { return vectors_; }
  const std::vector<double>& probabilities() const { return probabilities_; }

  std::vector<double> draw(std::uint64_t seed, std::uint64_t level) const;
  // Subset kind only: the kept symbols of a draw.
  std::vector<std::uint32_t> draw_subset(std::uint64_t seed, std::uint64_t level) const;

 private:
  RandomWeightLaw() = default;

  Kind kind_ = Kind::Discrete;
  std::size_t arity_ = 0;
  double retain_ = 0.0;
  std::vector<std::vector<double>> vectors_;
  std::vector<double> probabilities_;
};

struct MeasureSample {
  RandomWeightLaw law;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> levels;  // X^(1), ..., X^(depth)

  int depth() const { return static_cast<int>(levels.size()); }
};

MeasureSample sample_measure(const RandomWeightLaw& law, int depth, std::uint64_t seed);

// nu([w]) = X^(1)_{w1} ... X^(k)_{wk}
double cylinder_mass(const MeasureSample& sample, const Word& word);

// Retention probability p_q for the subset law on the q-th power system of an
// equal-ratio IFS with similarity dimension s > 1.
double sq_retain_probability(std::size_t m, double r, double epsilon, int q);

// Subset law on Lambda^q whose per-symbol retention is r^{q(s-1-eps)}.
RandomWeightLaw sq_law(const Ifs& ifs, double epsilon, int q);

// E log(2 + Bin(n, p)) by exact summation.
double expected_log_subset_size(std::uint64_t n, double p);

// Smallest q >= 1 with p_q in (0,1), r^{-q} > 2 and exact dimension proxy
// E log #S_q / (-q log r) >= 1 + eps/2.
int select_q(const Ifs& ifs, double epsilon, int max_q = 12);

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Monte Carlo E(log #S_q) / (-q log r); subset law only.
Estimate measure_dimension(const RandomWeightLaw& law, double r, int q, std::size_t trials,
                           std::uint64_t seed);

// Fourier factors of a random self-similar measure on an IFS whose maps
// share ratio r and angle theta, grouped in blocks of q symbols.
class FourierModel {
 public:
  FourierModel(const Ifs& ifs, int q, std::uint64_t budget = kDefaultWordBudget);

  int q() const { return q_; }
  double block_ratio() const { return block_ratio_; }
  double block_angle() const { return block_angle_; }
  double max_translation() const { return max_translation_; }
  const std::vector<Vec>& block_translations() const { return translations_; }

  // Psi_n^q(xi); needs sample depth >= (n + 1) q.
  std::complex<double> psi(const MeasureSample& sample, int n, const Vec& xi) const;
  // sum_{n >= N} pi r^{qn} |xi| max |a_i|
  double tail_bound(const Vec& xi, int truncation) const;

 private:
  std::size_t arity_;
  int q_;
  double block_ratio_;
  double block_angle_;
  double max_translation_ = 0.0;
  std::vector<Vec> translations_;                 // a_i for i in Lambda^q
  std::vector<std::vector<std::uint32_t>> words_;  // symbols of each block word
};

std::complex<double> fourier_psi(const MeasureSample& sample, const Ifs& ifs, int q, int n,
                                 const Vec& xi);

struct FourierPoint {
  Vec xi;
  int truncation = 0;
  std::complex<double> value;
  double tail_bound = 0.0;
};

FourierPoint fourier_mu(const MeasureSample& sample, const FourierModel& model, const Vec& xi,
                        int truncation);
FourierPoint fourier_mu(const MeasureSample& sample, const Ifs& ifs, int q, const Vec& xi,
                        int truncation);

struct ConvolutionSplit {
  std::vector<int> mu_factors;   // k does not divide n + 1
  std::vector<int> eta_factors;  // k divides n + 1
};

ConvolutionSplit convolution_split(int truncation, int k);

std::complex<double> partial_product(const MeasureSample& sample, const FourierModel& model,
                                     std::span<const int> factors, const Vec& xi);

struct DecayEstimate {
  std::vector<double> t;
  std::vector<double> modulus;  // |eta_hat(t w_beta)|
  std::vector<std::complex<double>> value;
  std::vector<double> tail_bound;
  LineFit fit;  // -log modulus against log t
  bool exact_zero = false;
};

// |eta_hat_{q,k}(t w_beta)| at t = tau * r^{-qkN} for N in [n_lo, n_hi] and
// `taus` geometric tau values in [1, r^{-qk}).
DecayEstimate fourier_decay(const MeasureSample& sample, const FourierModel& model, int k,
                            const Direction& dir, int n_lo, int n_hi, int taus = 4);

// Box-counting slope of the projection of the sample's support onto the
// direction, over levels 1..depth.
LineFit support_projection_slope(const MeasureSample& sample, const Ifs& ifs,
                                 const Direction& dir, int depth,
                                 std::uint64_t budget = kDefaultWordBudget);

}  // namespace dimlab
