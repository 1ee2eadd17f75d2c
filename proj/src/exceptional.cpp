#include "dimlab/exceptional.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dimlab/parallel.hpp"

namespace dimlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Fixed-point bits kept below the binary point of each coefficient.
constexpr int kFracBits = 128;
constexpr int kLimbs = 3;

// |c| * 2^kFracBits truncated to an integer, modulo 2^(64 * kLimbs).
using Fixed = std::array<std::uint64_t, kLimbs>;

// Produces |b r^{q - qk(N - n)} cos(beta + gamma - n qk theta)| for n = 1..N as
// fixed point. The angle advances by a high-precision rotation and the power
// by a multiplication, so only one cos/sin pair is evaluated per beta.
class CoefficientWalker {
 public:
  CoefficientWalker(const ExceptionalParams& p, double beta) {
    const long qk = static_cast<long>(p.q) * p.k;
    const long e1 = p.q - qk * (p.N - 1);
    const double log2_mag = std::log2(std::max(p.b, 1e-300)) + e1 * std::log2(p.r);
    const auto prec = static_cast<mpfr_prec_t>(std::max(0.0, std::ceil(log2_mag)) + kFracBits +
                                               96 + std::ceil(std::log2(p.N + 1.0)));
    mpfr_inits2(prec, c_, s_, dc_, ds_, pw_, step_, t1_, t2_, nullptr);
    mpz_init(z_);
    // angle at n = 0 and its decrement qk theta
    mpfr_set_d(t1_, beta, MPFR_RNDN);
    mpfr_add_d(t1_, t1_, p.gamma, MPFR_RNDN);
    mpfr_sin_cos(s_, c_, t1_, MPFR_RNDN);
    mpfr_set_d(t2_, p.theta, MPFR_RNDN);
    mpfr_mul_si(t2_, t2_, qk, MPFR_RNDN);
    mpfr_sin_cos(ds_, dc_, t2_, MPFR_RNDN);
    // b r^{e_1} / r^{qk}, advanced by r^{qk} before each use
    mpfr_set_d(pw_, p.r, MPFR_RNDN);
    mpfr_pow_si(pw_, pw_, e1 - qk, MPFR_RNDN);
    mpfr_mul_d(pw_, pw_, p.b, MPFR_RNDN);
    mpfr_set_d(step_, p.r, MPFR_RNDN);
    mpfr_pow_si(step_, step_, qk, MPFR_RNDN);
  }
  ~CoefficientWalker() {
    mpfr_clears(c_, s_, dc_, ds_, pw_, step_, t1_, t2_, nullptr);
    mpz_clear(z_);
  }
  CoefficientWalker(const CoefficientWalker&) = delete;
  CoefficientWalker& operator=(const CoefficientWalker&) = delete;

  Fixed next() {
    // (c, s) <- rotation of the angle by -qk theta
    mpfr_mul(t1_, c_, dc_, MPFR_RNDN);
    mpfr_fma(t1_, s_, ds_, t1_, MPFR_RNDN);
    mpfr_mul(t2_, s_, dc_, MPFR_RNDN);
    mpfr_fms(t2_, c_, ds_, t2_, MPFR_RNDN);
    mpfr_neg(t2_, t2_, MPFR_RNDN);
    mpfr_swap(c_, t1_);
    mpfr_swap(s_, t2_);
    mpfr_mul(pw_, pw_, step_, MPFR_RNDN);

    mpfr_mul(t1_, pw_, c_, MPFR_RNDN);
    mpfr_abs(t1_, t1_, MPFR_RNDN);
    mpfr_mul_2si(t1_, t1_, kFracBits, MPFR_RNDN);
    mpfr_get_z(z_, t1_, MPFR_RNDZ);
    mpz_fdiv_r_2exp(z_, z_, 64 * kLimbs);
    Fixed out{};
    for (int i = 0; i < kLimbs && i < static_cast<int>(mpz_size(z_)); ++i) {
      out[static_cast<std::size_t>(i)] = mpz_getlimbn(z_, i);
    }
    return out;
  }

 private:
  mpfr_t c_, s_, dc_, ds_, pw_, step_, t1_, t2_;
  mpz_t z_;
};

// tau = mantissa * 2^(-shift + kFracBits), so frac(tau * c) is
// (mantissa * Z mod 2^shift) / 2^shift.
struct TauBits {
  std::uint64_t mantissa;
  int shift;
};

TauBits split_tau(double tau) {
  int ex = 0;
  const double f = std::frexp(tau, &ex);
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(f, 53));
  return TauBits{mantissa, kFracBits - (ex - 53)};
}

using u128 = unsigned __int128;

// Bits [lo, lo + 128) of z, with bits at or above `top` cleared. lo may be
// negative, in which case the low end is zero-filled.
u128 window(const Fixed& z, int lo, int top) {
  auto bit_block = [&](int at) -> std::uint64_t {
    // 64 bits starting at position `at`
    std::uint64_t v = 0;
    for (int i = 0; i < kLimbs; ++i) {
      const int base = 64 * i;
      const int off = base - at;
      const std::uint64_t limb = z[static_cast<std::size_t>(i)];
      if (off >= 64 || off <= -64) continue;
      v |= off >= 0 ? limb << off : limb >> (-off);
    }
    return v;
  };
  u128 w = (static_cast<u128>(bit_block(lo + 64)) << 64) | bit_block(lo);
  const int keep = top - lo;
  if (keep < 128) w &= (static_cast<u128>(1) << keep) - 1;
  return w;
}

// Top 64 bits of frac(m·z / 2^shift) from a 128-bit window of z ending at
// `shift`; the dropped low bits move the result by less than 2^-70.
std::uint64_t fraction_bits(u128 w, const TauBits& t) {
  return static_cast<std::uint64_t>((w * static_cast<u128>(t.mantissa)) >> 64);
}

}  // namespace

void ExceptionalParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(r > 0.0 && r < 1.0)) fail("r must lie in (0, 1)");
  if (!std::isfinite(gamma) || !std::isfinite(theta)) fail("gamma and theta must be finite");
  if (q < 1 || k < 1) fail("q and k must be >= 1");
  if (N < 1) fail("N must be >= 1");
  if (tau_grid_size < 1) fail("tau grid needs at least one point");
  if (!(std::log2(ell()) < 170.0)) fail("r^{-qk} too large for the fixed-point evaluation");
  if (!(b >= 0.0) || !std::isfinite(b)) fail("b must be finite and >= 0");
  if (!diagnostic) {
    if (N < 2) fail("N must be >= 2");
    if (!(b > 0.0)) fail("b must be > 0");
    if (!(delta > 0.0 && delta < 0.5)) fail("delta must lie in (0, 1/2)");
  }
}

double ExceptionalParams::threshold() const { return std::pow(r, 2 * q * k) / 15.0; }

double ExceptionalParams::ell() const { return std::pow(r, -q * k); }

std::vector<double> tau_grid(const ExceptionalParams& params) {
  const int g = params.tau_grid_size;
  if (g <= 1) return {1.0};
  const double log_ell = std::log(params.ell());
  std::vector<double> out(static_cast<std::size_t>(g));
  for (int j = 0; j < g; ++j) out[static_cast<std::size_t>(j)] = std::exp(log_ell * j / (g - 1));
  out.back() = params.ell();
  return out;
}

double canonical_beta(double beta) {
  if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be finite");
  double b = std::fmod(beta, kTwoPi);
  if (b < 0.0) b += kTwoPi;
  b = std::ldexp(std::round(std::ldexp(b, 40)), -40);
  return b >= kTwoPi ? 0.0 : b;
}

MembershipResult membership_fraction(const ExceptionalParams& params, double beta) {
  params.validate();
  const double cb = canonical_beta(beta);
  const auto taus = tau_grid(params);
  std::vector<TauBits> bits;
  for (double t : taus) bits.push_back(split_tau(t));
  // ||x|| <= thr on the 2^-64 lattice: frac <= T or frac > 2^64 - 1 - T
  const auto T = static_cast<std::uint64_t>(std::ldexp(params.threshold(), 64));

  std::vector<int> hits(taus.size(), 0);
  CoefficientWalker walker(params, cb);
  for (int n = 1; n <= params.N; ++n) {
    const Fixed z = walker.next();
    int shift = -1;
    u128 w = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j].shift != shift) {
        shift = bits[j].shift;
        w = window(z, shift - 128, shift);
      }
      const std::uint64_t f = fraction_bits(w, bits[j]);
      if (f <= T || f > ~T) ++hits[j];
    }
  }
  const auto best = std::max_element(hits.begin(), hits.end());
  MembershipResult res;
  res.beta = beta;
  res.max_fraction = static_cast<double>(*best) / params.N;
  res.witness_tau = taus[static_cast<std::size_t>(best - hits.begin())];
  res.is_member = res.max_fraction > 1.0 - params.delta;
  return res;
}

ScanResult grid_scan(const ExceptionalParams& params, std::span<const double> betas) {
  params.validate();
  ScanResult scan;
  scan.results.resize(betas.size());
  parallel_for(betas.size(),
               [&](std::size_t i) { scan.results[i] = membership_fraction(params, betas[i]); });
  for (const auto& r : scan.results) {
    if (r.is_member) scan.members.push_back(r.beta);
  }
  scan.member_fraction =
      betas.empty() ? 0.0
                    : static_cast<double>(scan.members.size()) / static_cast<double>(betas.size());
  return scan;
}

std::vector<double> beta_grid(std::size_t size) {
  std::vector<double> out(size);
  for (std::size_t j = 0; j < size; ++j) {
    out[j] = std::numbers::pi * static_cast<double>(j) / static_cast<double>(size);
  }
  return out;
}

ExceptionalParams params_from_ifs(const Ifs& ifs, std::size_t i, std::size_t j, int q, int k,
                                  double delta, int N) {
  if (ifs.ambient_dim() != 2) throw Error(ErrorCode::InvalidArgument, "planar IFS required");
  if (i >= ifs.size() || j >= ifs.size() || i == j) {
    throw Error(ErrorCode::InvalidArgument, "need two distinct map indices");
  }
  const auto common = ifs.common_ratio_angle();
  if (!common) {
    throw Error(ErrorCode::InvalidArgument, "maps must share one ratio and one rotation angle");
  }
  const Vec diff = ifs.map(i).translation() - ifs.map(j).translation();
  ExceptionalParams p;
  p.r = common->first;
  p.theta = common->second;
  p.b = norm(diff);
  p.gamma = std::atan2(diff[1], diff[0]) + p.theta;
  p.q = q;
  p.k = k;
  p.delta = delta;
  p.N = N;
  return p;
}

}  // namespace dimlab
