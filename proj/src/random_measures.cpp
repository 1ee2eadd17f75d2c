#include "dimlab/random_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "dimlab/parallel.hpp"
#include "dimlab/rng.hpp"
#include "dimlab/symbol_tree.hpp"

namespace dimlab {
namespace {

constexpr double kPi = std::numbers::pi;

void check_vector(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "weights sum to " + std::to_string(sum) + ", not 1");
  }
}

double equal_ratio(const Ifs& ifs) {
  const double r = ifs.map(0).ratio();
  for (const auto& f : ifs.maps()) {
    if (std::fabs(f.ratio() - r) > 1e-12 * r) {
      throw Error(ErrorCode::InvalidArgument, "maps must share one contraction ratio");
    }
  }
  return r;
}

}  // namespace

RandomWeightLaw RandomWeightLaw::subset_uniform(std::size_t arity, double retain) {
  if (arity < 2) throw Error(ErrorCode::InvalidArgument, "subset law needs arity >= 2");
  if (!(retain >= 0.0 && retain <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "retention probability must lie in [0, 1]");
  }
  RandomWeightLaw law;
  law.kind_ = Kind::SubsetUniform;
  law.arity_ = arity;
  law.retain_ = retain;
  return law;
}

RandomWeightLaw RandomWeightLaw::discrete(std::vector<std::vector<double>> vectors,
                                          std::vector<double> probabilities) {
  if (vectors.empty() || vectors.size() != probabilities.size()) {
    throw Error(ErrorCode::InvalidArgument, "need one probability per weight vector");
  }
  const std::size_t arity = vectors.front().size();
  if (arity < 1) throw Error(ErrorCode::InvalidArgument, "empty weight vector");
  for (const auto& v : vectors) {
    if (v.size() != arity) throw Error(ErrorCode::InvalidArgument, "weight vectors differ in size");
    check_vector(v);
  }
  check_vector(probabilities);
  RandomWeightLaw law;
  law.kind_ = Kind::Discrete;
  law.arity_ = arity;
  law.vectors_ = std::move(vectors);
  law.probabilities_ = std::move(probabilities);
  return law;
}

RandomWeightLaw RandomWeightLaw::point_mass(std::vector<double> vector) {
  return discrete({std::move(vector)}, {1.0});
}

RandomWeightLaw RandomWeightLaw::uniform(std::size_t arity) {
  if (arity < 1) throw Error(ErrorCode::InvalidArgument, "arity must be >= 1");
  return point_mass(std::vector<double>(arity, 1.0 / static_cast<double>(arity)));
}

double RandomWeightLaw::symbol_retention() const {
  if (kind_ != Kind::SubsetUniform) {
    throw Error(ErrorCode::UnsupportedLaw, "symbol retention is defined for subset laws");
  }
  const double forced = 2.0 / static_cast<double>(arity_);
  return forced + (1.0 - forced) * retain_;
}

std::vector<std::uint32_t> RandomWeightLaw::draw_subset(std::uint64_t seed,
                                                        std::uint64_t level) const {
  if (kind_ != Kind::SubsetUniform) {
    throw Error(ErrorCode::UnsupportedLaw, "draw_subset needs a subset law");
  }
  CounterStream stream(seed, level, StreamTag::MeasureLevel);
  const auto i = static_cast<std::uint32_t>(stream.next_below(arity_));
  auto j = static_cast<std::uint32_t>(stream.next_below(arity_ - 1));
  if (j >= i) ++j;
  const std::uint64_t threshold = bernoulli_threshold(retain_);
  std::vector<std::uint32_t> kept;
  for (std::uint32_t s = 0; s < arity_; ++s) {
    if (s == i || s == j) {
      kept.push_back(s);
    } else if (stream.next_u32() < threshold) {
      kept.push_back(s);
    }
  }
  return kept;
}

std::vector<double> RandomWeightLaw::draw(std::uint64_t seed, std::uint64_t level) const {
  if (kind_ == Kind::SubsetUniform) {
    const auto kept = draw_subset(seed, level);
    std::vector<double> v(arity_, 0.0);
    for (auto s : kept) v[s] = 1.0 / static_cast<double>(kept.size());
    return v;
  }
  if (vectors_.size() == 1) return vectors_.front();
  CounterStream stream(seed, level, StreamTag::MeasureLevel);
  double u = stream.next_double();
  for (std::size_t k = 0; k < vectors_.size(); ++k) {
    u -= probabilities_[k];
    if (u < 0.0) return vectors_[k];
  }
  return vectors_.back();
}

MeasureSample sample_measure(const RandomWeightLaw& law, int depth, std::uint64_t seed) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  MeasureSample s{law, seed, std::vector<std::vector<double>>(static_cast<std::size_t>(depth))};
  for (int l = 0; l < depth; ++l) {
    s.levels[static_cast<std::size_t>(l)] = law.draw(seed, static_cast<std::uint64_t>(l) + 1);
  }
  return s;
}

double cylinder_mass(const MeasureSample& sample, const Word& word) {
  if (static_cast<int>(word.size()) > sample.depth()) {
    throw Error(ErrorCode::DepthMismatch, "word of length " + std::to_string(word.size()) +
                                              " exceeds sample depth " +
                                              std::to_string(sample.depth()));
  }
  double mass = 1.0;
  for (std::size_t l = 0; l < word.size(); ++l) {
    if (word[l] >= sample.law.arity()) {
      throw Error(ErrorCode::InvalidWord, "symbol " + std::to_string(word[l]) + " at position " +
                                              std::to_string(l) + " exceeds the law arity");
    }
    mass *= sample.levels[l][word[l]];
  }
  return mass;
}

double sq_retain_probability(std::size_t m, double r, double epsilon, int q) {
  if (m < 2 || !(r > 0.0 && r < 1.0) || q < 1) {
    throw Error(ErrorCode::ParameterError, "need m >= 2, 0 < r < 1 and q >= 1");
  }
  const double s = -std::log(static_cast<double>(m)) / std::log(r);
  if (!(s > 1.0)) {
    throw Error(ErrorCode::ParameterError,
                "s > 1 violated: similarity dimension is " + std::to_string(s));
  }
  if (!(epsilon > 0.0 && epsilon < s - 1.0)) {
    throw Error(ErrorCode::ParameterError, "0 < epsilon < s - 1 violated: epsilon = " +
                                               std::to_string(epsilon) + ", s - 1 = " +
                                               std::to_string(s - 1.0));
  }
  if (!(std::pow(r, -q) > 2.0)) {
    throw Error(ErrorCode::ParameterError, "r^-q > 2 violated for q = " + std::to_string(q));
  }
  const double M = std::pow(static_cast<double>(m), q);
  const double target = std::pow(r, q * (s - 1.0 - epsilon));
  const double p = (target - 2.0 / M) * M / (M - 2.0);
  if (!(p > 0.0)) {
    throw Error(ErrorCode::ParameterError,
                "p_q > 0 violated: r^{q(s-1-eps)} <= 2/m^q for q = " + std::to_string(q));
  }
  if (!(p < 1.0)) throw Error(ErrorCode::ParameterError, "p_q < 1 violated");
  return p;
}

RandomWeightLaw sq_law(const Ifs& ifs, double epsilon, int q) {
  const double r = equal_ratio(ifs);
  const double p = sq_retain_probability(ifs.size(), r, epsilon, q);
  const double M = std::pow(static_cast<double>(ifs.size()), q);
  if (M > static_cast<double>(kDefaultWordBudget)) {
    throw BudgetExceeded(static_cast<std::uint64_t>(std::min(M, 1.8e19)), kDefaultWordBudget);
  }
  return RandomWeightLaw::subset_uniform(static_cast<std::size_t>(M), p);
}

double expected_log_subset_size(std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
  if (p == 0.0) return std::log(2.0);
  if (p == 1.0) return std::log(2.0 + static_cast<double>(n));
  const double nd = static_cast<double>(n);
  const double lp = std::log(p), lq = std::log1p(-p);
  double total = 0.0;
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pmf = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                           std::lgamma(nd - kd + 1.0) + kd * lp + (nd - kd) * lq;
    total += std::exp(log_pmf) * std::log(2.0 + kd);
  }
  return total;
}

int select_q(const Ifs& ifs, double epsilon, int max_q) {
  const double r = equal_ratio(ifs);
  const std::size_t m = ifs.size();
  for (int q = 1; q <= max_q; ++q) {
    double p = 0.0;
    try {
      p = sq_retain_probability(m, r, epsilon, q);
    } catch (const Error&) {
      continue;
    }
    const double M = std::pow(static_cast<double>(m), q);
    if (M > static_cast<double>(kDefaultWordBudget)) break;
    const double proxy =
        expected_log_subset_size(static_cast<std::uint64_t>(M) - 2, p) / (-q * std::log(r));
    if (proxy >= 1.0 + epsilon / 2.0) return q;
  }
  throw Error(ErrorCode::ParameterError,
              "no q <= " + std::to_string(max_q) + " gives p_q in (0,1) with proxy >= 1 + eps/2");
}

Estimate measure_dimension(const RandomWeightLaw& law, double r, int q, std::size_t trials,
                           std::uint64_t seed) {
  if (law.kind() != RandomWeightLaw::Kind::SubsetUniform) {
    throw Error(ErrorCode::UnsupportedLaw,
                "dimension formula is only available for uniform-on-subset laws");
  }
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 trials");
  if (!(r > 0.0 && r < 1.0) || q < 1) throw Error(ErrorCode::InvalidArgument, "bad r or q");
  std::vector<double> logs(trials);
  parallel_for(trials, [&](std::size_t t) {
    logs[t] = std::log(static_cast<double>(law.draw_subset(seed, t).size()));
  });
  double mean = 0.0;
  for (double x : logs) mean += x;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double x : logs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(trials - 1);
  const double scale = -q * std::log(r);
  return Estimate{mean / scale, std::sqrt(var / static_cast<double>(trials)) / scale};
}

FourierModel::FourierModel(const Ifs& ifs, int q, std::uint64_t budget)
    : arity_(ifs.size()), q_(q) {
  if (q < 1) throw Error(ErrorCode::InvalidArgument, "q must be >= 1");
  if (ifs.ambient_dim() > 2) throw Error(ErrorCode::InvalidArgument, "Fourier model is planar");
  const auto common = ifs.common_ratio_angle();
  if (!common) {
    throw Error(ErrorCode::InvalidArgument, "maps must share one ratio and one rotation angle");
  }
  block_ratio_ = std::pow(common->first, q);
  block_angle_ = std::fmod(q * common->second, 2.0 * kPi);
  const double count = std::pow(static_cast<double>(arity_), q);
  if (count > static_cast<double>(budget)) {
    throw BudgetExceeded(static_cast<std::uint64_t>(std::min(count, 1.8e19)), budget);
  }
  std::vector<std::uint32_t> w(static_cast<std::size_t>(q), 0);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(count); ++idx) {
    const Vec a = compose(ifs, Word(w)).translation();
    translations_.push_back(a);
    words_.push_back(w);
    max_translation_ = std::max(max_translation_, norm(a));
    for (std::size_t l = w.size(); l-- > 0;) {
      if (++w[l] < arity_) break;
      w[l] = 0;
    }
  }
}

std::complex<double> FourierModel::psi(const MeasureSample& sample, int n, const Vec& xi) const {
  if (sample.law.arity() != arity_) {
    throw Error(ErrorCode::InvalidArgument, "sample arity does not match the IFS");
  }
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "factor index must be >= 0");
  if (sample.depth() < (n + 1) * q_) {
    throw Error(ErrorCode::DepthMismatch, "factor " + std::to_string(n) + " needs sample depth " +
                                              std::to_string((n + 1) * q_));
  }
  // <T^n a, xi> = <a, (T^n)^T xi>, with (T^n)^T = r^{qn} R(-nq theta).
  const double scale = std::pow(block_ratio_, n);
  const double ang = -std::fmod(n * block_angle_, 2.0 * kPi);
  const double c = std::cos(ang), s = std::sin(ang);
  const double e0 = scale * (c * xi[0] - s * xi[1]);
  const double e1 = scale * (s * xi[0] + c * xi[1]);
  // weights sum to one, so the zero frequency is exactly 1
  if (e0 == 0.0 && e1 == 0.0) return 1.0;
  const std::size_t base = static_cast<std::size_t>(n) * static_cast<std::size_t>(q_);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < translations_.size(); ++i) {
    double w = 1.0;
    for (int l = 0; l < q_ && w != 0.0; ++l) {
      w *= sample.levels[base + static_cast<std::size_t>(l)][words_[i][static_cast<std::size_t>(l)]];
    }
    if (w == 0.0) continue;
    const double phase = kPi * (translations_[i][0] * e0 + translations_[i][1] * e1);
    sum += w * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum;
}

double FourierModel::tail_bound(const Vec& xi, int truncation) const {
  return kPi * norm(xi) * max_translation_ * std::pow(block_ratio_, truncation) /
         (1.0 - block_ratio_);
}

std::complex<double> fourier_psi(const MeasureSample& sample, const Ifs& ifs, int q, int n,
                                 const Vec& xi) {
  return FourierModel(ifs, q).psi(sample, n, xi);
}

FourierPoint fourier_mu(const MeasureSample& sample, const FourierModel& model, const Vec& xi,
                        int truncation) {
  if (truncation < 0) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 0");
  if (truncation * model.q() > sample.depth()) {
    throw Error(ErrorCode::DepthMismatch, "truncation " + std::to_string(truncation) +
                                              " needs sample depth " +
                                              std::to_string(truncation * model.q()));
  }
  std::complex<double> value = 1.0;
  for (int n = 0; n < truncation; ++n) value *= model.psi(sample, n, xi);
  return FourierPoint{xi, truncation, value, model.tail_bound(xi, truncation)};
}

FourierPoint fourier_mu(const MeasureSample& sample, const Ifs& ifs, int q, const Vec& xi,
                        int truncation) {
  return fourier_mu(sample, FourierModel(ifs, q), xi, truncation);
}

ConvolutionSplit convolution_split(int truncation, int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  ConvolutionSplit split;
  for (int n = 0; n < truncation; ++n) {
    ((n + 1) % k == 0 ? split.eta_factors : split.mu_factors).push_back(n);
  }
  return split;
}

std::complex<double> partial_product(const MeasureSample& sample, const FourierModel& model,
                                     std::span<const int> factors, const Vec& xi) {
  std::complex<double> value = 1.0;
  for (int n : factors) value *= model.psi(sample, n, xi);
  return value;
}

DecayEstimate fourier_decay(const MeasureSample& sample, const FourierModel& model, int k,
                            const Direction& dir, int n_lo, int n_hi, int taus) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be >= 2");
  if (n_lo < 0 || n_hi < n_lo || taus < 1) {
    throw Error(ErrorCode::InvalidArgument, "need 0 <= n_lo <= n_hi and taus >= 1");
  }
  const double ell = std::pow(model.block_ratio(), -k);
  std::vector<double> ts;
  for (int N = n_lo; N <= n_hi; ++N) {
    for (int j = 0; j < taus; ++j) {
      ts.push_back(std::pow(ell, N + static_cast<double>(j) / taus));
    }
  }
  // Truncate where the phase tail is negligible, capped by the sample depth.
  const int max_factors = sample.depth() / model.q();
  DecayEstimate est;
  est.t = ts;
  est.modulus.resize(ts.size());
  est.value.resize(ts.size());
  est.tail_bound.resize(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    const Vec xi = ts[i] * dir.unit();
    int truncation = 0;
    while (truncation < max_factors && model.tail_bound(xi, truncation) > 1e-12) ++truncation;
    const auto split = convolution_split(truncation, k);
    est.value[i] = partial_product(sample, model, split.eta_factors, xi);
    est.modulus[i] = std::abs(est.value[i]);
    est.tail_bound[i] = model.tail_bound(xi, truncation);
  });
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (est.modulus[i] < 1e-300) {
      est.exact_zero = true;
      continue;
    }
    x.push_back(std::log(ts[i]));
    y.push_back(-std::log(est.modulus[i]));
  }
  if (x.size() >= 2) est.fit = least_squares(x, y);
  return est;
}

LineFit support_projection_slope(const MeasureSample& sample, const Ifs& ifs,
                                 const Direction& dir, int depth, std::uint64_t budget) {
  if (sample.law.arity() != ifs.size()) {
    throw Error(ErrorCode::InvalidArgument, "sample arity does not match the IFS");
  }
  if (depth < 2 || depth > sample.depth()) {
    throw Error(ErrorCode::DepthMismatch, "depth must lie in [2, sample depth]");
  }
  const double r = equal_ratio(ifs);
  // Tree of positive-mass words.
  std::vector<std::vector<TreeNode>> levels(static_cast<std::size_t>(depth) + 1);
  levels[0].push_back(TreeNode{});
  std::uint64_t total = 1;
  for (int l = 0; l < depth; ++l) {
    std::vector<std::uint32_t> support;
    const auto& x = sample.levels[static_cast<std::size_t>(l)];
    for (std::uint32_t s = 0; s < x.size(); ++s) {
      if (x[s] > 0.0) support.push_back(s);
    }
    auto& cur = levels[static_cast<std::size_t>(l)];
    auto& next = levels[static_cast<std::size_t>(l) + 1];
    total += cur.size() * support.size();
    if (total > budget) throw BudgetExceeded(total, budget);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      cur[i].child_begin = static_cast<std::uint32_t>(next.size());
      for (auto s : support) next.push_back(TreeNode{static_cast<std::uint32_t>(i), 0, 0, s});
      cur[i].child_end = static_cast<std::uint32_t>(next.size());
    }
  }
  const SymbolTree tree(ifs.size(), std::move(levels));

  std::vector<std::unordered_set<long long>> boxes(static_cast<std::size_t>(depth) + 1);
  walk_cylinders(ifs, &tree, [&](const CylinderView& v) {
    if (v.depth > 0) {
      const double delta = std::pow(r, v.depth);
      boxes[static_cast<std::size_t>(v.depth)].insert(
          static_cast<long long>(std::floor(dir.project(v.center) / delta)));
    }
    return true;
  });
  std::vector<double> lx, ly;
  for (int l = 1; l <= depth; ++l) {
    lx.push_back(-l * std::log(r));
    ly.push_back(std::log(static_cast<double>(boxes[static_cast<std::size_t>(l)].size())));
  }
  return least_squares(lx, ly);
}

}  // namespace dimlab
