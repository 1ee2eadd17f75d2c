#include "dimlab/percolation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "dimlab/parallel.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {
namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "probability must lie in [0, 1]");
  }
}

void check_arity(std::size_t arity) {
  if (arity < 1 || arity > 64) throw Error(ErrorCode::InvalidArgument, "arity must be in [1, 64]");
}

}  // namespace

const char* to_string(OffspringLaw::Kind kind) {
  switch (kind) {
    case OffspringLaw::Kind::GeneralTable: return "table";
    case OffspringLaw::Kind::Standard: return "standard";
    case OffspringLaw::Kind::BernoulliUniform: return "uniform";
    case OffspringLaw::Kind::Deterministic: return "deterministic";
  }
  return "unknown";
}

OffspringLaw OffspringLaw::deterministic(std::size_t arity) {
  check_arity(arity);
  OffspringLaw law;
  law.kind_ = Kind::Deterministic;
  law.arity_ = arity;
  law.parameter_ = 1.0;
  law.marginals_.assign(arity, 1.0);
  law.thresholds_.assign(arity, bernoulli_threshold(1.0));
  return law;
}

OffspringLaw OffspringLaw::bernoulli_uniform(std::size_t arity, double p) {
  check_arity(arity);
  check_probability(p);
  OffspringLaw law;
  law.kind_ = Kind::BernoulliUniform;
  law.arity_ = arity;
  law.parameter_ = p;
  law.marginals_.assign(arity, p);
  law.thresholds_.assign(arity, bernoulli_threshold(p));
  return law;
}

OffspringLaw OffspringLaw::standard(const Ifs& ifs, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  }
  check_arity(ifs.size());
  OffspringLaw law;
  law.kind_ = Kind::Standard;
  law.arity_ = ifs.size();
  law.parameter_ = alpha;
  for (const auto& f : ifs.maps()) {
    const double p = std::pow(f.ratio(), alpha);
    law.marginals_.push_back(p);
    law.thresholds_.push_back(bernoulli_threshold(p));
  }
  return law;
}

OffspringLaw OffspringLaw::table(std::size_t arity, std::vector<TableEntry> entries) {
  check_arity(arity);
  if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty offspring table");
  OffspringLaw law;
  law.kind_ = Kind::GeneralTable;
  law.arity_ = arity;
  law.marginals_.assign(arity, 0.0);
  double total = 0.0;
  for (const auto& e : entries) {
    check_probability(e.probability);
    if (arity < 64 && (e.mask >> arity) != 0) {
      throw Error(ErrorCode::InvalidArgument, "table mask has bits beyond the arity");
    }
    total += e.probability;
    law.cumulative_.push_back(total);
    for (std::size_t i = 0; i < arity; ++i) {
      if ((e.mask >> i) & 1U) law.marginals_[i] += e.probability;
    }
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument,
                "table probabilities sum to " + std::to_string(total) + ", not 1");
  }
  law.entries_ = std::move(entries);
  return law;
}

double OffspringLaw::mean_offspring() const {
  double m = 0.0;
  for (double p : marginals_) m += p;
  return m;
}

double OffspringLaw::pgf(double z) const {
  if (kind_ == Kind::GeneralTable) {
    double g = 0.0;
    for (const auto& e : entries_) g += e.probability * std::pow(z, std::popcount(e.mask));
    return g;
  }
  double g = 1.0;
  for (double p : marginals_) g *= 1.0 - p + p * z;
  return g;
}

std::uint64_t OffspringLaw::draw_mask(std::uint64_t seed, std::uint64_t word_hash) const {
  if (kind_ == Kind::Deterministic) {
    return arity_ == 64 ? ~0ULL : (1ULL << arity_) - 1;
  }
  CounterStream stream(seed, word_hash, StreamTag::Offspring);
  if (kind_ == Kind::GeneralTable) {
    const double u = stream.next_double();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return entries_[static_cast<std::size_t>(it - cumulative_.begin())].mask;
  }
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < arity_; ++i) {
    if (stream.next_u32() < thresholds_[i]) mask |= 1ULL << i;
  }
  return mask;
}

PercolationSample sample_tree(const OffspringLaw& law, std::size_t arity, int depth,
                              std::uint64_t seed, std::uint64_t budget) {
  if (arity != law.arity()) {
    throw Error(ErrorCode::InvalidArgument, "arity " + std::to_string(arity) +
                                                " does not match law arity " +
                                                std::to_string(law.arity()));
  }
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  const double mean = law.mean_offspring();
  double expected = 0.0, level = 1.0;
  for (int k = 0; k <= depth; ++k) {
    expected += level;
    level *= mean;
  }
  if (expected > static_cast<double>(budget)) {
    throw BudgetExceeded(static_cast<std::uint64_t>(std::min(std::ceil(expected), 1.8e19)),
                         budget);
  }

  std::vector<std::vector<TreeNode>> levels(static_cast<std::size_t>(depth) + 1);
  levels[0].push_back(TreeNode{});
  std::vector<std::uint64_t> hashes{kRootWordHash};
  std::vector<std::uint64_t> masks;
  for (int k = 0; k < depth; ++k) {
    auto& cur = levels[static_cast<std::size_t>(k)];
    auto& next = levels[static_cast<std::size_t>(k) + 1];
    masks.assign(cur.size(), 0);
    constexpr std::size_t kChunk = 1024;
    parallel_for((cur.size() + kChunk - 1) / kChunk, [&](std::size_t c) {
      const std::size_t end = std::min(cur.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) masks[i] = law.draw_mask(seed, hashes[i]);
    });
    std::size_t total = 0;
    for (auto m : masks) total += static_cast<std::size_t>(std::popcount(m));
    if (total >= std::numeric_limits<std::uint32_t>::max()) throw BudgetExceeded(total, budget);
    next.reserve(total);
    std::vector<std::uint64_t> next_hashes;
    next_hashes.reserve(total);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      cur[i].child_begin = static_cast<std::uint32_t>(next.size());
      for (std::uint64_t m = masks[i]; m != 0; m &= m - 1) {
        const auto s = static_cast<std::uint32_t>(std::countr_zero(m));
        next.push_back(TreeNode{static_cast<std::uint32_t>(i), 0, 0, s});
        next_hashes.push_back(child_word_hash(hashes[i], s));
      }
      cur[i].child_end = static_cast<std::uint32_t>(next.size());
    }
    hashes = std::move(next_hashes);
  }
  return PercolationSample{law, seed, SymbolTree(arity, std::move(levels))};
}

bool word_survives(const OffspringLaw& law, const Word& word, std::uint64_t seed) {
  std::uint64_t h = kRootWordHash;
  for (std::size_t j = 0; j < word.size(); ++j) {
    if (word[j] >= law.arity()) {
      throw Error(ErrorCode::InvalidWord, "symbol " + std::to_string(word[j]) + " at position " +
                                              std::to_string(j) + " exceeds the law arity");
    }
    if (((law.draw_mask(seed, h) >> word[j]) & 1U) == 0) return false;
    h = child_word_hash(h, word[j]);
  }
  return true;
}

ConditionedSample sample_surviving(const OffspringLaw& law, std::size_t arity, int depth,
                                   std::uint64_t seed, std::size_t max_attempts,
                                   std::uint64_t budget) {
  for (std::size_t j = 0; j < max_attempts; ++j) {
    PercolationSample s = sample_tree(law, arity, depth, derive_seed(seed, j), budget);
    if (s.survived()) return ConditionedSample{std::move(s), j};
  }
  throw Error(ErrorCode::InsufficientData, "no sample survived to depth " +
                                               std::to_string(depth) + " in " +
                                               std::to_string(max_attempts) + " attempts");
}

BranchingStats survival_probability(const OffspringLaw& law) {
  BranchingStats st;
  st.mean_offspring = law.mean_offspring();
  if (st.mean_offspring <= 1.0 + 1e-10) {
    st.extinction_prob = 1.0;
    st.survival_prob = 0.0;
    return st;
  }
  double q = 0.0;
  for (int it = 0; it < 1'000'000; ++it) {
    const double next = law.pgf(q);
    const double delta = std::fabs(next - q);
    q = next;
    if (it >= 200 && delta < 1e-15) break;
  }
  st.extinction_prob = std::clamp(q, 0.0, 1.0);
  st.survival_prob = 1.0 - st.extinction_prob;
  return st;
}

double percolation_dimension(const OffspringLaw& law, const Ifs& ifs) {
  if (law.arity() != ifs.size()) {
    throw Error(ErrorCode::InvalidArgument, "law arity does not match the number of maps");
  }
  const double mean = law.mean_offspring();
  if (mean <= 1.0) {
    throw Error(ErrorCode::UndefinedDimension,
                "mean offspring " + std::to_string(mean) + " <= 1: the limit set is a.s. empty");
  }
  const auto& p = law.marginals();
  auto excess = [&](double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] * std::pow(ifs.map(i).ratio(), s);
    return sum - 1.0;
  };
  double lo = 0.0, hi = ifs.ambient_dim() + 1.0;
  while (excess(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double MandelbrotConfig::dimension() const {
  return d + std::log(p) / std::log(static_cast<double>(M));
}

MandelbrotConfig mandelbrot_config(int M, int d, double p) {
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "M must be >= 2");
  if (d < 1 || d > kMaxDim) throw Error(ErrorCode::InvalidArgument, "d must be in [1, 3]");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  std::size_t count = 1;
  for (int t = 0; t < d; ++t) count *= static_cast<std::size_t>(M);
  // Symbol s encodes the cell offsets j_1 + M j_2 + M^2 j_3.
  std::vector<Similarity> maps;
  for (std::size_t s = 0; s < count; ++s) {
    Vec a;
    std::size_t rest = s;
    for (int t = 0; t < d; ++t) {
      a[t] = static_cast<double>(rest % static_cast<std::size_t>(M)) / M;
      rest /= static_cast<std::size_t>(M);
    }
    maps.emplace_back(1.0 / M, 0.0, a);
  }
  Ifs ifs(std::move(maps), d, Separation::OscAssumed,
          "mandelbrot-M" + std::to_string(M) + "-d" + std::to_string(d));
  ifs.projection_hull_condition = true;
  ifs.dense_rotations = false;
  return MandelbrotConfig{std::move(ifs), OffspringLaw::bernoulli_uniform(count, p), M, d, p};
}

std::vector<std::uint64_t> tree_stopping_counts(const Ifs& ifs, const SymbolTree& tree,
                                                std::span<const double> scales) {
  if (tree.arity() != ifs.size()) {
    throw Error(ErrorCode::InvalidArgument, "tree arity does not match the number of maps");
  }
  std::vector<std::uint64_t> counts(scales.size(), 0);
  if (scales.empty()) return counts;
  std::vector<double> limits;
  for (double rho : scales) {
    if (!(rho > 0.0) || !(rho < ifs.diameter())) {
      throw Error(ErrorCode::OutOfRange, "scale " + std::to_string(rho) + " outside (0, |K|)");
    }
    limits.push_back(ifs.c1() * rho);
  }
  const double finest = *std::min_element(limits.begin(), limits.end());
  const double d0 = ifs.diameter();
  walk_cylinders(ifs, &tree, [&](const CylinderView& v) {
    const double diam = d0 * v.ratio;
    const double parent =
        v.depth == 0 ? std::numeric_limits<double>::infinity()
                     : diam / ifs.map(v.symbol).ratio();
    for (std::size_t j = 0; j < limits.size(); ++j) {
      if (diam < limits[j] && parent >= limits[j]) ++counts[j];
    }
    if (diam < finest) return false;
    if (v.bottom) {
      throw Error(ErrorCode::DepthMismatch, "tree depth " + std::to_string(tree.depth()) +
                                                " is too shallow for the finest scale");
    }
    return true;
  });
  return counts;
}

DimEstimate sample_box_dimension(const Ifs& ifs, const SymbolTree& tree,
                                 std::span<const double> scales) {
  const auto counts = tree_stopping_counts(ifs, tree, scales);
  std::vector<double> c(counts.begin(), counts.end());
  return fit_log_log_nonzero(scales, c);
}

double level_scale(const Ifs& ifs, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "level must be >= 0");
  double r = 0.0;
  for (const auto& f : ifs.maps()) r = std::max(r, f.ratio());
  return ifs.diameter() * std::pow(r, k) / std::sqrt(ifs.c1());
}

std::vector<double> level_scales(const Ifs& ifs, int from, int to) {
  std::vector<double> out;
  for (int k = from; k <= to; ++k) out.push_back(level_scale(ifs, k));
  return out;
}

}  // namespace dimlab
