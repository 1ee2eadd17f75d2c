#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dimlab/ifs.hpp"
#include "dimlab/regression.hpp"
#include "dimlab/symbol_tree.hpp"

namespace dimlab {

// Distribution of the retention vector X in {0,1}^m attached to each node.
class OffspringLaw {
 public:
  enum class Kind { GeneralTable, Standard, BernoulliUniform, Deterministic };

  struct TableEntry {
    std::uint64_t mask;  // bit i set <=> X_i = 1
    double probability;
  };

  static OffspringLaw deterministic(std::size_t arity);
  static OffspringLaw bernoulli_uniform(std::size_t arity, double p);
  // P(X_i = 1) = r_i^alpha independently.
  static OffspringLaw standard(const Ifs& ifs, double alpha);
  static OffspringLaw table(std::size_t arity, std::vector<TableEntry> entries);

  Kind kind() const { return kind_; }
  std::size_t arity() const { return arity_; }
  double alpha() const { return parameter_; }
  double p() const { return parameter_; }
  const std::vector<TableEntry>& entries() const { return entries_; }

  // P(X_i = 1) for each i.
  const std::vector<double>& marginals() const { return marginals_; }
  double mean_offspring() const;
  // E z^{#i : X_i = 1}
  double pgf(double z) const;
  bool independent() const { return kind_ != Kind::GeneralTable; }

  // Draws X for the node with the given word hash.
  std::uint64_t draw_mask(std::uint64_t seed, std::uint64_t word_hash) const;

 private:
  OffspringLaw() = default;

  Kind kind_ = Kind::Deterministic;
  std::size_t arity_ = 0;
  double parameter_ = 0.0;
  std::vector<double> marginals_;
  std::vector<std::uint64_t> thresholds_;  // independent kinds
  std::vector<TableEntry> entries_;
  std::vector<double> cumulative_;  // table kind
};

const char* to_string(OffspringLaw::Kind kind);

struct PercolationSample {
  OffspringLaw law;
  std::uint64_t seed = 0;
  SymbolTree tree;

  int depth() const { return tree.depth(); }
  bool survived() const { return tree.survived(); }
};

PercolationSample sample_tree(const OffspringLaw& law, std::size_t arity, int depth,
                              std::uint64_t seed,
                              std::uint64_t budget = kDefaultWordBudget);

// Whether `word` survives in the sample with this (law, seed); consistent
// with sample_tree but only draws along the path.
bool word_survives(const OffspringLaw& law, const Word& word, std::uint64_t seed);

struct ConditionedSample {
  PercolationSample sample;
  std::size_t resamples = 0;  // rejected attempts before survival
};

// Rejection sampling conditioned on survival to `depth`. Attempt j uses
// derive_seed(seed, j).
ConditionedSample sample_surviving(const OffspringLaw& law, std::size_t arity, int depth,
                                   std::uint64_t seed, std::size_t max_attempts = 100000,
                                   std::uint64_t budget = kDefaultWordBudget);

struct BranchingStats {
  double mean_offspring = 0.0;
  double extinction_prob = 1.0;
  double survival_prob = 0.0;
};

BranchingStats survival_probability(const OffspringLaw& law);

// Solves E(sum_i X_i r_i^s) = 1 on [0, ambient_dim + 1]. Subcritical or
// critical laws throw UndefinedDimension.
double percolation_dimension(const OffspringLaw& law, const Ifs& ifs);

struct MandelbrotConfig {
  Ifs ifs;
  OffspringLaw law;
  int M;
  int d;
  double p;
  // d + log p / log M
  double dimension() const;
};

MandelbrotConfig mandelbrot_config(int M, int d, double p);

// Box-counting slope of a (pruned) sample: counts words of the stopping set
// at each scale that lie in the tree.
DimEstimate sample_box_dimension(const Ifs& ifs, const SymbolTree& tree,
                                 std::span<const double> scales);

// Stopping-set counts within the tree for each scale.
std::vector<std::uint64_t> tree_stopping_counts(const Ifs& ifs, const SymbolTree& tree,
                                                std::span<const double> scales);

// Scale whose stopping set is exactly level k for an equal-ratio IFS: the
// geometric midpoint of (diam_k / c1, diam_k].
double level_scale(const Ifs& ifs, int k);
std::vector<double> level_scales(const Ifs& ifs, int from, int to);

}  // namespace dimlab
