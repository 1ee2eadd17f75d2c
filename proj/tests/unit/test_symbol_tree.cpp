#include "doctest.h"
#include "dimlab/catalog.hpp"
#include "dimlab/percolation.hpp"
#include "dimlab/symbol_tree.hpp"

using namespace dimlab;

TEST_CASE("full tree") {
  const SymbolTree t = SymbolTree::full(3, 4);
  CHECK(t.generation_counts() == std::vector<std::size_t>{1, 3, 9, 27, 81});
  CHECK(t.word(2, 5) == Word{1, 2});
  CHECK(t.contains(Word{2, 1, 0}));
  CHECK(t.words_at(1).size() == 3);
  CHECK(t.pruned() == t);
}

TEST_CASE("contains and pruning on a sampled tree") {
  const auto law = OffspringLaw::bernoulli_uniform(4, 0.4);
  const auto s = sample_tree(law, 4, 6, 99);
  const SymbolTree& t = s.tree;
  for (int k = 0; k <= t.depth(); ++k) {
    for (std::uint32_t i = 0; i < t.count_at(k); ++i) {
      const Word w = t.word(k, i);
      CHECK(t.contains(w));
      CHECK(word_survives(law, w, 99));
    }
  }
  // pruned keeps exactly the nodes with a descendant at the bottom
  const SymbolTree p = t.pruned();
  for (int k = 0; k <= p.depth(); ++k) {
    for (std::uint32_t i = 0; i < p.count_at(k); ++i) {
      CHECK(t.contains(p.word(k, i)));
      if (k < p.depth()) {
        const auto& n = p.level(k)[i];
        CHECK(n.child_end > n.child_begin);
      }
    }
  }
  CHECK(p.count_at(p.depth()) == t.count_at(t.depth()));
}

TEST_CASE("intersection keeps common words") {
  const auto a = sample_tree(OffspringLaw::bernoulli_uniform(4, 0.8), 4, 4, 1).tree;
  const auto b = sample_tree(OffspringLaw::bernoulli_uniform(4, 0.8), 4, 4, 2).tree;
  const SymbolTree c = intersect(a, b);
  for (int k = 0; k <= c.depth(); ++k) {
    for (const auto& w : c.words_at(k)) {
      CHECK(a.contains(w));
      CHECK(b.contains(w));
    }
    std::size_t both = 0;
    for (const auto& w : a.words_at(k)) both += b.contains(w) ? 1 : 0;
    CHECK(both == c.count_at(k));
  }
}

TEST_CASE("walk over a full tree visits every cylinder once") {
  const Ifs ifs = catalog::sierpinski_triangle();
  const SymbolTree t = SymbolTree::full(3, 3);
  std::size_t visited = 0, bottoms = 0;
  walk_cylinders(ifs, &t, [&](const CylinderView& v) {
    ++visited;
    bottoms += v.bottom ? 1 : 0;
    return true;
  });
  CHECK(visited == 1 + 3 + 9 + 27);
  CHECK(bottoms == 27);
}
