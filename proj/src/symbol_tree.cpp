#include "dimlab/symbol_tree.hpp"

#include <algorithm>

namespace dimlab {

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.parent == b.parent && a.child_begin == b.child_begin && a.child_end == b.child_end &&
         a.symbol == b.symbol;
}

bool operator==(const SymbolTree& a, const SymbolTree& b) {
  return a.arity_ == b.arity_ && a.levels_ == b.levels_;
}

SymbolTree::SymbolTree(std::size_t arity, std::vector<std::vector<TreeNode>> levels)
    : arity_(arity), levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(ErrorCode::InvalidArgument, "a tree needs a root level");
  if (levels_[0].size() > 1) throw Error(ErrorCode::InvalidArgument, "root level has one node");
}

std::vector<std::size_t> SymbolTree::generation_counts() const {
  std::vector<std::size_t> out;
  for (const auto& l : levels_) out.push_back(l.size());
  return out;
}

Word SymbolTree::word(int k, std::uint32_t index) const {
  std::vector<std::uint32_t> symbols(static_cast<std::size_t>(k));
  for (int j = k; j > 0; --j) {
    const TreeNode& n = level(j)[index];
    symbols[static_cast<std::size_t>(j - 1)] = n.symbol;
    index = n.parent;
  }
  return Word(std::move(symbols));
}

std::vector<Word> SymbolTree::words_at(int k) const {
  std::vector<Word> out;
  out.reserve(count_at(k));
  for (std::uint32_t i = 0; i < count_at(k); ++i) out.push_back(word(k, i));
  return out;
}

bool SymbolTree::contains(const Word& w) const {
  if (static_cast<int>(w.size()) > depth() || count_at(0) == 0) return false;
  std::uint32_t node = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const TreeNode& n = level(static_cast<int>(j))[node];
    const auto& next = level(static_cast<int>(j) + 1);
    auto first = next.begin() + n.child_begin, last = next.begin() + n.child_end;
    auto it = std::lower_bound(first, last, w[j],
                               [](const TreeNode& c, std::uint32_t s) { return c.symbol < s; });
    if (it == last || it->symbol != w[j]) return false;
    node = static_cast<std::uint32_t>(it - next.begin());
  }
  return true;
}

SymbolTree SymbolTree::pruned() const {
  const int D = depth();
  std::vector<std::vector<char>> alive(levels_.size());
  alive[static_cast<std::size_t>(D)].assign(levels_.back().size(), 1);
  for (int k = D - 1; k >= 0; --k) {
    const auto& nodes = level(k);
    auto& a = alive[static_cast<std::size_t>(k)];
    a.assign(nodes.size(), 0);
    const auto& below = alive[static_cast<std::size_t>(k + 1)];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::uint32_t c = nodes[i].child_begin; c < nodes[i].child_end && !a[i]; ++c) {
        a[i] = below[c];
      }
    }
  }

  std::vector<std::vector<TreeNode>> out(levels_.size());
  std::vector<std::uint32_t> remap;  // old index -> new index at the current level
  for (int k = 0; k <= D; ++k) {
    const auto& nodes = level(k);
    const auto& a = alive[static_cast<std::size_t>(k)];
    std::vector<std::uint32_t> next_remap(nodes.size(), 0);
    auto& dst = out[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!a[i]) continue;
      TreeNode n = nodes[i];
      if (k > 0) {
        n.parent = remap[n.parent];
        auto& parent = out[static_cast<std::size_t>(k - 1)][n.parent];
        const auto idx = static_cast<std::uint32_t>(dst.size());
        if (parent.child_begin == parent.child_end) parent.child_begin = idx;
        parent.child_end = idx + 1;
      }
      n.child_begin = n.child_end = 0;
      next_remap[i] = static_cast<std::uint32_t>(dst.size());
      dst.push_back(n);
    }
    remap = std::move(next_remap);
  }
  return SymbolTree(arity_, std::move(out));
}

SymbolTree SymbolTree::full(std::size_t arity, int depth) {
  std::vector<std::vector<TreeNode>> levels(static_cast<std::size_t>(depth) + 1);
  levels[0].push_back(TreeNode{});
  for (int k = 0; k < depth; ++k) {
    auto& cur = levels[static_cast<std::size_t>(k)];
    auto& next = levels[static_cast<std::size_t>(k) + 1];
    next.reserve(cur.size() * arity);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      cur[i].child_begin = static_cast<std::uint32_t>(next.size());
      for (std::size_t s = 0; s < arity; ++s) {
        next.push_back(TreeNode{static_cast<std::uint32_t>(i), 0, 0, static_cast<std::uint32_t>(s)});
      }
      cur[i].child_end = static_cast<std::uint32_t>(next.size());
    }
  }
  return SymbolTree(arity, std::move(levels));
}

SymbolTree intersect(const SymbolTree& a, const SymbolTree& b) {
  if (a.arity() != b.arity()) throw Error(ErrorCode::InvalidArgument, "tree arities differ");
  const int D = std::min(a.depth(), b.depth());
  std::vector<std::vector<TreeNode>> levels(static_cast<std::size_t>(D) + 1);
  // Matching node pairs at the current level.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (a.count_at(0) > 0 && b.count_at(0) > 0) {
    levels[0].push_back(TreeNode{});
    pairs.emplace_back(0, 0);
  }
  for (int k = 0; k < D; ++k) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> next_pairs;
    auto& cur = levels[static_cast<std::size_t>(k)];
    auto& next = levels[static_cast<std::size_t>(k) + 1];
    const auto& la = a.level(k + 1);
    const auto& lb = b.level(k + 1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const TreeNode& na = a.level(k)[pairs[i].first];
      const TreeNode& nb = b.level(k)[pairs[i].second];
      cur[i].child_begin = static_cast<std::uint32_t>(next.size());
      std::uint32_t x = na.child_begin, y = nb.child_begin;
      while (x < na.child_end && y < nb.child_end) {
        if (la[x].symbol < lb[y].symbol) {
          ++x;
        } else if (lb[y].symbol < la[x].symbol) {
          ++y;
        } else {
          next.push_back(TreeNode{static_cast<std::uint32_t>(i), 0, 0, la[x].symbol});
          next_pairs.emplace_back(x++, y++);
        }
      }
      cur[i].child_end = static_cast<std::uint32_t>(next.size());
    }
    pairs = std::move(next_pairs);
  }
  return SymbolTree(a.arity(), std::move(levels));
}

}  // namespace dimlab
