#pragma once

#include <cstdint>
#include <vector>

#include "dimlab/ifs.hpp"

namespace dimlab {

struct TreeNode {
  std::uint32_t parent = 0;
  std::uint32_t child_begin = 0;  // range into the next level
  std::uint32_t child_end = 0;
  std::uint32_t symbol = 0;
};

// Finite rooted subtree of symbolic space, stored level by level. Children of
// a node are contiguous in the next level and sorted by symbol, so each level
// is in lexicographic order.
class SymbolTree {
 public:
  SymbolTree() = default;
  SymbolTree(std::size_t arity, std::vector<std::vector<TreeNode>> levels);

  std::size_t arity() const { return arity_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const std::vector<TreeNode>& level(int k) const { return levels_[static_cast<std::size_t>(k)]; }
  std::size_t count_at(int k) const { return level(k).size(); }
  std::vector<std::size_t> generation_counts() const;
  bool survived() const { return !levels_.empty() && !levels_.back().empty(); }

  Word word(int k, std::uint32_t index) const;
  std::vector<Word> words_at(int k) const;
  bool contains(const Word& w) const;

  // Only nodes with at least one descendant at the bottom level.
  SymbolTree pruned() const;

  // The complete tree of the given depth (m^k nodes at level k).
  static SymbolTree full(std::size_t arity, int depth);

  friend bool operator==(const SymbolTree& a, const SymbolTree& b);

 private:
  std::size_t arity_ = 0;
  std::vector<std::vector<TreeNode>> levels_;
};

bool operator==(const TreeNode& a, const TreeNode& b);

// Words present in both trees (truncated at the smaller depth).
SymbolTree intersect(const SymbolTree& a, const SymbolTree& b);

// Cylinder visited during a walk. `bottom` is set for the deepest level of a
// finite tree, whose children are unknown.
struct CylinderView {
  int depth = 0;
  double ratio = 1.0;
  Vec center;
  double radius = 0.0;
  std::uint32_t node = 0;
  std::uint32_t symbol = 0;  // last symbol of the word; 0 at the root
  bool bottom = false;
};

// Depth-first, lexicographic walk over the cylinders of `ifs`, restricted to
// `tree` when given. visit(view) returns true to descend into the children.
template <class Visit>
void walk_cylinders(const Ifs& ifs, const SymbolTree* tree, Visit&& visit) {
  struct Frame {
    Similarity map;
    int depth;
    std::uint32_t node;
    std::uint32_t symbol;
  };
  if (tree != nullptr && tree->count_at(0) == 0) return;
  const Ball& ball = ifs.ball();
  std::vector<Frame> stack;
  stack.push_back({Similarity::identity(), 0, 0, 0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    CylinderView view;
    view.depth = f.depth;
    view.ratio = f.map.ratio();
    view.center = f.map.apply(ball.center);
    view.radius = ball.radius * f.map.ratio();
    view.node = f.node;
    view.symbol = f.symbol;
    view.bottom = tree != nullptr && f.depth == tree->depth();
    if (!visit(static_cast<const CylinderView&>(view)) || view.bottom) continue;
    if (tree == nullptr) {
      for (std::size_t i = ifs.size(); i-- > 0;) {
        stack.push_back({compose(f.map, ifs.map(i)), f.depth + 1, 0, static_cast<std::uint32_t>(i)});
      }
    } else {
      const TreeNode& n = tree->level(f.depth)[f.node];
      for (std::uint32_t c = n.child_end; c-- > n.child_begin;) {
        const TreeNode& child = tree->level(f.depth + 1)[c];
        stack.push_back({compose(f.map, ifs.map(child.symbol)), f.depth + 1, c, child.symbol});
      }
    }
  }
}

}  // namespace dimlab
