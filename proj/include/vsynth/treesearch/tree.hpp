#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vsynth::treesearch {

using NodeId = std::size_t;

struct SearchNode {
  std::string step_text;  // empty at the root
  int depth = 0;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  int visits = 0;             // N
  double total_reward = 0.0;  // W
  /// States a final answer, or sits at the depth cap.
  bool terminal = false;
  /// Expansion produced no usable step; treated as a leaf from then on.
  bool exhausted = false;
  /// Reward applications made at this node itself (not via a descendant).
  int self_evaluations = 0;
  /// Reward computed once on first evaluation and reused afterwards.
  std::optional<double> cached_reward;

  /// W / N, or nullopt when unvisited.
  std::optional<double> q() const;
  bool expandable() const noexcept { return !terminal && !exhausted && children.empty(); }
};

/// Arena of nodes; node 0 is the root.
class Tree {
 public:
  Tree();

  static constexpr NodeId root() noexcept { return 0; }

  const SearchNode& node(NodeId id) const { return nodes_.at(id); }
  SearchNode& node(NodeId id) { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  NodeId add_child(NodeId parent, std::string step_text, bool terminal);

  /// Step texts from the root's first child down to `id`.
  std::vector<std::string> path_steps(NodeId id) const;
  /// Node ids from the root down to `id`, inclusive.
  std::vector<NodeId> path(NodeId id) const;

 private:
  std::vector<SearchNode> nodes_;
};

/// Unvisited children first (lowest index), else argmax of
/// Q + c * sqrt(ln(N_parent) / N_child) with ties to the lowest index.
/// Throws NoChildren.
NodeId uct_select(const Tree& tree, NodeId node, double uct_c);

/// N += 1 and W += reward on every node from `leaf` up to the root.
/// Throws InvalidArgument unless reward is in [0, 1].
void backpropagate(Tree& tree, NodeId leaf, double reward);

}  // namespace vsynth::treesearch
