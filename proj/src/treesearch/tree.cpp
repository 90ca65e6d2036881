#include "vsynth/treesearch/tree.hpp"

#include <algorithm>
#include <cmath>

#include "vsynth/common/error.hpp"

namespace vsynth::treesearch {

std::optional<double> SearchNode::q() const {
  if (visits == 0) return std::nullopt;
  return total_reward / visits;
}

Tree::Tree() { nodes_.emplace_back(); }

NodeId Tree::add_child(NodeId parent, std::string step_text, bool terminal) {
  SearchNode child;
  child.step_text = std::move(step_text);
  child.depth = node(parent).depth + 1;
  child.parent = parent;
  child.terminal = terminal;
  const NodeId id = nodes_.size();
  nodes_.push_back(std::move(child));
  nodes_[parent].children.push_back(id);
  return id;
}

std::vector<NodeId> Tree::path(NodeId id) const {
  std::vector<NodeId> out;
  for (std::optional<NodeId> cur = id; cur; cur = node(*cur).parent) out.push_back(*cur);
  return {out.rbegin(), out.rend()};
}

std::vector<std::string> Tree::path_steps(NodeId id) const {
  std::vector<std::string> out;
  for (auto n : path(id)) {
    if (n != root()) out.push_back(node(n).step_text);
  }
  return out;
}

NodeId uct_select(const Tree& tree, NodeId id, double uct_c) {
  const auto& parent = tree.node(id);
  if (parent.children.empty()) throw NoChildren();
  for (auto c : parent.children) {
    if (tree.node(c).visits == 0) return c;
  }
  const double log_n = std::log(static_cast<double>(std::max(parent.visits, 1)));
  NodeId best = parent.children.front();
  double best_score = -1.0;
  for (auto c : parent.children) {
    const auto& child = tree.node(c);
    const double score = *child.q() + uct_c * std::sqrt(log_n / child.visits);
    if (score > best_score) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

void backpropagate(Tree& tree, NodeId leaf, double reward) {
  if (!(reward >= 0.0 && reward <= 1.0)) throw InvalidArgument("reward outside [0, 1]");
  for (std::optional<NodeId> cur = leaf; cur; cur = tree.node(*cur).parent) {
    auto& n = tree.node(*cur);
    ++n.visits;
    n.total_reward += reward;
  }
}

}  // namespace vsynth::treesearch
