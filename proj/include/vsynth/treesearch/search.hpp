#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/common/prompt_template.hpp"
#include "vsynth/corpus/types.hpp"
#include "vsynth/treesearch/steps.hpp"
#include "vsynth/treesearch/tree.hpp"

namespace vsynth::treesearch {

struct SearchConfig {
  int k = 3;           // children per expansion
  int l = 5;           // simulations per reward
  int n = 8;           // rollouts to harvest
  int max_depth = 10;
  double uct_c = 1.414;
  int iterations = 40;
  StepDelimiter step_delimiter = StepDelimiter::BlankLine;
  std::uint64_t seed = 0;
  /// k or l single-sample calls instead of one multi-sample call.
  bool independent_calls = true;
  /// When false, a failed simulation call counts as an incorrect answer.
  bool simulation_failures_fatal = true;
  /// Prepend the stochastic mock's header to every request.
  bool mock_headers = false;
  corpus::SamplerParams decoding;
  std::string solve_template;
  std::string critique_template;

  SearchConfig();
  /// Throws InvalidArgument / MissingSlot.
  void validate() const;
};

struct Rollout {
  std::string question_id;
  std::vector<std::string> path_steps;
  std::string full_text;
  double reward_at_leaf = 0.0;

  bool operator==(const Rollout&) const = default;
};

json to_json(const Rollout& r);

/// Candidate record for a rollout; the answer is extracted from full_text.
corpus::Candidate to_candidate(const Rollout& r, int index, const std::string& producer,
                               const SearchConfig& cfg, const answers::Extractor& extractor);

/// Samples k continuations from `node`'s path and appends their first steps
/// as children, in sampling order. A duplicate step is resampled once, then
/// kept with an "[alt j]" prefix. Empty steps are dropped.
/// Throws InvalidArgument if the node is not expandable, ExpansionExhausted
/// (node marked exhausted) if every step was empty, BackendFailure.
std::vector<NodeId> expand(backend::Backend& backend, const corpus::Question& q, Tree& tree,
                           NodeId node, const SearchConfig& cfg);

/// Fraction of l direct completions from `node` whose extracted answer
/// matches the golden answer. Does not modify the tree.
double simulate_reward(backend::Backend& backend, const corpus::Question& q, const Tree& tree,
                       NodeId node, const SearchConfig& cfg, const answers::Extractor& extractor);

/// Self-evaluation reward from a critique request; 0 when no score parses.
double critique_reward(backend::Backend& backend, const corpus::Question& q, const Tree& tree,
                       NodeId node, const SearchConfig& cfg);

/// One search tree under construction. Each iterate() runs
/// select -> expand -> evaluate -> backpropagate and applies exactly one
/// reward, so root N always equals reward_evaluations().
class SearchSession {
 public:
  using RewardFn = std::function<double(const Tree&, NodeId)>;

  /// `trace`, when set, receives one JSON line per iteration.
  SearchSession(backend::Backend& backend, const corpus::Question& q, SearchConfig cfg,
                RewardFn reward, std::ostream* trace = nullptr);

  void iterate();
  void run();  // cfg.iterations times

  const Tree& tree() const noexcept { return tree_; }
  int iterations_done() const noexcept { return iterations_; }
  int reward_evaluations() const noexcept { return evaluations_; }

  /// The `count` visited terminal leaves with highest Q (ties: earlier node),
  /// padded by completing the best non-terminal leaves with direct sampling.
  /// Throws SearchStarved when padding is needed and impossible.
  std::vector<Rollout> harvest(int count);

 private:
  Rollout rollout_for(NodeId id) const;

  backend::Backend& backend_;
  const corpus::Question& question_;
  SearchConfig cfg_;
  RewardFn reward_;
  std::ostream* trace_;
  Tree tree_;
  int iterations_ = 0;
  int evaluations_ = 0;
};

/// Simulation-reward search followed by harvest(cfg.n).
std::vector<Rollout> run_search(backend::Backend& backend, const corpus::Question& q,
                                const SearchConfig& cfg, const answers::Extractor& extractor,
                                std::ostream* trace = nullptr);

struct NaiveResult {
  std::optional<answers::CanonicalAnswer> answer;
  Rollout rollout;
};

/// Baseline: the same tree mechanics rewarded by the model's own critique
/// scores; returns the best terminal path and its answer.
NaiveResult run_naive_mcts(backend::Backend& backend, const corpus::Question& q,
                           const SearchConfig& cfg, const answers::Extractor& extractor,
                           std::ostream* trace = nullptr);

/// `count` complete solutions sampled straight from the question, split into
/// steps. reward_at_leaf is 1 when the answer matches the golden answer.
std::vector<Rollout> direct_rollouts(backend::Backend& backend, const corpus::Question& q,
                                     const SearchConfig& cfg, const answers::Extractor& extractor,
                                     int count);

}  // namespace vsynth::treesearch
