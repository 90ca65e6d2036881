#pragma once

#include <cstdint>

#include "vsynth/common/jsonl.hpp"

namespace vsynth::select {

struct SimulationParams {
  double p_correct = 0.5;
  int wrong_alphabet_size = 3;
  double tpr = 1.0;
  double fpr = 0.0;
  int N = 1;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct StrategyEstimate {
  double accuracy = 0.0;
  double std_error = 0.0;  // sqrt(acc (1 - acc) / trials)
};

struct SimulationResult {
  StrategyEstimate single;    // first candidate only
  StrategyEstimate majority;
  StrategyEstimate verifier;  // counted-set majority, majority fallback
  std::uint64_t trials = 0;
};

/// Monte Carlo over rollout sets drawn from the stochastic mock's model: each
/// of N answers is gold w.p. p_correct, else uniform over the wrong symbols;
/// each verdict is Correct w.p. tpr for a gold answer and fpr otherwise.
/// Selection follows majority_vote and verifier_select. No backend calls.
SimulationResult simulate_selection(const SimulationParams& params);

json to_json(const SimulationResult& r);

}  // namespace vsynth::select
