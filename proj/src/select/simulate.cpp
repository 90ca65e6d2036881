#include "vsynth/select/simulate.hpp"

#include <cmath>
#include <vector>

#include "vsynth/common/error.hpp"
#include "vsynth/common/random.hpp"

namespace vsynth::select {
namespace {

/// Plurality with ties to the earliest first occurrence. Answers are small
/// integers, 0 being gold; -1 when nothing is counted.
int plurality(const std::vector<int>& answers, const std::vector<char>& counted,
              std::vector<int>& tally, std::vector<int>& first) {
  std::fill(tally.begin(), tally.end(), 0);
  std::fill(first.begin(), first.end(), -1);
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (!counted[i]) continue;
    const int a = answers[i];
    if (first[a] < 0) first[a] = static_cast<int>(i);
    ++tally[a];
  }
  int best = -1;
  for (std::size_t a = 0; a < tally.size(); ++a) {
    if (tally[a] == 0) continue;
    if (best < 0 || tally[a] > tally[best] || (tally[a] == tally[best] && first[a] < first[best])) {
      best = static_cast<int>(a);
    }
  }
  return best;
}

StrategyEstimate estimate(std::uint64_t hits, std::uint64_t trials) {
  const double acc = static_cast<double>(hits) / static_cast<double>(trials);
  return {acc, std::sqrt(acc * (1.0 - acc) / static_cast<double>(trials))};
}

}  // namespace

void SimulationParams::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must be in [0, 1]");
  };
  prob(p_correct, "p_correct");
  prob(tpr, "tpr");
  prob(fpr, "fpr");
  if (wrong_alphabet_size < 1) throw InvalidArgument("wrong_alphabet_size must be >= 1");
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
}

SimulationResult simulate_selection(const SimulationParams& p) {
  p.validate();
  Rng rng(p.seed);
  const auto n = static_cast<std::size_t>(p.N);
  std::vector<int> answers(n);
  std::vector<char> all(n, 1);
  std::vector<char> accepted(n);
  std::vector<int> tally(static_cast<std::size_t>(p.wrong_alphabet_size) + 1);
  std::vector<int> first(tally.size());
  std::uint64_t single = 0, majority = 0, verifier = 0;

  for (std::uint64_t t = 0; t < p.trials; ++t) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool gold = rng.bernoulli(p.p_correct);
      answers[i] = gold ? 0 : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(p.wrong_alphabet_size)));
      accepted[i] = rng.bernoulli(gold ? p.tpr : p.fpr) ? 1 : 0;
      any = any || accepted[i];
    }
    if (answers[0] == 0) ++single;
    if (plurality(answers, all, tally, first) == 0) ++majority;
    if (plurality(answers, any ? accepted : all, tally, first) == 0) ++verifier;
  }
  return {estimate(single, p.trials), estimate(majority, p.trials), estimate(verifier, p.trials),
          p.trials};
}

json to_json(const SimulationResult& r) {
  auto est = [](const StrategyEstimate& e) {
    return json{{"accuracy", e.accuracy}, {"std_error", e.std_error}};
  };
  return {{"single", est(r.single)},
          {"majority", est(r.majority)},
          {"verifier", est(r.verifier)},
          {"trials", r.trials}};
}

}  // namespace vsynth::select
