#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/answers/verdict.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/corpus/types.hpp"
#include "vsynth/verisynth/verify.hpp"

namespace vsynth::select {

enum class Strategy { Majority, Judge, Verifier };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);

struct RolloutSet {
  corpus::Question question;
  std::vector<corpus::Candidate> candidates;

  /// Throws InvalidArgument if empty or a candidate belongs elsewhere.
  void validate() const;
};

struct CandidateAudit {
  std::optional<answers::CanonicalAnswer> extracted;
  std::optional<answers::Verdict> verdict;
  bool counted = false;
  std::optional<std::string> error;

  bool operator==(const CandidateAudit&) const = default;
};

struct SelectionResult {
  /// nullopt is the abstain sentinel: no counted candidate had an answer.
  std::optional<answers::CanonicalAnswer> chosen_answer;
  Strategy strategy = Strategy::Majority;
  std::vector<CandidateAudit> per_candidate;
  bool fallback_used = false;

  bool abstained() const noexcept { return !chosen_answer; }
};

json to_json(const SelectionResult& r);

/// Plurality over the answers whose `eligible` flag is set (all when empty).
///
/// Grouping is complete-linkage: an answer joins the earliest group all of
/// whose members it equals under `tol`, else opens a new group. Two answers
/// that answers_equal rejects are therefore never in one group, even when the
/// tolerance is not transitive. The largest group wins; ties go to the group
/// whose first member came first. The chosen answer is that first member.
/// Missing answers are never counted.
SelectionResult vote(const std::vector<std::optional<answers::CanonicalAnswer>>& answers,
                     const std::vector<bool>& eligible, double tol);

/// Stored extracted_answer when present, else the extractor's.
std::vector<std::optional<answers::CanonicalAnswer>> extract_all(
    const std::vector<corpus::Candidate>& candidates, const answers::Extractor& extractor);

/// Throws InvalidArgument on an empty list.
SelectionResult majority_vote(const std::vector<corpus::Candidate>& candidates,
                              const answers::Extractor& extractor, double tol);

/// Counted set = candidates with an answer and verdict Correct. Majority over
/// the counted set, or over all candidates (fallback_used) when it is empty.
SelectionResult select_with_verdicts(const std::vector<std::optional<answers::CanonicalAnswer>>& answers,
                                     const std::vector<answers::Verdict>& verdicts,
                                     Strategy strategy, double tol);

/// Verifies every candidate, then select_with_verdicts. Backend failures
/// make a candidate Unparseable; they never abort the set.
SelectionResult verifier_select(const RolloutSet& rollouts, backend::Backend& verifier,
                                const verisynth::VerifyPromptTemplate& tmpl,
                                const answers::Extractor& extractor, double tol,
                                const verisynth::VerifyOptions& opts = {});

/// verifier_select with a judge backend and template; tagged Judge.
SelectionResult judge_select(const RolloutSet& rollouts, backend::Backend& judge,
                             const verisynth::VerifyPromptTemplate& tmpl,
                             const answers::Extractor& extractor, double tol,
                             const verisynth::VerifyOptions& opts = {});

}  // namespace vsynth::select
