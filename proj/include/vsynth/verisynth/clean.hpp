#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::verisynth {

/// The two keep conditions. `match` is nullopt when no answer could be
/// extracted.
///   Cond1: match and verdict Correct
///   Cond2: no match and verdict Incorrect
/// Everything else is discarded, with a reason.
struct CleanDecision {
  std::optional<corpus::Condition> condition;
  std::string discard_reason;  // empty when kept
};

CleanDecision classify(std::optional<bool> match, answers::Verdict verdict);

/// Whether a candidate's answer matches its question's golden answer;
/// nullopt if extraction fails. Uses the stored extracted answer when present.
std::optional<bool> candidate_matches(const corpus::Question& q, const corpus::Candidate& c,
                                      const answers::Extractor& extractor, double tol);

struct CleanResult {
  std::vector<corpus::CleanExample> kept;
  /// Every input record in order; discarded ones carry discard_reason.
  std::vector<corpus::VerificationRecord> annotated;
};

/// Joins records to candidates by (question_id, candidate_index) and to
/// questions by id, then applies classify. Output follows record order.
/// Throws JoinFailure on a dangling reference.
CleanResult clean_stage1_detailed(const std::vector<corpus::Question>& questions,
                                  const std::vector<corpus::Candidate>& candidates,
                                  const std::vector<corpus::VerificationRecord>& records,
                                  const answers::Extractor& extractor, double tol);

/// clean_stage1_detailed with a caller-supplied match predicate.
using MatchFn = std::function<std::optional<bool>(const corpus::Question&, const corpus::Candidate&)>;
CleanResult clean_records(const std::vector<corpus::Question>& questions,
                          const std::vector<corpus::Candidate>& candidates,
                          const std::vector<corpus::VerificationRecord>& records,
                          const MatchFn& match);

std::vector<corpus::CleanExample> clean_stage1(const std::vector<corpus::Question>& questions,
                                               const std::vector<corpus::Candidate>& candidates,
                                               const std::vector<corpus::VerificationRecord>& records,
                                               const answers::Extractor& extractor, double tol);

}  // namespace vsynth::verisynth
