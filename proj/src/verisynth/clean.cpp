#include "vsynth/verisynth/clean.hpp"

#include <map>
#include <unordered_map>

#include "vsynth/answers/golden.hpp"
#include "vsynth/common/error.hpp"

namespace vsynth::verisynth {

CleanDecision classify(std::optional<bool> match, answers::Verdict verdict) {
  using answers::Verdict;
  if (verdict == Verdict::Unparseable) return {std::nullopt, "unparseable_verdict"};
  if (!match) return {std::nullopt, "extraction_failed"};
  if (*match && verdict == Verdict::Correct) return {corpus::Condition::Cond1, ""};
  if (!*match && verdict == Verdict::Incorrect) return {corpus::Condition::Cond2, ""};
  return {std::nullopt, *match ? "match_but_verdict_incorrect" : "mismatch_but_verdict_correct"};
}

std::optional<bool> candidate_matches(const corpus::Question& q, const corpus::Candidate& c,
                                      const answers::Extractor& extractor, double tol) {
  auto answer = c.extracted_answer;
  if (!answer) answer = extractor.extract(c.reasoning_text);
  if (!answer) return std::nullopt;
  return answers::matches_golden(*answer, q.golden_answer, q.choices, tol);
}

CleanResult clean_records(const std::vector<corpus::Question>& questions,
                          const std::vector<corpus::Candidate>& candidates,
                          const std::vector<corpus::VerificationRecord>& records,
                          const MatchFn& match) {
  std::unordered_map<std::string, const corpus::Question*> by_id;
  for (const auto& q : questions) by_id.emplace(q.id, &q);
  std::map<std::pair<std::string, int>, const corpus::Candidate*> by_key;
  for (const auto& c : candidates) by_key.emplace(std::make_pair(c.question_id, c.index), &c);

  CleanResult out;
  out.annotated.reserve(records.size());
  for (const auto& v : records) {
    const auto q = by_id.find(v.question_id);
    if (q == by_id.end()) throw JoinFailure(v.question_id);
    const auto c = by_key.find({v.question_id, v.candidate_index});
    if (c == by_key.end()) {
      throw JoinFailure(v.question_id + "#" + std::to_string(v.candidate_index));
    }
    auto decision = classify(match(*q->second, *c->second), v.verdict);
    auto annotated = v;
    if (v.error && !decision.condition) decision.discard_reason = "verifier_error";
    if (decision.condition) {
      annotated.discard_reason.reset();
      out.kept.push_back({*q->second, *c->second, annotated, *decision.condition});
    } else {
      annotated.discard_reason = decision.discard_reason;
    }
    out.annotated.push_back(std::move(annotated));
  }
  return out;
}

CleanResult clean_stage1_detailed(const std::vector<corpus::Question>& questions,
                                  const std::vector<corpus::Candidate>& candidates,
                                  const std::vector<corpus::VerificationRecord>& records,
                                  const answers::Extractor& extractor, double tol) {
  return clean_records(questions, candidates, records,
                       [&](const corpus::Question& q, const corpus::Candidate& c) {
                         return candidate_matches(q, c, extractor, tol);
                       });
}

std::vector<corpus::CleanExample> clean_stage1(const std::vector<corpus::Question>& questions,
                                               const std::vector<corpus::Candidate>& candidates,
                                               const std::vector<corpus::VerificationRecord>& records,
                                               const answers::Extractor& extractor, double tol) {
  return clean_stage1_detailed(questions, candidates, records, extractor, tol).kept;
}

}  // namespace vsynth::verisynth
