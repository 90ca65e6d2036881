#include "vsynth/select/select.hpp"

#include "vsynth/common/error.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::select {
namespace {

SelectionResult verify_and_select(const RolloutSet& rollouts, backend::Backend& verifier,
                                  const verisynth::VerifyPromptTemplate& tmpl,
                                  const answers::Extractor& extractor, double tol,
                                  const verisynth::VerifyOptions& opts, Strategy strategy) {
  rollouts.validate();
  const auto extracted = extract_all(rollouts.candidates, extractor);
  std::vector<answers::Verdict> verdicts;
  std::vector<std::optional<std::string>> errors;
  for (std::size_t i = 0; i < rollouts.candidates.size(); ++i) {
    auto c = rollouts.candidates[i];
    c.extracted_answer = extracted[i];
    const auto rec = verisynth::verify_candidate(verifier, tmpl, rollouts.question, c, opts);
    verdicts.push_back(rec.verdict);
    errors.push_back(rec.error);
  }
  auto res = select_with_verdicts(extracted, verdicts, strategy, tol);
  for (std::size_t i = 0; i < errors.size(); ++i) res.per_candidate[i].error = errors[i];
  return res;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Majority:
      return "majority";
    case Strategy::Judge:
      return "judge";
    case Strategy::Verifier:
      return "verifier";
  }
  return "majority";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "majority") return Strategy::Majority;
  if (name == "judge") return Strategy::Judge;
  if (name == "verifier") return Strategy::Verifier;
  throw InvalidArgument("unknown strategy: " + std::string(name));
}

void RolloutSet::validate() const {
  if (candidates.empty()) throw InvalidArgument("rollout set for " + question.id + " is empty");
  for (const auto& c : candidates) {
    if (c.question_id != question.id) {
      throw InvalidArgument("candidate for " + c.question_id + " in rollout set of " + question.id);
    }
  }
}

json to_json(const SelectionResult& r) {
  json per = json::array();
  for (const auto& a : r.per_candidate) {
    json j = {{"counted", a.counted}};
    if (a.extracted) j["extracted"] = corpus::answer_to_json(*a.extracted);
    if (a.verdict) j["verdict"] = answers::to_string(*a.verdict);
    if (a.error) j["error"] = *a.error;
    per.push_back(std::move(j));
  }
  json j = {{"strategy", to_string(r.strategy)},
            {"fallback_used", r.fallback_used},
            {"per_candidate", per}};
  j["chosen_answer"] = r.chosen_answer ? corpus::answer_to_json(*r.chosen_answer) : json(nullptr);
  return j;
}

SelectionResult vote(const std::vector<std::optional<answers::CanonicalAnswer>>& answers,
                     const std::vector<bool>& eligible, double tol) {
  if (!eligible.empty() && eligible.size() != answers.size()) {
    throw InvalidArgument("vote: eligibility mask has the wrong length");
  }
  SelectionResult res;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    CandidateAudit audit;
    audit.extracted = answers[i];
    audit.counted = answers[i].has_value() && (eligible.empty() || eligible[i]);
    res.per_candidate.push_back(audit);
    if (!audit.counted) continue;
    bool placed = false;
    for (auto& g : groups) {
      bool all = true;
      for (auto m : g) all = all && answers::answers_equal(*answers[m], *answers[i], tol);
      if (all) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  const std::vector<std::size_t>* best = nullptr;
  for (const auto& g : groups) {
    if (!best || g.size() > best->size()) best = &g;
  }
  if (best) res.chosen_answer = answers[best->front()];
  return res;
}

std::vector<std::optional<answers::CanonicalAnswer>> extract_all(
    const std::vector<corpus::Candidate>& candidates, const answers::Extractor& extractor) {
  std::vector<std::optional<answers::CanonicalAnswer>> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back(c.extracted_answer ? c.extracted_answer : extractor.extract(c.reasoning_text));
  }
  return out;
}

SelectionResult majority_vote(const std::vector<corpus::Candidate>& candidates,
                              const answers::Extractor& extractor, double tol) {
  if (candidates.empty()) throw InvalidArgument("majority_vote: no candidates");
  auto res = vote(extract_all(candidates, extractor), {}, tol);
  res.strategy = Strategy::Majority;
  return res;
}

SelectionResult select_with_verdicts(const std::vector<std::optional<answers::CanonicalAnswer>>& answers,
                                     const std::vector<answers::Verdict>& verdicts,
                                     Strategy strategy, double tol) {
  if (answers.empty()) throw InvalidArgument("select_with_verdicts: no candidates");
  if (answers.size() != verdicts.size()) {
    throw InvalidArgument("select_with_verdicts: answers and verdicts differ in length");
  }
  std::vector<bool> counted(answers.size());
  bool any = false;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    counted[i] = answers[i].has_value() && verdicts[i] == answers::Verdict::Correct;
    any = any || counted[i];
  }
  auto res = any ? vote(answers, counted, tol) : vote(answers, {}, tol);
  res.fallback_used = !any;
  res.strategy = strategy;
  for (std::size_t i = 0; i < verdicts.size(); ++i) res.per_candidate[i].verdict = verdicts[i];
  return res;
}

SelectionResult verifier_select(const RolloutSet& rollouts, backend::Backend& verifier,
                                const verisynth::VerifyPromptTemplate& tmpl,
                                const answers::Extractor& extractor, double tol,
                                const verisynth::VerifyOptions& opts) {
  return verify_and_select(rollouts, verifier, tmpl, extractor, tol, opts, Strategy::Verifier);
}

SelectionResult judge_select(const RolloutSet& rollouts, backend::Backend& judge,
                             const verisynth::VerifyPromptTemplate& tmpl,
                             const answers::Extractor& extractor, double tol,
                             const verisynth::VerifyOptions& opts) {
  return verify_and_select(rollouts, judge, tmpl, extractor, tol, opts, Strategy::Judge);
}

}  // namespace vsynth::select
