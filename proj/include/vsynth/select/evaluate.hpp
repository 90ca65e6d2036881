#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/corpus/types.hpp"
#include "vsynth/select/select.hpp"

namespace vsynth::select {

struct EvalConfig {
  Strategy strategy = Strategy::Majority;
  int N = 1;
  double tolerance = answers::kDefaultTolerance;
  std::uint64_t seed = 0;
  bool mock_headers = false;
  /// N single-sample calls per question rather than one N-sample call.
  bool independent_calls = true;
  corpus::SamplerParams decoding;
  std::string solve_template;
  /// Template for the verifier or judge, slots {question} and {solution}.
  std::string selector_template;
  std::shared_ptr<const answers::VerdictGrammar> grammar;
  int parallelism = 4;

  EvalConfig();
  void validate() const;
};

struct Score {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t errors = 0;  // questions that failed and were scored incorrect

  double accuracy() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
  bool operator==(const Score&) const = default;
};

struct QuestionOutcome {
  std::string question_id;
  std::string category;
  std::optional<answers::CanonicalAnswer> chosen;
  bool correct = false;
  bool fallback_used = false;
  std::optional<std::string> error;
};

struct EvalReport {
  std::map<std::string, Score> per_category;
  Score overall;
  Strategy strategy = Strategy::Majority;
  int N = 1;
  std::vector<std::string> backend_ids;
  std::uint64_t seed = 0;
  std::size_t fallback_count = 0;
  std::vector<QuestionOutcome> outcomes;  // benchmark order
};

/// Draws N samples per question from `reasoner`, selects with the strategy
/// (`selector` is the verifier or judge and may be null for majority), and
/// scores against the golden answer. A failing question counts as incorrect
/// with its error recorded; it is never dropped. Questions without a
/// category are reported under "uncategorized".
EvalReport evaluate(const std::vector<corpus::Question>& benchmark, backend::Backend& reasoner,
                    backend::Backend* selector, const EvalConfig& cfg,
                    const answers::Extractor& extractor);

/// Summary without per-question outcomes.
json to_json(const EvalReport& r);
json outcome_json(const QuestionOutcome& o);

/// Aligned plain-text table: category, correct, total, accuracy (percent).
std::string render_table(const EvalReport& r);
/// The same rows as comma-separated values with a header line.
std::string render_csv(const EvalReport& r);

/// Writes eval_report.json, eval_table.txt, eval_table.csv and
/// eval_outcomes.jsonl; returns their paths.
std::vector<std::filesystem::path> write_report(const EvalReport& r,
                                                const std::filesystem::path& out_dir);

/// Outcome-judging item: a fixed solution and whether it is right.
struct JudgeItem {
  corpus::Question question;
  std::string solution;
  bool solution_correct = false;
};

void to_json(json& j, const JudgeItem& item);
void from_json(const json& j, JudgeItem& item);

/// Agreement of parsed verdicts with the labels. Positive class = correct.
/// An Unparseable verdict counts as a disagreement and never as a positive.
struct JudgingReport {
  std::size_t total = 0;
  std::size_t agree = 0;
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
  std::size_t true_neg = 0;
  std::size_t unparseable = 0;

  double accuracy() const noexcept;
  double precision() const noexcept;
  double recall() const noexcept;
  double f1() const noexcept;
};

json to_json(const JudgingReport& r);

JudgingReport evaluate_judging(const std::vector<JudgeItem>& items, backend::Backend& judge,
                               const verisynth::VerifyPromptTemplate& tmpl,
                               const verisynth::VerifyOptions& opts,
                               const answers::Extractor& extractor, int parallelism = 4);

}  // namespace vsynth::select
