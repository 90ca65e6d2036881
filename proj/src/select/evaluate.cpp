#include "vsynth/select/evaluate.hpp"

#include <cstdio>

#include "vsynth/answers/golden.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/parallel.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/treesearch/prompts.hpp"
#include "vsynth/treesearch/search.hpp"

namespace vsynth::select {
namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

json score_json(const Score& s) {
  return {{"correct", s.correct}, {"total", s.total}, {"errors", s.errors}, {"accuracy", s.accuracy()}};
}

std::vector<std::pair<std::string, Score>> rows(const EvalReport& r) {
  std::vector<std::pair<std::string, Score>> out(r.per_category.begin(), r.per_category.end());
  out.emplace_back("overall", r.overall);
  return out;
}

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

EvalConfig::EvalConfig()
    : solve_template(treesearch::default_solve_template()),
      selector_template(verisynth::default_verify_template()) {}

void EvalConfig::validate() const {
  if (N < 1) throw ConfigError("eval.N must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  PromptTemplate(solve_template, {"question", "partial"});
  verisynth::VerifyPromptTemplate{selector_template};
}

EvalReport evaluate(const std::vector<corpus::Question>& benchmark, backend::Backend& reasoner,
                    backend::Backend* selector, const EvalConfig& cfg,
                    const answers::Extractor& extractor) {
  cfg.validate();
  if (cfg.strategy != Strategy::Majority && !selector) {
    throw InvalidArgument(std::string("strategy ") + std::string(to_string(cfg.strategy)) +
                          " needs a selector backend");
  }
  treesearch::SearchConfig sampling;
  sampling.seed = cfg.seed;
  sampling.mock_headers = cfg.mock_headers;
  sampling.independent_calls = cfg.independent_calls;
  sampling.decoding = cfg.decoding;
  sampling.solve_template = cfg.solve_template;
  const verisynth::VerifyPromptTemplate tmpl(cfg.selector_template);
  verisynth::VerifyOptions vopts;
  vopts.mock_headers = cfg.mock_headers;
  vopts.seed = cfg.seed;
  vopts.grammar = cfg.grammar.get();

  std::vector<QuestionOutcome> outcomes(benchmark.size());
  parallel_for(benchmark.size(), static_cast<std::size_t>(cfg.parallelism), [&](std::size_t i) {
    const auto& q = benchmark[i];
    auto& o = outcomes[i];
    o.question_id = q.id;
    o.category = q.category.value_or("uncategorized");
    try {
      RolloutSet set{q, {}};
      const auto rollouts = treesearch::direct_rollouts(reasoner, q, sampling, extractor, cfg.N);
      for (std::size_t j = 0; j < rollouts.size(); ++j) {
        corpus::Candidate c;
        c.question_id = q.id;
        c.reasoning_text = rollouts[j].full_text;
        c.producer = reasoner.id();
        c.index = static_cast<int>(j);
        set.candidates.push_back(std::move(c));
      }
      SelectionResult res;
      switch (cfg.strategy) {
        case Strategy::Majority:
          res = majority_vote(set.candidates, extractor, cfg.tolerance);
          break;
        case Strategy::Verifier:
          res = verifier_select(set, *selector, tmpl, extractor, cfg.tolerance, vopts);
          break;
        case Strategy::Judge:
          res = judge_select(set, *selector, tmpl, extractor, cfg.tolerance, vopts);
          break;
      }
      o.chosen = res.chosen_answer;
      o.fallback_used = res.fallback_used;
      o.correct = o.chosen &&
                  answers::matches_golden(*o.chosen, q.golden_answer, q.choices, cfg.tolerance);
    } catch (const std::exception& e) {
      o.error = e.what();
      o.correct = false;
    }
  });

  EvalReport r;
  r.strategy = cfg.strategy;
  r.N = cfg.N;
  r.seed = cfg.seed;
  r.backend_ids.push_back(reasoner.id());
  if (selector && cfg.strategy != Strategy::Majority) r.backend_ids.push_back(selector->id());
  for (const auto& o : outcomes) {
    auto& cat = r.per_category[o.category];
    for (Score* s : {&cat, &r.overall}) {
      ++s->total;
      if (o.correct) ++s->correct;
      if (o.error) ++s->errors;
    }
    if (o.fallback_used) ++r.fallback_count;
  }
  r.outcomes = std::move(outcomes);
  return r;
}

json to_json(const EvalReport& r) {
  json cats = json::object();
  for (const auto& [k, s] : r.per_category) cats[k] = score_json(s);
  return {{"per_category", cats},
          {"overall", score_json(r.overall)},
          {"strategy", to_string(r.strategy)},
          {"N", r.N},
          {"backend_ids", r.backend_ids},
          {"seed", r.seed},
          {"fallback_count", r.fallback_count}};
}

json outcome_json(const QuestionOutcome& o) {
  json j = {{"question_id", o.question_id},
            {"category", o.category},
            {"correct", o.correct},
            {"fallback_used", o.fallback_used}};
  j["chosen"] = o.chosen ? corpus::answer_to_json(*o.chosen) : json(nullptr);
  if (o.error) j["error"] = *o.error;
  return j;
}

std::string render_table(const EvalReport& r) {
  std::size_t w = std::string("category").size();
  for (const auto& [k, _] : r.per_category) w = std::max(w, k.size());
  auto line = [w](const std::string& a, const std::string& b, const std::string& c,
                  const std::string& d) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-*s  %8s  %8s  %9s\n", static_cast<int>(w), a.c_str(),
                  b.c_str(), c.c_str(), d.c_str());
    return std::string(buf);
  };
  std::string out = line("category", "correct", "total", "accuracy");
  for (const auto& [k, s] : rows(r)) {
    out += line(k, std::to_string(s.correct), std::to_string(s.total), pct(s.accuracy()));
  }
  return out;
}

std::string render_csv(const EvalReport& r) {
  std::string out = "category,correct,total,accuracy\n";
  for (const auto& [k, s] : rows(r)) {
    std::string cell = k;
    if (cell.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : cell) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      cell = quoted + "\"";
    }
    out += cell + "," + std::to_string(s.correct) + "," + std::to_string(s.total) + "," +
           pct(s.accuracy()) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const EvalReport& r,
                                                const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> paths = {out_dir / "eval_report.json",
                                              out_dir / "eval_table.txt",
                                              out_dir / "eval_table.csv",
                                              out_dir / "eval_outcomes.jsonl"};
  write_text_file(paths[0], canonical_dump(to_json(r)) + "\n");
  write_text_file(paths[1], render_table(r));
  write_text_file(paths[2], render_csv(r));
  std::vector<json> lines;
  for (const auto& o : r.outcomes) lines.push_back(outcome_json(o));
  write_jsonl(paths[3], lines);
  return paths;
}

void to_json(json& j, const JudgeItem& item) {
  j = {{"question", item.question},
       {"solution", item.solution},
       {"label", item.solution_correct ? "correct" : "incorrect"}};
}

void from_json(const json& j, JudgeItem& item) {
  try {
    item.question = j.at("question").get<corpus::Question>();
    item.solution = j.at("solution").get<std::string>();
    const auto label = j.at("label").get<std::string>();
    if (label != "correct" && label != "incorrect") {
      throw InvalidArgument("label must be 'correct' or 'incorrect'");
    }
    item.solution_correct = label == "correct";
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad judge item: ") + e.what());
  }
}

double JudgingReport::accuracy() const noexcept { return ratio(agree, total); }
double JudgingReport::precision() const noexcept { return ratio(true_pos, true_pos + false_pos); }
double JudgingReport::recall() const noexcept { return ratio(true_pos, true_pos + false_neg); }
double JudgingReport::f1() const noexcept {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

json to_json(const JudgingReport& r) {
  return {{"total", r.total},           {"agree", r.agree},
          {"true_pos", r.true_pos},     {"false_pos", r.false_pos},
          {"false_neg", r.false_neg},   {"true_neg", r.true_neg},
          {"unparseable", r.unparseable}, {"accuracy", r.accuracy()},
          {"precision", r.precision()}, {"recall", r.recall()},
          {"f1", r.f1()}};
}

JudgingReport evaluate_judging(const std::vector<JudgeItem>& items, backend::Backend& judge,
                               const verisynth::VerifyPromptTemplate& tmpl,
                               const verisynth::VerifyOptions& opts,
                               const answers::Extractor& extractor, int parallelism) {
  std::vector<answers::Verdict> verdicts(items.size(), answers::Verdict::Unparseable);
  parallel_for(items.size(), static_cast<std::size_t>(std::max(parallelism, 1)),
               [&](std::size_t i) {
                 corpus::Candidate c;
                 c.question_id = items[i].question.id;
                 c.reasoning_text = items[i].solution;
                 c.extracted_answer = extractor.extract(items[i].solution);
                 verdicts[i] =
                     verisynth::verify_candidate(judge, tmpl, items[i].question, c, opts).verdict;
               });
  JudgingReport r;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ++r.total;
    const bool label = items[i].solution_correct;
    switch (verdicts[i]) {
      case answers::Verdict::Correct:
        ++(label ? r.true_pos : r.false_pos);
        if (label) ++r.agree;
        break;
      case answers::Verdict::Incorrect:
        ++(label ? r.false_neg : r.true_neg);
        if (!label) ++r.agree;
        break;
      case answers::Verdict::Unparseable:
        ++r.unparseable;
        if (label) ++r.false_neg;
        break;
    }
  }
  return r;
}

}  // namespace vsynth::select
