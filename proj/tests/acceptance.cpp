// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "vsynth/answers/golden.hpp"
#include "vsynth/answers/verdict.hpp"
#include "vsynth/backend/wire.hpp"
#include "vsynth/cli/commands.hpp"
#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/parallel.hpp"
#include "vsynth/common/random.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/corpus/pool.hpp"
#include "vsynth/select/select.hpp"
#include "vsynth/select/simulate.hpp"
#include "vsynth/treesearch/search.hpp"
#include "vsynth/verisynth/clean.hpp"

using namespace vsynth;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kSigmas = 3.0;
constexpr double kCleanBudgetS = 1.0;
constexpr double kSelectionBudgetS = 10.0;
constexpr double kSimulationBudgetS = 30.0;
constexpr double kTreeBudgetS = 10.0;
constexpr double kRewardBudgetS = 10.0;
constexpr double kPipelineBudgetS = 60.0;
constexpr double kPoolBudgetS = 5.0;
constexpr double kNaiveBudgetS = 300.0;
constexpr double kVerdictBudgetS = 10.0;
constexpr double kRewardBand = 0.0435;  // 3 sigma of a 1000-draw binomial at p = 0.3
constexpr double kPercentTolerance = 0.005;
constexpr double kNaiveMaxAbsZ = 3.0;
constexpr double kSearchMarginPoints = 10.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. Cleaning filter against a brute-force filter.

Outcome cleaning_filter() {
  Rng rng(101);
  std::vector<corpus::Question> qs;
  std::vector<corpus::Candidate> cands;
  std::vector<corpus::VerificationRecord> recs;
  std::set<std::tuple<std::string, int, int>> expected;
  for (int q = 0; q < 100; ++q) {
    qs.push_back(testkit::question("q" + std::to_string(q), std::to_string(q + 1)));
    for (int i = 0; i < 10; ++i) {
      const auto kind = rng.below(3);  // 0 match, 1 mismatch, 2 no answer
      corpus::Candidate c;
      c.question_id = qs.back().id;
      c.index = i;
      c.reasoning_text = kind == 0   ? "So the answer is " + qs.back().golden_answer + "."
                         : kind == 1 ? "So the answer is " + std::to_string(q + 500) + "."
                                     : "No conclusion reached.";
      cands.push_back(c);
      corpus::VerificationRecord v;
      v.question_id = c.question_id;
      v.candidate_index = i;
      v.verdict = static_cast<answers::Verdict>(rng.below(3));
      recs.push_back(v);
      if (kind == 0 && v.verdict == answers::Verdict::Correct) expected.insert({c.question_id, i, 1});
      if (kind == 1 && v.verdict == answers::Verdict::Incorrect) expected.insert({c.question_id, i, 2});
    }
  }
  const auto kept = verisynth::clean_stage1(qs, cands, recs, answers::Extractor(), answers::kDefaultTolerance);
  std::set<std::tuple<std::string, int, int>> got;
  for (const auto& k : kept) {
    got.insert({k.question.id, k.candidate.index, k.condition == corpus::Condition::Cond1 ? 1 : 2});
  }
  std::size_t mismatches = 0;
  for (const auto& e : expected) mismatches += got.count(e) ? 0 : 1;
  for (const auto& g : got) mismatches += expected.count(g) ? 0 : 1;
  return {mismatches == 0 && kept.size() == got.size(),
          std::to_string(recs.size()) + " triples, " + std::to_string(got.size()) + " kept, " +
              std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------
// 2. Selection against exhaustive enumeration.

Outcome selection_oracle() {
  auto verifier = testkit::scripted({testkit::contains("#ok#", {"The answer is correct."}),
                                     testkit::contains("", {"The answer is not correct."})});
  const verisynth::VerifyPromptTemplate tmpl;
  const answers::Extractor ex;
  std::size_t configs = 0, mismatches = 0;
  for (int n = 1; n <= 5; ++n) {
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 4;  // three answers or none
    for (int code = 0; code < total; ++code) {
      std::vector<int> values;
      for (int i = 0, rest = code; i < n; ++i, rest /= 4) values.push_back(rest % 4 - 1);
      for (int mask = 0; mask < (1 << n); ++mask) {
        select::RolloutSet set{testkit::question("q", "0"), {}};
        std::vector<bool> accepted;
        for (int i = 0; i < n; ++i) {
          accepted.push_back((mask >> i) & 1);
          corpus::Candidate c;
          c.question_id = "q";
          c.index = i;
          // No digits here, so a missing answer stays missing after extraction.
          c.reasoning_text = accepted.back() ? "Candidate #ok#" : "Candidate #no#";
          if (values[i] >= 0) c.extracted_answer = answers::CanonicalAnswer::numeric(values[i]);
          set.candidates.push_back(std::move(c));
        }
        auto as_int = [](const select::SelectionResult& r) -> std::optional<int> {
          if (!r.chosen_answer) return std::nullopt;
          return static_cast<int>(*r.chosen_answer->numeric_value());
        };
        ++configs;
        if (as_int(select::majority_vote(set.candidates, ex, 1e-6)) != testkit::plurality_oracle(values)) {
          ++mismatches;
        }
        if (as_int(select::verifier_select(set, *verifier, tmpl, ex, 1e-6)) !=
            testkit::verifier_oracle(values, accepted)) {
          ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(configs) + " configurations, " + std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------
// 3. Perfect verifier closed form.

bool within(double est, double target, std::uint64_t trials, std::string& detail, const std::string& name) {
  const double sigma = std::sqrt(target * (1 - target) / static_cast<double>(trials));
  const bool ok = std::abs(est - target) <= kSigmas * sigma;
  detail += name + " " + fmt(est, 5) + " vs " + fmt(target, 5) + " (3s=" + fmt(kSigmas * sigma, 5) + ")" +
            (ok ? "" : " OUT") + "; ";
  return ok;
}

Outcome perfect_verifier() {
  select::SimulationParams p;
  p.p_correct = 0.6;
  p.tpr = 1.0;
  p.fpr = 0.0;
  p.N = 8;
  p.trials = 100000;
  p.seed = 0;
  std::string detail;
  const auto r8 = select::simulate_selection(p);
  bool ok = within(r8.verifier.accuracy, 1 - std::pow(0.4, 8), p.trials, detail, "N=8 verifier");
  p.N = 1;
  const auto r1 = select::simulate_selection(p);
  ok = within(r1.single.accuracy, 0.6, p.trials, detail, "N=1 single") && ok;
  ok = within(r1.majority.accuracy, 0.6, p.trials, detail, "N=1 majority") && ok;
  ok = within(r1.verifier.accuracy, 0.6, p.trials, detail, "N=1 verifier") && ok;
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 4. Noisy verifier against exact enumeration.

Outcome noisy_verifier() {
  select::SimulationParams p;
  p.p_correct = 0.6;
  p.wrong_alphabet_size = 3;
  p.tpr = 0.9;
  p.fpr = 0.2;
  p.N = 4;
  p.trials = 100000;
  p.seed = 77;
  const auto r = select::simulate_selection(p);
  const auto exact = testkit::exact_selection_accuracy(p.p_correct, p.wrong_alphabet_size, p.tpr, p.fpr, p.N);
  std::string detail;
  bool ok = within(r.verifier.accuracy, exact.verifier, p.trials, detail, "verifier");
  ok = within(r.majority.accuracy, exact.majority, p.trials, detail, "majority") && ok;
  ok = within(r.single.accuracy, exact.single, p.trials, detail, "single") && ok;
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 5. Tree-search invariants.

Outcome tree_invariants() {
  using namespace treesearch;
  Rng rng(55);
  auto backend = testkit::scripted({testkit::contains(
      "", {"Draw the height.", "The answer is 4.", "Split the figure.\n\nThe answer is 5.", "The answer is 6.",
           "Use the area formula.", "The answer is 4."},
      true)});
  const auto q = testkit::question("tree", "4");
  answers::Extractor ex;
  std::size_t violations = 0, iterations = 0;
  for (int schedule = 0; schedule < 200; ++schedule) {
    SearchConfig cfg;
    cfg.k = 1 + static_cast<int>(rng.below(3));
    cfg.l = 1 + static_cast<int>(rng.below(6));
    cfg.max_depth = 2 + static_cast<int>(rng.below(4));
    cfg.uct_c = rng.uniform() * 2;
    cfg.seed = rng.next();
    cfg.independent_calls = rng.bernoulli(0.5);
    SearchSession s(*backend, q, cfg, [&](const Tree& t, NodeId id) {
      return simulate_reward(*backend, q, t, id, cfg, ex);
    });
    const int steps = 1 + static_cast<int>(rng.below(30));
    for (int i = 0; i < steps; ++i) {
      s.iterate();
      ++iterations;
      const auto& t = s.tree();
      for (NodeId id = 0; id < t.size(); ++id) {
        const auto& n = t.node(id);
        int child_visits = 0;
        for (auto c : n.children) child_visits += t.node(c).visits;
        if (n.visits != child_visits + n.self_evaluations) ++violations;
        if (n.cached_reward) {
          const double r = *n.cached_reward;
          const double scaled = r * cfg.l;
          if (r < 0 || r > 1 || std::abs(scaled - std::round(scaled)) > 1e-9) ++violations;
        }
      }
      if (t.node(Tree::root()).visits != s.reward_evaluations()) ++violations;
    }
  }

  // uct_c = 0 is greedy argmax with index tie-break.
  std::size_t greedy_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Tree t;
    const int kids = 1 + static_cast<int>(rng.below(5));
    std::vector<double> qv;
    for (int i = 0; i < kids; ++i) {
      const auto c = t.add_child(Tree::root(), "s", false);
      const double v = static_cast<double>(rng.below(4)) / 4;
      backpropagate(t, c, v);
      qv.push_back(v);
    }
    const auto best = static_cast<std::size_t>(std::max_element(qv.begin(), qv.end()) - qv.begin());
    if (uct_select(t, Tree::root(), 0.0) != t.node(Tree::root()).children[best]) ++greedy_bad;
  }

  // Q=0.5,N=10 against Q=0.4,N=1 under parent N=11.
  Tree t;
  const auto a = t.add_child(Tree::root(), "a", false);
  const auto b = t.add_child(Tree::root(), "b", false);
  for (int i = 0; i < 10; ++i) backpropagate(t, a, 0.5);
  backpropagate(t, b, 0.4);
  const bool hand = t.node(Tree::root()).visits == 11 && uct_select(t, Tree::root(), 1.414) == b &&
                    t.node(Tree::root()).children[1] == b;

  return {violations == 0 && greedy_bad == 0 && hand,
          std::to_string(iterations) + " iterations over 200 schedules, " + std::to_string(violations) +
              " invariant violations, " + std::to_string(greedy_bad) + " greedy mismatches, hand example " +
              (hand ? "index 1" : "WRONG")};
}

// ---------------------------------------------------------------------------
// 6. Binomial reward concentration.

Outcome reward_concentration() {
  auto backend = testkit::stochastic(0.3, 1.0, 0.0, 606);
  treesearch::SearchConfig cfg;
  cfg.l = 1000;
  cfg.mock_headers = true;
  cfg.seed = 6;
  treesearch::Tree t;
  const double r = treesearch::simulate_reward(*backend, testkit::question("conc", "12"), t,
                                               treesearch::Tree::root(), cfg, answers::Extractor());
  return {std::abs(r - 0.3) <= kRewardBand, "reward " + fmt(r) + ", band 0.3 +/- " + fmt(kRewardBand)};
}

// ---------------------------------------------------------------------------
// 7. End-to-end determinism through the command line.

struct CliRun {
  int code;
  std::string err;
};

CliRun cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err, {});
  return {code, err.str()};
}

std::optional<std::map<std::string, std::string>> pipeline_once(const fs::path& root) {
  fs::create_directories(root);
  std::vector<corpus::Question> geo, tab;
  for (int i = 0; i < 15; ++i) geo.push_back(testkit::question("g" + std::to_string(i), std::to_string(i + 3)));
  for (int i = 0; i < 10; ++i) tab.push_back(testkit::question("t" + std::to_string(i), std::to_string(2 * i + 1)));
  corpus::write_records(root / "geo.jsonl", geo);
  corpus::write_records(root / "tab.jsonl", tab);
  auto mock = [](double p, int seed) {
    return json{{"kind", "stochastic"},
                {"profile", {{"p_correct", p}, {"seed", seed}, {"verify_tpr", 0.9}, {"verify_fpr", 0.15}}}};
  };
  const json cfg = {{"seed", 13},
                    {"test", {{"mock_headers", true}}},
                    {"backends", {{"reasoner", mock(0.55, 1)}, {"verifier", mock(0.5, 2)}}},
                    {"pool", {{"counts", {{"Geometry3K", 12}, {"TabMWP", 8}}}}},
                    {"search", {{"k", 3}, {"l", 4}, {"n", 6}, {"iterations", 20}, {"max_depth", 6}}},
                    {"eval", {{"N", 6}}}};
  write_text_file(root / "config.json", cfg.dump(2));
  const std::string c = (root / "config.json").string();
  const std::vector<std::vector<std::string>> steps = {
      {"--config", c, "--out", (root / "pool").string(), "pool", "--source", "Geometry3K=" + (root / "geo.jsonl").string(),
       "--source", "TabMWP=" + (root / "tab.jsonl").string()},
      {"--config", c, "--out", (root / "synth").string(), "synth-tree", "--pool", (root / "pool" / "pool.jsonl").string()},
      {"--config", c, "--out", (root / "verify").string(), "verify-gen", "--pool", (root / "pool" / "pool.jsonl").string(),
       "--rollouts", (root / "synth" / "rollouts.jsonl").string()},
      {"--config", c, "--out", (root / "eval").string(), "eval", "--bench", (root / "pool" / "pool.jsonl").string(),
       "--strategy", "verifier"},
  };
  std::map<std::string, std::string> digests;
  for (const auto& args : steps) {
    const auto r = cli_run(args);
    if (r.code != 0) {
      std::cerr << r.err;
      return std::nullopt;
    }
    const auto dir = fs::path(args[3]);
    const auto manifest = json::parse(read_text_file(dir / "manifest.json"));
    for (const auto& [name, digest] : manifest.at("output_digests").items()) {
      digests[dir.filename().string() + "/" + name] = digest.get<std::string>();
    }
  }
  return digests;
}

Outcome pipeline_determinism() {
  testkit::TempDir dir;
  const auto a = pipeline_once(dir / "run_a");
  const auto b = pipeline_once(dir / "run_b");
  if (!a || !b) return {false, "a pipeline step failed"};
  const auto questions = read_lines(dir / "run_a" / "pool" / "pool.jsonl").size();
  return {*a == *b && !a->empty() && questions == 20,
          std::to_string(questions) + " questions, " + std::to_string(a->size()) + " output digests, " +
              (*a == *b ? "identical" : "DIFFERENT")};
}

// ---------------------------------------------------------------------------
// 8. Pool fidelity at the published source sizes.

Outcome pool_fidelity() {
  testkit::TempDir dir;
  const std::vector<std::pair<std::string, std::size_t>> sizes = {
      {"Geometry3K", 20226}, {"FigureQA", 10800}, {"GEOS", 882}, {"SuperCLEVR", 14446}, {"TabMWP", 13418}};
  const std::map<std::string, double> ratios = {
      {"Geometry3K", 33.84}, {"FigureQA", 18.07}, {"GEOS", 1.48}, {"SuperCLEVR", 24.17}, {"TabMWP", 22.45}};
  std::map<corpus::Source, fs::path> files;
  corpus::PoolSpec spec;
  spec.seed = 8;
  for (const auto& [name, n] : sizes) {
    std::vector<std::string> lines;
    lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      lines.push_back(canonical_dump({{"id", name + "-" + std::to_string(i)},
                                      {"prompt_text", "Question " + std::to_string(i)},
                                      {"golden_answer", std::to_string(i % 7)},
                                      {"source", name}}));
    }
    const auto path = dir / (name + ".jsonl");
    write_lines(path, lines);
    files[corpus::Source::parse(name)] = path;
    spec.counts[corpus::Source::parse(name)] = n;
  }
  const auto stats = corpus::dataset_stats(corpus::assemble_pool(files, spec));
  bool ok = stats.total == 59772;
  std::string detail = "total " + std::to_string(stats.total) + "; ";
  for (const auto& [name, want] : ratios) {
    const double got = stats.by_source.at(name).percent;
    const bool match = std::abs(got - want) <= kPercentTolerance;
    ok = ok && match;
    detail += name + " " + fmt(got, 2) + "%" + (match ? "" : " (want " + fmt(want, 2) + ")") + "; ";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 9. Naive self-critique search against single samples and verified search.

Outcome naive_mcts() {
  constexpr int kQuestions = 500;
  auto reasoner = testkit::stochastic(0.6, 1.0, 0.0, 909);
  auto verifier = testkit::stochastic(0.6, 1.0, 0.0, 910);
  treesearch::SearchConfig cfg;
  cfg.k = 3;
  cfg.l = 4;
  cfg.n = 8;
  cfg.iterations = 16;
  cfg.max_depth = 6;
  cfg.mock_headers = true;
  cfg.seed = 9;
  const answers::Extractor ex;
  const verisynth::VerifyPromptTemplate tmpl;
  verisynth::VerifyOptions vopts;
  vopts.mock_headers = true;

  std::vector<char> naive(kQuestions), single(kQuestions), searched(kQuestions);
  parallel_for(kQuestions, 4, [&](std::size_t i) {
    const auto q = testkit::question("n" + std::to_string(i), std::to_string(10 + i));
    auto right = [&](const std::optional<answers::CanonicalAnswer>& a) {
      return a && answers::matches_golden(*a, q.golden_answer, std::nullopt, answers::kDefaultTolerance);
    };
    naive[i] = right(treesearch::run_naive_mcts(*reasoner, q, cfg, ex).answer);
    single[i] = right(ex.extract(treesearch::direct_rollouts(*reasoner, q, cfg, ex, 1).front().full_text));
    select::RolloutSet set{q, {}};
    const auto rollouts = treesearch::run_search(*reasoner, q, cfg, ex);
    for (std::size_t j = 0; j < rollouts.size(); ++j) {
      set.candidates.push_back(treesearch::to_candidate(rollouts[j], static_cast<int>(j), reasoner->id(), cfg, ex));
    }
    searched[i] = right(select::verifier_select(set, *verifier, tmpl, ex, answers::kDefaultTolerance, vopts).chosen_answer);
  });
  auto rate = [](const std::vector<char>& v) {
    return static_cast<double>(std::count(v.begin(), v.end(), 1)) / static_cast<double>(v.size());
  };
  const double pn = rate(naive), ps = rate(single), pv = rate(searched);
  const double pooled = (pn + ps) / 2;
  const double z = (pn - ps) / std::sqrt(pooled * (1 - pooled) * 2.0 / kQuestions);
  const bool ok = std::abs(z) < kNaiveMaxAbsZ && (pv - pn) * 100 >= kSearchMarginPoints;
  return {ok, "naive " + fmt(pn, 3) + ", single " + fmt(ps, 3) + ", z " + fmt(z, 2) + ", search+verifier " +
                  fmt(pv, 3) + " (margin " + fmt((pv - pn) * 100, 1) + " points)"};
}

// ---------------------------------------------------------------------------
// 10. Verdict negation, record round trips, wire golden bytes.

Outcome verdict_properties() {
  Rng rng(1010);
  const std::vector<std::string> fillers = {"Step 1 computes the area.", "The angle at B is 30 degrees.",
                                            "Checking the arithmetic:", "We recompute 3 * 4 = 12.",
                                            "The table lists five rows.", "Earlier the answer is correct.",
                                            "", "Line two of the check."};
  const std::vector<std::string> negatives = {"the answer is not correct", "the answer is incorrect",
                                              "verdict: incorrect", "\\boxed{incorrect}"};
  const std::vector<std::string> tails = {"", ".", "!", " .", ".  ", "\n", ".\n\n"};
  std::size_t wrongly_correct = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    const auto lines = rng.below(4);
    for (std::uint64_t l = 0; l < lines; ++l) text += fillers[rng.below(fillers.size())] + "\n";
    std::string marker = negatives[rng.below(negatives.size())];
    for (auto& ch : marker) {
      if (rng.bernoulli(0.3)) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    if (rng.bernoulli(0.5)) text += fillers[rng.below(fillers.size())] + " So ";
    text += marker + tails[rng.below(tails.size())];
    if (answers::parse_verdict(text) == answers::Verdict::Correct) ++wrongly_correct;
  }

  bool round_trip = true;
  for (int i = 0; i < 200; ++i) {
    auto q = testkit::question("rt" + std::to_string(i), std::to_string(i), "Prompt with \"quotes\" and \\ slash");
    if (i % 3 == 0) q.image_ref = "img/" + std::to_string(i) + ".png";
    if (i % 4 == 0) q.choices = std::vector<std::string>{q.golden_answer, "x", "y"};
    if (i % 5 == 0) q.extras["note"] = i;
    const json j = q;
    round_trip = round_trip && j.get<corpus::Question>() == q && json::parse(canonical_dump(j)) == j;
    corpus::Candidate c;
    c.question_id = q.id;
    c.reasoning_text = "Line\nbreak " + std::to_string(i);
    if (i % 2) c.extracted_answer = answers::CanonicalAnswer::numeric(i + 0.5);
    c.index = i;
    round_trip = round_trip && json(c).get<corpus::Candidate>() == c;
    corpus::VerificationRecord v;
    v.question_id = q.id;
    v.candidate_index = i;
    v.verdict = static_cast<answers::Verdict>(i % 3);
    v.verification_text = "text";
    if (i % 2) v.error = "boom";
    round_trip = round_trip && json(v).get<corpus::VerificationRecord>() == v;
  }

  const auto golden = read_text_file(testkit::kFixtures / "wire_text_hi.json");
  const bool wire = backend::render_wire(testkit::text_request("hi"), "test-model") == golden;

  return {wrongly_correct == 0 && round_trip && wire,
          "10000 negated suffixes, " + std::to_string(wrongly_correct) + " parsed correct; round trip " +
              (round_trip ? "ok" : "FAILED") + "; wire golden " + (wire ? "byte-exact" : "DIFFERENT")};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::string name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "cleaning filter equals brute force", kCleanBudgetS, cleaning_filter},
      {2, "selection matches exhaustive enumeration", kSelectionBudgetS, selection_oracle},
      {3, "perfect-verifier closed form", kSimulationBudgetS, perfect_verifier},
      {4, "noisy-verifier enumeration", kSimulationBudgetS, noisy_verifier},
      {5, "tree-search invariants", kTreeBudgetS, tree_invariants},
      {6, "binomial reward concentration", kRewardBudgetS, reward_concentration},
      {7, "end-to-end determinism", kPipelineBudgetS, pipeline_determinism},
      {8, "pool fidelity", kPoolBudgetS, pool_fidelity},
      {9, "naive self-critique search", kNaiveBudgetS, naive_mcts},
      {10, "verdict parser, round trips, wire bytes", kVerdictBudgetS, verdict_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " | " << o.detail
              << " | " << fmt(secs, 2) << " s of " << fmt(c.budget_s, 0) << " s" << (in_time ? "" : " OVER BUDGET")
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
