#include "vsynth/verisynth/pipeline.hpp"

#include <fstream>
#include <map>
#include <unordered_set>

#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/parallel.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/corpus/sft.hpp"
#include "vsynth/verisynth/checkpoint.hpp"
#include "vsynth/verisynth/clean.hpp"

namespace vsynth::verisynth {
namespace {

namespace fs = std::filesystem;
using corpus::Candidate;
using corpus::Question;
using corpus::VerificationRecord;

struct Engine {
  std::string prefix;
  std::function<std::vector<Candidate>(const Question&)> generate;
  backend::Backend* verifier = nullptr;
  const VerifyPromptTemplate* tmpl = nullptr;
  VerifyOptions verify;
  MatchFn match;
  int parallelism = 1;
  fs::path out_dir;
  std::optional<int> stop_after;
  std::string run_key;
};

json search_json(const treesearch::SearchConfig& s) {
  return {{"k", s.k},
          {"l", s.l},
          {"n", s.n},
          {"max_depth", s.max_depth},
          {"uct_c", s.uct_c},
          {"iterations", s.iterations},
          {"step_delimiter", treesearch::to_string(s.step_delimiter)},
          {"seed", s.seed},
          {"independent_calls", s.independent_calls},
          {"simulation_failures_fatal", s.simulation_failures_fatal},
          {"mock_headers", s.mock_headers},
          {"decoding", s.decoding},
          {"solve_template", s.solve_template},
          {"critique_template", s.critique_template}};
}

PipelineOutputs run_engine(const std::vector<Question>& questions, const Engine& e) {
  if (questions.empty()) throw InvalidArgument("pipeline: no questions");
  std::unordered_set<std::string> ids;
  for (const auto& q : questions) {
    if (!ids.insert(q.id).second) throw DuplicateId(q.id);
  }
  if (!fs::is_directory(e.out_dir)) {
    throw IoFailure("output directory does not exist: " + e.out_dir.string());
  }

  Checkpoint ckpt(e.out_dir / (e.prefix + "checkpoint.jsonl"), e.run_key);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (!ckpt.get(questions[i].id)) pending.push_back(i);
  }
  bool interrupted = false;
  if (e.stop_after && pending.size() > static_cast<std::size_t>(*e.stop_after)) {
    pending.resize(static_cast<std::size_t>(std::max(*e.stop_after, 0)));
    interrupted = true;
  }

  parallel_for(pending.size(), static_cast<std::size_t>(e.parallelism), [&](std::size_t i) {
    const auto& q = questions[pending[i]];
    json cands = json::array();
    json recs = json::array();
    for (const auto& c : e.generate(q)) {
      recs.push_back(verify_candidate(*e.verifier, *e.tmpl, q, c, e.verify));
      cands.push_back(c);
    }
    ckpt.put(q.id, {{"candidates", cands}, {"records", recs}});
  });

  PipelineOutputs out;
  out.candidates = e.out_dir / (e.prefix + "candidates.jsonl");
  out.verifications = e.out_dir / (e.prefix + "D_v.jsonl");
  out.clean = e.out_dir / (e.prefix + "D_clean.jsonl");
  out.sft = e.out_dir / (e.prefix + "D_clean_sft.jsonl");
  out.stats_file = e.out_dir / (e.prefix + "stats.json");
  if (interrupted) {
    out.complete = false;
    return out;
  }

  std::vector<Candidate> candidates;
  std::vector<VerificationRecord> records;
  for (const auto& q : questions) {
    const auto done = ckpt.get(q.id);
    for (const auto& c : done->at("candidates")) candidates.push_back(c.get<Candidate>());
    for (const auto& r : done->at("records")) records.push_back(r.get<VerificationRecord>());
  }
  const auto cleaned = clean_records(questions, candidates, records, e.match);

  out.stats.generated = candidates.size();
  for (const auto& r : records) {
    if (!r.error) ++out.stats.verified;
  }
  for (const auto& k : cleaned.kept) {
    ++(k.condition == corpus::Condition::Cond1 ? out.stats.cond1 : out.stats.cond2);
  }
  out.stats.discarded = out.stats.generated - cleaned.kept.size();

  corpus::write_records(out.candidates, candidates);
  corpus::write_records(out.verifications, cleaned.annotated);
  corpus::write_records(out.clean, cleaned.kept);
  if (cleaned.kept.empty()) {
    write_text_file(out.sft, "");
  } else {
    corpus::emit_sft_dataset(cleaned.kept, out.sft, &e.tmpl->prompt());
  }
  write_text_file(out.stats_file, canonical_dump(to_json(out.stats)) + "\n");
  return out;
}

std::vector<Candidate> from_rollouts(const std::vector<treesearch::Rollout>& rollouts,
                                     const std::string& producer,
                                     const treesearch::SearchConfig& cfg,
                                     const answers::Extractor& extractor) {
  std::vector<Candidate> out;
  for (const auto& r : rollouts) {
    if (r.full_text.empty()) continue;
    out.push_back(treesearch::to_candidate(r, static_cast<int>(out.size()), producer, cfg,
                                           extractor));
  }
  return out;
}

}  // namespace

json to_json(const Stats& s) {
  return {{"generated", s.generated},
          {"verified", s.verified},
          {"cond1", s.cond1},
          {"cond2", s.cond2},
          {"discarded", s.discarded}};
}

std::string_view to_string(RolloutSource s) {
  switch (s) {
    case RolloutSource::TreeSearch:
      return "tree_search";
    case RolloutSource::DirectSampling:
      return "direct_sampling";
    case RolloutSource::Precomputed:
      return "precomputed";
  }
  return "tree_search";
}

RolloutSource rollout_source_from_string(std::string_view name) {
  if (name == "tree_search") return RolloutSource::TreeSearch;
  if (name == "direct_sampling") return RolloutSource::DirectSampling;
  if (name == "precomputed") return RolloutSource::Precomputed;
  throw InvalidArgument("unknown rollout source: " + std::string(name));
}

void Stage1Config::validate() const {
  search.validate();
  VerifyPromptTemplate(verify_template, image_passthrough);
  if (source == RolloutSource::Precomputed && !rollouts_path) {
    throw ConfigError("precomputed rollout source needs a rollouts file");
  }
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (unparseable_retries < 0) throw ConfigError("unparseable_retries must be >= 0");
}

PipelineOutputs run_stage1(const std::vector<Question>& pool, const Stage1Backends& backends,
                           const Stage1Config& cfg, const answers::Extractor& extractor) {
  cfg.validate();
  if (!backends.verifier) throw InvalidArgument("run_stage1: verifier backend missing");
  if (cfg.source != RolloutSource::Precomputed && !backends.reasoner) {
    throw InvalidArgument("run_stage1: reasoner backend missing");
  }
  auto search = cfg.search;
  search.mock_headers = search.mock_headers || cfg.mock_headers;

  std::map<std::string, std::vector<Candidate>> precomputed;
  std::string rollouts_digest;
  if (cfg.source == RolloutSource::Precomputed) {
    std::unordered_set<std::string> ids;
    for (const auto& q : pool) ids.insert(q.id);
    for (auto& c : corpus::read_records<Candidate>(*cfg.rollouts_path)) {
      if (!ids.count(c.question_id)) throw JoinFailure(c.question_id);
      if (!c.extracted_answer) c.extracted_answer = extractor.extract(c.reasoning_text);
      precomputed[c.question_id].push_back(std::move(c));
    }
    rollouts_digest = sha256_file_hex(*cfg.rollouts_path);
  }

  const VerifyPromptTemplate tmpl(cfg.verify_template, cfg.image_passthrough);
  Engine e;
  e.prefix = "";
  e.verifier = backends.verifier.get();
  e.tmpl = &tmpl;
  e.verify.mock_headers = cfg.mock_headers;
  e.verify.seed = cfg.seed;
  e.verify.decoding = cfg.verifier_decoding;
  e.verify.unparseable_retries = cfg.unparseable_retries;
  e.verify.grammar = cfg.grammar.get();
  e.match = [&](const Question& q, const Candidate& c) {
    return candidate_matches(q, c, extractor, cfg.tolerance);
  };
  e.parallelism = cfg.parallelism;
  e.out_dir = cfg.out_dir;
  e.stop_after = cfg.stop_after;
  e.run_key = sha256_hex(canonical_dump(
      {{"stage", 1},
       {"source", to_string(cfg.source)},
       {"search", search_json(search)},
       {"rollouts", rollouts_digest},
       {"verify_template", cfg.verify_template},
       {"image_passthrough", cfg.image_passthrough},
       {"verifier_decoding", cfg.verifier_decoding},
       {"unparseable_retries", cfg.unparseable_retries},
       {"tolerance", cfg.tolerance},
       {"seed", cfg.seed},
       {"mock_headers", cfg.mock_headers},
       {"reasoner", backends.reasoner ? backends.reasoner->id() : ""},
       {"verifier", backends.verifier->id()}}));

  e.generate = [&](const Question& q) -> std::vector<Candidate> {
    switch (cfg.source) {
      case RolloutSource::TreeSearch: {
        std::optional<std::ofstream> trace;
        if (cfg.trace_dir) trace.emplace(*cfg.trace_dir / (q.id + ".trace.jsonl"));
        const auto rollouts = treesearch::run_search(*backends.reasoner, q, search, extractor,
                                                     trace ? &*trace : nullptr);
        return from_rollouts(rollouts, backends.reasoner->id(), search, extractor);
      }
      case RolloutSource::DirectSampling:
        return from_rollouts(
            treesearch::direct_rollouts(*backends.reasoner, q, search, extractor, search.n),
            backends.reasoner->id(), search, extractor);
      case RolloutSource::Precomputed: {
        const auto it = precomputed.find(q.id);
        return it == precomputed.end() ? std::vector<Candidate>{} : it->second;
      }
    }
    return {};
  };
  return run_engine(pool, e);
}

void Stage2Config::validate() const {
  if (samples_per_question < 1) throw ConfigError("stage2.samples_per_question must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  PromptTemplate(solve_template, {"question", "partial"});
  VerifyPromptTemplate{verify_template};
}

PipelineOutputs run_stage2(const std::vector<Question>& questions, const Stage2Config& cfg,
                           const answers::Extractor& extractor) {
  cfg.validate();
  return run_stage2(questions, cfg, extractor,
                    {backend::make_backend(cfg.reasoner), backend::make_backend(cfg.verifier)});
}

PipelineOutputs run_stage2(const std::vector<Question>& questions, const Stage2Config& cfg,
                           const answers::Extractor& extractor, const Stage1Backends& backends) {
  cfg.validate();
  if (!backends.reasoner || !backends.verifier) {
    throw InvalidArgument("run_stage2: reasoner and verifier backends are required");
  }
  for (const auto& q : questions) {
    if (q.golden_answer.empty()) throw InvalidArgument("question " + q.id + " has no golden answer");
  }
  treesearch::SearchConfig sampling;
  sampling.n = cfg.samples_per_question;
  sampling.seed = cfg.seed;
  sampling.mock_headers = cfg.mock_headers;
  sampling.independent_calls = cfg.independent_calls;
  sampling.decoding = cfg.decoding;
  sampling.solve_template = cfg.solve_template;

  const VerifyPromptTemplate tmpl(cfg.verify_template);
  Engine e;
  e.prefix = "stage2_";
  e.verifier = backends.verifier.get();
  e.tmpl = &tmpl;
  e.verify.mock_headers = cfg.mock_headers;
  e.verify.seed = cfg.seed;
  e.verify.decoding = cfg.verifier_decoding;
  e.verify.grammar = cfg.grammar.get();
  if (cfg.raw_exact_match) {
    e.match = [&](const Question& q, const Candidate& c) -> std::optional<bool> {
      const auto span = extractor.extract_span(c.reasoning_text);
      if (!span) return std::nullopt;
      const auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos) return std::string_view{};
        return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
      };
      return trim(span->raw) == trim(q.golden_answer);
    };
  } else {
    e.match = [&](const Question& q, const Candidate& c) {
      return candidate_matches(q, c, extractor, cfg.tolerance);
    };
  }
  e.parallelism = cfg.parallelism;
  e.out_dir = cfg.out_dir;
  e.stop_after = cfg.stop_after;
  e.run_key = sha256_hex(canonical_dump({{"stage", 2},
                                         {"sampling", search_json(sampling)},
                                         {"verify_template", cfg.verify_template},
                                         {"verifier_decoding", cfg.verifier_decoding},
                                         {"raw_exact_match", cfg.raw_exact_match},
                                         {"tolerance", cfg.tolerance},
                                         {"reasoner", backends.reasoner->id()},
                                         {"verifier", backends.verifier->id()}}));
  e.generate = [&](const Question& q) {
    return from_rollouts(treesearch::direct_rollouts(*backends.reasoner, q, sampling, extractor,
                                                     sampling.n),
                         backends.reasoner->id(), sampling, extractor);
  };
  return run_engine(questions, e);
}

}  // namespace vsynth::verisynth
