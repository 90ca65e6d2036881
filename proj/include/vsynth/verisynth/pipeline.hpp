#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/corpus/types.hpp"
#include "vsynth/treesearch/prompts.hpp"
#include "vsynth/treesearch/search.hpp"
#include "vsynth/verisynth/verify.hpp"

namespace vsynth::verisynth {

struct Stats {
  std::size_t generated = 0;
  std::size_t verified = 0;  // verifier calls that returned a reply
  std::size_t cond1 = 0;
  std::size_t cond2 = 0;
  std::size_t discarded = 0;

  bool operator==(const Stats&) const = default;
};

json to_json(const Stats& s);

enum class RolloutSource { TreeSearch, DirectSampling, Precomputed };

std::string_view to_string(RolloutSource s);
RolloutSource rollout_source_from_string(std::string_view name);

struct Stage1Config {
  RolloutSource source = RolloutSource::TreeSearch;
  /// Search settings; for direct sampling, search.n samples are drawn.
  treesearch::SearchConfig search;
  /// Candidate records read when source is Precomputed.
  std::optional<std::filesystem::path> rollouts_path;
  std::string verify_template = std::string(default_verify_template());
  bool image_passthrough = true;
  corpus::SamplerParams verifier_decoding;
  int unparseable_retries = 0;
  /// Verdict markers; the built-in grammar when null.
  std::shared_ptr<const answers::VerdictGrammar> grammar;
  double tolerance = answers::kDefaultTolerance;
  std::uint64_t seed = 0;
  bool mock_headers = false;
  int parallelism = 4;
  std::filesystem::path out_dir = ".";
  /// Per-question search traces are written here when set.
  std::optional<std::filesystem::path> trace_dir;
  /// Test hook: process at most this many new questions, then stop as if
  /// interrupted.
  std::optional<int> stop_after;

  void validate() const;
};

struct Stage1Backends {
  std::shared_ptr<backend::Backend> reasoner;
  std::shared_ptr<backend::Backend> verifier;
};

struct PipelineOutputs {
  std::filesystem::path candidates;     // all candidates
  std::filesystem::path verifications;  // D_v: every record, discard_reason on rejects
  std::filesystem::path clean;          // D_clean: CleanExample records
  std::filesystem::path sft;            // conversation records of D_clean
  std::filesystem::path stats_file;
  Stats stats;
  /// False when stop_after interrupted the run; no outputs are written then.
  bool complete = true;
};

/// Candidates per question, verification of each, cleaning, and output.
/// Progress is checkpointed per question under out_dir, so a rerun with the
/// same configuration resumes. Outputs: candidates.jsonl, D_v.jsonl,
/// D_clean.jsonl, D_clean_sft.jsonl, stats.json.
PipelineOutputs run_stage1(const std::vector<corpus::Question>& pool,
                           const Stage1Backends& backends, const Stage1Config& cfg,
                           const answers::Extractor& extractor);

struct Stage2Config {
  int samples_per_question = 8;
  backend::BackendConfig reasoner;
  backend::BackendConfig verifier;
  double tolerance = answers::kDefaultTolerance;
  /// Compare the raw extracted span with the golden string instead of
  /// canonical answers.
  bool raw_exact_match = false;
  std::uint64_t seed = 0;
  bool mock_headers = false;
  bool independent_calls = true;
  corpus::SamplerParams decoding;
  corpus::SamplerParams verifier_decoding;
  std::shared_ptr<const answers::VerdictGrammar> grammar;
  std::string solve_template = std::string(treesearch::default_solve_template());
  std::string verify_template = std::string(default_verify_template());
  int parallelism = 4;
  std::filesystem::path out_dir = ".";
  std::optional<int> stop_after;

  void validate() const;
};

/// Samples solutions, verifies them with the stage-1 verifier, keeps the
/// records whose verdict agrees with the answer match. Outputs use the
/// stage2_ prefix: stage2_candidates.jsonl, stage2_D_v.jsonl,
/// stage2_clean.jsonl, stage2_sft.jsonl, stage2_stats.json.
PipelineOutputs run_stage2(const std::vector<corpus::Question>& questions,
                           const Stage2Config& cfg, const answers::Extractor& extractor);

/// Same, with caller-owned backends (cfg.reasoner / cfg.verifier unused).
PipelineOutputs run_stage2(const std::vector<corpus::Question>& questions,
                           const Stage2Config& cfg, const answers::Extractor& extractor,
                           const Stage1Backends& backends);

}  // namespace vsynth::verisynth
