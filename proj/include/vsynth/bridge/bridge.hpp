#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/common/prompt_template.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::bridge {

/// Slots {description} and {question}.
std::string_view default_bridge_template();

struct BridgeItem {
  corpus::Question question;
  std::string description;
};

/// Item for a mavis_bridge question; the description comes from the
/// question's extension field. Throws InvalidArgument if it is missing.
BridgeItem bridge_item(const corpus::Question& q);

/// Fills the template with the description and the question text. The image
/// reference is never included. Throws InvalidArgument on an empty
/// description, MissingSlot if the template lacks a slot or repeats one.
std::string compose_text_prompt(const BridgeItem& item, std::string_view tmpl);

struct BridgeRecord {
  std::string question_id;
  std::string composed_prompt;
  std::string reasoning_text;
  std::optional<answers::CanonicalAnswer> extracted;
  bool kept = false;
  int attempts = 1;

  bool operator==(const BridgeRecord&) const = default;
};

json to_json(const BridgeRecord& r);
BridgeRecord bridge_record_from_json(const json& j);

struct BridgeStats {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t dropped_wrong = 0;
  std::size_t dropped_unextractable = 0;

  bool operator==(const BridgeStats&) const = default;
};

json to_json(const BridgeStats& s);

struct BridgeConfig {
  std::string tmpl = std::string(default_bridge_template());
  double tolerance = answers::kDefaultTolerance;
  /// Completions tried per item until one is correct. 1 = single shot.
  int max_attempts = 1;
  std::uint64_t seed = 0;
  bool mock_headers = false;
  corpus::SamplerParams decoding;
  int parallelism = 4;
  std::filesystem::path out_dir = ".";
  /// Test hook, as in the verification pipelines.
  std::optional<int> stop_after;

  void validate() const;
};

struct BridgeOutputs {
  std::filesystem::path d_r;    // kept items as training conversations
  std::filesystem::path audit;  // every BridgeRecord
  std::filesystem::path stats_file;
  BridgeStats stats;
  bool complete = true;
};

/// One text completion per item (up to max_attempts), kept iff the extracted
/// answer matches the golden answer. D_r pairs the original question and its
/// image with the kept reasoning. Checkpointed per item under out_dir.
/// Outputs: D_r.jsonl, bridge_records.jsonl, bridge_stats.json.
BridgeOutputs synthesize_bridge(const std::vector<BridgeItem>& items,
                                backend::Backend& text_backend, const BridgeConfig& cfg,
                                const answers::Extractor& extractor);

/// Nested slices of D_r: one file per size under out_dir, named
/// D_r_slice_<size>.jsonl. Each slice is a prefix of one seeded permutation,
/// written in D_r order. Throws SliceTooLarge.
std::vector<std::filesystem::path> scale_slices(const std::filesystem::path& d_r,
                                                const std::vector<std::size_t>& sizes,
                                                std::uint64_t seed,
                                                const std::filesystem::path& out_dir);

}  // namespace vsynth::bridge
