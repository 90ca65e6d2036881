#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vsynth/common/prompt_template.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::corpus {

/// One conversation-style training record.
struct SftRecord {
  std::string id;
  std::string user;
  std::optional<std::string> image_ref;
  std::string assistant;

  bool operator==(const SftRecord&) const = default;
};

/// {"id", "images": [ref...], "messages": [{role, content} x2]}
void to_json(json& j, const SftRecord& r);
void from_json(const json& j, SftRecord& r);

/// User turn for a verification example: the template filled with
/// {question} and {solution} when given, else a plain two-part layout.
std::string verification_user_turn(const Question& q, const Candidate& c,
                                   const PromptTemplate* tmpl = nullptr);

/// Writes one record per example, in order: user = question + candidate
/// solution (+ image), assistant = verification_text. Throws InvalidArgument
/// on an empty input, IoFailure on write errors.
std::size_t emit_sft_dataset(const std::vector<CleanExample>& examples,
                             const std::filesystem::path& path,
                             const PromptTemplate* tmpl = nullptr);

}  // namespace vsynth::corpus
