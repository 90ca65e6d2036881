#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/answers/canonical.hpp"
#include "vsynth/answers/verdict.hpp"
#include "vsynth/common/jsonl.hpp"

namespace vsynth::corpus {

/// Dataset a question was drawn from. Known tags have fixed spellings;
/// anything else is carried verbatim as Other.
class Source {
 public:
  enum class Kind { Geometry3K, FigureQA, GEOS, SuperCLEVR, TabMWP, MAVISGeo, Other };

  Source() : Source(Kind::Other, "unknown") {}
  explicit Source(Kind kind);
  static Source other(std::string name);
  /// Known names match case-insensitively, ignoring '-' and '_'
  /// ("Super-CLEVR", "mavis_geo"). Throws InvalidArgument on an empty name.
  static Source parse(std::string_view name);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  bool operator==(const Source& o) const { return name_ == o.name_; }
  auto operator<=>(const Source& o) const { return name_ <=> o.name_; }

 private:
  Source(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  Kind kind_;
  std::string name_;
};

/// Extension key carrying a MAVIS diagram description on a Question.
inline constexpr std::string_view kDiagramDescriptionKey = "diagram_description";

struct Question {
  std::string id;
  std::string prompt_text;
  std::optional<std::string> image_ref;
  std::string golden_answer;
  std::optional<std::vector<std::string>> choices;
  Source source;
  std::optional<std::string> category;
  /// Unrecognised input keys, written back unchanged.
  json extras = json::object();

  std::optional<std::string> diagram_description() const;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;

  bool operator==(const Question&) const = default;
};

/// Question text with its lettered choices appended, as shown to models.
std::string render_question(const Question& q);

struct SamplerParams {
  int max_new_tokens = 4096;
  double temperature = 0.3;
  int top_k = 5;
  double repetition_penalty = 1.05;
  std::optional<std::uint64_t> seed;

  bool operator==(const SamplerParams&) const = default;
};

struct Candidate {
  std::string question_id;
  std::string reasoning_text;
  std::optional<answers::CanonicalAnswer> extracted_answer;
  std::string producer;
  SamplerParams sampler_params;
  int index = 0;
  json extras = json::object();

  void validate() const;
  bool operator==(const Candidate&) const = default;
};

struct VerificationRecord {
  std::string question_id;
  int candidate_index = 0;
  std::string verification_text;
  answers::Verdict verdict = answers::Verdict::Unparseable;
  std::string verifier;
  /// Set when the verifier call failed; the verdict is then Unparseable.
  std::optional<std::string> error;
  /// Set on records a cleaning filter rejected.
  std::optional<std::string> discard_reason;
  json extras = json::object();

  bool operator==(const VerificationRecord&) const = default;
};

enum class Condition { Cond1, Cond2 };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view name);

struct CleanExample {
  Question question;
  Candidate candidate;
  VerificationRecord verification;
  Condition condition = Condition::Cond1;

  bool operator==(const CleanExample&) const = default;
};

struct PoolSpec {
  std::map<Source, std::size_t> counts;
  std::uint64_t seed = 0;
};

json answer_to_json(const answers::CanonicalAnswer& a);
answers::CanonicalAnswer answer_from_json(const json& j);

// nlohmann conversions. from_json throws InvalidArgument on schema errors.
void to_json(json& j, const Question& q);
void from_json(const json& j, Question& q);
void to_json(json& j, const SamplerParams& p);
void from_json(const json& j, SamplerParams& p);
void to_json(json& j, const Candidate& c);
void from_json(const json& j, Candidate& c);
void to_json(json& j, const VerificationRecord& v);
void from_json(const json& j, VerificationRecord& v);
void to_json(json& j, const CleanExample& e);
void from_json(const json& j, CleanExample& e);

}  // namespace vsynth::corpus
