#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "vsynth/answers/canonical.hpp"
#include "vsynth/backend/backend.hpp"

namespace vsynth::answers {

struct ExtractorConfig {
  enum class Mode { RuleBased, ModelBased };

  Mode mode = Mode::RuleBased;
  std::optional<backend::BackendConfig> model_backend;
  /// Must contain a single `{response}` slot.
  std::string extraction_prompt_template;
  double numeric_tolerance = kDefaultTolerance;

  ExtractorConfig();
  void validate() const;
};

std::string_view default_extraction_template();

/// An extracted answer with the raw span it came from.
struct Extraction {
  std::string raw;
  CanonicalAnswer answer;
};

/// Rule-based extraction. In priority order:
///  1. the last \boxed{...} (or \fbox{...});
///  2. the last line with a final-answer cue ("answer is", "final answer:",
///     "answer:"), taking the value that follows the cue;
///  3. an "=" conclusion on the final non-empty line;
///  4. the last standalone number or parenthesized choice letter on the
///     final non-empty line.
/// A boxed answer wins over a conflicting final line.
std::optional<Extraction> extract_rule_based_span(std::string_view reasoning_text);
std::optional<CanonicalAnswer> extract_rule_based(std::string_view reasoning_text);

/// True when the text states a final answer through a boxed marker or an
/// answer cue phrase. Used for terminal detection in tree search.
bool has_final_answer_marker(std::string_view text);

/// Extraction bound to its configuration (and backend, in model mode).
class Extractor {
 public:
  /// Rule-based with default tolerance.
  Extractor();
  /// Builds the model backend from cfg when `backend` is null.
  explicit Extractor(ExtractorConfig cfg, std::shared_ptr<backend::Backend> backend = nullptr);

  const ExtractorConfig& config() const noexcept { return cfg_; }
  double tolerance() const noexcept { return cfg_.numeric_tolerance; }

  /// Absent when no answer can be found. Model mode propagates BackendFailure.
  std::optional<CanonicalAnswer> extract(std::string_view reasoning_text) const;
  std::optional<Extraction> extract_span(std::string_view reasoning_text) const;

 private:
  ExtractorConfig cfg_;
  std::shared_ptr<backend::Backend> backend_;
};

std::optional<CanonicalAnswer> extract_answer(const ExtractorConfig& cfg,
                                              std::string_view reasoning_text);

}  // namespace vsynth::answers
