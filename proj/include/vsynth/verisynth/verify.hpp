#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vsynth/answers/verdict.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/common/prompt_template.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::verisynth {

/// Slots {question} and {solution}.
std::string_view default_verify_template();

class VerifyPromptTemplate {
 public:
  /// Throws MissingSlot unless {question} and {solution} occur once each.
  explicit VerifyPromptTemplate(std::string text = std::string(default_verify_template()),
                                bool image_passthrough = true);

  const PromptTemplate& prompt() const noexcept { return tmpl_; }
  bool image_passthrough() const noexcept { return image_passthrough_; }

  std::string fill(const corpus::Question& q, const corpus::Candidate& c) const;

 private:
  PromptTemplate tmpl_;
  bool image_passthrough_;
};

struct VerifyOptions {
  bool mock_headers = false;
  std::optional<std::uint64_t> seed;
  corpus::SamplerParams decoding;
  /// Extra attempts (at later sample offsets) when the verdict is Unparseable.
  int unparseable_retries = 0;
  /// Defaults to the built-in grammar.
  const answers::VerdictGrammar* grammar = nullptr;
};

/// One verifier call over (question, candidate). A backend failure yields an
/// Unparseable record with `error` set; it is never dropped.
/// Throws InvalidArgument when the candidate belongs to another question.
corpus::VerificationRecord verify_candidate(backend::Backend& verifier,
                                            const VerifyPromptTemplate& tmpl,
                                            const corpus::Question& q,
                                            const corpus::Candidate& c,
                                            const VerifyOptions& opts = {});

}  // namespace vsynth::verisynth
