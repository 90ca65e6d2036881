#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vsynth/backend/mock_header.hpp"
#include "vsynth/backend/types.hpp"
#include "vsynth/common/prompt_template.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::treesearch {

/// Slots {question} and {partial}.
std::string_view default_solve_template();
/// Slots {question} and {partial}; the reply should read "Score: s".
std::string_view default_critique_template();

/// Text used for {partial} before any step exists.
inline constexpr std::string_view kEmptyPartial = "(nothing yet)";

/// Copies decoding settings into a request.
void apply_sampler(backend::GenerationRequest& req, const corpus::SamplerParams& params);

struct RequestSpec {
  const PromptTemplate* tmpl = nullptr;
  backend::MockHeader::Task task = backend::MockHeader::Task::Solve;
  bool mock_headers = false;
  corpus::SamplerParams decoding;
  std::uint64_t seed = 0;
};

/// User message from the template (with the question's image attached),
/// preceded by a mock header when enabled.
backend::GenerationRequest build_request(const RequestSpec& spec, const corpus::Question& q,
                                         std::string_view partial);

/// Parses the last "Score: s" in a critique reply, clamped to [0, 1].
std::optional<double> parse_score(std::string_view reply);

}  // namespace vsynth::treesearch
