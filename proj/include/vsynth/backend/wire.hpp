#pragma once

#include <string>
#include <string_view>

#include "vsynth/backend/types.hpp"

namespace vsynth::backend {

/// Chat-completions request body with sorted keys.
///
/// Messages carry `role` and `content`. A message with an image_ref gets a
/// content array of a text part and an `image_url` part: local paths (plain
/// or file://) are inlined as base64 data URIs, http(s) and data URIs pass
/// through. Decoding fields map to max_tokens, temperature, top_k,
/// repetition_penalty and n; a seed is sent as seed + sample_offset.
/// Throws ImageReadFailure.
std::string render_wire(const GenerationRequest& req, std::string_view model_name);

/// Image reference as sent on the wire: URL passthrough or data URI.
std::string image_url_for(std::string_view image_ref);

std::string base64_encode(std::string_view bytes);

/// Extracts choices[*].message.content and usage from a response body.
/// Throws BackendFailure on a malformed body.
GenerationResponse parse_wire_response(std::string_view body);

}  // namespace vsynth::backend
