#include "vsynth/backend/wire.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "vsynth/common/error.hpp"

namespace vsynth::backend {
namespace {

bool has_prefix(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::string mime_for(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
  return httplib::detail::base64_encode(std::string(bytes));
}

std::string image_url_for(std::string_view image_ref) {
  if (has_prefix(image_ref, "http://") || has_prefix(image_ref, "https://") ||
      has_prefix(image_ref, "data:")) {
    return std::string(image_ref);
  }
  std::string_view path = image_ref;
  if (has_prefix(path, "file://")) path.remove_prefix(7);
  std::string bytes;
  try {
    bytes = read_text_file(std::filesystem::path(path));
  } catch (const Error&) {
    throw ImageReadFailure(std::string(path));
  }
  return "data:" + mime_for(std::filesystem::path(path)) + ";base64," + base64_encode(bytes);
}

std::string render_wire(const GenerationRequest& req, std::string_view model_name) {
  json messages = json::array();
  for (const auto& m : req.messages) {
    json content;
    if (m.image_ref) {
      content = json::array({json{{"type", "text"}, {"text", m.text}},
                             json{{"type", "image_url"},
                                  {"image_url", {{"url", image_url_for(*m.image_ref)}}}}});
    } else {
      content = m.text;
    }
    messages.push_back({{"role", to_string(m.role)}, {"content", std::move(content)}});
  }
  json body = {{"model", model_name},
               {"messages", std::move(messages)},
               {"max_tokens", req.max_new_tokens},
               {"temperature", req.temperature},
               {"top_k", req.top_k},
               {"repetition_penalty", req.repetition_penalty},
               {"n", req.num_samples}};
  if (req.seed) body["seed"] = *req.seed + static_cast<std::uint64_t>(req.sample_offset);
  return canonical_dump(body);
}

GenerationResponse parse_wire_response(std::string_view body) {
  GenerationResponse resp;
  try {
    const json j = json::parse(body);
    for (const auto& choice : j.at("choices")) {
      const auto& content = choice.at("message").at("content");
      if (content.is_string()) {
        resp.samples.push_back(content.get<std::string>());
      } else if (content.is_array()) {
        std::string text;
        for (const auto& part : content) {
          if (part.value("type", "") == "text") text += part.value("text", "");
        }
        resp.samples.push_back(std::move(text));
      } else if (content.is_null()) {
        resp.samples.emplace_back();
      } else {
        throw BackendFailure("unsupported message content type");
      }
    }
    if (j.contains("usage") && j.at("usage").is_object()) {
      const auto& u = j.at("usage");
      resp.usage = Usage{u.value("prompt_tokens", std::int64_t{0}),
                         u.value("completion_tokens", std::int64_t{0})};
    }
  } catch (const json::exception& e) {
    throw BackendFailure(std::string("malformed response body: ") + e.what());
  }
  return resp;
}

}  // namespace vsynth::backend
