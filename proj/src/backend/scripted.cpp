#include "vsynth/backend/scripted.hpp"

#include "vsynth/common/error.hpp"

namespace vsynth::backend {

ScriptedBackend::ScriptedBackend(BackendConfig cfg) : Backend(std::move(cfg)) {
  entries_ = config().script;
  if (config().script_path) {
    auto loaded = load_script(*config().script_path);
    entries_.insert(entries_.end(), loaded.begin(), loaded.end());
  }
  for (const auto& e : entries_) {
    if (e.replies.empty()) throw ConfigError("script entry without replies");
    if (e.digest) {
      by_digest_.emplace(*e.digest, &e);
    } else {
      rules_.push_back(&e);
    }
  }
}

GenerationResponse ScriptedBackend::do_complete(const GenerationRequest& req) {
  const std::string digest = content_digest(req);
  const ScriptEntry* entry = nullptr;
  if (auto it = by_digest_.find(digest); it != by_digest_.end()) {
    entry = it->second;
  } else {
    std::string haystack;
    for (const auto& m : req.messages) {
      haystack += m.text;
      haystack += '\n';
    }
    for (const auto* rule : rules_) {
      if (haystack.find(*rule->contains) != std::string::npos) {
        entry = rule;
        break;
      }
    }
  }
  if (!entry) throw NoScriptEntry(digest);

  const std::size_t size = entry->replies.size();
  const std::uint64_t rot = entry->rotate_by_seed && req.seed ? *req.seed % size : 0;
  GenerationResponse resp;
  for (int s = 0; s < req.num_samples; ++s) {
    const auto idx = (static_cast<std::uint64_t>(req.sample_offset + s) + rot) % size;
    resp.samples.push_back(entry->replies[idx]);
  }
  return resp;
}

}  // namespace vsynth::backend
