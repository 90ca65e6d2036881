#pragma once

#include <map>
#include <string>
#include <vector>

#include "vsynth/backend/backend.hpp"

namespace vsynth::backend {

/// Replies from a fixed script; see ScriptEntry for matching.
///
/// Sample s of a request receives replies[(sample_offset + s + rot) % size],
/// where rot is the request seed when the entry rotates by seed, else 0.
/// Unmatched requests raise NoScriptEntry.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(BackendConfig cfg);

 protected:
  GenerationResponse do_complete(const GenerationRequest& req) override;

 private:
  std::map<std::string, const ScriptEntry*> by_digest_;
  std::vector<const ScriptEntry*> rules_;
  std::vector<ScriptEntry> entries_;
};

}  // namespace vsynth::backend
