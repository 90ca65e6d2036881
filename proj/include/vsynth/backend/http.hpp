#pragma once

#include <chrono>
#include <string>

#include "vsynth/backend/backend.hpp"

namespace vsynth::backend {

/// Chat-completions client over HTTP(S).
///
/// Each call makes at most max_retries + 1 attempts. Timeouts, transport
/// errors, 429 and 5xx are retried with exponential backoff plus jitter; any
/// other non-2xx status is terminal. The bearer token is read from the
/// environment variable named by auth_env_var on every attempt.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig cfg);

 protected:
  GenerationResponse do_complete(const GenerationRequest& req) override;

 private:
  std::chrono::milliseconds backoff_delay(int attempt);

  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace vsynth::backend
