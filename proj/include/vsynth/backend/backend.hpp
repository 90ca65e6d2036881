#pragma once

#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "vsynth/backend/types.hpp"

namespace vsynth::backend {

/// Outcome of one request inside complete_batch.
struct BatchItem {
  std::optional<GenerationResponse> response;
  std::exception_ptr error;
  std::string error_message;

  bool ok() const noexcept { return response.has_value(); }
  /// The response, or rethrows the captured error.
  const GenerationResponse& value() const;
};

/// A generation endpoint. Instances are shareable across threads; at most
/// max_in_flight calls are outstanding at any instant, however many threads
/// call complete().
class Backend {
 public:
  explicit Backend(BackendConfig cfg);
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const BackendConfig& config() const noexcept { return cfg_; }
  const std::string& id() const noexcept { return cfg_.name; }

  /// Validates `req` and returns exactly req.num_samples texts.
  GenerationResponse complete(const GenerationRequest& req);

  /// Positionally aligned with `reqs`. Per-item failures are captured, never
  /// abort the batch. Results equal sequential complete() calls for mocks.
  std::vector<BatchItem> complete_batch(std::span<const GenerationRequest> reqs);

 protected:
  virtual GenerationResponse do_complete(const GenerationRequest& req) = 0;

 private:
  void trace(const GenerationRequest& req, const GenerationResponse& resp);

  BackendConfig cfg_;
  std::counting_semaphore<4096> slots_;
  std::mutex trace_mutex_;
};

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);

/// One-shot convenience over make_backend(cfg)->complete(req).
GenerationResponse complete(const BackendConfig& cfg, const GenerationRequest& req);

/// One-shot convenience over make_backend(cfg)->complete_batch(reqs).
std::vector<BatchItem> complete_batch(const BackendConfig& cfg,
                                      std::span<const GenerationRequest> reqs);

}  // namespace vsynth::backend
