#include "vsynth/backend/backend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include "vsynth/backend/http.hpp"
#include "vsynth/backend/scripted.hpp"
#include "vsynth/backend/stochastic.hpp"
#include "vsynth/common/error.hpp"

namespace vsynth::backend {

const GenerationResponse& BatchItem::value() const {
  if (!response) {
    if (error) std::rethrow_exception(error);
    throw BackendFailure(error_message.empty() ? "missing response" : error_message);
  }
  return *response;
}

Backend::Backend(BackendConfig cfg)
    : cfg_(std::move(cfg)), slots_(std::clamp(cfg_.max_in_flight, 1, 4096)) {}

GenerationResponse Backend::complete(const GenerationRequest& req) {
  req.validate();
  slots_.acquire();
  struct Release {
    std::counting_semaphore<4096>& s;
    ~Release() { s.release(); }
  } release{slots_};

  const auto start = std::chrono::steady_clock::now();
  GenerationResponse resp = do_complete(req);
  if (resp.samples.size() != static_cast<std::size_t>(req.num_samples)) {
    throw BackendFailure("backend '" + id() + "' returned " + std::to_string(resp.samples.size()) +
                         " samples, expected " + std::to_string(req.num_samples));
  }
  resp.backend_id = id();
  resp.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  if (cfg_.trace_path) trace(req, resp);
  return resp;
}

std::vector<BatchItem> Backend::complete_batch(std::span<const GenerationRequest> reqs) {
  std::vector<BatchItem> out(reqs.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i].response = complete(reqs[i]);
    } catch (const std::exception& e) {
      out[i].error = std::current_exception();
      out[i].error_message = e.what();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(reqs.size(), static_cast<std::size_t>(cfg_.max_in_flight));
  if (workers <= 1) {
    for (std::size_t i = 0; i < reqs.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < reqs.size(); i = next++) run_one(i);
      });
    }
  }
  return out;
}

void Backend::trace(const GenerationRequest& req, const GenerationResponse& resp) {
  json msgs = json::array();
  for (const auto& m : req.messages) {
    json jm = {{"role", to_string(m.role)}, {"text", m.text}};
    if (m.image_ref) jm["image_ref"] = *m.image_ref;
    msgs.push_back(std::move(jm));
  }
  json line = {{"backend", id()},
               {"digest", content_digest(req)},
               {"messages", std::move(msgs)},
               {"num_samples", req.num_samples},
               {"sample_offset", req.sample_offset},
               {"samples", resp.samples}};
  if (req.seed) line["seed"] = *req.seed;
  std::lock_guard lock(trace_mutex_);
  std::ofstream out(*cfg_.trace_path, std::ios::app);
  out << canonical_dump(line) << '\n';
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case BackendConfig::Kind::Http:
      return std::make_shared<HttpBackend>(cfg);
    case BackendConfig::Kind::Scripted:
      return std::make_shared<ScriptedBackend>(cfg);
    case BackendConfig::Kind::Stochastic:
      return std::make_shared<StochasticBackend>(cfg);
  }
  throw ConfigError("unknown backend kind");
}

GenerationResponse complete(const BackendConfig& cfg, const GenerationRequest& req) {
  return make_backend(cfg)->complete(req);
}

std::vector<BatchItem> complete_batch(const BackendConfig& cfg,
                                      std::span<const GenerationRequest> reqs) {
  if (reqs.empty()) throw InvalidArgument("complete_batch needs at least one request");
  return make_backend(cfg)->complete_batch(reqs);
}

}  // namespace vsynth::backend
