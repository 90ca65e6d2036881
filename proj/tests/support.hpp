#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "vsynth/backend/backend.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::testkit {

inline const std::filesystem::path kFixtures = VSYNTH_FIXTURES;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vsynth_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline corpus::Question question(std::string id, std::string golden, std::string prompt = "",
                                 std::optional<std::string> category = std::nullopt) {
  corpus::Question q;
  q.id = std::move(id);
  q.prompt_text = prompt.empty() ? "What is the value for " + q.id + "?" : std::move(prompt);
  q.golden_answer = std::move(golden);
  q.source = corpus::Source(corpus::Source::Kind::Geometry3K);
  q.category = std::move(category);
  return q;
}

inline backend::ScriptEntry contains(std::string needle, std::vector<std::string> replies,
                                     bool rotate = false) {
  backend::ScriptEntry e;
  e.contains = std::move(needle);
  e.replies = std::move(replies);
  e.rotate_by_seed = rotate;
  return e;
}

inline std::shared_ptr<backend::Backend> scripted(std::vector<backend::ScriptEntry> entries,
                                                  std::string name = "scripted") {
  backend::BackendConfig cfg;
  cfg.kind = backend::BackendConfig::Kind::Scripted;
  cfg.name = std::move(name);
  cfg.script = std::move(entries);
  cfg.max_in_flight = 8;
  return backend::make_backend(cfg);
}

inline std::shared_ptr<backend::Backend> stochastic(double p_correct, double tpr = 1.0,
                                                    double fpr = 0.0, std::uint64_t seed = 7,
                                                    int alphabet = 3) {
  backend::StochasticProfile p;
  p.p_correct = p_correct;
  p.verify_tpr = tpr;
  p.verify_fpr = fpr;
  p.seed = seed;
  p.wrong_alphabet_size = alphabet;
  auto cfg = backend::make_stochastic(p);
  cfg.max_in_flight = 8;
  return backend::make_backend(cfg);
}

inline backend::GenerationRequest text_request(std::string text, int samples = 1) {
  backend::GenerationRequest req;
  req.messages.push_back({backend::Role::User, std::move(text), std::nullopt});
  req.num_samples = samples;
  return req;
}

}  // namespace vsynth::testkit
