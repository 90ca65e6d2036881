#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "vsynth/common/jsonl.hpp"

namespace vsynth::verisynth {

/// Append-only per-item progress file.
///
/// Each line is {"key", "run", "payload"}. Entries written under a different
/// run key (another configuration) are ignored, and an unreadable final line
/// left by an interrupted write is skipped. put() is safe to call from
/// several threads.
class Checkpoint {
 public:
  Checkpoint(std::filesystem::path path, std::string run_key);

  std::optional<json> get(const std::string& key) const;
  void put(const std::string& key, const json& payload);
  std::size_t size() const;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::string run_key_;
  std::map<std::string, json> done_;
  mutable std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace vsynth::verisynth
