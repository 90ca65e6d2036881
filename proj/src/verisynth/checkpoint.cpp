#include "vsynth/verisynth/checkpoint.hpp"

#include "vsynth/common/error.hpp"

namespace vsynth::verisynth {

Checkpoint::Checkpoint(std::filesystem::path path, std::string run_key)
    : path_(std::move(path)), run_key_(std::move(run_key)) {
  if (std::ifstream in{path_}) {
    std::string line;
    while (std::getline(in, line)) {
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) continue;
      if (j.value("run", "") != run_key_ || !j.contains("key") || !j.contains("payload")) continue;
      done_[j.at("key").get<std::string>()] = j.at("payload");
    }
  }
  bool torn = false;
  if (std::ifstream tail{path_, std::ios::binary | std::ios::ate}; tail && tail.tellg() > 0) {
    tail.seekg(-1, std::ios::end);
    torn = tail.get() != '\n';
  }
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw IoFailure("cannot open checkpoint " + path_.string());
  if (torn) out_ << '\n';
}

std::optional<json> Checkpoint::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = done_.find(key);
  if (it == done_.end()) return std::nullopt;
  return it->second;
}

void Checkpoint::put(const std::string& key, const json& payload) {
  std::lock_guard lock(mutex_);
  out_ << canonical_dump({{"key", key}, {"run", run_key_}, {"payload", payload}}) << '\n';
  out_.flush();
  if (!out_) throw IoFailure("cannot write checkpoint " + path_.string());
  done_[key] = payload;
}

std::size_t Checkpoint::size() const {
  std::lock_guard lock(mutex_);
  return done_.size();
}

}  // namespace vsynth::verisynth
