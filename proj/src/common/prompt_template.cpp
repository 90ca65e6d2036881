#include "vsynth/common/prompt_template.hpp"

#include <algorithm>

#include "vsynth/common/error.hpp"

namespace vsynth {

PromptTemplate::PromptTemplate(std::string text, std::vector<std::string> slots)
    : text_(std::move(text)), slots_(std::move(slots)) {
  for (const auto& name : slots_) {
    const auto n = count_slot(text_, name);
    if (n != 1) {
      throw MissingSlot("template slot {" + name + "} must appear exactly once, found " +
                        std::to_string(n));
    }
  }
}

std::size_t PromptTemplate::count_slot(std::string_view text, std::string_view name) {
  const std::string needle = "{" + std::string(name) + "}";
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string PromptTemplate::fill(
    const std::map<std::string, std::string, std::less<>>& values) const {
  for (const auto& name : slots_) {
    if (!values.contains(name)) throw MissingSlot("no value for slot {" + name + "}");
  }
  std::string out;
  out.reserve(text_.size());
  std::size_t i = 0;
  while (i < text_.size()) {
    if (text_[i] == '{') {
      const auto close = text_.find('}', i + 1);
      if (close != std::string::npos) {
        const std::string_view name(text_.data() + i + 1, close - i - 1);
        if (std::find(slots_.begin(), slots_.end(), name) != slots_.end()) {
          out += values.find(name)->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text_[i]);
    ++i;
  }
  return out;
}

}  // namespace vsynth
