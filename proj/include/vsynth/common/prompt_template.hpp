#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vsynth {

/// Prompt text with `{name}` slots.
///
/// Only slots named at construction are recognised; any other braces (LaTeX
/// such as `\boxed{}`) pass through untouched. Substitution is a single pass,
/// so slot-like text inside a value is never expanded again.
class PromptTemplate {
 public:
  /// Throws MissingSlot unless every name occurs exactly once in `text`.
  PromptTemplate(std::string text, std::vector<std::string> slots);

  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& slots() const noexcept { return slots_; }

  /// Throws MissingSlot if a declared slot has no value.
  std::string fill(const std::map<std::string, std::string, std::less<>>& values) const;

  /// Occurrences of `{name}` in text.
  static std::size_t count_slot(std::string_view text, std::string_view name);

 private:
  std::string text_;
  std::vector<std::string> slots_;
};

}  // namespace vsynth
