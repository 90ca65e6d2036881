#include "vsynth/treesearch/steps.hpp"

#include <cctype>
#include <regex>

#include "vsynth/common/error.hpp"

namespace vsynth::treesearch {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Length of the first step's span within `s` (before trimming).
std::size_t first_span(std::string_view s, StepDelimiter d) {
  switch (d) {
    case StepDelimiter::BlankLine: {
      // A blank line is '\n' followed by optional spaces and another '\n'.
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\n') continue;
        std::size_t j = i + 1;
        while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
        if (j < s.size() && s[j] == '\n') return i;
      }
      return s.size();
    }
    case StepDelimiter::Sentence: {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\n' && i + 1 < s.size() && s[i + 1] == '\n') return i;
        if (s[i] != '.' && s[i] != '?' && s[i] != '!') continue;
        if (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1]))) return i + 1;
      }
      return s.size();
    }
    case StepDelimiter::NumberedStep: {
      static const std::regex kMarker(R"(^\s*(step\s*\d+|\d+[.)])(\s|:|$))", std::regex::icase);
      std::size_t pos = 0;
      bool first = true;
      while (pos < s.size()) {
        const auto nl = s.find('\n', pos);
        const auto line = s.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                     : nl - pos);
        const bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
        if (!blank) {
          if (!first && std::regex_search(line.begin(), line.end(), kMarker)) return pos;
          first = false;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
      }
      return s.size();
    }
  }
  return s.size();
}

}  // namespace

std::string_view to_string(StepDelimiter d) {
  switch (d) {
    case StepDelimiter::BlankLine:
      return "blank_line";
    case StepDelimiter::Sentence:
      return "sentence";
    case StepDelimiter::NumberedStep:
      return "numbered_step";
  }
  return "blank_line";
}

StepDelimiter step_delimiter_from_string(std::string_view name) {
  if (name == "blank_line") return StepDelimiter::BlankLine;
  if (name == "sentence") return StepDelimiter::Sentence;
  if (name == "numbered_step") return StepDelimiter::NumberedStep;
  throw InvalidArgument("unknown step delimiter: " + std::string(name));
}

std::string_view join_separator(StepDelimiter d) {
  switch (d) {
    case StepDelimiter::BlankLine:
      return "\n\n";
    case StepDelimiter::Sentence:
      return " ";
    case StepDelimiter::NumberedStep:
      return "\n";
  }
  return "\n\n";
}

std::string first_step(std::string_view text, StepDelimiter d) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  text.remove_prefix(b);
  return trim(text.substr(0, first_span(text, d)));
}

std::vector<std::string> split_steps(std::string_view text, StepDelimiter d) {
  std::vector<std::string> out;
  while (true) {
    const auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) break;
    text.remove_prefix(b);
    const auto span = first_span(text, d);
    if (auto step = trim(text.substr(0, span)); !step.empty()) out.push_back(std::move(step));
    text.remove_prefix(span);
  }
  return out;
}

std::string join_steps(const std::vector<std::string>& steps, StepDelimiter d) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += join_separator(d);
    out += steps[i];
  }
  return out;
}

}  // namespace vsynth::treesearch
