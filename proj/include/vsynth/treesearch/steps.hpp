#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vsynth::treesearch {

/// How reasoning text is cut into steps.
///  blank_line:    paragraphs separated by one or more blank lines
///  sentence:      sentences ending in '.', '?' or '!' before whitespace
///  numbered_step: blocks opening with "Step N" or "N." / "N)" lines
enum class StepDelimiter { BlankLine, Sentence, NumberedStep };

std::string_view to_string(StepDelimiter d);
StepDelimiter step_delimiter_from_string(std::string_view name);

/// Separator placed between steps when joining.
std::string_view join_separator(StepDelimiter d);

/// First step of `text`, trimmed; empty if there is none.
std::string first_step(std::string_view text, StepDelimiter d);

/// All non-empty steps of `text`, trimmed.
std::vector<std::string> split_steps(std::string_view text, StepDelimiter d);

std::string join_steps(const std::vector<std::string>& steps, StepDelimiter d);

}  // namespace vsynth::treesearch
