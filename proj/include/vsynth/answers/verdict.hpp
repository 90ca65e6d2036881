#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace vsynth::answers {

enum class Verdict { Correct, Incorrect, Unparseable };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view name);

/// Terminal verdict markers recognised in a verification text.
///
/// Matching is case-insensitive and restricted to the final non-empty line.
/// The marker ending last wins, except that a positive match overlapping a
/// negative one is discarded, so "not correct" never reads as Correct.
class VerdictGrammar {
 public:
  /// Recognises "the answer is correct", "the answer is not correct",
  /// "the answer is incorrect", "VERDICT: CORRECT/INCORRECT" and
  /// \boxed{correct} / \boxed{incorrect}.
  VerdictGrammar();

  /// Adds ECMAScript patterns (matched case-insensitively).
  void add_correct(const std::string& pattern);
  void add_incorrect(const std::string& pattern);

  Verdict parse(std::string_view verification_text) const;

 private:
  std::vector<std::regex> correct_;
  std::vector<std::regex> incorrect_;
};

/// Parses with the default grammar.
Verdict parse_verdict(std::string_view verification_text);

}  // namespace vsynth::answers
