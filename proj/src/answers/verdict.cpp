#include "vsynth/answers/verdict.hpp"

#include <optional>

#include "vsynth/common/error.hpp"

namespace vsynth::answers {
namespace {

constexpr auto kFlags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;

std::string_view final_segment(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0) {
    const auto start = text.rfind('\n', end - 1);
    const std::size_t begin = start == std::string_view::npos ? 0 : start + 1;
    const auto line = text.substr(begin, end - begin);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) return line;
    if (begin == 0) break;
    end = begin - 1;
  }
  return {};
}

struct Match {
  std::size_t begin;
  std::size_t end;
};

std::vector<Match> find_all(const std::vector<std::regex>& patterns, const std::string& s) {
  std::vector<Match> out;
  for (const auto& re : patterns) {
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator();
         ++it) {
      const auto b = static_cast<std::size_t>(it->position(0));
      out.push_back({b, b + static_cast<std::size_t>(it->length(0))});
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Correct:
      return "correct";
    case Verdict::Incorrect:
      return "incorrect";
    case Verdict::Unparseable:
      return "unparseable";
  }
  return "unparseable";
}

Verdict verdict_from_string(std::string_view name) {
  if (name == "correct") return Verdict::Correct;
  if (name == "incorrect") return Verdict::Incorrect;
  if (name == "unparseable") return Verdict::Unparseable;
  throw InvalidArgument("unknown verdict: " + std::string(name));
}

VerdictGrammar::VerdictGrammar() {
  add_correct(R"(the answer is correct\b)");
  add_correct(R"(\bverdict\s*:\s*\**\s*correct\b)");
  add_correct(R"(\\boxed\{\s*(\\text\{\s*)?correct\s*\}?\s*\})");
  add_incorrect(R"(the answer is (not correct|incorrect)\b)");
  add_incorrect(R"(\bverdict\s*:\s*\**\s*(incorrect|not correct)\b)");
  add_incorrect(R"(\\boxed\{\s*(\\text\{\s*)?(incorrect|not correct)\s*\}?\s*\})");
}

void VerdictGrammar::add_correct(const std::string& pattern) {
  correct_.emplace_back(pattern, kFlags);
}

void VerdictGrammar::add_incorrect(const std::string& pattern) {
  incorrect_.emplace_back(pattern, kFlags);
}

Verdict VerdictGrammar::parse(std::string_view verification_text) const {
  const std::string segment(final_segment(verification_text));
  if (segment.empty()) return Verdict::Unparseable;

  const auto negatives = find_all(incorrect_, segment);
  auto positives = find_all(correct_, segment);
  std::erase_if(positives, [&](const Match& p) {
    for (const auto& n : negatives) {
      if (p.begin < n.end && n.begin < p.end) return true;
    }
    return false;
  });

  std::optional<Match> best_neg;
  for (const auto& n : negatives) {
    if (!best_neg || n.end > best_neg->end) best_neg = n;
  }
  std::optional<Match> best_pos;
  for (const auto& p : positives) {
    if (!best_pos || p.end > best_pos->end) best_pos = p;
  }
  if (!best_neg && !best_pos) return Verdict::Unparseable;
  if (!best_pos) return Verdict::Incorrect;
  if (!best_neg) return Verdict::Correct;
  return best_pos->end > best_neg->end ? Verdict::Correct : Verdict::Incorrect;
}

Verdict parse_verdict(std::string_view verification_text) {
  static const VerdictGrammar grammar;
  return grammar.parse(verification_text);
}

}  // namespace vsynth::answers
