#include "vsynth/answers/golden.hpp"

#include "vsynth/common/error.hpp"

namespace vsynth::answers {
namespace {

std::optional<CanonicalAnswer> try_canonical(std::string_view s) {
  try {
    return canonicalize(s);
  } catch (const EmptyAnswer&) {
    return std::nullopt;
  }
}

/// The answer a choice letter stands for, if the letter indexes `choices`.
std::optional<CanonicalAnswer> choice_text(const CanonicalAnswer& a,
                                           const std::vector<std::string>& choices) {
  if (a.kind() != CanonicalAnswer::Kind::Choice) return std::nullopt;
  const auto idx = static_cast<std::size_t>(*a.choice_letter() - 'A');
  if (idx >= choices.size()) return std::nullopt;
  return try_canonical(choices[idx]);
}

}  // namespace

std::optional<CanonicalAnswer> canonical_golden(std::string_view golden) {
  return try_canonical(golden);
}

bool matches_golden(const CanonicalAnswer& answer, std::string_view golden,
                    const std::optional<std::vector<std::string>>& choices, double tol) {
  const auto gold = try_canonical(golden);
  if (!gold) return false;
  if (answers_equal(answer, *gold, tol)) return true;
  if (!choices) return false;
  if (const auto gold_text = choice_text(*gold, *choices)) {
    if (answers_equal(answer, *gold_text, tol)) return true;
  }
  if (const auto answer_text = choice_text(answer, *choices)) {
    if (answers_equal(*answer_text, *gold, tol)) return true;
  }
  return false;
}

}  // namespace vsynth::answers
