#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/answers/canonical.hpp"

namespace vsynth::answers {

/// Canonical golden answer, or nullopt when the label is blank.
std::optional<CanonicalAnswer> canonical_golden(std::string_view golden);

/// Compares an extracted answer with a golden label.
///
/// With `choices`, a choice letter and the text of that choice are treated as
/// the same answer in either direction: golden "B" accepts the text of choice
/// B, and golden text accepts the letter of the choice carrying that text.
bool matches_golden(const CanonicalAnswer& answer, std::string_view golden,
                    const std::optional<std::vector<std::string>>& choices = std::nullopt,
                    double tol = kDefaultTolerance);

}  // namespace vsynth::answers
