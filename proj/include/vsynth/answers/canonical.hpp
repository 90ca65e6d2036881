#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace vsynth::answers {

/// A final answer reduced to a comparable normal form.
///
/// Exactly one payload exists, selected by kind(). Choice letters are stored
/// uppercase; text is lowercase, whitespace-collapsed, without trailing
/// punctuation.
class CanonicalAnswer {
 public:
  enum class Kind { Numeric, Choice, Text };

  static CanonicalAnswer numeric(double value);
  /// Accepts A-Z in either case.
  static CanonicalAnswer choice(char letter);
  /// Normalizes `text`. Throws EmptyAnswer if nothing remains.
  static CanonicalAnswer text(std::string_view text);

  Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
  std::optional<double> numeric_value() const;
  std::optional<char> choice_letter() const;
  std::optional<std::string> text_value() const;

  /// Shortest round-trip rendering: "42", "0.5", "B", "yes".
  std::string to_string() const;

  bool operator==(const CanonicalAnswer&) const = default;

 private:
  struct Letter {
    char value;
    bool operator==(const Letter&) const = default;
  };
  using Payload = std::variant<double, Letter, std::string>;
  explicit CanonicalAnswer(Payload p) : value_(std::move(p)) {}
  Payload value_;
};

std::string_view to_string(CanonicalAnswer::Kind kind);
CanonicalAnswer::Kind kind_from_string(std::string_view name);

/// Parses a raw answer string.
///
/// Priority: a single choice letter, optionally parenthesized; then a number
/// (thousands commas, leading currency '$', trailing '%', a/b fractions,
/// \frac{a}{b}, scientific notation); otherwise normalized text.
/// Throws EmptyAnswer when `raw` is blank.
CanonicalAnswer canonicalize(std::string_view raw);

/// Number parsing rule used by canonicalize; nullopt if `raw` is not a number.
std::optional<double> parse_number(std::string_view raw);

/// Text normalization rule used by canonicalize.
std::string normalize_text(std::string_view raw);

/// Default relative tolerance for numeric comparison.
inline constexpr double kDefaultTolerance = 1e-6;

/// Equality under `tol`: relative for two nonzero numbers, absolute when
/// either is zero. Numeric and Text compare numerically when the text parses
/// as a number. A Choice equals only another Choice with the same letter.
///
/// Not transitive across tolerance chains; use one tolerance per run.
bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b,
                   double tol = kDefaultTolerance);

}  // namespace vsynth::answers
