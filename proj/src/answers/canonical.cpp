#include "vsynth/answers/canonical.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <regex>

#include "vsynth/common/error.hpp"

namespace vsynth::answers {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool strip_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

std::optional<double> parse_plain(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '-' ||
                     s.front() == '.')) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string strip_thousands(std::string_view s) {
  static const std::regex kGrouped(R"(^[+-]?\d{1,3}(,\d{3})+(\.\d+)?$)");
  std::string out(s);
  if (std::regex_match(out, kGrouped)) {
    out.erase(std::remove(out.begin(), out.end(), ','), out.end());
  }
  return out;
}

std::optional<double> parse_scalar(std::string_view s) {
  s = trim(s);
  const std::string plain = strip_thousands(s);
  return parse_plain(plain);
}

std::optional<char> parse_choice(std::string_view s) {
  static const std::regex kChoice(R"(^\(?([A-Za-z])\)?[.:]?$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, kChoice)) return std::nullopt;
  return static_cast<char>(std::toupper(static_cast<unsigned char>(m[1].str()[0])));
}

std::string_view strip_math_delimiters(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
    s = trim(s.substr(1, s.size() - 2));
  }
  if (s.size() >= 4 && s.substr(0, 2) == "\\(" && s.substr(s.size() - 2) == "\\)") {
    s = trim(s.substr(2, s.size() - 4));
  }
  std::string_view inner = s;
  if (strip_prefix(inner, "\\text{") && !inner.empty() && inner.back() == '}') {
    s = trim(inner.substr(0, inner.size() - 1));
  }
  return s;
}

}  // namespace

CanonicalAnswer CanonicalAnswer::numeric(double value) {
  if (value == 0.0) value = 0.0;  // fold -0
  return CanonicalAnswer(Payload(std::in_place_index<0>, value));
}

CanonicalAnswer CanonicalAnswer::choice(char letter) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
  if (up < 'A' || up > 'Z') throw InvalidArgument("choice letter must be A-Z");
  return CanonicalAnswer(Payload(std::in_place_index<1>, Letter{up}));
}

CanonicalAnswer CanonicalAnswer::text(std::string_view text) {
  std::string norm = normalize_text(text);
  if (norm.empty()) throw EmptyAnswer();
  return CanonicalAnswer(Payload(std::in_place_index<2>, std::move(norm)));
}

std::optional<double> CanonicalAnswer::numeric_value() const {
  if (const auto* v = std::get_if<0>(&value_)) return *v;
  return std::nullopt;
}

std::optional<char> CanonicalAnswer::choice_letter() const {
  if (const auto* v = std::get_if<1>(&value_)) return v->value;
  return std::nullopt;
}

std::optional<std::string> CanonicalAnswer::text_value() const {
  if (const auto* v = std::get_if<2>(&value_)) return *v;
  return std::nullopt;
}

std::string CanonicalAnswer::to_string() const {
  switch (kind()) {
    case Kind::Numeric: {
      std::array<char, 64> buf{};
      const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *numeric_value());
      return std::string(buf.data(), ptr);
    }
    case Kind::Choice:
      return std::string(1, *choice_letter());
    case Kind::Text:
      return *text_value();
  }
  return {};
}

std::string_view to_string(CanonicalAnswer::Kind kind) {
  switch (kind) {
    case CanonicalAnswer::Kind::Numeric:
      return "numeric";
    case CanonicalAnswer::Kind::Choice:
      return "choice";
    case CanonicalAnswer::Kind::Text:
      return "text";
  }
  return "text";
}

CanonicalAnswer::Kind kind_from_string(std::string_view name) {
  if (name == "numeric") return CanonicalAnswer::Kind::Numeric;
  if (name == "choice") return CanonicalAnswer::Kind::Choice;
  if (name == "text") return CanonicalAnswer::Kind::Text;
  throw InvalidArgument("unknown answer kind: " + std::string(name));
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  while (!out.empty() && std::string_view(".,;:!?").find(out.back()) != std::string_view::npos) {
    out.pop_back();
    while (!out.empty() && out.back() == ' ') out.pop_back();
  }
  return out;
}

std::optional<double> parse_number(std::string_view raw) {
  std::string_view s = strip_math_delimiters(raw);
  if (s.empty()) return std::nullopt;

  static const std::regex kFrac(R"(^([+-]?)\\d?frac\{([^{}]+)\}\{([^{}]+)\}$)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_match(s.begin(), s.end(), m, kFrac)) {
    const auto num = parse_scalar(m[2].str());
    const auto den = parse_scalar(m[3].str());
    if (!num || !den || *den == 0.0) return std::nullopt;
    const double v = *num / *den;
    return m[1].str() == "-" ? -v : v;
  }

  bool negative = false;
  if (!s.empty() && s.front() == '-' && s.size() > 1 && s[1] == '$') {
    negative = true;
    s.remove_prefix(1);
  }
  if (!s.empty() && s.front() == '$') s = trim(s.substr(1));
  if (!s.empty() && s.back() == '%') s = trim(s.substr(0, s.size() - 1));
  if (s.empty()) return std::nullopt;

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = parse_scalar(s.substr(0, slash));
    const auto den = parse_scalar(s.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    const double v = *num / *den;
    return negative ? -v : v;
  }
  const auto v = parse_scalar(s);
  if (!v) return std::nullopt;
  return negative ? -*v : *v;
}

CanonicalAnswer canonicalize(std::string_view raw) {
  const std::string_view trimmed = trim(raw);
  if (trimmed.empty()) throw EmptyAnswer();
  const std::string_view body = strip_math_delimiters(trimmed);
  if (const auto letter = parse_choice(body)) return CanonicalAnswer::choice(*letter);
  if (const auto number = parse_number(body)) return CanonicalAnswer::numeric(*number);
  return CanonicalAnswer::text(body.empty() ? trimmed : body);
}

bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b, double tol) {
  using Kind = CanonicalAnswer::Kind;
  if (a.kind() == Kind::Choice || b.kind() == Kind::Choice) {
    return a.kind() == b.kind() && *a.choice_letter() == *b.choice_letter();
  }
  if (a.kind() == Kind::Text && b.kind() == Kind::Text) return *a.text_value() == *b.text_value();

  const auto as_number = [](const CanonicalAnswer& x) -> std::optional<double> {
    if (x.kind() == Kind::Numeric) return x.numeric_value();
    return parse_number(*x.text_value());
  };
  const auto x = as_number(a);
  const auto y = as_number(b);
  if (!x || !y) return false;
  const double diff = std::fabs(*x - *y);
  if (*x == 0.0 || *y == 0.0) return diff <= tol;
  return diff <= tol * std::max(std::fabs(*x), std::fabs(*y));
}

}  // namespace vsynth::answers
