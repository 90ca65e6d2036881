#include "vsynth/answers/extract.hpp"

#include <cctype>
#include <regex>
#include <vector>

#include "vsynth/common/error.hpp"
#include "vsynth/common/prompt_template.hpp"

namespace vsynth::answers {
namespace {

constexpr std::string_view kExtractionTemplate =
    "You are given a model's response to a math question. Extract the final answer it "
    "commits to.\n"
    "Reply with the answer only: a number, a single option letter, or a short phrase. "
    "Do not solve the problem yourself. If the response gives no final answer, reply "
    "with an empty line.\n\n"
    "Response:\n{response}\n\n"
    "Final answer:";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> nonblank_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos));
    if (!line.empty()) out.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::optional<std::string> last_boxed(std::string_view text) {
  std::size_t best = std::string_view::npos;
  std::size_t open_len = 0;
  for (std::string_view marker : {std::string_view("\\boxed{"), std::string_view("\\fbox{")}) {
    const auto pos = text.rfind(marker);
    if (pos != std::string_view::npos && (best == std::string_view::npos || pos > best)) {
      best = pos;
      open_len = marker.size();
    }
  }
  if (best == std::string_view::npos) return std::nullopt;
  int depth = 1;
  for (std::size_t i = best + open_len; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}' && --depth == 0) {
      return std::string(trim(text.substr(best + open_len, i - best - open_len)));
    }
  }
  return std::nullopt;
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool sp = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!sp && !in_word) ++n;
    in_word = !sp;
  }
  return n;
}

std::string strip_decoration(std::string_view s) {
  constexpr std::string_view kLead = " \t*\"'`:";
  constexpr std::string_view kTrail = " \t*\"'`.,;:!?";
  while (!s.empty() && kLead.find(s.front()) != std::string_view::npos) s.remove_prefix(1);
  while (!s.empty() && kTrail.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
  return std::string(s);
}

/// Reduces the text after a cue to the answer it states.
std::string cut_span(std::string_view rest) {
  rest = trim(rest);
  while (!rest.empty() && (rest.front() == '*' || rest.front() == ':')) {
    rest.remove_prefix(1);
    rest = trim(rest);
  }
  if (rest.empty()) return {};

  if (const auto boxed = last_boxed(rest); boxed && rest.substr(0, 1) == "\\") return *boxed;

  static const std::regex kLeadingChoice(R"(^\(([A-Za-z])\)|^([A-Z])(?=[.):,]|\s|$))");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(rest.begin(), rest.end(), m, kLeadingChoice)) {
    const std::string letter = m[1].matched ? m[1].str() : m[2].str();
    return "(" + letter + ")";
  }

  if (rest.front() == '$') {
    const auto close = rest.find('$', 1);
    if (close != std::string_view::npos && close > 1) {
      const auto inner = rest.substr(0, close + 1);
      if (inner.find_first_of("\\^{}") != std::string_view::npos) return std::string(inner);
    }
  }

  std::size_t cut = rest.size();
  for (std::string_view stop : {". ", ".\t", "; ", ", ", " because", " since", " which", " as ",
                                " so ", " and ", " (", " [", " -- ", " \xE2\x80\x94"}) {
    const auto pos = rest.find(stop);
    if (pos != std::string_view::npos && pos < cut) cut = pos;
  }
  return strip_decoration(rest.substr(0, cut));
}

std::optional<Extraction> accept(const std::string& span, bool allow_text) {
  if (trim(span).empty()) return std::nullopt;
  try {
    auto answer = canonicalize(span);
    if (answer.kind() == CanonicalAnswer::Kind::Text) {
      // "24 units", "30 km/h": a number followed by a short unit.
      static const std::regex kNumberUnit(R"(^(\S+)\s+[A-Za-z/\xC2\xB0]+(\s+[A-Za-z/]+)?$)");
      std::smatch m;
      if (std::regex_match(span, m, kNumberUnit)) {
        if (const auto v = parse_number(m[1].str())) {
          return Extraction{m[1].str(), CanonicalAnswer::numeric(*v)};
        }
      }

      if (!allow_text || word_count(*answer.text_value()) > 4) return std::nullopt;
    }
    return Extraction{span, std::move(answer)};
  } catch (const EmptyAnswer&) {
    return std::nullopt;
  }
}

std::optional<Extraction> from_cue(std::string_view line) {
  static const std::regex kCue(
      R"((final\s+answer|answer)\s*\**\s*(is|:|=|would be|should be|equals)\s*\**\s*:?)",
      std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  const std::string s(line);
  std::optional<std::size_t> last_end;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kCue); it != std::sregex_iterator();
       ++it) {
    last_end = static_cast<std::size_t>(it->position(0) + it->length(0));
  }
  if (!last_end) return std::nullopt;
  return accept(cut_span(std::string_view(s).substr(*last_end)), true);
}

std::optional<Extraction> from_equals(std::string_view line) {
  const auto eq = line.rfind('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return accept(cut_span(line.substr(eq + 1)), false);
}

std::optional<Extraction> from_final_tokens(std::string_view line) {
  const std::string_view whole = trim(line);
  if (auto single = accept(strip_decoration(whole), false);
      single && single->answer.kind() == CanonicalAnswer::Kind::Choice && whole.size() <= 4) {
    return single;
  }
  std::optional<Extraction> last;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto b = line.find_first_not_of(" \t", pos);
    if (b == std::string_view::npos) break;
    auto e = line.find_first_of(" \t", b);
    if (e == std::string_view::npos) e = line.size();
    const std::string_view token = line.substr(b, e - b);
    pos = e;

    static const std::regex kParenChoice(R"(^\(([A-Za-z])\)[.,;:!?]*$)");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(token.begin(), token.end(), m, kParenChoice)) {
      last = Extraction{"(" + m[1].str() + ")", CanonicalAnswer::choice(m[1].str()[0])};
      continue;
    }
    std::string_view core = token;
    while (!core.empty() && std::string_view("(\"'*[").find(core.front()) != std::string_view::npos)
      core.remove_prefix(1);
    while (!core.empty() &&
           std::string_view(").,;:!?\"'*]").find(core.back()) != std::string_view::npos)
      core.remove_suffix(1);
    if (core.empty() || !(std::isdigit(static_cast<unsigned char>(core.front())) ||
                          core.front() == '-' || core.front() == '$' || core.front() == '.')) {
      continue;
    }
    if (const auto v = parse_number(core)) {
      last = Extraction{std::string(core), CanonicalAnswer::numeric(*v)};
    }
  }
  return last;
}

}  // namespace

std::string_view default_extraction_template() { return kExtractionTemplate; }

ExtractorConfig::ExtractorConfig() : extraction_prompt_template(kExtractionTemplate) {}

void ExtractorConfig::validate() const {
  if (mode == Mode::ModelBased && !model_backend) {
    throw ConfigError("model-based extraction requires a model backend");
  }
  if (!(numeric_tolerance >= 0.0)) throw ConfigError("numeric_tolerance must be non-negative");
  PromptTemplate(extraction_prompt_template, {"response"});
}

std::optional<Extraction> extract_rule_based_span(std::string_view text) {
  if (const auto boxed = last_boxed(text)) {
    if (auto found = accept(*boxed, true)) return found;
  }
  const auto lines = nonblank_lines(text);
  if (lines.empty()) return std::nullopt;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    if (auto found = from_cue(*it)) return found;
  }
  if (auto found = from_equals(lines.back())) return found;
  return from_final_tokens(lines.back());
}

std::optional<CanonicalAnswer> extract_rule_based(std::string_view text) {
  if (auto found = extract_rule_based_span(text)) return std::move(found->answer);
  return std::nullopt;
}

bool has_final_answer_marker(std::string_view text) {
  if (const auto boxed = last_boxed(text); boxed && accept(*boxed, true)) return true;
  for (const auto line : nonblank_lines(text)) {
    if (from_cue(line)) return true;
  }
  return false;
}

Extractor::Extractor() : Extractor(ExtractorConfig{}) {}

Extractor::Extractor(ExtractorConfig cfg, std::shared_ptr<backend::Backend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)) {
  if (cfg_.mode == ExtractorConfig::Mode::ModelBased && !backend_) {
    cfg_.validate();
    backend_ = backend::make_backend(*cfg_.model_backend);
  }
  PromptTemplate(cfg_.extraction_prompt_template, {"response"});
}

std::optional<Extraction> Extractor::extract_span(std::string_view text) const {
  if (cfg_.mode == ExtractorConfig::Mode::RuleBased) return extract_rule_based_span(text);

  const PromptTemplate tmpl(cfg_.extraction_prompt_template, {"response"});
  backend::GenerationRequest req;
  req.messages.push_back({backend::Role::User, tmpl.fill({{"response", std::string(text)}}), {}});
  req.temperature = 0.0;
  req.max_new_tokens = 64;
  const auto resp = backend_->complete(req);
  const std::string_view reply = trim(resp.samples.front());
  if (reply.empty()) return std::nullopt;
  if (auto cued = from_cue(reply)) return cued;
  return accept(strip_decoration(reply), true);
}

std::optional<CanonicalAnswer> Extractor::extract(std::string_view text) const {
  if (auto found = extract_span(text)) return std::move(found->answer);
  return std::nullopt;
}

std::optional<CanonicalAnswer> extract_answer(const ExtractorConfig& cfg,
                                              std::string_view reasoning_text) {
  return Extractor(cfg).extract(reasoning_text);
}

}  // namespace vsynth::answers
