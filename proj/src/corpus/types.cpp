#include "vsynth/corpus/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <initializer_list>
#include <utility>

#include "vsynth/common/error.hpp"

namespace vsynth::corpus {
namespace {

constexpr std::array<std::pair<Source::Kind, std::string_view>, 6> kKnown = {{
    {Source::Kind::Geometry3K, "Geometry3K"},
    {Source::Kind::FigureQA, "FigureQA"},
    {Source::Kind::GEOS, "GEOS"},
    {Source::Kind::SuperCLEVR, "SuperCLEVR"},
    {Source::Kind::TabMWP, "TabMWP"},
    {Source::Kind::MAVISGeo, "MAVISGeo"},
}};

std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw InvalidArgument(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InvalidArgument(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

json extras_of(const json& j, std::initializer_list<std::string_view> known) {
  json out = json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) out[it.key()] = it.value();
  }
  return out;
}

void merge_extras(json& j, const json& extras) {
  for (auto it = extras.begin(); it != extras.end(); ++it) {
    if (!j.contains(it.key())) j[it.key()] = it.value();
  }
}

void require_object(const json& j) {
  if (!j.is_object()) throw InvalidArgument("record must be an object");
}

}  // namespace

Source::Source(Kind kind) : kind_(kind) {
  for (const auto& [k, n] : kKnown) {
    if (k == kind) name_ = n;
  }
  if (name_.empty()) throw InvalidArgument("Source::Other needs a name");
}

Source Source::other(std::string name) {
  if (name.empty()) throw InvalidArgument("empty source name");
  return parse(name);
}

Source Source::parse(std::string_view name) {
  if (name.empty()) throw InvalidArgument("empty source name");
  const auto folded = fold(name);
  for (const auto& [k, n] : kKnown) {
    if (fold(n) == folded) return Source(k);
  }
  return Source(Kind::Other, std::string(name));
}

std::optional<std::string> Question::diagram_description() const {
  const auto it = extras.find(std::string(kDiagramDescriptionKey));
  if (it == extras.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

void Question::validate() const {
  if (id.empty()) throw InvalidArgument("question id is empty");
  if (!choices) return;
  if (choices->empty()) throw InvalidArgument("question " + id + ": choices list is empty");
  try {
    const auto gold = answers::canonicalize(golden_answer);
    if (gold.kind() == answers::CanonicalAnswer::Kind::Choice &&
        static_cast<std::size_t>(*gold.choice_letter() - 'A') < choices->size()) {
      return;
    }
    for (const auto& c : *choices) {
      if (c == golden_answer) return;
      try {
        if (answers::answers_equal(answers::canonicalize(c), gold)) return;
      } catch (const EmptyAnswer&) {
      }
    }
  } catch (const EmptyAnswer&) {
  }
  throw InvalidArgument("question " + id + ": golden answer is not one of its choices");
}

std::string render_question(const Question& q) {
  std::string out = q.prompt_text;
  if (q.choices) {
    out += "\nChoices:";
    for (std::size_t i = 0; i < q.choices->size(); ++i) {
      out += "\n(" + std::string(1, static_cast<char>('A' + i)) + ") " + (*q.choices)[i];
    }
  }
  return out;
}

void Candidate::validate() const {
  if (question_id.empty()) throw InvalidArgument("candidate has no question_id");
  if (reasoning_text.empty()) {
    throw InvalidArgument("candidate " + question_id + "#" + std::to_string(index) +
                          " has empty reasoning_text");
  }
}

std::string_view to_string(Condition c) { return c == Condition::Cond1 ? "cond1" : "cond2"; }

Condition condition_from_string(std::string_view name) {
  if (name == "cond1") return Condition::Cond1;
  if (name == "cond2") return Condition::Cond2;
  throw InvalidArgument("unknown condition: " + std::string(name));
}

json answer_to_json(const answers::CanonicalAnswer& a) {
  json j = {{"kind", answers::to_string(a.kind())}};
  switch (a.kind()) {
    case answers::CanonicalAnswer::Kind::Numeric:
      j["value"] = *a.numeric_value();
      break;
    case answers::CanonicalAnswer::Kind::Choice:
      j["value"] = std::string(1, *a.choice_letter());
      break;
    case answers::CanonicalAnswer::Kind::Text:
      j["value"] = *a.text_value();
      break;
  }
  return j;
}

answers::CanonicalAnswer answer_from_json(const json& j) {
  require_object(j);
  const auto kind = answers::kind_from_string(require_string(j, "kind"));
  const auto& v = require(j, "value");
  try {
    switch (kind) {
      case answers::CanonicalAnswer::Kind::Numeric:
        return answers::CanonicalAnswer::numeric(v.get<double>());
      case answers::CanonicalAnswer::Kind::Choice: {
        const auto s = v.get<std::string>();
        if (s.size() != 1) throw InvalidArgument("choice value must be one letter");
        return answers::CanonicalAnswer::choice(s[0]);
      }
      case answers::CanonicalAnswer::Kind::Text:
        return answers::CanonicalAnswer::text(v.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad answer value: ") + e.what());
  } catch (const EmptyAnswer&) {
    throw InvalidArgument("empty text answer");
  }
  throw InvalidArgument("bad answer kind");
}

void to_json(json& j, const Question& q) {
  j = {{"id", q.id},
       {"prompt_text", q.prompt_text},
       {"golden_answer", q.golden_answer},
       {"source", q.source.name()}};
  if (q.image_ref) j["image_ref"] = *q.image_ref;
  if (q.choices) j["choices"] = *q.choices;
  if (q.category) j["category"] = *q.category;
  merge_extras(j, q.extras);
}

void from_json(const json& j, Question& q) {
  require_object(j);
  q.id = require_string(j, "id");
  q.prompt_text = require_string(j, "prompt_text");
  q.golden_answer = require_string(j, "golden_answer");
  q.image_ref = opt_string(j, "image_ref");
  q.category = opt_string(j, "category");
  q.source = Source::parse(opt_string(j, "source").value_or("unknown"));
  q.choices.reset();
  if (const auto it = j.find("choices"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw InvalidArgument("field 'choices' must be an array");
    std::vector<std::string> cs;
    for (const auto& c : *it) {
      if (!c.is_string()) throw InvalidArgument("choices must be strings");
      cs.push_back(c.get<std::string>());
    }
    q.choices = std::move(cs);
  }
  q.extras = extras_of(j, {"id", "prompt_text", "golden_answer", "image_ref", "category", "source",
                           "choices"});
  q.validate();
}

void to_json(json& j, const SamplerParams& p) {
  j = {{"max_new_tokens", p.max_new_tokens},
       {"temperature", p.temperature},
       {"top_k", p.top_k},
       {"repetition_penalty", p.repetition_penalty}};
  if (p.seed) j["seed"] = *p.seed;
}

void from_json(const json& j, SamplerParams& p) {
  require_object(j);
  try {
    p.max_new_tokens = j.value("max_new_tokens", 4096);
    p.temperature = j.value("temperature", 0.3);
    p.top_k = j.value("top_k", 5);
    p.repetition_penalty = j.value("repetition_penalty", 1.05);
    p.seed.reset();
    if (j.contains("seed") && !j.at("seed").is_null()) p.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad sampler_params: ") + e.what());
  }
}

void to_json(json& j, const Candidate& c) {
  j = {{"question_id", c.question_id},
       {"reasoning_text", c.reasoning_text},
       {"producer", c.producer},
       {"sampler_params", c.sampler_params},
       {"index", c.index}};
  if (c.extracted_answer) j["extracted_answer"] = answer_to_json(*c.extracted_answer);
  merge_extras(j, c.extras);
}

void from_json(const json& j, Candidate& c) {
  require_object(j);
  c.question_id = require_string(j, "question_id");
  c.reasoning_text = require_string(j, "reasoning_text");
  c.producer = opt_string(j, "producer").value_or("");
  c.sampler_params = j.contains("sampler_params") ? j.at("sampler_params").get<SamplerParams>()
                                                  : SamplerParams{};
  const auto& idx = require(j, "index");
  if (!idx.is_number_integer()) throw InvalidArgument("field 'index' must be an integer");
  c.index = idx.get<int>();
  c.extracted_answer.reset();
  if (const auto it = j.find("extracted_answer"); it != j.end() && !it->is_null()) {
    c.extracted_answer = answer_from_json(*it);
  }
  c.extras = extras_of(j, {"question_id", "reasoning_text", "producer", "sampler_params", "index",
                           "extracted_answer"});
  c.validate();
}

void to_json(json& j, const VerificationRecord& v) {
  j = {{"question_id", v.question_id},
       {"candidate_index", v.candidate_index},
       {"verification_text", v.verification_text},
       {"verdict", answers::to_string(v.verdict)},
       {"verifier", v.verifier}};
  if (v.error) j["error"] = *v.error;
  if (v.discard_reason) j["discard_reason"] = *v.discard_reason;
  merge_extras(j, v.extras);
}

void from_json(const json& j, VerificationRecord& v) {
  require_object(j);
  v.question_id = require_string(j, "question_id");
  const auto& idx = require(j, "candidate_index");
  if (!idx.is_number_integer()) throw InvalidArgument("field 'candidate_index' must be an integer");
  v.candidate_index = idx.get<int>();
  v.verification_text = require_string(j, "verification_text");
  v.verdict = answers::verdict_from_string(require_string(j, "verdict"));
  v.verifier = opt_string(j, "verifier").value_or("");
  v.error = opt_string(j, "error");
  v.discard_reason = opt_string(j, "discard_reason");
  v.extras = extras_of(j, {"question_id", "candidate_index", "verification_text", "verdict",
                           "verifier", "error", "discard_reason"});
}

void to_json(json& j, const CleanExample& e) {
  j = {{"question", e.question},
       {"candidate", e.candidate},
       {"verification", e.verification},
       {"condition", to_string(e.condition)}};
}

void from_json(const json& j, CleanExample& e) {
  require_object(j);
  e.question = require(j, "question").get<Question>();
  e.candidate = require(j, "candidate").get<Candidate>();
  e.verification = require(j, "verification").get<VerificationRecord>();
  e.condition = condition_from_string(require_string(j, "condition"));
}

}  // namespace vsynth::corpus
