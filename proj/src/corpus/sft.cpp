#include "vsynth/corpus/sft.hpp"

#include "vsynth/common/error.hpp"
#include "vsynth/corpus/io.hpp"

namespace vsynth::corpus {

void to_json(json& j, const SftRecord& r) {
  json images = json::array();
  if (r.image_ref) images.push_back(*r.image_ref);
  j = {{"id", r.id},
       {"images", images},
       {"messages", json::array({{{"role", "user"}, {"content", r.user}},
                                 {{"role", "assistant"}, {"content", r.assistant}}})}};
}

void from_json(const json& j, SftRecord& r) {
  try {
    r.id = j.at("id").get<std::string>();
    const auto& images = j.at("images");
    r.image_ref.reset();
    if (!images.empty()) r.image_ref = images.at(0).get<std::string>();
    const auto& msgs = j.at("messages");
    if (msgs.size() != 2) throw InvalidArgument("expected two messages");
    r.user = msgs.at(0).at("content").get<std::string>();
    r.assistant = msgs.at(1).at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad sft record: ") + e.what());
  }
}

std::string verification_user_turn(const Question& q, const Candidate& c,
                                   const PromptTemplate* tmpl) {
  if (tmpl) return tmpl->fill({{"question", render_question(q)}, {"solution", c.reasoning_text}});
  return "Question:\n" + render_question(q) + "\n\nSolution:\n" + c.reasoning_text;
}

std::size_t emit_sft_dataset(const std::vector<CleanExample>& examples,
                             const std::filesystem::path& path, const PromptTemplate* tmpl) {
  if (examples.empty()) throw InvalidArgument("emit_sft_dataset: no examples");
  std::vector<SftRecord> records;
  records.reserve(examples.size());
  for (const auto& e : examples) {
    records.push_back({e.question.id + "#" + std::to_string(e.candidate.index),
                       verification_user_turn(e.question, e.candidate, tmpl),
                       e.question.image_ref, e.verification.verification_text});
  }
  return write_records(path, records);
}

}  // namespace vsynth::corpus
