#include "vsynth/corpus/io.hpp"

#include <unordered_set>

namespace vsynth::corpus {
namespace {

Question from_mavis(const json& j) {
  if (!j.is_object()) throw InvalidArgument("record must be an object");
  json native = json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k == "question") {
      native["prompt_text"] = it.value();
    } else if (k == "answer") {
      native["golden_answer"] = it.value();
    } else if (k == "image") {
      native["image_ref"] = it.value();
    } else {
      native[k] = it.value();
    }
  }
  if (!native.contains("source")) native["source"] = "MAVISGeo";
  auto q = native.get<Question>();
  const auto desc = q.diagram_description();
  if (!desc || desc->empty()) {
    throw InvalidArgument(std::string("missing field '") + std::string(kDiagramDescriptionKey) +
                          "'");
  }
  return q;
}

}  // namespace

Schema schema_from_string(std::string_view name) {
  if (name == "native") return Schema::Native;
  if (name == "mavis_bridge") return Schema::MavisBridge;
  throw InvalidArgument("unknown schema: " + std::string(name));
}

std::vector<Question> load_questions(const std::filesystem::path& path, Schema schema) {
  std::vector<Question> out;
  std::unordered_set<std::string> seen;
  for (const auto& line : read_lines(path)) {
    const json j = json::parse(line.text, nullptr, false);
    if (j.is_discarded()) throw MalformedRecord(line.number, "invalid JSON");
    Question q;
    try {
      q = schema == Schema::Native ? j.get<Question>() : from_mavis(j);
    } catch (const InvalidArgument& e) {
      throw MalformedRecord(line.number, e.what());
    } catch (const json::exception& e) {
      throw MalformedRecord(line.number, e.what());
    }
    if (!seen.insert(q.id).second) throw DuplicateId(q.id);
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace vsynth::corpus
