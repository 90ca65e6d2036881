#pragma once

#include <filesystem>
#include <set>
#include <string_view>
#include <vector>

#include "vsynth/common/error.hpp"
#include "vsynth/common/jsonl.hpp"
#include "vsynth/corpus/types.hpp"

namespace vsynth::corpus {

/// native: one Question object per line as written by write_records.
/// mavis_bridge: {id, question, answer, diagram_description, image?,
/// choices?, category?}; the description lands in Question::extras under
/// kDiagramDescriptionKey and the source defaults to MAVISGeo.
enum class Schema { Native, MavisBridge };

Schema schema_from_string(std::string_view name);

/// Questions in file order. Throws FileNotFound, MalformedRecord(line),
/// DuplicateId.
std::vector<Question> load_questions(const std::filesystem::path& path,
                                     Schema schema = Schema::Native);

/// One canonical line per record (sorted keys, so equal records give equal
/// bytes). The parent directory must exist. Returns the number of lines.
template <typename T>
std::size_t write_records(const std::filesystem::path& path, const std::vector<T>& records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(json(r));
  return write_jsonl(path, lines);
}

/// Parses every line as T. Throws MalformedRecord(line) on schema errors.
template <typename T>
std::vector<T> read_records(const std::filesystem::path& path) {
  std::vector<T> out;
  std::size_t line_no = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line_no;
    try {
      out.push_back(j.template get<T>());
    } catch (const InvalidArgument& e) {
      throw MalformedRecord(line_no, e.what());
    } catch (const json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return out;
}

}  // namespace vsynth::corpus
