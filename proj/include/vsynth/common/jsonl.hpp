#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vsynth {

using json = nlohmann::json;

/// Canonical single-line serialization: keys sorted, no whitespace, invalid
/// UTF-8 replaced. Equal values always produce identical bytes.
std::string canonical_dump(const json& value);

struct Line {
  std::size_t number;  // 1-based
  std::string text;
};

/// Non-blank lines of a text file. Throws FileNotFound / IoFailure.
std::vector<Line> read_lines(const std::filesystem::path& path);

/// Writes each entry followed by '\n'. Throws IoFailure.
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

/// Parses each non-blank line as a JSON object. Throws MalformedRecord.
std::vector<json> read_jsonl(const std::filesystem::path& path);

/// Writes canonical dumps, one per line; returns the number of lines.
std::size_t write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace vsynth
