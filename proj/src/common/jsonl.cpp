#include "vsynth/common/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "vsynth/common/error.hpp"

namespace vsynth {
namespace {

std::ifstream open_for_read(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) {
    if (!std::filesystem::exists(path)) throw FileNotFound(path.string());
    throw IoFailure("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoFailure("parent directory does not exist: " + parent.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  return out;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

std::string canonical_dump(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<Line> read_lines(const std::filesystem::path& path) {
  auto in = open_for_read(path, std::ios::in);
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (is_blank(text)) continue;
    lines.push_back({number, std::move(text)});
  }
  if (in.bad()) throw IoFailure("read error on " + path.string());
  return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  auto out = open_for_write(path);
  for (const auto& line : lines) out << line << '\n';
  out.flush();
  if (!out) throw IoFailure("write error on " + path.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> records;
  for (auto& line : read_lines(path)) {
    json value;
    try {
      value = json::parse(line.text);
    } catch (const json::parse_error& e) {
      throw MalformedRecord(line.number, e.what());
    }
    if (!value.is_object()) throw MalformedRecord(line.number, "record is not an object");
    records.push_back(std::move(value));
  }
  return records;
}

std::size_t write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(canonical_dump(r));
  write_lines(path, lines);
  return lines.size();
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_for_read(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_for_write(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoFailure("write error on " + path.string());
}

}  // namespace vsynth
