#include "vsynth/backend/mock_header.hpp"

namespace vsynth::backend {
namespace {

constexpr std::string_view kOpen = "[[mock ";
constexpr std::string_view kClose = "]]";

std::string_view task_name(MockHeader::Task t) {
  switch (t) {
    case MockHeader::Task::Solve:
      return "solve";
    case MockHeader::Task::Verify:
      return "verify";
    case MockHeader::Task::Critique:
      return "critique";
  }
  return "solve";
}

std::optional<MockHeader::Task> task_from(std::string_view s) {
  if (s == "solve") return MockHeader::Task::Solve;
  if (s == "verify") return MockHeader::Task::Verify;
  if (s == "critique") return MockHeader::Task::Critique;
  return std::nullopt;
}

}  // namespace

Message mock_header_message(const MockHeader& header) {
  json j = {{"task", task_name(header.task)}, {"gold", header.gold}};
  if (header.candidate) j["candidate"] = *header.candidate;
  if (header.partial) j["partial"] = *header.partial;
  return Message{Role::System, std::string(kOpen) + canonical_dump(j) + std::string(kClose), {}};
}

std::optional<MockHeader> find_mock_header(const GenerationRequest& req) {
  for (const auto& m : req.messages) {
    if (m.role != Role::System) continue;
    const auto open = m.text.find(kOpen);
    if (open == std::string::npos) continue;
    const auto close = m.text.rfind(kClose);
    if (close == std::string::npos || close < open) continue;
    const auto body = m.text.substr(open + kOpen.size(), close - open - kOpen.size());
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    const auto task = task_from(j.value("task", ""));
    if (!task) continue;
    MockHeader h;
    h.task = *task;
    h.gold = j.value("gold", "");
    if (j.contains("candidate")) h.candidate = j.at("candidate").get<std::string>();
    if (j.contains("partial")) h.partial = j.at("partial").get<std::string>();
    return h;
  }
  return std::nullopt;
}

}  // namespace vsynth::backend
