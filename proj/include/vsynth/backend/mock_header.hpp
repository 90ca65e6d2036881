#pragma once

#include <optional>
#include <string>

#include "vsynth/backend/types.hpp"

namespace vsynth::backend {

/// Test seam for the stochastic mock.
///
/// When a pipeline runs with mock headers enabled it prepends a system
/// message `[[mock {...}]]` carrying the gold answer (and, for verification,
/// the candidate's extracted answer). Production runs never emit it.
struct MockHeader {
  enum class Task { Solve, Verify, Critique };

  Task task = Task::Solve;
  std::string gold;
  std::optional<std::string> candidate;
  /// Partial solution the request continues from, if any.
  std::optional<std::string> partial;
};

Message mock_header_message(const MockHeader& header);

/// First mock header among the request's system messages.
std::optional<MockHeader> find_mock_header(const GenerationRequest& req);

}  // namespace vsynth::backend
