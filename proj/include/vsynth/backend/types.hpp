#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/common/jsonl.hpp"

namespace vsynth::backend {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

struct Message {
  Role role = Role::User;
  std::string text;
  std::optional<std::string> image_ref;

  bool operator==(const Message&) const = default;
};

/// One generation call. Decoding defaults follow the evaluation settings:
/// 4096 new tokens, temperature 0.3, top-k 5, repetition penalty 1.05.
struct GenerationRequest {
  std::vector<Message> messages;
  int max_new_tokens = 4096;
  double temperature = 0.3;
  int top_k = 5;
  double repetition_penalty = 1.05;
  int num_samples = 1;
  std::optional<std::uint64_t> seed;
  /// Position of this request's first sample within a larger logical sample
  /// set. Lets N single-sample calls reproduce one N-sample call on mock
  /// backends. Not part of the content digest.
  int sample_offset = 0;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;

  bool operator==(const GenerationRequest&) const = default;
};

/// Hex SHA-256 over the request content: messages and seed. Decoding
/// parameters and sample_offset are excluded.
std::string content_digest(const GenerationRequest& req);

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct GenerationResponse {
  std::vector<std::string> samples;
  std::string backend_id;
  std::chrono::milliseconds latency{0};
  std::optional<Usage> usage;
};

struct RetryBackoff {
  std::chrono::milliseconds base{500};
  std::chrono::milliseconds max_delay{30000};
  std::chrono::milliseconds jitter{250};
};

/// Parameters of the stochastic mock. See make_stochastic.
struct StochasticProfile {
  double p_correct = 0.5;
  int wrong_alphabet_size = 3;
  double verify_tpr = 1.0;
  double verify_fpr = 0.0;
  std::uint64_t seed = 0;
  /// Upper bound on reasoning steps before the final answer line.
  int max_steps = 3;
  /// When true, critique scores track the correctness of a completed path;
  /// otherwise they are uniform and independent of correctness.
  bool calibrated_critique = false;
};

/// A scripted reply rule. Digest entries match one exact request; `contains`
/// entries match any request whose concatenated message text contains the
/// substring (empty matches everything). Digest entries win, then `contains`
/// entries in declaration order.
struct ScriptEntry {
  std::optional<std::string> digest;
  std::optional<std::string> contains;
  std::vector<std::string> replies;
  /// Offsets the reply cycle by the request seed.
  bool rotate_by_seed = false;
};

struct BackendConfig {
  enum class Kind { Http, Scripted, Stochastic };

  Kind kind = Kind::Scripted;
  std::string name = "backend";
  std::optional<std::string> endpoint_url;
  std::optional<std::string> model_name;
  std::optional<std::string> auth_env_var;
  std::chrono::milliseconds timeout{120000};
  int max_retries = 3;
  int max_in_flight = 4;
  RetryBackoff retry_backoff;
  std::optional<std::string> trace_path;

  std::vector<ScriptEntry> script;
  std::optional<std::string> script_path;
  StochasticProfile profile;

  void validate() const;
};

std::string_view to_string(BackendConfig::Kind kind);
BackendConfig::Kind backend_kind_from_string(std::string_view name);

/// Stochastic mock config. Throws InvalidArgument on out-of-range values.
BackendConfig make_stochastic(const StochasticProfile& profile, std::string name = "stochastic");

json to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const json& j, const std::string& name);

/// {digest?, contains?, reply | replies, rotate_by_seed?}. Throws InvalidArgument.
ScriptEntry script_entry_from_json(const json& j);
json to_json(const ScriptEntry& e);

/// Reads a script file: one JSON object per line with `digest` or
/// `contains`, and `reply` or `replies`.
std::vector<ScriptEntry> load_script(const std::string& path);

}  // namespace vsynth::backend
