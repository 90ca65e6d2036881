#include "vsynth/backend/types.hpp"

#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"

namespace vsynth::backend {
namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must be in [0,1]");
  }
}

std::chrono::milliseconds ms_field(const json& j, const char* key, std::chrono::milliseconds def) {
  if (!j.contains(key)) return def;
  return std::chrono::milliseconds(j.at(key).get<std::int64_t>());
}

template <typename T>
std::optional<T> opt_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  throw InvalidArgument("unknown role: " + std::string(name));
}

void GenerationRequest::validate() const {
  if (messages.empty()) throw InvalidArgument("request has no messages");
  if (num_samples < 1) throw InvalidArgument("num_samples must be >= 1");
  if (max_new_tokens < 1) throw InvalidArgument("max_new_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be non-negative");
  if (top_k < 1) throw InvalidArgument("top_k must be positive");
  if (!(repetition_penalty > 0.0)) throw InvalidArgument("repetition_penalty must be positive");
  if (sample_offset < 0) throw InvalidArgument("sample_offset must be non-negative");
}

std::string content_digest(const GenerationRequest& req) {
  json j;
  json msgs = json::array();
  for (const auto& m : req.messages) {
    json jm = {{"role", to_string(m.role)}, {"text", m.text}};
    if (m.image_ref) jm["image_ref"] = *m.image_ref;
    msgs.push_back(std::move(jm));
  }
  j["messages"] = std::move(msgs);
  if (req.seed) j["seed"] = *req.seed;
  return sha256_hex(canonical_dump(j));
}

std::string_view to_string(BackendConfig::Kind kind) {
  switch (kind) {
    case BackendConfig::Kind::Http:
      return "http";
    case BackendConfig::Kind::Scripted:
      return "scripted";
    case BackendConfig::Kind::Stochastic:
      return "stochastic";
  }
  return "scripted";
}

BackendConfig::Kind backend_kind_from_string(std::string_view name) {
  if (name == "http") return BackendConfig::Kind::Http;
  if (name == "scripted") return BackendConfig::Kind::Scripted;
  if (name == "stochastic") return BackendConfig::Kind::Stochastic;
  throw ConfigError("unknown backend kind: " + std::string(name));
}

void BackendConfig::validate() const {
  if (kind == Kind::Http && (!endpoint_url || !model_name)) {
    throw ConfigError("backend '" + name + "': http kind requires endpoint_url and model_name");
  }
  if (max_in_flight < 1) throw ConfigError("backend '" + name + "': max_in_flight must be >= 1");
  if (max_retries < 0) throw ConfigError("backend '" + name + "': max_retries must be >= 0");
  if (kind == Kind::Stochastic) {
    require_probability(profile.p_correct, "p_correct");
    require_probability(profile.verify_tpr, "verify_tpr");
    require_probability(profile.verify_fpr, "verify_fpr");
    if (profile.wrong_alphabet_size < 1) throw InvalidArgument("wrong_alphabet_size must be >= 1");
    if (profile.max_steps < 0) throw InvalidArgument("max_steps must be >= 0");
  }
}

BackendConfig make_stochastic(const StochasticProfile& profile, std::string name) {
  BackendConfig cfg;
  cfg.kind = BackendConfig::Kind::Stochastic;
  cfg.name = std::move(name);
  cfg.profile = profile;
  cfg.validate();
  return cfg;
}

json to_json(const BackendConfig& cfg) {
  json j = {{"kind", to_string(cfg.kind)},
            {"timeout_ms", cfg.timeout.count()},
            {"max_retries", cfg.max_retries},
            {"max_in_flight", cfg.max_in_flight},
            {"retry_backoff",
             {{"base_ms", cfg.retry_backoff.base.count()},
              {"max_delay_ms", cfg.retry_backoff.max_delay.count()},
              {"jitter_ms", cfg.retry_backoff.jitter.count()}}}};
  if (cfg.endpoint_url) j["endpoint_url"] = *cfg.endpoint_url;
  if (cfg.model_name) j["model_name"] = *cfg.model_name;
  if (cfg.auth_env_var) j["auth_env_var"] = *cfg.auth_env_var;
  if (cfg.trace_path) j["trace_path"] = *cfg.trace_path;
  if (cfg.script_path) {
    j["script"] = *cfg.script_path;
  } else if (!cfg.script.empty()) {
    json entries = json::array();
    for (const auto& e : cfg.script) entries.push_back(to_json(e));
    j["script"] = entries;
  }
  if (cfg.kind == BackendConfig::Kind::Stochastic) {
    const auto& p = cfg.profile;
    j["profile"] = {{"p_correct", p.p_correct},
                    {"wrong_alphabet_size", p.wrong_alphabet_size},
                    {"verify_tpr", p.verify_tpr},
                    {"verify_fpr", p.verify_fpr},
                    {"seed", p.seed},
                    {"max_steps", p.max_steps},
                    {"calibrated_critique", p.calibrated_critique}};
  }
  return j;
}

BackendConfig backend_config_from_json(const json& j, const std::string& name) {
  if (!j.is_object()) throw ConfigError("backend '" + name + "' must be an object");
  BackendConfig cfg;
  try {
    cfg.name = name;
    cfg.kind = backend_kind_from_string(j.value("kind", std::string("scripted")));
    cfg.endpoint_url = opt_field<std::string>(j, "endpoint_url");
    cfg.model_name = opt_field<std::string>(j, "model_name");
    cfg.auth_env_var = opt_field<std::string>(j, "auth_env_var");
    cfg.trace_path = opt_field<std::string>(j, "trace_path");
    cfg.timeout = ms_field(j, "timeout_ms", cfg.timeout);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
    if (j.contains("retry_backoff")) {
      const auto& rb = j.at("retry_backoff");
      cfg.retry_backoff.base = ms_field(rb, "base_ms", cfg.retry_backoff.base);
      cfg.retry_backoff.max_delay = ms_field(rb, "max_delay_ms", cfg.retry_backoff.max_delay);
      cfg.retry_backoff.jitter = ms_field(rb, "jitter_ms", cfg.retry_backoff.jitter);
    }
    if (j.contains("script")) {
      const auto& s = j.at("script");
      if (s.is_string()) {
        cfg.script_path = s.get<std::string>();
      } else if (s.is_array()) {
        for (const auto& e : s) cfg.script.push_back(script_entry_from_json(e));
      } else {
        throw ConfigError("backend '" + name + "': script must be a file path or a list");
      }
    }
    if (j.contains("profile")) {
      const auto& p = j.at("profile");
      auto& prof = cfg.profile;
      prof.p_correct = p.value("p_correct", prof.p_correct);
      prof.wrong_alphabet_size = p.value("wrong_alphabet_size", prof.wrong_alphabet_size);
      prof.verify_tpr = p.value("verify_tpr", prof.verify_tpr);
      prof.verify_fpr = p.value("verify_fpr", prof.verify_fpr);
      prof.seed = p.value("seed", prof.seed);
      prof.max_steps = p.value("max_steps", prof.max_steps);
      prof.calibrated_critique = p.value("calibrated_critique", prof.calibrated_critique);
    }
  } catch (const json::exception& e) {
    throw ConfigError("backend '" + name + "': " + e.what());
  }
  cfg.validate();
  return cfg;
}

ScriptEntry script_entry_from_json(const json& j) {
  ScriptEntry e;
  try {
    e.digest = opt_field<std::string>(j, "digest");
    e.contains = opt_field<std::string>(j, "contains");
    if (j.contains("reply")) e.replies.push_back(j.at("reply").get<std::string>());
    if (j.contains("replies")) {
      for (const auto& r : j.at("replies")) e.replies.push_back(r.get<std::string>());
    }
    e.rotate_by_seed = j.value("rotate_by_seed", false);
  } catch (const json::exception& ex) {
    throw InvalidArgument(ex.what());
  }
  if (!e.digest && !e.contains) throw InvalidArgument("entry needs digest or contains");
  if (e.replies.empty()) throw InvalidArgument("entry has no reply");
  return e;
}

json to_json(const ScriptEntry& e) {
  json j = {{"replies", e.replies}, {"rotate_by_seed", e.rotate_by_seed}};
  if (e.digest) j["digest"] = *e.digest;
  if (e.contains) j["contains"] = *e.contains;
  return j;
}

std::vector<ScriptEntry> load_script(const std::string& path) {
  std::vector<ScriptEntry> entries;
  std::size_t n = 0;
  for (const auto& j : read_jsonl(path)) {
    ++n;
    try {
      entries.push_back(script_entry_from_json(j));
    } catch (const InvalidArgument& e) {
      throw MalformedRecord(n, e.what());
    }
  }
  return entries;
}

}  // namespace vsynth::backend
