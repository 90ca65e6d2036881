#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsynth/answers/extract.hpp"
#include "vsynth/answers/verdict.hpp"
#include "vsynth/backend/backend.hpp"
#include "vsynth/bridge/bridge.hpp"
#include "vsynth/common/jsonl.hpp"
#include "vsynth/select/evaluate.hpp"
#include "vsynth/select/simulate.hpp"
#include "vsynth/treesearch/search.hpp"
#include "vsynth/verisynth/pipeline.hpp"

namespace vsynth::cli {

/// Environment variables with this prefix override config keys:
/// VSYNTH__search__k=5 sets search.k.
inline constexpr std::string_view kEnvPrefix = "VSYNTH__";

/// Built-in defaults; every config file is merged over this tree.
json default_config();

/// Parses a `--set` / environment value: JSON when it parses, else a string.
json parse_value(std::string_view text);

/// Sets `value` at a dotted path, creating objects on the way.
void set_path(json& root, std::string_view dotted, json value);

/// Layers defaults < file < environment < `sets` ("a.b=value").
/// Throws FileNotFound, ConfigError (bad file, unknown top-level key).
json layer_config(const std::optional<std::filesystem::path>& file,
                  const std::map<std::string, std::string>& env,
                  const std::vector<std::string>& sets);

/// Environment entries carrying kEnvPrefix, as "a.b" -> value.
std::map<std::string, std::string> config_env(const std::map<std::string, std::string>& environ_map);

/// Copy with every value under a secret-looking key replaced.
json redact(const json& config);

/// Typed views over a layered config tree.
class RunConfig {
 public:
  explicit RunConfig(json tree);

  const json& tree() const noexcept { return tree_; }
  std::uint64_t seed() const;
  double tolerance() const;
  int parallelism() const;
  bool mock_headers() const;
  std::filesystem::path out_dir() const;

  /// Backend named by a role (reasoner, verifier, judge, text, critic).
  /// Instances are shared between roles naming the same backend.
  /// Throws ConfigError when the role or backend is undefined.
  std::shared_ptr<backend::Backend> backend_for_role(const std::string& role) const;
  backend::BackendConfig backend_config(const std::string& name) const;

  /// Template text: the file named under templates.<name> or the built-in.
  std::string template_text(const std::string& name) const;

  answers::Extractor extractor() const;
  std::shared_ptr<const answers::VerdictGrammar> grammar() const;
  corpus::SamplerParams decoding() const;
  corpus::SamplerParams verifier_decoding() const;
  treesearch::SearchConfig search() const;
  verisynth::Stage1Config stage1() const;
  verisynth::Stage2Config stage2() const;
  bridge::BridgeConfig bridge() const;
  select::EvalConfig eval() const;
  select::SimulationParams simulation() const;

  /// Optional string at a dotted path.
  std::optional<std::string> path_value(std::string_view dotted) const;

 private:
  const json& at(std::string_view dotted) const;

  json tree_;
  mutable std::map<std::string, std::shared_ptr<backend::Backend>> instances_;
};

}  // namespace vsynth::cli
