#include "vsynth/cli/config.hpp"

#include <algorithm>
#include <cctype>

#include "vsynth/common/error.hpp"
#include "vsynth/treesearch/prompts.hpp"
#include "vsynth/verisynth/verify.hpp"

namespace vsynth::cli {
namespace {

void merge_into(json& base, const json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      merge_into(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

bool secret_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  auto ends_with = [&](std::string_view suffix) {
    return key.size() >= suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return key == "token" || ends_with("_token") || key == "api_key" || key == "apikey" ||
         ends_with("_api_key") || key == "authorization" ||
         key.find("secret") != std::string::npos || key.find("password") != std::string::npos;
}

template <typename T>
T get_as(const json& j, std::string_view dotted) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key " + std::string(dotted) + ": " + e.what());
  }
}

}  // namespace

json default_config() {
  const json decoding = {{"max_new_tokens", 4096},
                         {"temperature", 0.3},
                         {"top_k", 5},
                         {"repetition_penalty", 1.05}};
  return {
      {"seed", 0},
      {"tolerance", answers::kDefaultTolerance},
      {"parallelism", 4},
      {"test", {{"mock_headers", false}}},
      {"backends", json::object()},
      {"roles",
       {{"reasoner", "reasoner"},
        {"verifier", "verifier"},
        {"judge", "judge"},
        {"text", "text"},
        {"critic", "reasoner"}}},
      {"decoding", decoding},
      {"verifier_decoding", decoding},
      {"search",
       {{"k", 3},
        {"l", 5},
        {"n", 8},
        {"max_depth", 10},
        {"uct_c", 1.414},
        {"iterations", 40},
        {"step_delimiter", "blank_line"},
        {"independent_calls", true},
        {"simulation_failures_fatal", true}}},
      {"stage1", {{"source", "tree_search"}, {"unparseable_retries", 0}, {"image_passthrough", true}}},
      {"stage2", {{"samples_per_question", 8}, {"raw_exact_match", false}, {"independent_calls", true}}},
      {"extractor", {{"mode", "rule_based"}, {"backend", nullptr}}},
      {"verdict_markers", {{"correct", json::array()}, {"incorrect", json::array()}}},
      {"bridge", {{"max_attempts", 1}}},
      {"eval", {{"strategy", "majority"}, {"N", 1}, {"independent_calls", true}}},
      {"pool", {{"counts", json::object()}, {"sources", json::object()}}},
      {"slices", {{"sizes", json::array()}}},
      {"simulate",
       {{"p_correct", 0.6},
        {"wrong_alphabet_size", 3},
        {"tpr", 1.0},
        {"fpr", 0.0},
        {"N", 8},
        {"trials", 100000}}},
      {"paths", {{"out_dir", "out"}, {"rollouts", nullptr}}},
      {"templates",
       {{"solve", nullptr},
        {"critique", nullptr},
        {"verify", nullptr},
        {"judge", nullptr},
        {"extract", nullptr},
        {"bridge", nullptr}}},
  };
}

json parse_value(std::string_view text) {
  const json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) return std::string(text);
  return j;
}

void set_path(json& root, std::string_view dotted, json value) {
  if (dotted.empty()) throw ConfigError("empty config key");
  json* cur = &root;
  std::size_t pos = 0;
  while (true) {
    const auto dot = dotted.find('.', pos);
    const std::string key(dotted.substr(pos, dot == std::string_view::npos ? std::string_view::npos
                                                                           : dot - pos));
    if (key.empty()) throw ConfigError("bad config key: " + std::string(dotted));
    if (!cur->is_object()) *cur = json::object();
    if (dot == std::string_view::npos) {
      (*cur)[key] = std::move(value);
      return;
    }
    cur = &(*cur)[key];
    pos = dot + 1;
  }
}

std::map<std::string, std::string> config_env(const std::map<std::string, std::string>& env) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : env) {
    if (k.rfind(kEnvPrefix, 0) != 0 || k.size() == kEnvPrefix.size()) continue;
    std::string dotted;
    std::string_view rest(k);
    rest.remove_prefix(kEnvPrefix.size());
    while (true) {
      const auto sep = rest.find("__");
      dotted += std::string(rest.substr(0, sep));
      if (sep == std::string_view::npos) break;
      dotted += '.';
      rest.remove_prefix(sep + 2);
    }
    out[dotted] = v;
  }
  return out;
}

json layer_config(const std::optional<std::filesystem::path>& file,
                  const std::map<std::string, std::string>& env,
                  const std::vector<std::string>& sets) {
  json cfg = default_config();
  const json defaults = cfg;
  if (file) {
    const json j = json::parse(read_text_file(*file), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ConfigError("config file is not a JSON object: " + file->string());
    }
    merge_into(cfg, j);
  }
  for (const auto& [k, v] : env) set_path(cfg, k, parse_value(v));
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + s);
    set_path(cfg, s.substr(0, eq), parse_value(std::string_view(s).substr(eq + 1)));
  }
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (!defaults.contains(it.key())) throw ConfigError("unknown config key: " + it.key());
  }
  return cfg;
}

json redact(const json& config) {
  if (config.is_object()) {
    json out = json::object();
    for (auto it = config.begin(); it != config.end(); ++it) {
      out[it.key()] = secret_key(it.key()) ? json("<redacted>") : redact(*it);
    }
    return out;
  }
  if (config.is_array()) {
    json out = json::array();
    for (const auto& v : config) out.push_back(redact(v));
    return out;
  }
  return config;
}

RunConfig::RunConfig(json tree) : tree_(std::move(tree)) {}

const json& RunConfig::at(std::string_view dotted) const {
  const json* cur = &tree_;
  std::size_t pos = 0;
  while (true) {
    const auto dot = dotted.find('.', pos);
    const std::string key(dotted.substr(pos, dot == std::string_view::npos ? std::string_view::npos
                                                                           : dot - pos));
    if (!cur->is_object() || !cur->contains(key)) {
      throw ConfigError("missing config key: " + std::string(dotted));
    }
    cur = &cur->at(key);
    if (dot == std::string_view::npos) return *cur;
    pos = dot + 1;
  }
}

std::optional<std::string> RunConfig::path_value(std::string_view dotted) const {
  try {
    const auto& v = at(dotted);
    if (v.is_null()) return std::nullopt;
    return get_as<std::string>(v, dotted);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

std::uint64_t RunConfig::seed() const { return get_as<std::uint64_t>(at("seed"), "seed"); }
double RunConfig::tolerance() const {
  const auto t = get_as<double>(at("tolerance"), "tolerance");
  if (!(t >= 0.0)) throw ConfigError("tolerance must be >= 0");
  return t;
}
int RunConfig::parallelism() const {
  const auto p = get_as<int>(at("parallelism"), "parallelism");
  if (p < 1) throw ConfigError("parallelism must be >= 1");
  return p;
}
bool RunConfig::mock_headers() const {
  return get_as<bool>(at("test.mock_headers"), "test.mock_headers");
}
std::filesystem::path RunConfig::out_dir() const {
  return get_as<std::string>(at("paths.out_dir"), "paths.out_dir");
}

backend::BackendConfig RunConfig::backend_config(const std::string& name) const {
  const auto& backends = at("backends");
  if (!backends.contains(name)) throw ConfigError("backend '" + name + "' is not defined");
  return backend::backend_config_from_json(backends.at(name), name);
}

std::shared_ptr<backend::Backend> RunConfig::backend_for_role(const std::string& role) const {
  const auto& roles = at("roles");
  if (!roles.contains(role) || roles.at(role).is_null()) {
    throw ConfigError("role '" + role + "' has no backend");
  }
  const auto name = get_as<std::string>(roles.at(role), "roles." + role);
  auto& inst = instances_[name];
  if (!inst) inst = backend::make_backend(backend_config(name));
  return inst;
}

std::string RunConfig::template_text(const std::string& name) const {
  if (const auto file = path_value("templates." + name)) return read_text_file(*file);
  if (name == "solve") return std::string(treesearch::default_solve_template());
  if (name == "critique") return std::string(treesearch::default_critique_template());
  if (name == "verify" || name == "judge") return std::string(verisynth::default_verify_template());
  if (name == "extract") return std::string(answers::default_extraction_template());
  if (name == "bridge") return std::string(bridge::default_bridge_template());
  throw ConfigError("unknown template: " + name);
}

answers::Extractor RunConfig::extractor() const {
  answers::ExtractorConfig cfg;
  const auto mode = get_as<std::string>(at("extractor.mode"), "extractor.mode");
  if (mode == "rule_based") {
    cfg.mode = answers::ExtractorConfig::Mode::RuleBased;
  } else if (mode == "model_based") {
    cfg.mode = answers::ExtractorConfig::Mode::ModelBased;
  } else {
    throw ConfigError("extractor.mode must be rule_based or model_based");
  }
  cfg.numeric_tolerance = tolerance();
  cfg.extraction_prompt_template = template_text("extract");
  std::shared_ptr<backend::Backend> model;
  if (cfg.mode == answers::ExtractorConfig::Mode::ModelBased) {
    const auto name = path_value("extractor.backend");
    if (!name) throw ConfigError("model-based extraction requires extractor.backend");
    cfg.model_backend = backend_config(*name);
    auto& inst = instances_[*name];
    if (!inst) inst = backend::make_backend(*cfg.model_backend);
    model = inst;
  }
  cfg.validate();
  return answers::Extractor(cfg, model);
}

std::shared_ptr<const answers::VerdictGrammar> RunConfig::grammar() const {
  const auto& markers = at("verdict_markers");
  auto g = std::make_shared<answers::VerdictGrammar>();
  try {
    for (const auto& p : markers.value("correct", json::array())) g->add_correct(p.get<std::string>());
    for (const auto& p : markers.value("incorrect", json::array())) {
      g->add_incorrect(p.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("verdict_markers: ") + e.what());
  } catch (const std::regex_error& e) {
    throw ConfigError(std::string("verdict_markers: bad pattern: ") + e.what());
  }
  return g;
}

corpus::SamplerParams RunConfig::decoding() const {
  return get_as<corpus::SamplerParams>(at("decoding"), "decoding");
}

corpus::SamplerParams RunConfig::verifier_decoding() const {
  return get_as<corpus::SamplerParams>(at("verifier_decoding"), "verifier_decoding");
}

treesearch::SearchConfig RunConfig::search() const {
  const auto& s = at("search");
  treesearch::SearchConfig c;
  try {
    c.k = s.value("k", c.k);
    c.l = s.value("l", c.l);
    c.n = s.value("n", c.n);
    c.max_depth = s.value("max_depth", c.max_depth);
    c.uct_c = s.value("uct_c", c.uct_c);
    c.iterations = s.value("iterations", c.iterations);
    c.step_delimiter =
        treesearch::step_delimiter_from_string(s.value("step_delimiter", std::string("blank_line")));
    c.independent_calls = s.value("independent_calls", c.independent_calls);
    c.simulation_failures_fatal = s.value("simulation_failures_fatal", c.simulation_failures_fatal);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("search: ") + e.what());
  }
  c.seed = seed();
  c.mock_headers = mock_headers();
  c.decoding = decoding();
  c.solve_template = template_text("solve");
  c.critique_template = template_text("critique");
  c.validate();
  return c;
}

verisynth::Stage1Config RunConfig::stage1() const {
  verisynth::Stage1Config c;
  const auto& s = at("stage1");
  try {
    c.source = verisynth::rollout_source_from_string(s.value("source", std::string("tree_search")));
    c.unparseable_retries = s.value("unparseable_retries", 0);
    c.image_passthrough = s.value("image_passthrough", true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("stage1: ") + e.what());
  }
  c.search = search();
  if (const auto r = path_value("paths.rollouts")) c.rollouts_path = *r;
  c.verify_template = template_text("verify");
  c.verifier_decoding = verifier_decoding();
  c.grammar = grammar();
  c.tolerance = tolerance();
  c.seed = seed();
  c.mock_headers = mock_headers();
  c.parallelism = parallelism();
  c.out_dir = out_dir();
  return c;
}

verisynth::Stage2Config RunConfig::stage2() const {
  verisynth::Stage2Config c;
  const auto& s = at("stage2");
  try {
    c.samples_per_question = s.value("samples_per_question", c.samples_per_question);
    c.raw_exact_match = s.value("raw_exact_match", false);
    c.independent_calls = s.value("independent_calls", true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("stage2: ") + e.what());
  }
  const auto role_backend = [&](const std::string& role) {
    return backend_config(get_as<std::string>(at("roles." + role), "roles." + role));
  };
  c.reasoner = role_backend("reasoner");
  c.verifier = role_backend("verifier");
  c.tolerance = tolerance();
  c.seed = seed();
  c.mock_headers = mock_headers();
  c.decoding = decoding();
  c.verifier_decoding = verifier_decoding();
  c.grammar = grammar();
  c.solve_template = template_text("solve");
  c.verify_template = template_text("verify");
  c.parallelism = parallelism();
  c.out_dir = out_dir();
  c.validate();
  return c;
}

bridge::BridgeConfig RunConfig::bridge() const {
  bridge::BridgeConfig c;
  c.tmpl = template_text("bridge");
  c.tolerance = tolerance();
  c.max_attempts = get_as<int>(at("bridge.max_attempts"), "bridge.max_attempts");
  c.seed = seed();
  c.mock_headers = mock_headers();
  c.decoding = decoding();
  c.parallelism = parallelism();
  c.out_dir = out_dir();
  c.validate();
  return c;
}

select::EvalConfig RunConfig::eval() const {
  select::EvalConfig c;
  c.strategy = select::strategy_from_string(get_as<std::string>(at("eval.strategy"), "eval.strategy"));
  c.N = get_as<int>(at("eval.N"), "eval.N");
  c.independent_calls = get_as<bool>(at("eval.independent_calls"), "eval.independent_calls");
  c.tolerance = tolerance();
  c.seed = seed();
  c.mock_headers = mock_headers();
  c.decoding = decoding();
  c.solve_template = template_text("solve");
  c.selector_template = template_text(c.strategy == select::Strategy::Judge ? "judge" : "verify");
  c.grammar = grammar();
  c.parallelism = parallelism();
  c.validate();
  return c;
}

select::SimulationParams RunConfig::simulation() const {
  const auto& s = at("simulate");
  select::SimulationParams p;
  try {
    p.p_correct = s.value("p_correct", p.p_correct);
    p.wrong_alphabet_size = s.value("wrong_alphabet_size", p.wrong_alphabet_size);
    p.tpr = s.value("tpr", p.tpr);
    p.fpr = s.value("fpr", p.fpr);
    p.N = s.value("N", p.N);
    p.trials = s.value("trials", p.trials);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("simulate: ") + e.what());
  }
  p.seed = seed();
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("simulate: ") + e.what());
  }
  return p;
}

}  // namespace vsynth::cli
