#include "vsynth/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vsynth/answers/golden.hpp"
#include "vsynth/cli/config.hpp"
#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/parallel.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/corpus/pool.hpp"

extern char** environ;

namespace vsynth::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  std::optional<std::string> config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> parallelism;

  std::string pool;
  std::string schema = "native";
  std::string bridge_schema = "mavis_bridge";
  std::vector<std::string> sources;
  bool naive = false;
  bool trace = false;
  std::optional<std::string> rollouts;
  std::optional<std::string> rollout_source;
  std::optional<std::string> strategy;
  std::optional<int> n;
  std::optional<std::string> judging;
  std::string sizes;
};

/// Bookkeeping shared by every subcommand: inputs, outputs, manifest.
class Run {
 public:
  Run(std::string command, json config, std::ostream& out)
      : command_(std::move(command)),
        cfg_(std::move(config)),
        out_(out),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(cfg_.out_dir());
  }

  const RunConfig& cfg() const { return cfg_; }
  fs::path out_dir() const { return cfg_.out_dir(); }
  fs::path out_file(const std::string& name) const { return out_dir() / name; }
  std::ostream& out() { return out_; }

  void input(const fs::path& p) { inputs_[p.string()] = sha256_file_hex(p); }
  void output(const fs::path& p) { outputs_.push_back(p); }

  void finish() {
    const json effective = redact(cfg_.tree());
    write_text_file(out_file("effective_config.json"), effective.dump(2) + "\n");
    json outs = json::object();
    for (const auto& p : outputs_) {
      outs[fs::relative(p, out_dir()).generic_string()] = sha256_file_hex(p);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json manifest = {{"command", command_},
                           {"config_digest", sha256_hex(canonical_dump(effective))},
                           {"seed", cfg_.seed()},
                           {"input_digests", inputs_},
                           {"output_digests", outs},
                           {"wall_time_s", wall}};
    write_text_file(out_file("manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  RunConfig cfg_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> inputs_;
  std::vector<fs::path> outputs_;
};

std::vector<corpus::Question> load(Run& run, const std::string& path,
                                   corpus::Schema schema = corpus::Schema::Native) {
  auto qs = corpus::load_questions(path, schema);
  run.input(path);
  return qs;
}

void cmd_pool(Run& run) {
  const auto& cfg = run.cfg();
  const auto& pool_cfg = cfg.tree().at("pool");
  corpus::PoolSpec spec;
  spec.seed = cfg.seed();
  std::map<corpus::Source, fs::path> sources;
  try {
    for (auto it = pool_cfg.at("counts").begin(); it != pool_cfg.at("counts").end(); ++it) {
      spec.counts[corpus::Source::parse(it.key())] = it->get<std::size_t>();
    }
    for (auto it = pool_cfg.at("sources").begin(); it != pool_cfg.at("sources").end(); ++it) {
      sources[corpus::Source::parse(it.key())] = it->get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pool: ") + e.what());
  }
  if (spec.counts.empty()) throw ConfigError("pool.counts is empty");
  for (const auto& [src, count] : spec.counts) {
    if (!sources.count(src)) throw ConfigError("pool.sources has no file for " + src.name());
  }
  const auto pool = corpus::assemble_pool(sources, spec);
  for (const auto& [src, path] : sources) {
    if (spec.counts.count(src)) run.input(path);
  }
  const auto pool_file = run.out_file("pool.jsonl");
  corpus::write_records(pool_file, pool);
  run.output(pool_file);
  const auto stats = corpus::dataset_stats(pool);
  const auto stats_file = run.out_file("pool_stats.json");
  write_text_file(stats_file, to_json(stats).dump(2) + "\n");
  run.output(stats_file);
  run.out() << corpus::render_stats_table(stats);
}

void cmd_stats(Run& run, const Options& o) {
  const auto qs = load(run, o.pool, corpus::schema_from_string(o.schema));
  const auto stats = corpus::dataset_stats(qs);
  const auto json_file = run.out_file("stats.json");
  write_text_file(json_file, to_json(stats).dump(2) + "\n");
  const auto table = corpus::render_stats_table(stats);
  const auto table_file = run.out_file("stats_table.txt");
  write_text_file(table_file, table);
  run.output(json_file);
  run.output(table_file);
  run.out() << table;
}

void cmd_synth_tree(Run& run, const Options& o) {
  const auto& cfg = run.cfg();
  const auto pool = load(run, o.pool);
  const auto search = cfg.search();
  const auto extractor = cfg.extractor();
  auto reasoner = cfg.backend_for_role(o.naive ? "critic" : "reasoner");

  std::vector<std::vector<treesearch::Rollout>> rollouts(pool.size());
  std::vector<std::optional<answers::CanonicalAnswer>> naive_answers(pool.size());
  std::vector<std::string> traces(pool.size());
  parallel_for(pool.size(), static_cast<std::size_t>(cfg.parallelism()), [&](std::size_t i) {
    std::ostringstream trace;
    std::ostream* sink = o.trace ? &trace : nullptr;
    if (o.naive) {
      auto res = treesearch::run_naive_mcts(*reasoner, pool[i], search, extractor, sink);
      naive_answers[i] = res.answer;
      rollouts[i].push_back(std::move(res.rollout));
    } else {
      rollouts[i] = treesearch::run_search(*reasoner, pool[i], search, extractor, sink);
    }
    traces[i] = trace.str();
  });

  std::vector<corpus::Candidate> candidates;
  for (const auto& per_q : rollouts) {
    for (std::size_t j = 0; j < per_q.size(); ++j) {
      candidates.push_back(treesearch::to_candidate(per_q[j], static_cast<int>(j), reasoner->id(),
                                                    search, extractor));
    }
  }
  const auto rollout_file = run.out_file("rollouts.jsonl");
  corpus::write_records(rollout_file, candidates);
  run.output(rollout_file);

  json stats = {{"questions", pool.size()}, {"rollouts", candidates.size()}, {"naive", o.naive}};
  // Length profile of the rollouts: steps per rollout and characters.
  std::map<std::string, std::size_t> steps_hist;
  std::size_t chars_min = 0, chars_max = 0, chars_sum = 0, n_rollouts = 0;
  for (const auto& per_q : rollouts) {
    for (const auto& r : per_q) {
      ++steps_hist[std::to_string(r.path_steps.size())];
      const auto len = r.full_text.size();
      chars_min = n_rollouts == 0 ? len : std::min(chars_min, len);
      chars_max = std::max(chars_max, len);
      chars_sum += len;
      ++n_rollouts;
    }
  }
  stats["steps_histogram"] = steps_hist;
  stats["chars"] = {{"min", chars_min},
                    {"max", chars_max},
                    {"mean", n_rollouts ? static_cast<double>(chars_sum) / n_rollouts : 0.0}};
  if (o.naive) {
    std::size_t correct = 0;
    std::vector<json> lines;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const bool ok = naive_answers[i] &&
                      answers::matches_golden(*naive_answers[i], pool[i].golden_answer, pool[i].choices,
                                              extractor.tolerance());
      correct += ok ? 1 : 0;
      lines.push_back({{"question_id", pool[i].id},
                       {"answer", naive_answers[i] ? json(corpus::answer_to_json(*naive_answers[i]))
                                                   : json(nullptr)},
                       {"correct", ok}});
    }
    const auto naive_file = run.out_file("naive_results.jsonl");
    write_jsonl(naive_file, lines);
    run.output(naive_file);
    stats["correct"] = correct;
    stats["accuracy"] = pool.empty() ? 0.0 : static_cast<double>(correct) / pool.size();
  }
  if (o.trace) {
    std::vector<json> lines;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      std::istringstream in(traces[i]);
      for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        lines.push_back({{"question_id", pool[i].id}, {"event", json::parse(line)}});
      }
    }
    const auto trace_file = run.out_file("trace.jsonl");
    write_jsonl(trace_file, lines);
    run.output(trace_file);
  }
  const auto stats_file = run.out_file("synth_stats.json");
  write_text_file(stats_file, stats.dump(2) + "\n");
  run.output(stats_file);
  run.out() << stats.dump() << "\n";
}

void record_pipeline(Run& run, const verisynth::PipelineOutputs& res) {
  for (const auto& p : {res.candidates, res.verifications, res.clean, res.sft, res.stats_file}) {
    run.output(p);
  }
  run.out() << verisynth::to_json(res.stats).dump() << "\n";
}

void cmd_verify_gen(Run& run, const Options& o) {
  const auto& cfg = run.cfg();
  const auto pool = load(run, o.pool);
  auto s1 = cfg.stage1();
  s1.out_dir = run.out_dir();
  if (s1.rollouts_path) run.input(*s1.rollouts_path);
  verisynth::Stage1Backends backends;
  if (s1.source != verisynth::RolloutSource::Precomputed) {
    backends.reasoner = cfg.backend_for_role("reasoner");
  }
  backends.verifier = cfg.backend_for_role("verifier");
  record_pipeline(run, verisynth::run_stage1(pool, backends, s1, cfg.extractor()));
}

void cmd_stage2(Run& run, const Options& o) {
  const auto& cfg = run.cfg();
  const auto qs = load(run, o.pool);
  auto s2 = cfg.stage2();
  s2.out_dir = run.out_dir();
  const verisynth::Stage1Backends backends{cfg.backend_for_role("reasoner"),
                                           cfg.backend_for_role("verifier")};
  record_pipeline(run, verisynth::run_stage2(qs, s2, cfg.extractor(), backends));
}

void cmd_bridge(Run& run, const Options& o) {
  const auto& cfg = run.cfg();
  const auto qs = load(run, o.pool, corpus::schema_from_string(o.bridge_schema));
  std::vector<bridge::BridgeItem> items;
  items.reserve(qs.size());
  for (const auto& q : qs) items.push_back(bridge::bridge_item(q));
  auto bc = cfg.bridge();
  bc.out_dir = run.out_dir();
  auto text = cfg.backend_for_role("text");
  const auto res = bridge::synthesize_bridge(items, *text, bc, cfg.extractor());
  for (const auto& p : {res.d_r, res.audit, res.stats_file}) run.output(p);
  run.out() << bridge::to_json(res.stats).dump() << "\n";
}

void cmd_slices(Run& run, const Options& o) {
  const auto& cfg = run.cfg();
  std::vector<std::size_t> sizes;
  if (!o.sizes.empty()) {
    std::stringstream ss(o.sizes);
    for (std::string tok; std::getline(ss, tok, ',');) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
        sizes.push_back(static_cast<std::size_t>(v));
      } catch (const std::exception&) {
        throw ConfigError("bad slice size: " + tok);
      }
    }
  } else {
    try {
      sizes = cfg.tree().at("slices").at("sizes").get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("slices.sizes: ") + e.what());
    }
  }
  if (sizes.empty()) throw ConfigError("no slice sizes given");
  run.input(o.pool);
  for (const auto& p : bridge::scale_slices(o.pool, sizes, cfg.seed(), run.out_dir())) {
    run.output(p);
    run.out() << p.filename().string() << "\n";
  }
}

void cmd_eval(Run& run, const Options& o) {
  const auto& cfg = run.cfg();
  const auto extractor = cfg.extractor();
  if (o.judging) {
    std::vector<select::JudgeItem> items;
    try {
      items = corpus::read_records<select::JudgeItem>(*o.judging);
    } catch (const json::exception& e) {
      throw MalformedRecord(0, e.what());
    }
    run.input(*o.judging);
    auto judge = cfg.backend_for_role("judge");
    const auto grammar = cfg.grammar();
    verisynth::VerifyOptions opts;
    opts.mock_headers = cfg.mock_headers();
    opts.seed = cfg.seed();
    opts.decoding = cfg.verifier_decoding();
    opts.grammar = grammar.get();
    const verisynth::VerifyPromptTemplate tmpl(cfg.template_text("judge"), true);
    const auto report = select::evaluate_judging(items, *judge, tmpl, opts, extractor, cfg.parallelism());
    const auto file = run.out_file("judging_report.json");
    write_text_file(file, select::to_json(report).dump(2) + "\n");
    run.output(file);
    run.out() << select::to_json(report).dump() << "\n";
    return;
  }
  const auto bench = load(run, o.pool);
  const auto ec = cfg.eval();
  auto reasoner = cfg.backend_for_role("reasoner");
  std::shared_ptr<backend::Backend> selector;
  if (ec.strategy == select::Strategy::Verifier) selector = cfg.backend_for_role("verifier");
  if (ec.strategy == select::Strategy::Judge) selector = cfg.backend_for_role("judge");
  const auto report = select::evaluate(bench, *reasoner, selector.get(), ec, extractor);
  for (const auto& p : select::write_report(report, run.out_dir())) run.output(p);
  run.out() << select::render_table(report);
}

void cmd_simulate(Run& run) {
  const auto res = select::simulate_selection(run.cfg().simulation());
  const auto file = run.out_file("simulate.json");
  const json j = select::to_json(res);
  write_text_file(file, j.dump(2) + "\n");
  run.output(file);
  run.out() << j.dump() << "\n";
}

void print_error(std::ostream& err, const std::exception& e) {
  err << json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << "\n";
}

}  // namespace

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const FileNotFound*>(&e)) return "FileNotFound";
  if (dynamic_cast<const IoFailure*>(&e)) return "IoFailure";
  if (dynamic_cast<const MalformedRecord*>(&e)) return "MalformedRecord";
  if (dynamic_cast<const DuplicateId*>(&e)) return "DuplicateId";
  if (dynamic_cast<const InsufficientSource*>(&e)) return "InsufficientSource";
  if (dynamic_cast<const Timeout*>(&e)) return "Timeout";
  if (dynamic_cast<const HttpStatus*>(&e)) return "HttpStatus";
  if (dynamic_cast<const ExhaustedRetries*>(&e)) return "ExhaustedRetries";
  if (dynamic_cast<const NoScriptEntry*>(&e)) return "NoScriptEntry";
  if (dynamic_cast<const ImageReadFailure*>(&e)) return "ImageReadFailure";
  if (dynamic_cast<const BackendFailure*>(&e)) return "BackendFailure";
  if (dynamic_cast<const EmptyAnswer*>(&e)) return "EmptyAnswer";
  if (dynamic_cast<const ExpansionExhausted*>(&e)) return "ExpansionExhausted";
  if (dynamic_cast<const SearchStarved*>(&e)) return "SearchStarved";
  if (dynamic_cast<const NoChildren*>(&e)) return "NoChildren";
  if (dynamic_cast<const JoinFailure*>(&e)) return "JoinFailure";
  if (dynamic_cast<const MissingSlot*>(&e)) return "MissingSlot";
  if (dynamic_cast<const SliceTooLarge*>(&e)) return "SliceTooLarge";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const json::exception*>(&e)) return "MalformedJson";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "IoFailure";
  return "Error";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& environ_map) {
  CLI::App app{"Multimodal verifier data synthesis and selection toolkit", "vsynth"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_file, "Config file (JSON)");
  app.add_option("--set", o.sets, "Override a config key: a.b=value")->take_all();
  app.add_option("--seed", o.seed, "Global seed");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--parallelism", o.parallelism, "Questions in flight");

  auto* pool = app.add_subcommand("pool", "Assemble a seeded pool from per-source files");
  pool->add_option("--source", o.sources, "NAME=PATH, adds to pool.sources");

  auto* stats = app.add_subcommand("stats", "Per-source and per-category counts");
  stats->add_option("--pool", o.pool, "Question file")->required();
  stats->add_option("--schema", o.schema, "native or mavis_bridge");

  auto* synth = app.add_subcommand("synth-tree", "Tree-search rollouts for a pool");
  synth->add_option("--pool", o.pool, "Question file")->required();
  synth->add_flag("--naive", o.naive, "Self-critique rewards, one answer per question");
  synth->add_flag("--trace", o.trace, "Write per-iteration trace");

  auto* vgen = app.add_subcommand("verify-gen", "Stage-1 verifier data generation");
  vgen->add_option("--pool", o.pool, "Question file")->required();
  vgen->add_option("--rollouts", o.rollouts, "Precomputed candidate file");
  vgen->add_option("--source", o.rollout_source, "tree_search, direct_sampling or precomputed");

  auto* s2 = app.add_subcommand("stage2", "Stage-2 direct-sampling verifier data");
  s2->add_option("--questions", o.pool, "Question file")->required();

  auto* br = app.add_subcommand("bridge", "Text-only reasoning synthesis from descriptions");
  br->add_option("--input", o.pool, "Question file with diagram descriptions")->required();
  br->add_option("--schema", o.bridge_schema, "native or mavis_bridge");

  auto* sl = app.add_subcommand("slices", "Nested scale slices of a D_r file");
  sl->add_option("--d-r", o.pool, "D_r file")->required();
  sl->add_option("--sizes", o.sizes, "Comma-separated sizes");

  auto* ev = app.add_subcommand("eval", "Best-of-N evaluation or outcome judging");
  ev->add_option("--bench", o.pool, "Benchmark question file");
  ev->add_option("--strategy", o.strategy, "majority, judge or verifier");
  ev->add_option("--N", o.n, "Samples per question");
  ev->add_option("--judging", o.judging, "Judge items file");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo selection accuracy");
  sim->add_option("--N", o.n, "Samples per trial");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (ev->parsed() && o.pool.empty() && !o.judging) {
      throw CLI::RequiredError("eval needs --bench or --judging");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
    return kExitUsage;
  }

  auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    std::vector<std::string> sets = o.sets;
    auto push = [&](const std::string& key, const json& v) { sets.push_back(key + "=" + v.dump()); };
    if (o.seed) push("seed", *o.seed);
    if (o.out) push("paths.out_dir", *o.out);
    if (o.parallelism) push("parallelism", *o.parallelism);
    for (const auto& s : o.sources) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--source expects NAME=PATH");
      push("pool.sources." + s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.rollouts) {
      push("paths.rollouts", *o.rollouts);
      if (!o.rollout_source) push("stage1.source", "precomputed");
    }
    if (o.rollout_source) push("stage1.source", *o.rollout_source);
    if (o.strategy) push("eval.strategy", *o.strategy);
    if (o.n) push(command == "simulate" ? "simulate.N" : "eval.N", *o.n);

    std::optional<fs::path> file;
    if (o.config_file) file = *o.config_file;
    Run run(command, layer_config(file, config_env(environ_map), sets), out);
    if (o.config_file) run.input(*o.config_file);

    if (command == "pool") cmd_pool(run);
    else if (command == "stats") cmd_stats(run, o);
    else if (command == "synth-tree") cmd_synth_tree(run, o);
    else if (command == "verify-gen") cmd_verify_gen(run, o);
    else if (command == "stage2") cmd_stage2(run, o);
    else if (command == "bridge") cmd_bridge(run, o);
    else if (command == "slices") cmd_slices(run, o);
    else if (command == "eval") cmd_eval(run, o);
    else if (command == "simulate") cmd_simulate(run);
    run.finish();
  } catch (const std::exception& e) {
    print_error(err, e);
    return kExitFailure;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv(*e);
    const auto eq = kv.find('=');
    if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return run(args, std::cout, std::cerr, env);
}

}  // namespace vsynth::cli
