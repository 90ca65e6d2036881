#include "vsynth/bridge/bridge.hpp"

#include <algorithm>
#include <numeric>

#include "vsynth/answers/golden.hpp"
#include "vsynth/backend/mock_header.hpp"
#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/parallel.hpp"
#include "vsynth/common/random.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/corpus/sft.hpp"
#include "vsynth/treesearch/prompts.hpp"
#include "vsynth/verisynth/checkpoint.hpp"

namespace vsynth::bridge {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kBridge =
    "The question below comes with a diagram that you cannot see. A written description "
    "of the diagram is given instead.\n\n"
    "Diagram description:\n{description}\n\n"
    "Question:\n{question}\n\n"
    "Think through the problem step by step, checking each deduction against the "
    "description. End with a line of the form \"The answer is X.\"";

}  // namespace

std::string_view default_bridge_template() { return kBridge; }

BridgeItem bridge_item(const corpus::Question& q) {
  const auto desc = q.diagram_description();
  if (!desc || desc->empty()) throw InvalidArgument("question " + q.id + " has no diagram description");
  return {q, *desc};
}

std::string compose_text_prompt(const BridgeItem& item, std::string_view tmpl) {
  const PromptTemplate t(std::string(tmpl), {"description", "question"});
  if (item.description.empty()) {
    throw InvalidArgument("question " + item.question.id + ": empty diagram description");
  }
  return t.fill({{"description", item.description},
                 {"question", corpus::render_question(item.question)}});
}

json to_json(const BridgeRecord& r) {
  json j = {{"question_id", r.question_id},
            {"composed_prompt", r.composed_prompt},
            {"reasoning_text", r.reasoning_text},
            {"kept", r.kept},
            {"attempts", r.attempts}};
  if (r.extracted) j["extracted"] = corpus::answer_to_json(*r.extracted);
  return j;
}

BridgeRecord bridge_record_from_json(const json& j) {
  BridgeRecord r;
  r.question_id = j.at("question_id").get<std::string>();
  r.composed_prompt = j.at("composed_prompt").get<std::string>();
  r.reasoning_text = j.at("reasoning_text").get<std::string>();
  r.kept = j.at("kept").get<bool>();
  r.attempts = j.value("attempts", 1);
  if (j.contains("extracted")) r.extracted = corpus::answer_from_json(j.at("extracted"));
  return r;
}

json to_json(const BridgeStats& s) {
  return {{"total", s.total},
          {"kept", s.kept},
          {"dropped_wrong", s.dropped_wrong},
          {"dropped_unextractable", s.dropped_unextractable}};
}

void BridgeConfig::validate() const {
  PromptTemplate(tmpl, {"description", "question"});
  if (max_attempts < 1) throw ConfigError("bridge.max_attempts must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

BridgeOutputs synthesize_bridge(const std::vector<BridgeItem>& items,
                                backend::Backend& text_backend, const BridgeConfig& cfg,
                                const answers::Extractor& extractor) {
  cfg.validate();
  if (items.empty()) throw InvalidArgument("synthesize_bridge: no items");
  if (!fs::is_directory(cfg.out_dir)) {
    throw IoFailure("output directory does not exist: " + cfg.out_dir.string());
  }

  const auto run_key = sha256_hex(canonical_dump({{"tmpl", cfg.tmpl},
                                                  {"tolerance", cfg.tolerance},
                                                  {"max_attempts", cfg.max_attempts},
                                                  {"seed", cfg.seed},
                                                  {"mock_headers", cfg.mock_headers},
                                                  {"decoding", cfg.decoding},
                                                  {"backend", text_backend.id()}}));
  verisynth::Checkpoint ckpt(cfg.out_dir / "bridge_checkpoint.jsonl", run_key);

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ckpt.get(items[i].question.id)) pending.push_back(i);
  }
  bool interrupted = false;
  if (cfg.stop_after && pending.size() > static_cast<std::size_t>(*cfg.stop_after)) {
    pending.resize(static_cast<std::size_t>(std::max(*cfg.stop_after, 0)));
    interrupted = true;
  }

  parallel_for(pending.size(), static_cast<std::size_t>(cfg.parallelism), [&](std::size_t i) {
    const auto& item = items[pending[i]];
    const auto& q = item.question;
    BridgeRecord rec;
    rec.question_id = q.id;
    rec.composed_prompt = compose_text_prompt(item, cfg.tmpl);

    backend::GenerationRequest req;
    treesearch::apply_sampler(req, cfg.decoding);
    req.seed = cfg.seed;
    if (cfg.mock_headers) {
      req.messages.push_back(backend::mock_header_message(
          {backend::MockHeader::Task::Solve, q.golden_answer, std::nullopt, std::nullopt}));
    }
    req.messages.push_back({backend::Role::User, rec.composed_prompt, std::nullopt});

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
      req.sample_offset = attempt;
      rec.attempts = attempt + 1;
      rec.reasoning_text = text_backend.complete(req).samples.front();
      rec.extracted = extractor.extract(rec.reasoning_text);
      rec.kept = rec.extracted &&
                 answers::matches_golden(*rec.extracted, q.golden_answer, q.choices, cfg.tolerance);
      if (rec.kept) break;
    }
    ckpt.put(q.id, to_json(rec));
  });

  BridgeOutputs out;
  out.d_r = cfg.out_dir / "D_r.jsonl";
  out.audit = cfg.out_dir / "bridge_records.jsonl";
  out.stats_file = cfg.out_dir / "bridge_stats.json";
  if (interrupted) {
    out.complete = false;
    return out;
  }

  std::vector<json> audit;
  std::vector<corpus::SftRecord> training;
  for (const auto& item : items) {
    const auto rec = bridge_record_from_json(*ckpt.get(item.question.id));
    ++out.stats.total;
    if (rec.kept) {
      ++out.stats.kept;
      training.push_back({item.question.id, corpus::render_question(item.question),
                          item.question.image_ref, rec.reasoning_text});
    } else if (rec.extracted) {
      ++out.stats.dropped_wrong;
    } else {
      ++out.stats.dropped_unextractable;
    }
    audit.push_back(to_json(rec));
  }
  corpus::write_records(out.d_r, training);
  write_jsonl(out.audit, audit);
  write_text_file(out.stats_file, canonical_dump(to_json(out.stats)) + "\n");
  return out;
}

std::vector<fs::path> scale_slices(const fs::path& d_r, const std::vector<std::size_t>& sizes,
                                   std::uint64_t seed, const fs::path& out_dir) {
  const auto lines = read_lines(d_r);
  for (auto s : sizes) {
    if (s > lines.size()) throw SliceTooLarge(s, lines.size());
  }
  std::vector<std::size_t> perm(lines.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < perm.size(); ++i) {
    std::swap(perm[i], perm[i + rng.below(perm.size() - i)]);
  }

  std::vector<fs::path> out;
  for (auto s : sizes) {
    std::vector<std::size_t> chosen(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(s));
    std::sort(chosen.begin(), chosen.end());
    std::vector<std::string> slice;
    slice.reserve(s);
    for (auto i : chosen) slice.push_back(lines[i].text);
    auto path = out_dir / ("D_r_slice_" + std::to_string(s) + ".jsonl");
    write_lines(path, slice);
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace vsynth::bridge
