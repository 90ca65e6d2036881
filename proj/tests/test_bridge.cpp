#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support.hpp"
#include "vsynth/bridge/bridge.hpp"
#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/corpus/sft.hpp"

using namespace vsynth;
using namespace vsynth::bridge;
using testkit::contains;
using testkit::scripted;

namespace {

const std::string kDescription = "Triangle ABC with AB = 3 and BC = 4 and a right angle at B.";

corpus::Question described(const std::string& id, const std::string& golden,
                           const std::string& description = kDescription) {
  auto q = testkit::question(id, golden, "Find AC for " + id + ".");
  q.image_ref = "images/" + id + ".png";
  q.source = corpus::Source(corpus::Source::Kind::MAVISGeo);
  q.extras[std::string(corpus::kDiagramDescriptionKey)] = description;
  return q;
}

std::vector<BridgeItem> items(int count) {
  std::vector<BridgeItem> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(bridge_item(described("m" + std::to_string(i), std::to_string(i + 5),
                                        "Figure " + std::to_string(i) + ": " + kDescription)));
  }
  return out;
}

BridgeConfig config(const std::filesystem::path& out) {
  BridgeConfig cfg;
  cfg.out_dir = out;
  cfg.mock_headers = true;
  cfg.seed = 2;
  return cfg;
}

/// D_r with `count` distinct lines.
std::filesystem::path write_dr(const testkit::TempDir& dir, int count) {
  std::vector<std::string> lines;
  for (int i = 0; i < count; ++i) lines.push_back(R"({"id":"r)" + std::to_string(i) + R"("})");
  const auto path = dir / "D_r.jsonl";
  write_lines(path, lines);
  return path;
}

std::vector<std::string> texts(const std::filesystem::path& p) {
  std::vector<std::string> out;
  for (const auto& l : read_lines(p)) out.push_back(l.text);
  return out;
}

}  // namespace

TEST(Compose, HoldsDescriptionAndQuestionOnly) {
  const auto item = bridge_item(described("m1", "5"));
  const auto text = compose_text_prompt(item, default_bridge_template());
  EXPECT_NE(text.find(kDescription), std::string::npos);
  EXPECT_NE(text.find("Find AC for m1."), std::string::npos);
  EXPECT_EQ(text.find("images/m1.png"), std::string::npos);
  EXPECT_EQ(compose_text_prompt(item, "{question}|{description}"),
            "Find AC for m1.|" + kDescription);
}

TEST(Compose, Errors) {
  EXPECT_THROW(bridge_item(testkit::question("plain", "1")), InvalidArgument);
  auto item = bridge_item(described("m1", "5"));
  EXPECT_THROW(compose_text_prompt(item, "{question} only"), MissingSlot);
  EXPECT_THROW(compose_text_prompt(item, "{question} {description} {description}"), MissingSlot);
  item.description.clear();
  EXPECT_THROW(compose_text_prompt(item, default_bridge_template()), InvalidArgument);
}

TEST(Record, JsonRoundTrip) {
  BridgeRecord r{"m1", "prompt", "The answer is 5.", answers::CanonicalAnswer::numeric(5), true, 2};
  EXPECT_EQ(bridge_record_from_json(to_json(r)), r);
  r.extracted.reset();
  r.kept = false;
  EXPECT_EQ(bridge_record_from_json(to_json(r)), r);
}

TEST(Synthesize, CertainModelKeepsAll) {
  testkit::TempDir dir;
  auto b = testkit::stochastic(1.0);
  const auto out = synthesize_bridge(items(10), *b, config(dir.path()), answers::Extractor());
  EXPECT_EQ(out.stats, (BridgeStats{10, 10, 0, 0}));
  const auto dr = corpus::read_records<corpus::SftRecord>(out.d_r);
  ASSERT_EQ(dr.size(), 10u);
  for (std::size_t i = 0; i < dr.size(); ++i) {
    EXPECT_EQ(dr[i].id, "m" + std::to_string(i));
    EXPECT_EQ(dr[i].image_ref, "images/m" + std::to_string(i) + ".png");
    EXPECT_EQ(dr[i].user.find("Figure"), std::string::npos);
    EXPECT_EQ(dr[i].user.find(kDescription), std::string::npos);
  }
  EXPECT_EQ(read_lines(out.audit).size(), 10u);
}

TEST(Synthesize, HopelessModelKeepsNone) {
  testkit::TempDir dir;
  auto b = testkit::stochastic(0.0);
  const auto out = synthesize_bridge(items(10), *b, config(dir.path()), answers::Extractor());
  EXPECT_EQ(out.stats, (BridgeStats{10, 0, 10, 0}));
  EXPECT_EQ(read_lines(out.d_r).size(), 0u);
}

TEST(Synthesize, KeepRateFollowsModelAccuracy) {
  testkit::TempDir dir;
  auto b = testkit::stochastic(0.7, 1.0, 0.0, 31);
  auto cfg = config(dir.path());
  cfg.parallelism = 8;
  const int n = 300;
  const auto out = synthesize_bridge(items(n), *b, cfg, answers::Extractor());
  const double rate = static_cast<double>(out.stats.kept) / n;
  const double sigma = std::sqrt(0.7 * 0.3 / n);
  EXPECT_NEAR(rate, 0.7, 4 * sigma);
  EXPECT_EQ(out.stats.kept + out.stats.dropped_wrong + out.stats.dropped_unextractable, out.stats.total);
}

TEST(Synthesize, AttemptsAndUnextractable) {
  const std::vector<BridgeItem> one = {bridge_item(described("m1", "4"))};
  auto retry = scripted({contains("", {"The answer is 9.", "The answer is 4."})});
  for (int attempts : {1, 2}) {
    testkit::TempDir dir;
    auto cfg = config(dir.path());
    cfg.max_attempts = attempts;
    const auto out = synthesize_bridge(one, *retry, cfg, answers::Extractor());
    EXPECT_EQ(out.stats.kept, attempts == 2 ? 1u : 0u);
    const auto rec = bridge_record_from_json(json::parse(read_lines(out.audit).front().text));
    EXPECT_EQ(rec.attempts, attempts);
  }
  testkit::TempDir dir;
  auto mute = scripted({contains("", {"I cannot tell."})});
  const auto out = synthesize_bridge(one, *mute, config(dir.path()), answers::Extractor());
  EXPECT_EQ(out.stats, (BridgeStats{1, 0, 0, 1}));
}

TEST(Synthesize, ResumeMatchesUninterruptedRun) {
  testkit::TempDir fresh, resumed;
  const auto all = items(7);
  auto b = testkit::stochastic(0.5, 1.0, 0.0, 8);
  synthesize_bridge(all, *b, config(fresh.path()), answers::Extractor());
  auto cfg = config(resumed.path());
  cfg.stop_after = 3;
  EXPECT_FALSE(synthesize_bridge(all, *b, cfg, answers::Extractor()).complete);
  cfg.stop_after.reset();
  EXPECT_TRUE(synthesize_bridge(all, *b, cfg, answers::Extractor()).complete);
  for (const auto* name : {"D_r.jsonl", "bridge_records.jsonl", "bridge_stats.json"}) {
    EXPECT_EQ(sha256_file_hex(fresh / name), sha256_file_hex(resumed / name)) << name;
  }
}

TEST(Slices, NestedPrefixesInSourceOrder) {
  testkit::TempDir dir;
  const auto dr = write_dr(dir, 40);
  const auto source = texts(dr);
  const auto paths = scale_slices(dr, {5, 10, 20, 40}, 4, dir.path());
  ASSERT_EQ(paths.size(), 4u);
  std::vector<std::vector<std::string>> slices;
  for (const auto& p : paths) slices.push_back(texts(p));
  EXPECT_EQ(paths[0].filename(), "D_r_slice_5.jsonl");
  EXPECT_EQ(slices[3], source);
  for (std::size_t i = 0; i < slices.size(); ++i) {
    std::vector<std::size_t> positions;
    for (const auto& line : slices[i]) {
      positions.push_back(static_cast<std::size_t>(std::find(source.begin(), source.end(), line) - source.begin()));
    }
    EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
    EXPECT_EQ(std::set<std::string>(slices[i].begin(), slices[i].end()).size(), slices[i].size());
    if (i == 0) continue;
    const std::set<std::string> bigger(slices[i].begin(), slices[i].end());
    for (const auto& line : slices[i - 1]) EXPECT_TRUE(bigger.count(line)) << line;
  }
}

TEST(Slices, DeterministicAndSeedSensitive) {
  testkit::TempDir a, b, c;
  const auto dr = write_dr(a, 50);
  const auto pa = scale_slices(dr, {10}, 1, a.path());
  const auto pb = scale_slices(dr, {10}, 1, b.path());
  const auto pc = scale_slices(dr, {10}, 2, c.path());
  EXPECT_EQ(texts(pa[0]), texts(pb[0]));
  EXPECT_NE(texts(pa[0]), texts(pc[0]));
}

TEST(Slices, EmptyAndTooLarge) {
  testkit::TempDir dir;
  const auto dr = write_dr(dir, 3);
  const auto paths = scale_slices(dr, {0}, 1, dir.path());
  EXPECT_TRUE(texts(paths[0]).empty());
  EXPECT_THROW(scale_slices(dr, {4}, 1, dir.path()), SliceTooLarge);
}
