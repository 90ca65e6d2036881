#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "vsynth/common/digest.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/jsonl.hpp"
#include "vsynth/common/random.hpp"
#include "vsynth/corpus/io.hpp"
#include "vsynth/corpus/pool.hpp"
#include "vsynth/corpus/sft.hpp"

using namespace vsynth;
using namespace vsynth::corpus;
using testkit::TempDir;

namespace {

void write_lines_to(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  write_lines(p, lines);
}

Candidate candidate(const std::string& qid, int index, const std::string& text) {
  Candidate c;
  c.question_id = qid;
  c.index = index;
  c.reasoning_text = text;
  c.producer = "mock";
  return c;
}

VerificationRecord record(const std::string& qid, int index, answers::Verdict v) {
  VerificationRecord r;
  r.question_id = qid;
  r.candidate_index = index;
  r.verification_text = "checked. The answer is " +
                        std::string(v == answers::Verdict::Correct ? "correct." : "not correct.");
  r.verdict = v;
  r.verifier = "verifier";
  return r;
}

void write_source(const std::filesystem::path& p, const std::string& prefix, std::size_t n) {
  std::vector<Question> qs;
  for (std::size_t i = 0; i < n; ++i) qs.push_back(testkit::question(prefix + std::to_string(i), "1"));
  write_records(p, qs);
}

}  // namespace

TEST(LoadQuestions, EmptyFile) {
  TempDir dir;
  write_text_file(dir / "e.jsonl", "");
  EXPECT_TRUE(load_questions(dir / "e.jsonl").empty());
}

TEST(LoadQuestions, KeepsFileOrder) {
  TempDir dir;
  write_lines_to(dir / "q.jsonl", {R"({"id":"a","prompt_text":"p","golden_answer":"1"})",
                                   R"({"id":"b","prompt_text":"p","golden_answer":"2"})",
                                   R"({"id":"c","prompt_text":"p","golden_answer":"3"})"});
  const auto qs = load_questions(dir / "q.jsonl");
  ASSERT_EQ(qs.size(), 3u);
  EXPECT_EQ(qs[0].id, "a");
  EXPECT_EQ(qs[1].id, "b");
  EXPECT_EQ(qs[2].id, "c");
}

TEST(LoadQuestions, DuplicateId) {
  TempDir dir;
  write_lines_to(dir / "q.jsonl", {R"({"id":"a","prompt_text":"p","golden_answer":"1"})",
                                   R"({"id":"a","prompt_text":"p","golden_answer":"2"})"});
  try {
    load_questions(dir / "q.jsonl");
    FAIL();
  } catch (const DuplicateId& e) {
    EXPECT_EQ(e.id(), "a");
  }
}

TEST(LoadQuestions, MalformedLine) {
  TempDir dir;
  write_lines_to(dir / "q.jsonl", {R"({"id":"a","prompt_text":"p","golden_answer":"1"})",
                                   R"({"id":"b","prompt_text":"p"})"});
  try {
    load_questions(dir / "q.jsonl");
    FAIL();
  } catch (const MalformedRecord& e) {
    EXPECT_EQ(e.line_no(), 2u);
  }
  EXPECT_THROW(load_questions(dir / "missing.jsonl"), FileNotFound);
}

TEST(LoadQuestions, ChoicesInvariant) {
  TempDir dir;
  write_lines_to(dir / "q.jsonl",
                 {R"({"id":"a","prompt_text":"p","golden_answer":"dog","choices":["cat","bird"]})"});
  EXPECT_THROW(load_questions(dir / "q.jsonl"), MalformedRecord);
  write_lines_to(dir / "ok.jsonl",
                 {R"({"id":"a","prompt_text":"p","golden_answer":"B","choices":["cat","bird"]})"});
  EXPECT_EQ(load_questions(dir / "ok.jsonl").size(), 1u);
}

TEST(LoadQuestions, MavisSchemaCarriesDescription) {
  TempDir dir;
  write_lines_to(dir / "m.jsonl",
                 {R"({"id":"m1","question":"find x","answer":"5","image":"img/m1.png","diagram_description":"a right triangle"})"});
  const auto qs = load_questions(dir / "m.jsonl", Schema::MavisBridge);
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].prompt_text, "find x");
  EXPECT_EQ(qs[0].golden_answer, "5");
  EXPECT_EQ(qs[0].image_ref, "img/m1.png");
  EXPECT_EQ(qs[0].source.kind(), Source::Kind::MAVISGeo);
  EXPECT_EQ(qs[0].diagram_description(), "a right triangle");

  write_lines_to(dir / "bad.jsonl", {R"({"id":"m1","question":"find x","answer":"5"})"});
  EXPECT_THROW(load_questions(dir / "bad.jsonl", Schema::MavisBridge), MalformedRecord);
}

TEST(Source, ParsesKnownSpellings) {
  EXPECT_EQ(Source::parse("Super-CLEVR").kind(), Source::Kind::SuperCLEVR);
  EXPECT_EQ(Source::parse("mavis_geo").kind(), Source::Kind::MAVISGeo);
  EXPECT_EQ(Source::parse("geometry3k").kind(), Source::Kind::Geometry3K);
  EXPECT_EQ(Source::parse("UniGeo").kind(), Source::Kind::Other);
  EXPECT_EQ(Source::parse("UniGeo").name(), "UniGeo");
  EXPECT_THROW(Source::parse(""), InvalidArgument);
}

TEST(WriteRecords, EmptyAndRoundTrip) {
  TempDir dir;
  EXPECT_EQ(write_records(dir / "empty.jsonl", std::vector<Question>{}), 0u);
  EXPECT_EQ(read_text_file(dir / "empty.jsonl"), "");

  std::vector<Question> qs;
  for (int i = 0; i < 5; ++i) {
    auto q = testkit::question("q" + std::to_string(i), std::to_string(i), "", "GPS");
    if (i % 2) q.image_ref = "img/" + q.id + ".png";
    if (i == 3) q.choices = std::vector<std::string>{"1", "3"};
    qs.push_back(q);
  }
  EXPECT_EQ(write_records(dir / "q.jsonl", qs), 5u);
  EXPECT_EQ(load_questions(dir / "q.jsonl"), qs);
}

TEST(WriteRecords, PermutedFieldsGiveSameBytes) {
  const json a = json::parse(R"({"id":"x","prompt_text":"p","golden_answer":"1","source":"GEOS","extra":{"b":1,"a":2}})");
  const json b = json::parse(R"({"extra":{"a":2,"b":1},"source":"GEOS","golden_answer":"1","prompt_text":"p","id":"x"})");
  EXPECT_EQ(canonical_dump(json(a.get<Question>())), canonical_dump(json(b.get<Question>())));
}

TEST(WriteRecords, UnknownKeysSurviveRoundTrip) {
  const json in = json::parse(R"({"id":"x","prompt_text":"p","golden_answer":"1","source":"GEOS","upstream_field":[1,2]})");
  const json out = in.get<Question>();
  EXPECT_EQ(out.at("upstream_field"), json::parse("[1,2]"));
}

TEST(RoundTripProperty, AllRecordTypes) {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    auto q = testkit::question("q" + std::to_string(i), std::to_string(rng.below(100)));
    if (rng.bernoulli(0.5)) q.image_ref = "img/" + std::to_string(i) + ".png";
    if (rng.bernoulli(0.3)) q.category = "MWP";
    if (rng.bernoulli(0.2)) q.extras["note"] = "n" + std::to_string(rng.below(5));
    EXPECT_EQ(json(q).get<Question>(), q);

    auto c = candidate(q.id, static_cast<int>(rng.below(8)), "text " + std::to_string(i));
    switch (rng.below(4)) {
      case 0: c.extracted_answer = answers::CanonicalAnswer::numeric(rng.uniform() * 100); break;
      case 1: c.extracted_answer = answers::CanonicalAnswer::choice('A' + rng.below(5)); break;
      case 2: c.extracted_answer = answers::CanonicalAnswer::text("word" + std::to_string(i)); break;
      default: break;
    }
    if (rng.bernoulli(0.5)) c.sampler_params.seed = rng.next();
    c.sampler_params.temperature = rng.uniform();
    EXPECT_EQ(json(c).get<Candidate>(), c);

    auto v = record(q.id, c.index, rng.bernoulli(0.5) ? answers::Verdict::Correct
                                                      : answers::Verdict::Unparseable);
    if (rng.bernoulli(0.2)) v.error = "timeout";
    if (rng.bernoulli(0.2)) v.discard_reason = "unparseable_verdict";
    EXPECT_EQ(json(v).get<VerificationRecord>(), v);

    CleanExample e{q, c, v, rng.bernoulli(0.5) ? Condition::Cond1 : Condition::Cond2};
    EXPECT_EQ(json(e).get<CleanExample>(), e);
  }
}

TEST(RoundTripProperty, DistinctRecordsDistinctBytes) {
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    auto q = testkit::question("q" + std::to_string(i % 20), std::to_string(i / 20));
    EXPECT_TRUE(seen.insert(canonical_dump(json(q))).second);
  }
}

TEST(AssemblePool, ExactCountsNoRepeatsDeterministic) {
  TempDir dir;
  write_source(dir / "g.jsonl", "g", 50);
  write_source(dir / "f.jsonl", "f", 30);
  const std::map<Source, std::filesystem::path> sources = {
      {Source(Source::Kind::Geometry3K), dir / "g.jsonl"},
      {Source(Source::Kind::FigureQA), dir / "f.jsonl"}};
  PoolSpec spec;
  spec.counts = {{Source(Source::Kind::Geometry3K), 20}, {Source(Source::Kind::FigureQA), 7}};
  spec.seed = 9;
  const auto a = assemble_pool(sources, spec);
  const auto b = assemble_pool(sources, spec);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 27u);
  std::set<std::string> ids;
  std::map<std::string, int> per_source;
  for (const auto& q : a) {
    ids.insert(q.id);
    per_source[q.source.name()]++;
  }
  EXPECT_EQ(ids.size(), 27u);
  EXPECT_EQ(per_source["Geometry3K"], 20);
  EXPECT_EQ(per_source["FigureQA"], 7);

  write_records(dir / "a.jsonl", a);
  write_records(dir / "b.jsonl", b);
  EXPECT_EQ(read_text_file(dir / "a.jsonl"), read_text_file(dir / "b.jsonl"));

  spec.seed = 10;
  EXPECT_NE(assemble_pool(sources, spec), a);
}

TEST(AssemblePool, ZeroCountsAndShortage) {
  TempDir dir;
  write_source(dir / "g.jsonl", "g", 5);
  const std::map<Source, std::filesystem::path> sources = {{Source(Source::Kind::GEOS), dir / "g.jsonl"}};
  PoolSpec spec;
  spec.counts = {{Source(Source::Kind::GEOS), 0}};
  EXPECT_TRUE(assemble_pool(sources, spec).empty());
  spec.counts = {{Source(Source::Kind::GEOS), 6}};
  EXPECT_THROW(assemble_pool(sources, spec), InsufficientSource);
  spec.counts = {{Source(Source::Kind::TabMWP), 1}};
  EXPECT_THROW(assemble_pool(sources, spec), InvalidArgument);
}

TEST(DatasetStats, PercentagesAndTable) {
  std::vector<Question> qs;
  for (int i = 0; i < 3; ++i) qs.push_back(testkit::question("a" + std::to_string(i), "1", "", "GPS"));
  auto q = testkit::question("b", "1");
  q.source = Source(Source::Kind::TabMWP);
  qs.push_back(q);
  const auto s = dataset_stats(qs);
  EXPECT_EQ(s.total, 4u);
  EXPECT_DOUBLE_EQ(s.by_source.at("Geometry3K").percent, 75.0);
  EXPECT_EQ(s.by_category.at("GPS").count, 3u);
  const auto table = render_stats_table(s);
  EXPECT_NE(table.find("75.00"), std::string::npos);
  EXPECT_NE(table.find("25.00"), std::string::npos);
}

TEST(EmitSft, MapsFieldsAndKeepsOrder) {
  TempDir dir;
  std::vector<CleanExample> ex;
  for (int i = 0; i < 4; ++i) {
    auto q = testkit::question("q" + std::to_string(i), "1");
    q.image_ref = "img/q" + std::to_string(i) + ".png";
    auto c = candidate(q.id, 0, "solution " + std::to_string(i));
    auto v = record(q.id, 0, answers::Verdict::Correct);
    v.verification_text = "verification " + std::to_string(i) + ". The answer is correct.";
    ex.push_back({q, c, v, Condition::Cond1});
  }
  EXPECT_EQ(emit_sft_dataset(ex, dir / "sft.jsonl"), 4u);
  const auto recs = read_records<SftRecord>(dir / "sft.jsonl");
  ASSERT_EQ(recs.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(recs[i].assistant, ex[i].verification.verification_text);
    EXPECT_EQ(recs[i].image_ref, ex[i].question.image_ref);
    EXPECT_NE(recs[i].user.find(ex[i].question.prompt_text), std::string::npos);
    EXPECT_NE(recs[i].user.find(ex[i].candidate.reasoning_text), std::string::npos);
  }
  EXPECT_THROW(emit_sft_dataset({}, dir / "none.jsonl"), InvalidArgument);
}
