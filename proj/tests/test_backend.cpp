#include <gtest/gtest.h>

#include <httplib.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include "support.hpp"
#include "vsynth/answers/extract.hpp"
#include "vsynth/backend/mock_header.hpp"
#include "vsynth/backend/stochastic.hpp"
#include "vsynth/backend/wire.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/jsonl.hpp"

using namespace vsynth;
using namespace vsynth::backend;

namespace {

GenerationRequest solve_request(const std::string& gold, const std::string& question) {
  GenerationRequest req;
  req.messages.push_back(mock_header_message({MockHeader::Task::Solve, gold, std::nullopt, std::nullopt}));
  req.messages.push_back({Role::User, question, std::nullopt});
  return req;
}

GenerationRequest verify_request(const std::string& gold, const std::string& cand,
                                 const std::string& text) {
  GenerationRequest req;
  req.messages.push_back(mock_header_message({MockHeader::Task::Verify, gold, cand, std::nullopt}));
  req.messages.push_back({Role::User, text, std::nullopt});
  return req;
}

/// Local chat-completions server. `handler` decides the status per call.
class FixtureServer {
 public:
  using Handler = std::function<int(int call, const httplib::Request&)>;

  explicit FixtureServer(Handler handler, std::chrono::milliseconds delay = {})
      : handler_(std::move(handler)), delay_(delay) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(48); };
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      {
        std::lock_guard lock(mu_);
        peak_ = std::max(peak_, now);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      const int call = calls_++;
      if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
      const int status = handler_(call, req);
      res.status = status;
      if (status == 200) {
        const auto n = json::parse(req.body).at("n").get<int>();
        json choices = json::array();
        for (int i = 0; i < n; ++i) choices.push_back({{"message", {{"content", "ok " + std::to_string(i)}}}});
        res.set_content(json{{"choices", choices}}.dump(), "application/json");
      } else {
        res.set_content("{\"error\":\"nope\"}", "application/json");
      }
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FixtureServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int calls() const { return calls_.load(); }
  int peak() const {
    std::lock_guard lock(mu_);
    return peak_;
  }
  std::vector<std::string> auth() const {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  Handler handler_;
  std::chrono::milliseconds delay_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  mutable std::mutex mu_;
  int peak_ = 0;
  std::vector<std::string> auth_;
};

BackendConfig http_config(const std::string& url, int max_retries = 3, int max_in_flight = 4) {
  BackendConfig cfg;
  cfg.kind = BackendConfig::Kind::Http;
  cfg.name = "http";
  cfg.endpoint_url = url;
  cfg.model_name = "test-model";
  cfg.max_retries = max_retries;
  cfg.max_in_flight = max_in_flight;
  cfg.timeout = std::chrono::milliseconds(5000);
  cfg.retry_backoff.base = std::chrono::milliseconds(1);
  cfg.retry_backoff.max_delay = std::chrono::milliseconds(5);
  cfg.retry_backoff.jitter = std::chrono::milliseconds(0);
  return cfg;
}

}  // namespace

TEST(Request, DefaultsAndValidation) {
  GenerationRequest req;
  EXPECT_EQ(req.max_new_tokens, 4096);
  EXPECT_DOUBLE_EQ(req.temperature, 0.3);
  EXPECT_EQ(req.top_k, 5);
  EXPECT_DOUBLE_EQ(req.repetition_penalty, 1.05);
  EXPECT_THROW(req.validate(), InvalidArgument);
  req = testkit::text_request("x");
  req.num_samples = 0;
  EXPECT_THROW(req.validate(), InvalidArgument);
  req.num_samples = 1;
  req.temperature = -1;
  EXPECT_THROW(req.validate(), InvalidArgument);
}

TEST(Config, HttpNeedsEndpointAndModel) {
  BackendConfig cfg;
  cfg.kind = BackendConfig::Kind::Http;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.endpoint_url = "http://x";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.model_name = "m";
  EXPECT_NO_THROW(cfg.validate());
  StochasticProfile bad;
  bad.p_correct = 1.5;
  EXPECT_THROW(make_stochastic(bad), InvalidArgument);
}

TEST(Scripted, DigestEntryRepeats) {
  const auto req = testkit::text_request("what?", 2);
  ScriptEntry e;
  e.digest = content_digest(req);
  e.replies = {"yes"};
  auto b = testkit::scripted({e});
  EXPECT_EQ(b->complete(req).samples, (std::vector<std::string>{"yes", "yes"}));
  EXPECT_THROW(b->complete(testkit::text_request("other")), NoScriptEntry);
}

TEST(Scripted, BatchEqualsSequential) {
  std::vector<std::string> replies;
  for (int i = 0; i < 7; ++i) replies.push_back("r" + std::to_string(i));
  auto b = testkit::scripted({testkit::contains("", replies, true)});
  std::vector<GenerationRequest> reqs;
  for (int i = 0; i < 100; ++i) {
    auto r = testkit::text_request("q" + std::to_string(i % 13), 1 + i % 3);
    r.seed = i;
    r.sample_offset = i % 5;
    reqs.push_back(r);
  }
  std::vector<std::vector<std::string>> sequential;
  for (const auto& r : reqs) sequential.push_back(b->complete(r).samples);
  const auto batch = b->complete_batch(reqs);
  ASSERT_EQ(batch.size(), reqs.size());
  for (std::size_t i = 0; i < reqs.size(); ++i) EXPECT_EQ(batch[i].value().samples, sequential[i]);

  const auto one = b->complete_batch(std::span(reqs.data(), 1));
  EXPECT_EQ(one[0].value().samples, sequential[0]);
}

TEST(Scripted, BatchCollectsErrorsPositionally) {
  auto b = testkit::scripted({testkit::contains("good", {"fine"})});
  std::vector<GenerationRequest> reqs = {testkit::text_request("good"), testkit::text_request("bad"),
                                         testkit::text_request("good")};
  const auto out = b->complete_batch(reqs);
  EXPECT_TRUE(out[0].ok());
  EXPECT_FALSE(out[1].ok());
  EXPECT_TRUE(out[2].ok());
  EXPECT_THROW(out[1].value(), NoScriptEntry);
}

TEST(Scripted, OffsetMakesSingleCallsMatchMultiSample) {
  auto b = testkit::scripted({testkit::contains("", {"a", "b", "c"})});
  auto multi = testkit::text_request("q", 5);
  const auto all = b->complete(multi).samples;
  for (int s = 0; s < 5; ++s) {
    auto one = testkit::text_request("q", 1);
    one.sample_offset = s;
    EXPECT_EQ(b->complete(one).samples[0], all[s]);
  }
}

TEST(Stochastic, SameRequestAnyInterleaving) {
  auto b = testkit::stochastic(0.5);
  std::vector<GenerationRequest> reqs;
  for (int i = 0; i < 40; ++i) reqs.push_back(solve_request("7", "q" + std::to_string(i % 10)));
  std::vector<std::vector<std::string>> forward(reqs.size());
  for (std::size_t i = 0; i < reqs.size(); ++i) forward[i] = b->complete(reqs[i]).samples;
  std::vector<std::vector<std::string>> backward(reqs.size());
  for (std::size_t i = reqs.size(); i-- > 0;) backward[i] = b->complete(reqs[i]).samples;
  const auto batch = b->complete_batch(reqs);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    EXPECT_EQ(forward[i], backward[i]);
    EXPECT_EQ(forward[i], batch[i].value().samples);
  }
}

TEST(Stochastic, CertainSolverAlwaysGold) {
  auto b = testkit::stochastic(1.0);
  for (int i = 0; i < 200; ++i) {
    const auto reply = b->complete(solve_request("42", "q" + std::to_string(i))).samples[0];
    EXPECT_EQ(answers::extract_rule_based(reply), answers::CanonicalAnswer::numeric(42)) << reply;
  }
}

TEST(Stochastic, CorrectRateConcentrates) {
  auto b = testkit::stochastic(0.6, 1.0, 0.0, 123);
  const int n = 10000;
  int correct = 0;
  auto req = solve_request("5", "one question");
  req.num_samples = n;
  for (const auto& s : b->complete(req).samples) {
    correct += answers::extract_rule_based(s) == answers::CanonicalAnswer::numeric(5) ? 1 : 0;
  }
  const double sigma = std::sqrt(0.6 * 0.4 / n);
  EXPECT_NEAR(static_cast<double>(correct) / n, 0.6, 3 * sigma);
}

TEST(Stochastic, WrongAnswersUseFixedAlphabet) {
  backend::StochasticProfile p;
  p.p_correct = 0.0;
  p.wrong_alphabet_size = 4;
  StochasticBackend b(make_stochastic(p));
  const auto wrong = b.wrong_answers("9");
  EXPECT_EQ(wrong.size(), 4u);
  std::set<std::string> seen;
  auto req = solve_request("9", "q");
  req.num_samples = 500;
  for (const auto& s : b.complete(req).samples) {
    const auto a = answers::extract_rule_based(s);
    ASSERT_TRUE(a);
    EXPECT_NE(a->to_string(), "9");
    seen.insert(a->to_string());
  }
  EXPECT_EQ(seen, std::set<std::string>(wrong.begin(), wrong.end()));
}

TEST(Stochastic, PerfectVerifier) {
  auto b = testkit::stochastic(0.5, 1.0, 0.0);
  for (int i = 0; i < 100; ++i) {
    const auto right = b->complete(verify_request("3", "3", "v" + std::to_string(i))).samples[0];
    const auto wrong = b->complete(verify_request("3", "4", "v" + std::to_string(i))).samples[0];
    EXPECT_EQ(answers::parse_verdict(right), answers::Verdict::Correct);
    EXPECT_EQ(answers::parse_verdict(wrong), answers::Verdict::Incorrect);
  }
}

TEST(Stochastic, NeedsMockHeader) {
  auto b = testkit::stochastic(0.5);
  EXPECT_THROW(b->complete(testkit::text_request("no header")), BackendFailure);
}

TEST(Wire, GoldenTextOnly) {
  const auto body = render_wire(testkit::text_request("hi"), "test-model");
  EXPECT_EQ(body, read_text_file(testkit::kFixtures / "wire_text_hi.json"));
}

TEST(Wire, NumSamplesMapsToN) {
  const auto body = json::parse(render_wire(testkit::text_request("hi", 3), "m"));
  EXPECT_EQ(body.at("n"), 3);
}

TEST(Wire, LocalImageBecomesDataUri) {
  auto req = testkit::text_request("see");
  req.messages[0].image_ref = (testkit::kFixtures / "two_bytes.bin").string();
  const auto body = json::parse(render_wire(req, "m"));
  const auto& content = body.at("messages").at(0).at("content");
  ASSERT_TRUE(content.is_array());
  bool found = false;
  for (const auto& part : content) {
    if (part.at("type") == "image_url") {
      EXPECT_EQ(part.at("image_url").at("url"), "data:application/octet-stream;base64,YWI=");
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(image_url_for("https://x/y.png"), "https://x/y.png");
  req.messages[0].image_ref = "/nonexistent/image.png";
  EXPECT_THROW(render_wire(req, "m"), ImageReadFailure);
}

TEST(Wire, CanonicalBytes) {
  auto a = testkit::text_request("same");
  a.seed = 4;
  auto b = a;
  EXPECT_EQ(render_wire(a, "m"), render_wire(b, "m"));
  EXPECT_EQ(base64_encode("abc"), "YWJj");
  EXPECT_EQ(base64_encode(""), "");
}

TEST(Wire, ParsesResponse) {
  const auto r = parse_wire_response(
      R"({"choices":[{"message":{"content":"a"}},{"message":{"content":"b"}}],"usage":{"prompt_tokens":3,"completion_tokens":4}})");
  EXPECT_EQ(r.samples, (std::vector<std::string>{"a", "b"}));
  ASSERT_TRUE(r.usage);
  EXPECT_EQ(r.usage->completion_tokens, 4);
  EXPECT_THROW(parse_wire_response("not json"), BackendFailure);
}

TEST(Http, RetriesThenSucceeds) {
  FixtureServer server([](int call, const httplib::Request&) { return call < 2 ? 500 : 200; });
  auto b = make_backend(http_config(server.url()));
  const auto resp = b->complete(testkit::text_request("hi"));
  EXPECT_EQ(resp.samples, (std::vector<std::string>{"ok 0"}));
  EXPECT_EQ(server.calls(), 3);
}

TEST(Http, ExhaustsRetries) {
  FixtureServer server([](int, const httplib::Request&) { return 503; });
  auto b = make_backend(http_config(server.url(), 2));
  EXPECT_THROW(b->complete(testkit::text_request("hi")), ExhaustedRetries);
  EXPECT_EQ(server.calls(), 3);
}

TEST(Http, ClientErrorIsTerminal) {
  FixtureServer server([](int, const httplib::Request&) { return 400; });
  auto b = make_backend(http_config(server.url()));
  try {
    b->complete(testkit::text_request("hi"));
    FAIL();
  } catch (const HttpStatus& e) {
    EXPECT_EQ(e.code(), 400);
  }
  EXPECT_EQ(server.calls(), 1);
}

TEST(Http, TooManyRequestsIsRetried) {
  FixtureServer server([](int call, const httplib::Request&) { return call == 0 ? 429 : 200; });
  auto b = make_backend(http_config(server.url()));
  EXPECT_NO_THROW(b->complete(testkit::text_request("hi")));
  EXPECT_EQ(server.calls(), 2);
}

TEST(Http, PeakInFlightBounded) {
  FixtureServer server([](int, const httplib::Request&) { return 200; }, std::chrono::milliseconds(30));
  auto b = make_backend(http_config(server.url(), 0, 8));
  std::vector<GenerationRequest> reqs;
  for (int i = 0; i < 40; ++i) reqs.push_back(testkit::text_request("q" + std::to_string(i)));
  for (const auto& item : b->complete_batch(reqs)) EXPECT_TRUE(item.ok()) << item.error_message;
  // Direct calls from many threads go through the same limit.
  std::vector<std::thread> threads;
  for (int t = 0; t < 24; ++t) {
    threads.emplace_back([&, t] { b->complete(testkit::text_request("t" + std::to_string(t))); });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(server.peak(), 8);
  EXPECT_GT(server.peak(), 1);
}

TEST(Http, BearerTokenFromEnvironmentOnly) {
  testkit::TempDir dir;
  ::setenv("VSYNTH_TEST_TOKEN", "s3cret-value", 1);
  FixtureServer server([](int, const httplib::Request&) { return 200; });
  auto cfg = http_config(server.url());
  cfg.auth_env_var = "VSYNTH_TEST_TOKEN";
  cfg.trace_path = (dir / "trace.jsonl").string();
  auto b = make_backend(cfg);
  b->complete(testkit::text_request("hi"));
  ASSERT_EQ(server.auth().size(), 1u);
  EXPECT_EQ(server.auth()[0], "Bearer s3cret-value");
  const auto trace = read_text_file(dir / "trace.jsonl");
  EXPECT_NE(trace.find("\"hi\""), std::string::npos);
  EXPECT_EQ(trace.find("s3cret-value"), std::string::npos);
  EXPECT_EQ(to_json(cfg).dump().find("s3cret-value"), std::string::npos);
  ::unsetenv("VSYNTH_TEST_TOKEN");
}
