#include "vsynth/backend/stochastic.hpp"

#include <array>
#include <cstdio>

#include "vsynth/answers/canonical.hpp"
#include "vsynth/answers/extract.hpp"
#include "vsynth/backend/mock_header.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/random.hpp"

namespace vsynth::backend {
namespace {

constexpr std::array<const char*, 8> kVerbs = {"Consider", "Note",    "Compute", "Observe",
                                               "Recall",   "Combine", "Measure", "Compare"};
constexpr std::array<const char*, 8> kNouns = {"the given lengths", "the angle sum",
                                               "the table values",  "the figure labels",
                                               "the known ratio",   "the object counts",
                                               "the axis scale",    "the remaining terms"};

std::optional<answers::CanonicalAnswer> try_canonical(const std::string& s) {
  try {
    return answers::canonicalize(s);
  } catch (const EmptyAnswer&) {
    return std::nullopt;
  }
}

std::string solve_reply(const StochasticBackend& self, const StochasticProfile& p,
                        const MockHeader& h, Rng& rng) {
  if (h.partial && answers::has_final_answer_marker(*h.partial)) {
    if (const auto prior = answers::extract_rule_based(*h.partial)) {
      return "The answer is " + prior->to_string() + ".";
    }
  }
  std::string text;
  const auto steps = rng.below(static_cast<std::uint64_t>(p.max_steps) + 1);
  for (std::uint64_t i = 0; i < steps; ++i) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%04x", static_cast<unsigned>(rng.below(0x10000)));
    text += std::string(kVerbs[rng.below(kVerbs.size())]) + " " + kNouns[rng.below(kNouns.size())] +
            " (" + tag + ").\n\n";
  }
  std::string answer;
  if (rng.bernoulli(p.p_correct)) {
    answer = h.gold;
  } else {
    const auto wrong = self.wrong_answers(h.gold);
    answer = wrong[rng.below(wrong.size())];
  }
  char tag[16];
  std::snprintf(tag, sizeof tag, "%04x", static_cast<unsigned>(rng.below(0x10000)));
  return text + "Hence (" + tag + ") the answer is " + answer + ".";
}

std::string verify_reply(const StochasticProfile& p, const MockHeader& h, Rng& rng) {
  bool matches = false;
  if (h.candidate) {
    const auto cand = try_canonical(*h.candidate);
    const auto gold = try_canonical(h.gold);
    matches = cand && gold && answers::answers_equal(*cand, *gold);
  }
  const bool says_correct = rng.bernoulli(matches ? p.verify_tpr : p.verify_fpr);
  return std::string("Let me verify step by step.\n\nEach step was checked against the question.\n\n") +
         (says_correct ? "The answer is correct." : "The answer is not correct.");
}

std::string critique_reply(const StochasticProfile& p, const MockHeader& h, Rng& rng) {
  double score = rng.uniform();
  if (p.calibrated_critique && h.partial && answers::has_final_answer_marker(*h.partial)) {
    const auto stated = answers::extract_rule_based(*h.partial);
    const auto gold = try_canonical(h.gold);
    score = stated && gold && answers::answers_equal(*stated, *gold) ? 1.0 : 0.0;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "Score: %.4f", score);
  return buf;
}

}  // namespace

StochasticBackend::StochasticBackend(BackendConfig cfg) : Backend(std::move(cfg)) {}

std::vector<std::string> StochasticBackend::wrong_answers(const std::string& gold) const {
  const int k = config().profile.wrong_alphabet_size;
  std::vector<std::string> out;
  const auto canon = try_canonical(gold);
  if (canon && canon->kind() == answers::CanonicalAnswer::Kind::Numeric) {
    for (int j = 1; j <= k; ++j) {
      out.push_back(answers::CanonicalAnswer::numeric(*canon->numeric_value() + j).to_string());
    }
  } else if (canon && canon->kind() == answers::CanonicalAnswer::Kind::Choice) {
    char letter = *canon->choice_letter();
    for (int j = 0; j < k; ++j) {
      letter = static_cast<char>('A' + (letter - 'A' + 1) % 26);
      if (letter == *canon->choice_letter()) letter = static_cast<char>('A' + (letter - 'A' + 1) % 26);
      out.push_back("(" + std::string(1, letter) + ")");
    }
  } else {
    for (int j = 1; j <= k; ++j) out.push_back(gold + " variant " + std::to_string(j));
  }
  return out;
}

GenerationResponse StochasticBackend::do_complete(const GenerationRequest& req) {
  const auto header = find_mock_header(req);
  if (!header) throw BackendFailure("stochastic mock: request carries no mock header");
  const auto& profile = config().profile;
  const std::uint64_t base = mix_seed(profile.seed, seed_from(content_digest(req)));

  GenerationResponse resp;
  for (int s = 0; s < req.num_samples; ++s) {
    Rng rng(mix_seed(base, static_cast<std::uint64_t>(req.sample_offset + s)));
    switch (header->task) {
      case MockHeader::Task::Solve:
        resp.samples.push_back(solve_reply(*this, profile, *header, rng));
        break;
      case MockHeader::Task::Verify:
        resp.samples.push_back(verify_reply(profile, *header, rng));
        break;
      case MockHeader::Task::Critique:
        resp.samples.push_back(critique_reply(profile, *header, rng));
        break;
    }
  }
  return resp;
}

}  // namespace vsynth::backend
