#include "vsynth/treesearch/prompts.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>

namespace vsynth::treesearch {
namespace {

constexpr std::string_view kSolve =
    "Solve the problem below step by step. Write each step as its own paragraph, with a "
    "blank line between steps. End with a line of the form \"The answer is X.\"\n\n"
    "Problem:\n{question}\n\n"
    "Solution so far:\n{partial}\n\n"
    "Continue the solution from where it stops.";

constexpr std::string_view kCritique =
    "Review the partial solution to the problem below and rate how likely it is to reach "
    "the correct answer. Reply with one line of the form \"Score: s\" where s is a number "
    "between 0 and 1.\n\n"
    "Problem:\n{question}\n\n"
    "Partial solution:\n{partial}";

}  // namespace

std::string_view default_solve_template() { return kSolve; }
std::string_view default_critique_template() { return kCritique; }

void apply_sampler(backend::GenerationRequest& req, const corpus::SamplerParams& p) {
  req.max_new_tokens = p.max_new_tokens;
  req.temperature = p.temperature;
  req.top_k = p.top_k;
  req.repetition_penalty = p.repetition_penalty;
}

backend::GenerationRequest build_request(const RequestSpec& spec, const corpus::Question& q,
                                         std::string_view partial) {
  backend::GenerationRequest req;
  apply_sampler(req, spec.decoding);
  req.seed = spec.seed;
  if (spec.mock_headers) {
    backend::MockHeader h;
    h.task = spec.task;
    h.gold = q.golden_answer;
    if (!partial.empty()) h.partial = std::string(partial);
    req.messages.push_back(backend::mock_header_message(h));
  }
  const std::string shown = partial.empty() ? std::string(kEmptyPartial) : std::string(partial);
  req.messages.push_back({backend::Role::User,
                          spec.tmpl->fill({{"question", corpus::render_question(q)},
                                           {"partial", shown}}),
                          q.image_ref});
  return req;
}

std::optional<double> parse_score(std::string_view reply) {
  static const std::regex kScore(R"(score\s*[:=]\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))",
                                 std::regex::icase);
  const std::string s(reply);
  std::optional<double> last;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kScore); it != std::sregex_iterator();
       ++it) {
    last = std::clamp(std::strtod((*it)[1].str().c_str(), nullptr), 0.0, 1.0);
  }
  return last;
}

}  // namespace vsynth::treesearch
