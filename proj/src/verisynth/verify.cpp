#include "vsynth/verisynth/verify.hpp"

#include "vsynth/backend/mock_header.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/treesearch/prompts.hpp"

namespace vsynth::verisynth {
namespace {

constexpr std::string_view kVerify =
    "Below is a math problem and a proposed solution. Verify the solution step by step: "
    "check every computation and every use of the figure or table, and say which step "
    "fails if one does. Finish with exactly one of these two lines:\n"
    "The answer is correct.\n"
    "The answer is not correct.\n\n"
    "Problem:\n{question}\n\n"
    "Solution:\n{solution}";

}  // namespace

std::string_view default_verify_template() { return kVerify; }

VerifyPromptTemplate::VerifyPromptTemplate(std::string text, bool image_passthrough)
    : tmpl_(std::move(text), {"question", "solution"}), image_passthrough_(image_passthrough) {}

std::string VerifyPromptTemplate::fill(const corpus::Question& q,
                                       const corpus::Candidate& c) const {
  return tmpl_.fill({{"question", corpus::render_question(q)}, {"solution", c.reasoning_text}});
}

corpus::VerificationRecord verify_candidate(backend::Backend& verifier,
                                            const VerifyPromptTemplate& tmpl,
                                            const corpus::Question& q,
                                            const corpus::Candidate& c,
                                            const VerifyOptions& opts) {
  if (c.question_id != q.id) {
    throw InvalidArgument("candidate for " + c.question_id + " verified against " + q.id);
  }
  backend::GenerationRequest req;
  treesearch::apply_sampler(req, opts.decoding);
  req.seed = opts.seed;
  if (opts.mock_headers) {
    backend::MockHeader h;
    h.task = backend::MockHeader::Task::Verify;
    h.gold = q.golden_answer;
    if (c.extracted_answer) h.candidate = c.extracted_answer->to_string();
    req.messages.push_back(backend::mock_header_message(h));
  }
  req.messages.push_back({backend::Role::User, tmpl.fill(q, c),
                          tmpl.image_passthrough() ? q.image_ref : std::nullopt});

  corpus::VerificationRecord rec;
  rec.question_id = q.id;
  rec.candidate_index = c.index;
  rec.verifier = verifier.id();
  for (int attempt = 0; attempt <= opts.unparseable_retries; ++attempt) {
    req.sample_offset = attempt;
    try {
      rec.verification_text = verifier.complete(req).samples.front();
      rec.error.reset();
      rec.verdict = opts.grammar ? opts.grammar->parse(rec.verification_text)
                                 : answers::parse_verdict(rec.verification_text);
    } catch (const BackendFailure& e) {
      rec.verification_text.clear();
      rec.verdict = answers::Verdict::Unparseable;
      rec.error = e.what();
      return rec;
    }
    if (rec.verdict != answers::Verdict::Unparseable) break;
  }
  return rec;
}

}  // namespace vsynth::verisynth
