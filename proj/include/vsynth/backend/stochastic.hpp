#pragma once

#include <string>
#include <vector>

#include "vsynth/backend/backend.hpp"

namespace vsynth::backend {

/// Mock whose replies are random draws seeded by (profile seed, content
/// digest, sample index), never by call order.
///
/// Requests must carry a mock header (see mock_header.hpp):
///  - solve: up to max_steps reasoning steps separated by blank lines, then
///    "Hence (tag) the answer is X." with X the gold answer w.p. p_correct, otherwise one
///    of wrong_alphabet_size distinct wrong answers uniformly. If the header's
///    partial solution already states an answer, the reply restates it.
///  - verify: "The answer is correct." w.p. verify_tpr when the candidate
///    equals the gold answer, w.p. verify_fpr otherwise; else "not correct".
///  - critique: "Score: s" with s uniform on [0,1] (or 1/0 by correctness of
///    a completed partial when calibrated_critique is set).
class StochasticBackend : public Backend {
 public:
  explicit StochasticBackend(BackendConfig cfg);

  /// The wrong answers used for `gold`, in draw order.
  std::vector<std::string> wrong_answers(const std::string& gold) const;

 protected:
  GenerationResponse do_complete(const GenerationRequest& req) override;
};

}  // namespace vsynth::backend
