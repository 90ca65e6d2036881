#include "vsynth/treesearch/search.hpp"

#include <algorithm>
#include <set>

#include "vsynth/answers/golden.hpp"
#include "vsynth/common/error.hpp"
#include "vsynth/common/random.hpp"
#include "vsynth/treesearch/prompts.hpp"

namespace vsynth::treesearch {
namespace {

// Request seeds per purpose, so expansion and simulation from the same node
// draw different samples.
enum Purpose : std::uint64_t { kExpand = 1, kSimulate = 2, kComplete = 3, kCritique = 4, kDirect = 5 };

std::uint64_t purpose_seed(const SearchConfig& cfg, Purpose p) { return mix_seed(cfg.seed, p); }

backend::GenerationRequest request_for(const SearchConfig& cfg, const corpus::Question& q,
                                       const std::string& partial, Purpose p) {
  const bool critique = p == kCritique;
  const PromptTemplate tmpl(critique ? cfg.critique_template : cfg.solve_template,
                            {"question", "partial"});
  RequestSpec spec;
  spec.tmpl = &tmpl;
  spec.task = critique ? backend::MockHeader::Task::Critique : backend::MockHeader::Task::Solve;
  spec.mock_headers = cfg.mock_headers;
  spec.decoding = cfg.decoding;
  spec.seed = purpose_seed(cfg, p);
  return build_request(spec, q, partial);
}

struct Draw {
  std::optional<std::string> text;
  std::string error;
};

/// `count` samples starting at `offset`; failures are captured per sample.
std::vector<Draw> draw(backend::Backend& backend, const backend::GenerationRequest& base,
                       int count, int offset, bool independent) {
  std::vector<Draw> out(static_cast<std::size_t>(count));
  if (independent) {
    std::vector<backend::GenerationRequest> reqs;
    for (int i = 0; i < count; ++i) {
      auto r = base;
      r.num_samples = 1;
      r.sample_offset = offset + i;
      reqs.push_back(std::move(r));
    }
    const auto items = backend.complete_batch(reqs);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].ok()) {
        out[i].text = items[i].response->samples.front();
      } else {
        out[i].error = items[i].error_message;
      }
    }
    return out;
  }
  auto r = base;
  r.num_samples = count;
  r.sample_offset = offset;
  try {
    const auto resp = backend.complete(r);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)].text = resp.samples[i];
  } catch (const BackendFailure& e) {
    for (auto& d : out) d.error = e.what();
  }
  return out;
}

[[noreturn]] void raise(const Draw& d) { throw BackendFailure(d.error); }

std::string path_text(const Tree& tree, NodeId node, const SearchConfig& cfg) {
  return join_steps(tree.path_steps(node), cfg.step_delimiter);
}

bool is_correct(const std::optional<answers::CanonicalAnswer>& a, const corpus::Question& q,
                const answers::Extractor& extractor) {
  return a && answers::matches_golden(*a, q.golden_answer, q.choices, extractor.tolerance());
}

/// Answer of a continuation, falling back to the path it continues.
std::optional<answers::CanonicalAnswer> answer_of(const std::string& partial,
                                                  const std::string& reply,
                                                  const answers::Extractor& extractor) {
  if (auto a = extractor.extract(reply)) return a;
  if (partial.empty()) return std::nullopt;
  return extractor.extract(partial + "\n\n" + reply);
}

}  // namespace

SearchConfig::SearchConfig()
    : solve_template(default_solve_template()), critique_template(default_critique_template()) {}

void SearchConfig::validate() const {
  if (k < 1) throw InvalidArgument("search.k must be >= 1");
  if (l < 1) throw InvalidArgument("search.l must be >= 1");
  if (n < 1) throw InvalidArgument("search.n must be >= 1");
  if (max_depth < 1) throw InvalidArgument("search.max_depth must be >= 1");
  if (iterations < 0) throw InvalidArgument("search.iterations must be >= 0");
  if (!(uct_c >= 0.0)) throw InvalidArgument("search.uct_c must be >= 0");
  PromptTemplate(solve_template, {"question", "partial"});
  PromptTemplate(critique_template, {"question", "partial"});
}

json to_json(const Rollout& r) {
  return {{"question_id", r.question_id},
          {"path_steps", r.path_steps},
          {"full_text", r.full_text},
          {"reward_at_leaf", r.reward_at_leaf}};
}

corpus::Candidate to_candidate(const Rollout& r, int index, const std::string& producer,
                               const SearchConfig& cfg, const answers::Extractor& extractor) {
  corpus::Candidate c;
  c.question_id = r.question_id;
  c.reasoning_text = r.full_text;
  c.extracted_answer = extractor.extract(r.full_text);
  c.producer = producer;
  c.sampler_params = cfg.decoding;
  c.sampler_params.seed = cfg.seed;
  c.index = index;
  c.extras = {{"reward_at_leaf", r.reward_at_leaf}};
  return c;
}

std::vector<NodeId> expand(backend::Backend& backend, const corpus::Question& q, Tree& tree,
                           NodeId node, const SearchConfig& cfg) {
  if (!tree.node(node).expandable()) throw InvalidArgument("node is not expandable");
  const auto partial = path_text(tree, node, cfg);
  const auto base = request_for(cfg, q, partial, kExpand);
  const auto samples = draw(backend, base, cfg.k, 0, cfg.independent_calls);

  std::set<std::string> seen;
  std::vector<std::string> steps;
  int extra = 0;
  int alt = 0;
  for (const auto& d : samples) {
    if (!d.text) raise(d);
    auto step = first_step(*d.text, cfg.step_delimiter);
    if (step.empty()) continue;
    if (seen.count(step)) {
      const auto again = draw(backend, base, 1, cfg.k + extra++, cfg.independent_calls);
      if (!again.front().text) raise(again.front());
      auto retry = first_step(*again.front().text, cfg.step_delimiter);
      if (!retry.empty() && !seen.count(retry)) {
        step = std::move(retry);
      } else {
        std::string tagged;
        do {
          tagged = "[alt " + std::to_string(++alt) + "] " + step;
        } while (seen.count(tagged));
        step = std::move(tagged);
      }
    }
    seen.insert(step);
    steps.push_back(std::move(step));
  }
  if (steps.empty()) {
    tree.node(node).exhausted = true;
    throw ExpansionExhausted("every sampled continuation was empty");
  }
  const int child_depth = tree.node(node).depth + 1;
  std::vector<NodeId> added;
  for (auto& s : steps) {
    const bool terminal = answers::has_final_answer_marker(s) || child_depth >= cfg.max_depth;
    added.push_back(tree.add_child(node, std::move(s), terminal));
  }
  return added;
}

double simulate_reward(backend::Backend& backend, const corpus::Question& q, const Tree& tree,
                       NodeId node, const SearchConfig& cfg, const answers::Extractor& extractor) {
  const auto partial = path_text(tree, node, cfg);
  const auto samples =
      draw(backend, request_for(cfg, q, partial, kSimulate), cfg.l, 0, cfg.independent_calls);
  int correct = 0;
  for (const auto& d : samples) {
    if (!d.text) {
      if (cfg.simulation_failures_fatal) raise(d);
      continue;
    }
    if (is_correct(answer_of(partial, *d.text, extractor), q, extractor)) ++correct;
  }
  return static_cast<double>(correct) / cfg.l;
}

double critique_reward(backend::Backend& backend, const corpus::Question& q, const Tree& tree,
                       NodeId node, const SearchConfig& cfg) {
  auto req = request_for(cfg, q, path_text(tree, node, cfg), kCritique);
  req.temperature = 0.0;
  const auto resp = backend.complete(req);
  return parse_score(resp.samples.front()).value_or(0.0);
}

SearchSession::SearchSession(backend::Backend& backend, const corpus::Question& q,
                             SearchConfig cfg, RewardFn reward, std::ostream* trace)
    : backend_(backend), question_(q), cfg_(std::move(cfg)), reward_(std::move(reward)),
      trace_(trace) {
  cfg_.validate();
}

void SearchSession::iterate() {
  NodeId node = Tree::root();
  while (!tree_.node(node).children.empty()) node = uct_select(tree_, node, cfg_.uct_c);

  bool expanded = false;
  const auto& leaf = tree_.node(node);
  if (leaf.expandable() && (node == Tree::root() || leaf.visits > 0)) {
    try {
      node = expand(backend_, question_, tree_, node, cfg_).front();
      expanded = true;
    } catch (const ExpansionExhausted&) {
    }
  }

  auto& target = tree_.node(node);
  if (!target.cached_reward) target.cached_reward = reward_(tree_, node);
  const double r = *target.cached_reward;
  ++target.self_evaluations;
  backpropagate(tree_, node, r);
  ++evaluations_;
  ++iterations_;

  if (trace_) {
    *trace_ << canonical_dump({{"iteration", iterations_},
                               {"path", tree_.path(node)},
                               {"expanded", expanded},
                               {"reward", r}})
            << '\n';
  }
}

void SearchSession::run() {
  for (int i = 0; i < cfg_.iterations; ++i) iterate();
}

Rollout SearchSession::rollout_for(NodeId id) const {
  Rollout r;
  r.question_id = question_.id;
  r.path_steps = tree_.path_steps(id);
  r.full_text = join_steps(r.path_steps, cfg_.step_delimiter);
  r.reward_at_leaf = tree_.node(id).q().value_or(0.0);
  return r;
}

std::vector<Rollout> SearchSession::harvest(int count) {
  auto by_q = [this](NodeId a, NodeId b) {
    const double qa = tree_.node(a).q().value_or(-1.0);
    const double qb = tree_.node(b).q().value_or(-1.0);
    return qa != qb ? qa > qb : a < b;
  };

  std::vector<NodeId> leaves;
  std::vector<NodeId> frontier;
  std::vector<NodeId> inner;
  for (NodeId id = 0; id < tree_.size(); ++id) {
    const auto& n = tree_.node(id);
    if (n.terminal) {
      if (n.visits > 0) leaves.push_back(id);
    } else if (!n.exhausted) {
      (n.children.empty() ? frontier : inner).push_back(id);
    }
  }
  std::sort(leaves.begin(), leaves.end(), by_q);
  std::vector<Rollout> out;
  for (std::size_t i = 0; i < leaves.size() && out.size() < static_cast<std::size_t>(count); ++i) {
    out.push_back(rollout_for(leaves[i]));
  }
  if (out.size() >= static_cast<std::size_t>(count)) return out;

  if (frontier.empty()) frontier = inner;
  if (frontier.empty()) throw SearchStarved("no terminal leaf or frontier node to complete");
  std::sort(frontier.begin(), frontier.end(), by_q);

  // Round r completes every frontier node once more, at sample offset r.
  const std::size_t need = static_cast<std::size_t>(count) - out.size();
  for (std::size_t round = 0; out.size() < static_cast<std::size_t>(count); ++round) {
    if (round > need + 3) throw SearchStarved("completions kept coming back empty");
    std::vector<backend::GenerationRequest> reqs;
    std::vector<NodeId> from;
    for (std::size_t i = 0; i < frontier.size() && reqs.size() < need; ++i) {
      auto req = request_for(cfg_, question_, join_steps(tree_.path_steps(frontier[i]),
                                                         cfg_.step_delimiter), kComplete);
      req.sample_offset = static_cast<int>(round);
      reqs.push_back(std::move(req));
      from.push_back(frontier[i]);
    }
    const auto items = backend_.complete_batch(reqs);
    for (std::size_t i = 0; i < items.size() && out.size() < static_cast<std::size_t>(count);
         ++i) {
      auto r = rollout_for(from[i]);
      for (auto& s : split_steps(items[i].value().samples.front(), cfg_.step_delimiter)) {
        r.path_steps.push_back(std::move(s));
      }
      if (r.path_steps.empty()) continue;
      r.full_text = join_steps(r.path_steps, cfg_.step_delimiter);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Rollout> run_search(backend::Backend& backend, const corpus::Question& q,
                                const SearchConfig& cfg, const answers::Extractor& extractor,
                                std::ostream* trace) {
  SearchSession session(
      backend, q, cfg,
      [&](const Tree& t, NodeId id) { return simulate_reward(backend, q, t, id, cfg, extractor); },
      trace);
  session.run();
  return session.harvest(cfg.n);
}

NaiveResult run_naive_mcts(backend::Backend& backend, const corpus::Question& q,
                           const SearchConfig& cfg, const answers::Extractor& extractor,
                           std::ostream* trace) {
  SearchSession session(
      backend, q, cfg,
      [&](const Tree& t, NodeId id) { return critique_reward(backend, q, t, id, cfg); }, trace);
  session.run();
  auto best = session.harvest(1);
  NaiveResult res;
  res.rollout = std::move(best.front());
  res.answer = extractor.extract(res.rollout.full_text);
  return res;
}

std::vector<Rollout> direct_rollouts(backend::Backend& backend, const corpus::Question& q,
                                     const SearchConfig& cfg, const answers::Extractor& extractor,
                                     int count) {
  if (count < 1) throw InvalidArgument("direct_rollouts: count must be >= 1");
  const auto samples =
      draw(backend, request_for(cfg, q, "", kDirect), count, 0, cfg.independent_calls);
  std::vector<Rollout> out;
  for (const auto& d : samples) {
    if (!d.text) raise(d);
    Rollout r;
    r.question_id = q.id;
    r.path_steps = split_steps(*d.text, cfg.step_delimiter);
    r.full_text = join_steps(r.path_steps, cfg.step_delimiter);
    r.reward_at_leaf = is_correct(extractor.extract(r.full_text), q, extractor) ? 1.0 : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vsynth::treesearch
