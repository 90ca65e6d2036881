#include "vsynth/corpus/pool.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "vsynth/common/error.hpp"
#include "vsynth/common/random.hpp"
#include "vsynth/corpus/io.hpp"

namespace vsynth::corpus {
namespace {

void add_share(std::map<std::string, SourceShare>& m, const std::string& key) { ++m[key].count; }

void finish(std::map<std::string, SourceShare>& m, std::size_t total) {
  for (auto& [_, s] : m) s.percent = total == 0 ? 0.0 : 100.0 * static_cast<double>(s.count) / total;
}

std::string percent_text(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

}  // namespace

std::vector<Question> assemble_pool(const std::map<Source, std::filesystem::path>& sources,
                                    const PoolSpec& spec) {
  std::vector<Question> pool;
  std::unordered_set<std::string> ids;
  for (const auto& [source, want] : spec.counts) {
    if (want == 0) continue;
    const auto path = sources.find(source);
    if (path == sources.end()) throw InvalidArgument("no file given for source " + source.name());
    auto items = load_questions(path->second);
    if (items.size() < want) throw InsufficientSource(source.name(), items.size(), want);

    // Partial Fisher-Yates over indices, then restore file order.
    std::vector<std::size_t> idx(items.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(mix_seed(spec.seed, seed_from(source.name())));
    for (std::size_t i = 0; i < want; ++i) {
      const auto j = i + rng.below(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(want);
    std::sort(idx.begin(), idx.end());

    for (auto i : idx) {
      auto& q = items[i];
      if (!ids.insert(q.id).second) throw DuplicateId(q.id);
      q.source = source;
      pool.push_back(std::move(q));
    }
  }
  return pool;
}

DatasetStats dataset_stats(const std::vector<Question>& questions) {
  DatasetStats st;
  st.total = questions.size();
  for (const auto& q : questions) {
    add_share(st.by_source, q.source.name());
    add_share(st.by_category, q.category.value_or("uncategorized"));
  }
  finish(st.by_source, st.total);
  finish(st.by_category, st.total);
  return st;
}

json to_json(const DatasetStats& stats) {
  auto shares = [](const std::map<std::string, SourceShare>& m) {
    json j = json::object();
    for (const auto& [k, s] : m) j[k] = {{"count", s.count}, {"percent", s.percent}};
    return j;
  };
  return {{"total", stats.total},
          {"by_source", shares(stats.by_source)},
          {"by_category", shares(stats.by_category)}};
}

std::string render_stats_table(const DatasetStats& stats) {
  std::size_t w = std::string("source").size();
  for (const auto& [k, _] : stats.by_source) w = std::max(w, k.size());
  auto row = [w](const std::string& a, const std::string& b, const std::string& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %10s  %8s\n", static_cast<int>(w), a.c_str(), b.c_str(),
                  c.c_str());
    return std::string(buf);
  };
  std::string out = row("source", "count", "percent");
  for (const auto& [k, s] : stats.by_source) {
    out += row(k, std::to_string(s.count), percent_text(s.percent));
  }
  out += row("total", std::to_string(stats.total), stats.total ? "100.00" : "0.00");
  return out;
}

}  // namespace vsynth::corpus
