#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vsynth/corpus/types.hpp"

namespace vsynth::corpus {

/// Draws exactly spec.counts[s] questions from each source file without
/// replacement. Sources are processed in name order; the chosen items keep
/// their file order and are relabelled with the pool's source tag.
/// Deterministic for fixed (files, spec).
/// Throws InsufficientSource, InvalidArgument (source without a path),
/// DuplicateId (same id in two sources).
std::vector<Question> assemble_pool(const std::map<Source, std::filesystem::path>& sources,
                                    const PoolSpec& spec);

struct SourceShare {
  std::size_t count = 0;
  double percent = 0.0;  // of the total, unrounded
};

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, SourceShare> by_source;
  std::map<std::string, SourceShare> by_category;
};

DatasetStats dataset_stats(const std::vector<Question>& questions);

json to_json(const DatasetStats& stats);

/// Aligned table of source, count and percent (two decimals), then a total row.
std::string render_stats_table(const DatasetStats& stats);

}  // namespace vsynth::corpus
