#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "kgwalk/graph.hpp"
#include "kgwalk/pagerank.hpp"
#include "kgwalk/specificity.hpp"

namespace kgwalk {

/// One relationship scored by three relevance metrics side by side.
struct RelevanceRow {
  Relationship relationship;
  double specificity = 0.0;
  double frequency = 0.0;            // concrete paths from all instances of the type
  std::optional<double> pagerank;    // mean score of the most linked reached nodes
};

/// Frequency counts paths from every instance of `type`. The PageRank column
/// averages the scores of the `top_nodes` reached nodes with the highest path
/// multiplicity (ties by id); it is left empty when `scores` is null.
std::vector<RelevanceRow> compare_relevance(const Graph& g, TermId type, std::span<const SpecificityEntry> entries,
                                            const ScoreMap* scores, std::size_t top_nodes = 25);

/// CSV `depth,relationship,specificity,pagerank,frequency`.
void write_relevance_csv(std::span<const RelevanceRow> rows, const Graph& g, std::ostream& out);

}  // namespace kgwalk
