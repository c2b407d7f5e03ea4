#include "kgwalk/relevance.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace kgwalk {

std::vector<RelevanceRow> compare_relevance(const Graph& g, TermId type, std::span<const SpecificityEntry> entries,
                                            const ScoreMap* scores, std::size_t top_nodes) {
  const auto members = g.entities_of_type(type);
  std::vector<RelevanceRow> rows;
  rows.reserve(entries.size());
  for (const auto& entry : entries) {
    RelevanceRow row;
    row.relationship = entry.relationship;
    row.specificity = entry.score;
    auto reached = forward_reach(g, members, entry.relationship);
    for (const auto& [node, count] : reached) row.frequency += count;
    if (scores != nullptr) {
      std::stable_sort(reached.begin(), reached.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      const std::size_t n = std::min(top_nodes, reached.size());
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += scores->weight(reached[i].first);
      row.pagerank = n == 0 ? 0.0 : sum / static_cast<double>(n);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_relevance_csv(std::span<const RelevanceRow> rows, const Graph& g, std::ostream& out) {
  out << "depth,relationship,specificity,pagerank,frequency\n";
  char buf[64];
  for (const auto& row : rows) {
    out << row.relationship.depth() << ",\"" << render_relationship(row.relationship, g) << "\",";
    std::snprintf(buf, sizeof buf, "%.6f", row.specificity);
    out << buf << ',';
    if (row.pagerank) {
      std::snprintf(buf, sizeof buf, "%.6g", *row.pagerank);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.0f", row.frequency);
    out << ',' << buf << '\n';
  }
}

}  // namespace kgwalk
