#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgwalk/graph.hpp"

namespace kgwalk {

struct ScoreMap {
  std::unordered_map<TermId, double> scores;
  bool normalized = false;

  std::optional<double> get(TermId v) const {
    auto it = scores.find(v);
    if (it == scores.end()) return std::nullopt;
    return it->second;
  }
  /// Score or 0 for unscored nodes.
  double weight(TermId v) const { return get(v).value_or(0.0); }
};

struct PageRankOptions {
  double damping = 0.85;
  double epsilon = 1e-10;  // L1 change between iterations
  std::size_t max_iters = 100;
  unsigned workers = 1;
};

struct PageRankResult {
  ScoreMap scores;
  std::vector<double> residuals;  // L1 change after each iteration
  std::size_t iterations = 0;
  bool converged = false;
};

/// Power iteration over resource nodes (non-literal terms that occur as
/// subject or object). Edges into literals are ignored; dangling mass and
/// teleportation are spread uniformly. Throws DataError on a graph without
/// resource nodes and std::invalid_argument on bad options.
PageRankResult compute_pagerank(const Graph& g, const PageRankOptions& options = {});

/// Raw scores keyed by IRI as read from a score file, before joining.
struct ScoreTable {
  std::vector<std::pair<std::string, double>> rows;  // first-seen order, last value wins
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Reads `<iri>\t<score>` rows; a leading `iri\tscore` header and `#`
/// comments are skipped. Malformed rows throw DataError in strict mode and
/// are skipped with a warning otherwise.
ScoreTable load_scores(std::istream& in, bool strict = false);

struct JoinedScores {
  ScoreMap map;
  std::vector<std::string> unmatched;
};

/// Attaches raw scores to graph terms; the result is marked raw.
JoinedScores join_scores(const ScoreTable& table, const Graph& g);

/// Writes `iri\tscore` rows ordered by term id, shortest round-trip decimals.
void write_scores(const ScoreMap& scores, const Graph& g, std::ostream& out);

}  // namespace kgwalk
