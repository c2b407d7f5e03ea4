#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgwalk/graph.hpp"

namespace kgwalk {

/// A relationship template: d successive predicates.
struct Relationship {
  std::vector<TermId> predicates;

  std::size_t depth() const { return predicates.size(); }
  friend auto operator<=>(const Relationship&, const Relationship&) = default;
  friend bool operator==(const Relationship&, const Relationship&) = default;
};

/// Predicate IRIs joined by '|'.
std::string render_relationship(const Relationship& rel, const Graph& g);
Relationship parse_relationship(std::string_view text, const Graph& g);

struct SpecificityEntry {
  Relationship relationship;
  double score = 0.0;
  std::uint64_t support = 0;
};

/// Orders entries by descending score, ties by predicate-id sequence.
void sort_entries(std::vector<SpecificityEntry>& entries);

enum class Estimator {
  alg2,  // bidirectional random walks; samples reached nodes by forward-path multiplicity
  eq2,   // exact mean over distinct reached nodes
};

enum class SelectionMode {
  extend,   // depth i >= 2 extends above-threshold depth i-1 relationships
  scratch,  // every depth is sampled from the seed set directly
};

std::string_view to_string(Estimator e);
std::string_view to_string(SelectionMode m);

struct EstimatorParams {
  std::size_t seed_set_size = 300;
  std::size_t n_walks = 2000;
  // At depth i the top candidates_per_depth * i relationships by frequency are scored.
  std::size_t candidates_per_depth = 25;
  std::size_t max_depth = 3;
  double threshold = 0.5;
  std::size_t forward_retry_limit = 10;
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::alg2;
  SelectionMode selection = SelectionMode::extend;
  bool type_edges_in_templates = false;
  // Random walks drawn per depth when selecting candidates from scratch at depth >= 2.
  std::size_t selection_samples = 20000;
  unsigned workers = 1;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct SpecificityTable {
  TermId type;
  std::string type_iri;
  std::vector<std::vector<SpecificityEntry>> depths;  // depths[i] holds depth i + 1
  EstimatorParams params;
  std::size_t seed_set_actual = 0;
  std::size_t seed_shortfall = 0;
  std::string graph_checksum;

  /// Entries of depth d (1-based) with score >= params.threshold.
  std::vector<SpecificityEntry> above_threshold(std::size_t d) const;
};

/// Number of length-`depth` paths ending at `target`, keyed by start node.
/// Paths follow in-edges and may use any predicate.
std::vector<std::pair<TermId, double>> incoming_path_counts(const Graph& g, TermId target, std::size_t depth);

/// Share of the length-d paths into `target` that start at `source`; 0 when
/// no such paths exist.
double node_to_node_specificity(const Graph& g, TermId target, TermId source, std::size_t depth);

/// Exhaustive specificity of `rel` to `type`: the unweighted mean over the
/// distinct nodes reachable from the type's instances via `rel` of the share
/// of incoming length-d paths that start at an instance. Support is the number
/// of concrete paths realizing `rel` from the instances.
SpecificityEntry exact_specificity(const Graph& g, const Relationship& rel, TermId type);

struct EstimateOptions {
  std::size_t forward_retry_limit = 10;
  unsigned workers = 1;
};

/// Bidirectional random-walk estimate for each candidate. Every trial picks a
/// seed, walks forward along the template (retrying with fresh seeds on dead
/// ends), walks `depth` steps backwards over arbitrary in-edges and counts a
/// hit when it lands on an instance of `type`. Each candidate draws from its
/// own stream derived from `seed` and its predicates, so results do not depend
/// on candidate order or worker count.
std::vector<SpecificityEntry> estimate_specificity(const Graph& g, std::span<const Relationship> candidates,
                                                   std::span<const TermId> seeds, TermId type, std::size_t depth,
                                                   std::size_t n_walks, std::uint64_t seed,
                                                   const EstimateOptions& options = {});

struct CandidatePath {
  Relationship relationship;
  double frequency = 0.0;  // concrete paths from the seed set (sampled walks in scratch mode, depth >= 2)
};

struct SelectOptions {
  SelectionMode mode = SelectionMode::extend;
  double threshold = 0.5;
  bool type_edges_in_templates = false;
  std::size_t samples = 20000;
};

/// Candidate relationships of length `depth`, most frequent first.
std::vector<CandidatePath> select_paths(const Graph& g, std::span<const TermId> seeds, std::size_t depth,
                                        std::size_t n_paths, const std::vector<SpecificityEntry>* previous,
                                        std::uint64_t seed, const SelectOptions& options = {});

/// Number of concrete paths realizing `rel` from the given start nodes.
double relationship_frequency(const Graph& g, std::span<const TermId> starts, const Relationship& rel);

/// Distinct end nodes of `rel` from `starts` with their path multiplicity, ascending by id.
std::vector<std::pair<TermId, double>> forward_reach(const Graph& g, std::span<const TermId> starts,
                                                     const Relationship& rel);

SpecificityTable rank_by_specificity(const Graph& g, TermId type, const EstimatorParams& params);

/// TSV with header `depth relationship score support`; scores with 6 decimals.
void write_table_tsv(const SpecificityTable& table, const Graph& g, std::ostream& out);
/// Reads a TSV written by write_table_tsv. Metadata other than the entries is
/// left default; callers supply type and threshold.
SpecificityTable read_table_tsv(std::istream& in, const Graph& g);

/// JSON metadata sidecar (params, seed, checksum, estimator label).
std::string table_metadata_json(const SpecificityTable& table);

}  // namespace kgwalk
