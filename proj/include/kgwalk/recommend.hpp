#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgwalk/graph.hpp"
#include "kgwalk/skipgram.hpp"
#include "kgwalk/specificity.hpp"

namespace kgwalk {

/// Read-only token vectors, e.g. the input vectors of a trained model.
struct KeyedVectors {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::uint32_t> index;
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::uint32_t> find(std::string_view token) const;
  std::span<const double> row(std::uint32_t i) const { return {data.data() + std::size_t{i} * dim, dim}; }
  void add(std::string token, std::span<const double> vector);
};

KeyedVectors keyed_vectors(const EmbeddingModel& model);
/// Parses the word2vec text format; throws DataError on malformed input.
KeyedVectors load_word2vec_text(std::istream& in);

/// Cosine similarity; 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

struct Recommendation {
  std::string query;
  std::size_t k = 0;
  std::vector<std::pair<std::string, double>> items;  // non-increasing score, ties lexicographic
};

using CandidateFilter = std::function<bool(std::string_view token)>;

/// The k tokens most similar to `query` among those passing `filter` (all
/// tokens when empty), excluding the query itself. Throws DataError when the
/// query is not in the vocabulary and std::invalid_argument when k == 0.
Recommendation top_k(const KeyedVectors& vectors, std::string_view query, std::size_t k,
                     const CandidateFilter& filter = {});

double precision_at_k(const Recommendation& rec, const std::set<std::string>& truth);
double recall_at_k(const Recommendation& rec, const std::set<std::string>& truth);

/// Query token -> relevant tokens.
using GroundTruth = std::map<std::string, std::set<std::string>>;

/// JSON object mapping each query IRI to an array of relevant IRIs. Throws
/// DataError on malformed files or a query listed in its own relevant set.
GroundTruth load_ground_truth(std::istream& in);
void save_ground_truth(const GroundTruth& truth, std::ostream& out);

struct NdcgResult {
  double value = 1.0;
  bool degenerate = false;  // ideal DCG is zero
};

/// Graded NDCG: an item's gain is its score in `ideal` (0 if absent), the
/// discount is log2(rank + 1), and both rankings are cut at |ideal| items.
NdcgResult ndcg(std::span<const SpecificityEntry> ranked, std::span<const SpecificityEntry> ideal);

struct SweepPoint {
  std::size_t n_walks = 0;
  std::size_t seed_set_size = 0;  // SIZE_MAX for all instances
  friend auto operator<=>(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepRow {
  SweepPoint point;
  std::size_t depth = 0;
  double mean_ndcg = 0.0;
  double stddev = 0.0;
  std::size_t repeats = 0;
  std::size_t degenerate = 0;
  bool ground_truth = false;
};

struct SweepOptions {
  std::size_t repeats = 1;
  unsigned workers = 1;
};

/// Runs rank_by_specificity at every point for each repeat. Within a repeat
/// every point shares the repeat's seed; the point with the largest N_walks
/// (then largest |S|) is the ground truth. Rows are ordered by point then depth.
std::vector<SweepRow> sensitivity_sweep(const Graph& g, TermId type, const EstimatorParams& base,
                                        std::span<const SweepPoint> points, const SweepOptions& options = {});

/// Seed used for repeat r of a sweep with base seed `seed`.
std::uint64_t sweep_repeat_seed(std::uint64_t seed, std::size_t repeat);

}  // namespace kgwalk
