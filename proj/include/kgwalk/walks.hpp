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
#include "kgwalk/pagerank.hpp"
#include "kgwalk/random.hpp"
#include "kgwalk/specificity.hpp"

namespace kgwalk {

enum class Bias { uniform, frequency, pagerank, specificity };

enum class Pruning {
  none,
  nrse,  // the root is never revisited
  ue,    // no node repeats
  nrst,  // no intermediate node shares a type with the root
  uet,   // no two nodes share a type
};

std::string_view to_string(Bias b);
std::string_view to_string(Pruning p);
std::optional<Bias> parse_bias(std::string_view text);
std::optional<Pruning> parse_pruning(std::string_view text);

struct WalkStrategy {
  Bias bias = Bias::uniform;
  Pruning pruning = Pruning::none;
  std::size_t depth = 2;
  std::size_t walks_per_entity = 500;  // attempts, not accepted walks
  const SpecificityTable* table = nullptr;
  const ScoreMap* pagerank = nullptr;

  /// Throws std::invalid_argument when the strategy is inconsistent.
  void validate() const;
};

/// Alternating node and predicate ids: v0 e1 v1 ... ek vk.
struct Walk {
  std::vector<TermId> tokens;

  std::size_t length() const { return tokens.size() / 2; }
  TermId node(std::size_t k) const { return tokens[2 * k]; }
  TermId predicate(std::size_t k) const { return tokens[2 * k - 1]; }  // k in [1, length]
  friend auto operator<=>(const Walk&, const Walk&) = default;
  friend bool operator==(const Walk&, const Walk&) = default;
};

struct EntityStats {
  TermId entity;
  std::size_t depth = 0;
  std::size_t attempts = 0;
  std::size_t walks = 0;
  std::size_t distinct = 0;
  double millis = 0.0;
};

struct WalkCorpus {
  std::vector<Walk> walks;
  std::vector<EntityStats> entities;

  void append(WalkCorpus&& other);
};

struct CorpusStats {
  std::size_t attempts = 0;
  std::size_t walks = 0;
  std::size_t distinct = 0;
  double mean_depth = 0.0;
  double millis = 0.0;
};

/// Pruning predicate for a walk extracted at target depth `depth`. NRST also
/// rejects a revisit of the root at the final position so that every walk it
/// accepts is accepted by NRSE as well.
bool prune_check(const Walk& walk, Pruning scheme, const Graph& g, std::size_t depth);

/// Precomputes per-strategy data (templates and their weights) once; extract()
/// is const and may be called concurrently.
class WalkExtractor {
 public:
  WalkExtractor(const Graph& g, WalkStrategy strategy);

  WalkCorpus extract(TermId entity, Rng& rng) const;
  const WalkStrategy& strategy() const { return strategy_; }
  std::span<const Relationship> templates() const { return templates_; }

 private:
  std::optional<Walk> attempt(TermId entity, Rng& rng) const;

  const Graph& g_;
  WalkStrategy strategy_;
  std::vector<Relationship> templates_;
  std::vector<double> template_weights_;
};

WalkCorpus extract_walks(const Graph& g, TermId entity, const WalkStrategy& strategy, Rng& rng);

/// Extracts walks for every entity, each from its own stream derived from
/// `seed`, the strategy depth and the entity id. Output follows entity order.
WalkCorpus extract_corpus(const Graph& g, std::span<const TermId> entities, const WalkStrategy& strategy,
                          std::uint64_t seed, unsigned workers = 1);

CorpusStats corpus_stats(const WalkCorpus& corpus);

/// Corpus token for a term: '%', space, tab, CR and LF are percent-encoded.
std::string corpus_token(std::string_view term);
std::string decode_corpus_token(std::string_view token);

/// One walk per line; `header` (if non-empty) is written first as a `# ` comment.
void write_corpus(const WalkCorpus& corpus, const Graph& g, std::ostream& out, std::string_view header = {});
/// CSV `entity,depth,attempts,walks,distinct,millis`.
void write_walk_stats_csv(const WalkCorpus& corpus, const Graph& g, std::ostream& out);

}  // namespace kgwalk
