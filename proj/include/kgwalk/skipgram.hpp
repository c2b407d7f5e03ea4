#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgwalk/random.hpp"

namespace kgwalk {

/// Retained tokens ordered by descending count, ties lexicographic.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::uint32_t> find(std::string_view token) const;
};

/// Splits a corpus line on spaces; `#` comment lines yield no tokens.
std::vector<std::string_view> split_tokens(std::string_view line);

Vocabulary build_vocab(std::istream& corpus, std::uint64_t min_count = 1);
Vocabulary build_vocab_from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   std::uint64_t min_count);

/// A corpus held in memory as vocabulary indices; out-of-vocabulary tokens dropped.
struct EncodedCorpus {
  Vocabulary vocab;
  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t tokens = 0;
};

EncodedCorpus read_corpus(std::istream& corpus, std::uint64_t min_count = 1);

/// All (center, context) pairs with 0 < |i - j| <= window, in order of center
/// position then context position.
std::vector<std::pair<std::uint32_t, std::uint32_t>> context_pairs(std::span<const std::uint32_t> sentence,
                                                                   std::size_t window);
/// String form; tokens missing from `vocab` are dropped before pairing.
std::vector<std::pair<std::string, std::string>> context_pairs(std::span<const std::string> sentence,
                                                               std::size_t window, const Vocabulary* vocab = nullptr);

struct TrainConfig {
  std::size_t dim = 500;
  std::size_t window = 10;
  std::size_t negatives = 25;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t min_count = 1;
  double power = 0.75;      // unigram exponent of the negative-sampling distribution
  double subsample = 0.0;   // word2vec style threshold; 0 keeps every token
  std::uint64_t seed = 1;
  unsigned workers = 1;

  void validate() const;
};

struct EmbeddingModel {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> input;   // |V| x dim, row major
  std::vector<double> output;  // |V| x dim
  TrainConfig config;

  std::span<double> in(std::uint32_t i) { return {input.data() + std::size_t{i} * dim, dim}; }
  std::span<const double> in(std::uint32_t i) const { return {input.data() + std::size_t{i} * dim, dim}; }
  std::span<double> out(std::uint32_t i) { return {output.data() + std::size_t{i} * dim, dim}; }
  std::span<const double> out(std::uint32_t i) const { return {output.data() + std::size_t{i} * dim, dim}; }
};

inline constexpr double kSigmoidClamp = 30.0;

/// Logistic function with its argument clamped to [-30, 30].
double sigmoid(double x);

/// log s(u_ctx . v_c) + sum over negatives of log s(-u_neg . v_c).
double sgns_objective(const EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                      std::span<const std::uint32_t> negatives);

/// Gradient of sgns_objective. Output-vector gradients are accumulated per
/// distinct index, in first-appearance order.
struct SgnsGradient {
  std::vector<double> center;
  std::vector<std::pair<std::uint32_t, std::vector<double>>> outputs;
};
SgnsGradient sgns_gradient(const EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                           std::span<const std::uint32_t> negatives);

/// One ascent step with learning rate `lr`; returns the objective evaluated
/// before the update. Output vectors are updated in sequence (as in word2vec)
/// and the center vector once at the end.
double sgns_step(EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                 std::span<const std::uint32_t> negatives, double lr);

/// Draws from count^power via a precomputed table of size
/// clamp(1000 |V|, 1e5, 1e7).
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::uint64_t> counts, double power);
  std::uint32_t sample(Rng& rng) const { return table_[uniform_index(rng, table_.size())]; }
  /// Exact target probability of index i.
  double probability(std::uint32_t i) const { return probability_[i]; }
  std::size_t table_size() const { return table_.size(); }

 private:
  std::vector<std::uint32_t> table_;
  std::vector<double> probability_;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean negated objective per training pair
  std::vector<std::uint64_t> epoch_pairs;
};

/// Input vectors uniform in [-0.5/dim, 0.5/dim], output vectors zero.
EmbeddingModel initialize(Vocabulary vocab, const TrainConfig& config);

/// Trains on an encoded corpus. Bit-identical for a fixed seed when
/// workers == 1; with more workers updates race by design.
EmbeddingModel train(const EncodedCorpus& corpus, const TrainConfig& config, TrainReport* report = nullptr);
EmbeddingModel train(std::istream& corpus, const TrainConfig& config, TrainReport* report = nullptr);

/// word2vec text format: `|V| dim`, then one `token v1 ... vdim` row per token
/// (input vectors, shortest float round-trip decimals).
void save_word2vec_text(const EmbeddingModel& model, std::ostream& out);

}  // namespace kgwalk
