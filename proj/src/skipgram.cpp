#include "kgwalk/skipgram.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "kgwalk/graph.hpp"
#include "kgwalk/parallel.hpp"

namespace kgwalk {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double log_sigmoid(double x) { return std::log(sigmoid(x)); }

}  // namespace

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  auto it = index.find(std::string(token));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (!line.empty() && line.front() == '#') return out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const auto space = line.find(' ', pos);
    const auto end = space == std::string_view::npos ? line.size() : space;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    if (space == std::string_view::npos) break;
    pos = space + 1;
  }
  return out;
}

Vocabulary build_vocab_from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   std::uint64_t min_count) {
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  vocab.tokens.reserve(kept.size());
  vocab.counts.reserve(kept.size());
  for (auto& [token, count] : kept) {
    vocab.index.emplace(token, static_cast<std::uint32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(std::move(token));
    vocab.counts.push_back(count);
  }
  return vocab;
}

Vocabulary build_vocab(std::istream& corpus, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  while (std::getline(corpus, line)) {
    for (auto token : split_tokens(line)) ++counts[std::string(token)];
  }
  return build_vocab_from_counts(counts, min_count);
}

EncodedCorpus read_corpus(std::istream& corpus, std::uint64_t min_count) {
  std::vector<std::vector<std::string>> lines;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  while (std::getline(corpus, line)) {
    auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    auto& stored = lines.emplace_back();
    stored.reserve(tokens.size());
    for (auto token : tokens) {
      ++counts[std::string(token)];
      stored.emplace_back(token);
    }
  }
  EncodedCorpus encoded;
  encoded.vocab = build_vocab_from_counts(counts, min_count);
  encoded.sentences.reserve(lines.size());
  for (const auto& tokens : lines) {
    std::vector<std::uint32_t> sentence;
    sentence.reserve(tokens.size());
    for (const auto& token : tokens) {
      auto it = encoded.vocab.index.find(token);
      if (it != encoded.vocab.index.end()) sentence.push_back(it->second);
    }
    encoded.tokens += sentence.size();
    if (!sentence.empty()) encoded.sentences.push_back(std::move(sentence));
  }
  return encoded;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> context_pairs(std::span<const std::uint32_t> sentence,
                                                                   std::size_t window) {
  if (window == 0) throw std::invalid_argument("window must be at least 1");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(sentence.size() - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) pairs.emplace_back(sentence[i], sentence[j]);
    }
  }
  return pairs;
}

std::vector<std::pair<std::string, std::string>> context_pairs(std::span<const std::string> sentence,
                                                               std::size_t window, const Vocabulary* vocab) {
  std::vector<std::string> kept;
  for (const auto& token : sentence) {
    if (vocab == nullptr || vocab->find(token)) kept.push_back(token);
  }
  std::vector<std::uint32_t> positions(kept.size());
  for (std::uint32_t i = 0; i < positions.size(); ++i) positions[i] = i;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [a, b] : context_pairs(positions, window)) pairs.emplace_back(kept[a], kept[b]);
  return pairs;
}

void TrainConfig::validate() const {
  if (dim == 0) throw std::invalid_argument("dim must be at least 1");
  if (window == 0) throw std::invalid_argument("window must be at least 1");
  if (negatives == 0) throw std::invalid_argument("negatives must be at least 1");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
  if (min_count == 0) throw std::invalid_argument("min count must be at least 1");
  if (!(subsample >= 0.0)) throw std::invalid_argument("subsample threshold must be non-negative");
}

double sigmoid(double x) {
  x = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-x));
}

double sgns_objective(const EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                      std::span<const std::uint32_t> negatives) {
  const auto v = model.in(center);
  double value = log_sigmoid(dot(model.out(context), v));
  for (std::uint32_t n : negatives) value += log_sigmoid(-dot(model.out(n), v));
  return value;
}

SgnsGradient sgns_gradient(const EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                           std::span<const std::uint32_t> negatives) {
  const auto v = model.in(center);
  SgnsGradient grad;
  grad.center.assign(model.dim, 0.0);
  auto add = [&](std::uint32_t target, double label) {
    const auto u = model.out(target);
    const double g = label - sigmoid(dot(u, v));
    for (std::size_t k = 0; k < model.dim; ++k) grad.center[k] += g * u[k];
    auto it = std::find_if(grad.outputs.begin(), grad.outputs.end(), [&](const auto& e) { return e.first == target; });
    if (it == grad.outputs.end()) {
      grad.outputs.emplace_back(target, std::vector<double>(model.dim, 0.0));
      it = std::prev(grad.outputs.end());
    }
    for (std::size_t k = 0; k < model.dim; ++k) it->second[k] += g * v[k];
  };
  add(context, 1.0);
  for (std::uint32_t n : negatives) add(n, 0.0);
  return grad;
}

double sgns_step(EmbeddingModel& model, std::uint32_t center, std::uint32_t context,
                 std::span<const std::uint32_t> negatives, double lr) {
  const auto v = model.in(center);
  thread_local std::vector<double> accum;
  accum.assign(model.dim, 0.0);
  double objective = 0.0;
  auto update = [&](std::uint32_t target, double label) {
    const auto u = model.out(target);
    const double f = dot(u, v);
    objective += label > 0.0 ? log_sigmoid(f) : log_sigmoid(-f);
    const double g = (label - sigmoid(f)) * lr;
    for (std::size_t k = 0; k < model.dim; ++k) accum[k] += g * u[k];
    for (std::size_t k = 0; k < model.dim; ++k) u[k] += g * v[k];
  };
  update(context, 1.0);
  for (std::uint32_t n : negatives) update(n, 0.0);
  for (std::size_t k = 0; k < model.dim; ++k) v[k] += accum[k];
  return objective;
}

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts, double power) {
  if (counts.empty()) throw std::invalid_argument("negative sampler needs a non-empty vocabulary");
  double total = 0.0;
  probability_.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probability_[i] = std::pow(static_cast<double>(counts[i]), power);
    total += probability_[i];
  }
  for (double& p : probability_) p /= total;

  const std::size_t size = std::clamp<std::size_t>(1000 * counts.size(), 100'000, 10'000'000);
  table_.resize(size);
  std::size_t i = 0;
  double cumulative = probability_[0];
  for (std::size_t a = 0; a < size; ++a) {
    table_[a] = static_cast<std::uint32_t>(i);
    if (static_cast<double>(a + 1) / static_cast<double>(size) > cumulative && i + 1 < counts.size()) {
      ++i;
      cumulative += probability_[i];
    }
  }
}

EmbeddingModel initialize(Vocabulary vocab, const TrainConfig& config) {
  config.validate();
  EmbeddingModel model;
  model.dim = config.dim;
  model.config = config;
  model.input.resize(vocab.size() * config.dim);
  model.output.assign(vocab.size() * config.dim, 0.0);
  Rng rng(derive_seed(config.seed, 0));
  const double half = 0.5 / static_cast<double>(config.dim);
  std::uniform_real_distribution<double> init(-half, half);
  for (double& x : model.input) x = init(rng);
  model.vocab = std::move(vocab);
  return model;
}

EmbeddingModel train(const EncodedCorpus& corpus, const TrainConfig& config, TrainReport* report) {
  config.validate();
  if (corpus.vocab.size() == 0) throw DataError("empty vocabulary after min-count filtering");
  EmbeddingModel model = initialize(corpus.vocab, config);
  if (config.epochs == 0) return model;

  const NegativeSampler sampler(model.vocab.counts, config.power);
  const double total_words = static_cast<double>(config.epochs) * static_cast<double>(corpus.tokens) + 1.0;
  const double min_lr = config.learning_rate * 1e-4;
  std::atomic<std::uint64_t> processed{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(
                                                                                 std::max<std::size_t>(1, corpus.sentences.size()))));
  const double corpus_words = static_cast<double>(corpus.tokens);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<double> loss(workers, 0.0);
    std::vector<std::uint64_t> pairs(workers, 0);
    parallel_for(workers, workers, [&](std::size_t w) {
      Rng rng(derive_seed(derive_seed(config.seed, 1000 + epoch), w));
      const std::size_t begin = corpus.sentences.size() * w / workers;
      const std::size_t end = corpus.sentences.size() * (w + 1) / workers;
      std::vector<std::uint32_t> kept;
      std::vector<std::uint32_t> negatives;
      negatives.reserve(config.negatives);
      for (std::size_t s = begin; s < end; ++s) {
        const auto& sentence = corpus.sentences[s];
        kept.clear();
        for (std::uint32_t token : sentence) {
          if (config.subsample > 0.0) {
            const double f = static_cast<double>(model.vocab.counts[token]);
            const double t = config.subsample * corpus_words;
            const double keep = (std::sqrt(f / t) + 1.0) * t / f;
            if (keep < uniform_real(rng)) continue;
          }
          kept.push_back(token);
        }
        const double progress = static_cast<double>(processed.load(std::memory_order_relaxed)) / total_words;
        const double lr = std::max(config.learning_rate * (1.0 - progress), min_lr);
        for (std::size_t i = 0; i < kept.size(); ++i) {
          const std::size_t lo = i >= config.window ? i - config.window : 0;
          const std::size_t hi = std::min(kept.size() - 1, i + config.window);
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            negatives.clear();
            for (std::size_t n = 0; n < config.negatives; ++n) {
              const std::uint32_t draw = sampler.sample(rng);
              if (draw != kept[j]) negatives.push_back(draw);
            }
            loss[w] -= sgns_step(model, kept[i], kept[j], negatives, lr);
            ++pairs[w];
          }
        }
        processed.fetch_add(sentence.size(), std::memory_order_relaxed);
      }
    });
    if (report != nullptr) {
      double total_loss = 0.0;
      std::uint64_t total_pairs = 0;
      for (unsigned w = 0; w < workers; ++w) {
        total_loss += loss[w];
        total_pairs += pairs[w];
      }
      report->epoch_loss.push_back(total_pairs == 0 ? 0.0 : total_loss / static_cast<double>(total_pairs));
      report->epoch_pairs.push_back(total_pairs);
    }
  }
  return model;
}

EmbeddingModel train(std::istream& corpus, const TrainConfig& config, TrainReport* report) {
  return train(read_corpus(corpus, config.min_count), config, report);
}

void save_word2vec_text(const EmbeddingModel& model, std::ostream& out) {
  out << model.vocab.size() << ' ' << model.dim << '\n';
  char buf[32];
  std::string line;
  for (std::uint32_t i = 0; i < model.vocab.size(); ++i) {
    line = model.vocab.tokens[i];
    for (double x : model.in(i)) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<float>(x));
      line += ' ';
      line.append(buf, end);
    }
    out << line << '\n';
  }
}

}  // namespace kgwalk
