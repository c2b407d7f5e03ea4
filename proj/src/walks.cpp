#include "kgwalk/walks.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "kgwalk/parallel.hpp"

namespace kgwalk {

std::string_view to_string(Bias b) {
  switch (b) {
    case Bias::uniform: return "uniform";
    case Bias::frequency: return "frequency";
    case Bias::pagerank: return "pagerank";
    case Bias::specificity: return "specificity";
  }
  return "?";
}

std::string_view to_string(Pruning p) {
  switch (p) {
    case Pruning::none: return "none";
    case Pruning::nrse: return "nrse";
    case Pruning::ue: return "ue";
    case Pruning::nrst: return "nrst";
    case Pruning::uet: return "uet";
  }
  return "?";
}

std::optional<Bias> parse_bias(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Bias b : {Bias::uniform, Bias::frequency, Bias::pagerank, Bias::specificity}) {
    if (lower == to_string(b)) return b;
  }
  return std::nullopt;
}

std::optional<Pruning> parse_pruning(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Pruning p : {Pruning::none, Pruning::nrse, Pruning::ue, Pruning::nrst, Pruning::uet}) {
    if (lower == to_string(p)) return p;
  }
  return std::nullopt;
}

void WalkStrategy::validate() const {
  if (depth == 0) throw std::invalid_argument("walk depth must be at least 1");
  if (walks_per_entity == 0) throw std::invalid_argument("walks per entity must be at least 1");
  if (bias == Bias::specificity && table == nullptr) {
    throw std::invalid_argument("specificity bias requires a specificity table");
  }
  if (bias == Bias::specificity && table->depths.size() < depth) {
    throw std::invalid_argument("specificity table has no entries of depth " + std::to_string(depth));
  }
  if (bias == Bias::pagerank && pagerank == nullptr) throw std::invalid_argument("pagerank bias requires scores");
}

void WalkCorpus::append(WalkCorpus&& other) {
  walks.insert(walks.end(), std::make_move_iterator(other.walks.begin()), std::make_move_iterator(other.walks.end()));
  entities.insert(entities.end(), other.entities.begin(), other.entities.end());
}

bool prune_check(const Walk& walk, Pruning scheme, const Graph& g, std::size_t depth) {
  const std::size_t len = walk.length();
  const TermId root = walk.node(0);
  const auto revisits_root = [&] {
    for (std::size_t k = 1; k <= len; ++k) {
      if (walk.node(k) == root) return true;
    }
    return false;
  };

  switch (scheme) {
    case Pruning::none:
      return true;
    case Pruning::nrse:
      return !revisits_root();
    case Pruning::ue:
      for (std::size_t i = 0; i <= len; ++i) {
        for (std::size_t j = i + 1; j <= len; ++j) {
          if (walk.node(i) == walk.node(j)) return false;
        }
      }
      return true;
    case Pruning::nrst:
      if (revisits_root()) return false;
      for (std::size_t k = 1; k <= len && k < depth; ++k) {
        if (g.shares_type(walk.node(k), root)) return false;
      }
      return true;
    case Pruning::uet:
      for (std::size_t i = 0; i <= len; ++i) {
        for (std::size_t j = i + 1; j <= len; ++j) {
          if (g.shares_type(walk.node(i), walk.node(j))) return false;
        }
      }
      return true;
  }
  return true;
}

WalkExtractor::WalkExtractor(const Graph& g, WalkStrategy strategy) : g_(g), strategy_(strategy) {
  strategy_.validate();
  if (strategy_.bias == Bias::specificity) {
    for (auto& entry : strategy_.table->above_threshold(strategy_.depth)) {
      if (entry.score <= 0.0) continue;
      templates_.push_back(std::move(entry.relationship));
      template_weights_.push_back(entry.score);
    }
  }
}

std::optional<Walk> WalkExtractor::attempt(TermId entity, Rng& rng) const {
  Walk walk;
  walk.tokens.push_back(entity);
  TermId v = entity;

  if (strategy_.bias == Bias::specificity) {
    const auto pick = weighted_index(rng, template_weights_);
    if (!pick) return std::nullopt;
    for (TermId p : templates_[*pick].predicates) {
      const auto edges = g_.out_edges_with_predicate(v, p);
      if (edges.empty()) return std::nullopt;  // incomplete template
      v = edges[uniform_index(rng, edges.size())].node;
      walk.tokens.push_back(p);
      walk.tokens.push_back(v);
    }
    return walk;
  }

  std::vector<double> weights;
  for (std::size_t step = 0; step < strategy_.depth; ++step) {
    const auto edges = g_.out_neighbors(v);
    if (edges.empty()) break;
    std::size_t choice = 0;
    if (strategy_.bias == Bias::uniform) {
      choice = uniform_index(rng, edges.size());
    } else {
      weights.resize(edges.size());
      const auto& freq = g_.predicate_frequencies();
      for (std::size_t i = 0; i < edges.size(); ++i) {
        weights[i] = strategy_.bias == Bias::frequency ? static_cast<double>(freq[edges[i].predicate.value])
                     : g_.is_literal(edges[i].node)    ? 0.0
                                                       : strategy_.pagerank->weight(edges[i].node);
      }
      const auto pick = weighted_index(rng, weights);
      if (!pick) break;
      choice = *pick;
    }
    walk.tokens.push_back(edges[choice].predicate);
    walk.tokens.push_back(edges[choice].node);
    v = edges[choice].node;
  }
  if (walk.length() == 0) return std::nullopt;
  return walk;
}

WalkCorpus WalkExtractor::extract(TermId entity, Rng& rng) const {
  const auto start = std::chrono::steady_clock::now();
  WalkCorpus corpus;
  std::set<Walk> distinct;
  for (std::size_t i = 0; i < strategy_.walks_per_entity; ++i) {
    auto walk = attempt(entity, rng);
    if (!walk || !prune_check(*walk, strategy_.pruning, g_, strategy_.depth)) continue;
    distinct.insert(*walk);
    corpus.walks.push_back(std::move(*walk));
  }
  EntityStats stats;
  stats.entity = entity;
  stats.depth = strategy_.depth;
  stats.attempts = strategy_.walks_per_entity;
  stats.walks = corpus.walks.size();
  stats.distinct = distinct.size();
  stats.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  corpus.entities.push_back(stats);
  return corpus;
}

WalkCorpus extract_walks(const Graph& g, TermId entity, const WalkStrategy& strategy, Rng& rng) {
  return WalkExtractor(g, strategy).extract(entity, rng);
}

WalkCorpus extract_corpus(const Graph& g, std::span<const TermId> entities, const WalkStrategy& strategy,
                          std::uint64_t seed, unsigned workers) {
  const WalkExtractor extractor(g, strategy);
  const std::uint64_t depth_seed = derive_seed(seed, strategy.depth);
  std::vector<WalkCorpus> parts(entities.size());
  parallel_for(entities.size(), workers, [&](std::size_t i) {
    Rng rng(derive_seed(depth_seed, entities[i].value));
    parts[i] = extractor.extract(entities[i], rng);
  });
  WalkCorpus corpus;
  for (auto& part : parts) corpus.append(std::move(part));
  return corpus;
}

CorpusStats corpus_stats(const WalkCorpus& corpus) {
  CorpusStats stats;
  stats.walks = corpus.walks.size();
  std::set<std::vector<TermId>> distinct;
  double depth_sum = 0.0;
  for (const Walk& w : corpus.walks) {
    distinct.insert(w.tokens);
    depth_sum += static_cast<double>(w.length());
  }
  stats.distinct = distinct.size();
  stats.mean_depth = stats.walks == 0 ? 0.0 : depth_sum / static_cast<double>(stats.walks);
  for (const auto& e : corpus.entities) {
    stats.attempts += e.attempts;
    stats.millis += e.millis;
  }
  return stats;
}

std::string corpus_token(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  for (char c : term) {
    switch (c) {
      case '%': out += "%25"; break;
      case ' ': out += "%20"; break;
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out += c;
    }
  }
  return out;
}

std::string decode_corpus_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '%' && i + 2 < token.size()) {
      const std::string hex(token.substr(i + 1, 2));
      char* end = nullptr;
      const long value = std::strtol(hex.c_str(), &end, 16);
      if (end == hex.c_str() + 2) {
        out += static_cast<char>(value);
        i += 2;
        continue;
      }
    }
    out += token[i];
  }
  return out;
}

void write_corpus(const WalkCorpus& corpus, const Graph& g, std::ostream& out, std::string_view header) {
  if (!header.empty()) out << "# " << header << '\n';
  std::vector<std::string> cache(g.term_count());
  std::string line;
  for (const Walk& w : corpus.walks) {
    line.clear();
    for (std::size_t i = 0; i < w.tokens.size(); ++i) {
      std::string& token = cache[w.tokens[i].value];
      if (token.empty()) token = corpus_token(g.term(w.tokens[i]));
      if (i > 0) line += ' ';
      line += token;
    }
    out << line << '\n';
  }
}

void write_walk_stats_csv(const WalkCorpus& corpus, const Graph& g, std::ostream& out) {
  out << "entity,depth,attempts,walks,distinct,millis\n";
  char millis[32];
  for (const auto& e : corpus.entities) {
    std::snprintf(millis, sizeof millis, "%.3f", e.millis);
    out << '"' << g.term(e.entity) << "\"," << e.depth << ',' << e.attempts << ',' << e.walks << ',' << e.distinct
        << ',' << millis << '\n';
  }
}

}  // namespace kgwalk
