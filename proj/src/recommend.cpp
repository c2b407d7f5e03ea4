#include "kgwalk/recommend.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "kgwalk/parallel.hpp"
#include "kgwalk/random.hpp"

namespace kgwalk {

std::optional<std::uint32_t> KeyedVectors::find(std::string_view token) const {
  auto it = index.find(std::string(token));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void KeyedVectors::add(std::string token, std::span<const double> vector) {
  if (tokens.empty() && dim == 0) dim = vector.size();
  if (vector.size() != dim) throw std::invalid_argument("vector dimension mismatch");
  auto [it, inserted] = index.try_emplace(token, static_cast<std::uint32_t>(tokens.size()));
  if (!inserted) throw DataError("duplicate token in vectors: " + token);
  tokens.push_back(std::move(token));
  data.insert(data.end(), vector.begin(), vector.end());
}

KeyedVectors keyed_vectors(const EmbeddingModel& model) {
  KeyedVectors kv;
  kv.dim = model.dim;
  for (std::uint32_t i = 0; i < model.vocab.size(); ++i) kv.add(model.vocab.tokens[i], model.in(i));
  return kv;
}

KeyedVectors load_word2vec_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("vectors file is empty");
  std::size_t count = 0;
  std::size_t dim = 0;
  {
    const auto split = split_tokens(line);
    if (split.size() != 2) throw DataError("vectors header must be `count dim`");
    auto r1 = std::from_chars(split[0].data(), split[0].data() + split[0].size(), count);
    auto r2 = std::from_chars(split[1].data(), split[1].data() + split[1].size(), dim);
    if (r1.ec != std::errc() || r2.ec != std::errc() || dim == 0) throw DataError("malformed vectors header");
  }
  KeyedVectors kv;
  kv.dim = dim;
  std::vector<double> values(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tokens(line);
    if (fields.size() != dim + 1) {
      throw DataError("vectors line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) + " fields");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      const auto f = fields[k + 1];
      const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), values[k]);
      if (ec != std::errc() || end != f.data() + f.size()) {
        throw DataError("vectors line " + std::to_string(line_no) + ": malformed number");
      }
    }
    kv.add(std::string(fields[0]), values);
  }
  if (kv.size() != count) {
    throw DataError("vectors header announces " + std::to_string(count) + " rows, found " + std::to_string(kv.size()));
  }
  return kv;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

Recommendation top_k(const KeyedVectors& vectors, std::string_view query, std::size_t k,
                     const CandidateFilter& filter) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const auto q = vectors.find(query);
  if (!q) throw DataError("query not in vocabulary: " + std::string(query));
  Recommendation rec;
  rec.query = std::string(query);
  rec.k = k;
  const auto qv = vectors.row(*q);
  for (std::uint32_t i = 0; i < vectors.size(); ++i) {
    if (i == *q) continue;
    if (filter && !filter(vectors.tokens[i])) continue;
    rec.items.emplace_back(vectors.tokens[i], cosine(qv, vectors.row(i)));
  }
  const auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  if (rec.items.size() > k) {
    std::partial_sort(rec.items.begin(), rec.items.begin() + static_cast<std::ptrdiff_t>(k), rec.items.end(), better);
    rec.items.resize(k);
  } else {
    std::sort(rec.items.begin(), rec.items.end(), better);
  }
  return rec;
}

namespace {

std::size_t hits(const Recommendation& rec, const std::set<std::string>& truth) {
  std::size_t n = 0;
  for (const auto& item : rec.items) n += truth.count(item.first);
  return n;
}

}  // namespace

double precision_at_k(const Recommendation& rec, const std::set<std::string>& truth) {
  return rec.k == 0 ? 0.0 : static_cast<double>(hits(rec, truth)) / static_cast<double>(rec.k);
}

double recall_at_k(const Recommendation& rec, const std::set<std::string>& truth) {
  return truth.empty() ? 0.0 : static_cast<double>(hits(rec, truth)) / static_cast<double>(truth.size());
}

GroundTruth load_ground_truth(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("ground truth is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("ground truth must be a JSON object");
  GroundTruth truth;
  for (const auto& [query, relevant] : doc.items()) {
    if (!relevant.is_array()) throw DataError("ground truth entry for " + query + " must be an array");
    auto& set = truth[std::string(strip_iri_brackets(query))];
    for (const auto& item : relevant) {
      if (!item.is_string()) throw DataError("ground truth entry for " + query + " must hold strings");
      set.insert(std::string(strip_iri_brackets(item.get<std::string>())));
    }
    if (set.count(std::string(strip_iri_brackets(query))) != 0) {
      throw DataError("query listed in its own relevant set: " + query);
    }
  }
  return truth;
}

void save_ground_truth(const GroundTruth& truth, std::ostream& out) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [query, relevant] : truth) doc[query] = std::vector<std::string>(relevant.begin(), relevant.end());
  out << doc.dump(2) << '\n';
}

NdcgResult ndcg(std::span<const SpecificityEntry> ranked, std::span<const SpecificityEntry> ideal) {
  std::map<Relationship, double> gain;
  std::vector<double> ideal_gains;
  for (const auto& e : ideal) {
    gain[e.relationship] = e.score;
    ideal_gains.push_back(e.score);
  }
  std::sort(ideal_gains.begin(), ideal_gains.end(), std::greater<>());
  const std::size_t cutoff = ideal.size();

  double idcg = 0.0;
  for (std::size_t i = 0; i < cutoff; ++i) idcg += ideal_gains[i] / std::log2(static_cast<double>(i) + 2.0);
  if (idcg <= 0.0) return {1.0, true};

  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(cutoff, ranked.size()); ++i) {
    auto it = gain.find(ranked[i].relationship);
    if (it != gain.end()) dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
  }
  return {std::clamp(dcg / idcg, 0.0, 1.0), false};
}

std::uint64_t sweep_repeat_seed(std::uint64_t seed, std::size_t repeat) { return derive_seed(seed, 5000 + repeat); }

std::vector<SweepRow> sensitivity_sweep(const Graph& g, TermId type, const EstimatorParams& base,
                                        std::span<const SweepPoint> points, const SweepOptions& options) {
  if (points.empty()) throw std::invalid_argument("sweep needs at least one point");
  if (options.repeats == 0) throw std::invalid_argument("sweep needs at least one repeat");
  const auto truth_it = std::max_element(points.begin(), points.end());
  const std::size_t truth_index = static_cast<std::size_t>(truth_it - points.begin());
  const std::size_t depths = base.max_depth;

  // values[repeat][point][depth]
  std::vector<std::vector<std::vector<NdcgResult>>> values(options.repeats);
  parallel_for(options.repeats, options.workers, [&](std::size_t r) {
    std::vector<SpecificityTable> tables;
    for (const auto& point : points) {
      EstimatorParams params = base;
      params.seed = sweep_repeat_seed(base.seed, r);
      params.n_walks = point.n_walks;
      params.seed_set_size = point.seed_set_size;
      params.workers = 1;
      tables.push_back(rank_by_specificity(g, type, params));
    }
    const auto& truth = tables[truth_index];
    auto& out = values[r];
    out.resize(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
      for (std::size_t d = 0; d < depths; ++d) {
        out[p].push_back(ndcg(tables[p].depths[d], truth.depths[d]));
      }
    }
  });

  std::vector<SweepRow> rows;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t d = 0; d < depths; ++d) {
      SweepRow row;
      row.point = points[p];
      row.depth = d + 1;
      row.repeats = options.repeats;
      row.ground_truth = p == truth_index;
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t r = 0; r < options.repeats; ++r) {
        const auto& v = values[r][p][d];
        sum += v.value;
        sq += v.value * v.value;
        row.degenerate += v.degenerate ? 1 : 0;
      }
      const double n = static_cast<double>(options.repeats);
      row.mean_ndcg = sum / n;
      row.stddev = std::sqrt(std::max(0.0, sq / n - row.mean_ndcg * row.mean_ndcg));
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace kgwalk
