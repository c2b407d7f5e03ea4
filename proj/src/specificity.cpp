#include "kgwalk/specificity.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "kgwalk/parallel.hpp"
#include "kgwalk/random.hpp"

namespace kgwalk {

namespace {

using NodeCounts = std::vector<std::pair<TermId, double>>;

// Sorts by node and sums the counts of equal nodes.
void merge_counts(NodeCounts& counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (out > 0 && counts[out - 1].first == counts[i].first) {
      counts[out - 1].second += counts[i].second;
    } else {
      counts[out++] = counts[i];
    }
  }
  counts.resize(out);
}

std::uint64_t relationship_stream(const Relationship& rel) {
  std::uint64_t h = mix64(rel.depth());
  for (TermId p : rel.predicates) h = mix64(h ^ p.value);
  return h;
}

bool template_predicate_allowed(const Graph& g, TermId predicate, bool type_edges_allowed) {
  return type_edges_allowed || !g.type_predicate() || predicate != *g.type_predicate();
}

}  // namespace

std::string_view to_string(Estimator e) { return e == Estimator::alg2 ? "alg2" : "eq2"; }
std::string_view to_string(SelectionMode m) { return m == SelectionMode::extend ? "extend" : "scratch"; }

std::string render_relationship(const Relationship& rel, const Graph& g) {
  std::string out;
  for (std::size_t i = 0; i < rel.predicates.size(); ++i) {
    if (i > 0) out += '|';
    out += g.term(rel.predicates[i]);
  }
  return out;
}

Relationship parse_relationship(std::string_view text, const Graph& g) {
  Relationship rel;
  std::size_t pos = 0;
  while (true) {
    const auto bar = text.find('|', pos);
    const auto part = text.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);
    if (part.empty()) throw DataError("empty predicate in relationship '" + std::string(text) + "'");
    rel.predicates.push_back(g.require(part));
    if (bar == std::string_view::npos) break;
    pos = bar + 1;
  }
  return rel;
}

void sort_entries(std::vector<SpecificityEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const SpecificityEntry& a, const SpecificityEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.relationship < b.relationship;
  });
}

void EstimatorParams::validate() const {
  if (seed_set_size == 0) throw std::invalid_argument("seed set size must be at least 1");
  if (n_walks == 0) throw std::invalid_argument("number of walks must be at least 1");
  if (max_depth == 0) throw std::invalid_argument("max depth must be at least 1");
  if (candidates_per_depth == 0) throw std::invalid_argument("candidates per depth must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
  if (selection == SelectionMode::scratch && selection_samples == 0) {
    throw std::invalid_argument("scratch selection needs at least one sample");
  }
}

std::vector<SpecificityEntry> SpecificityTable::above_threshold(std::size_t d) const {
  std::vector<SpecificityEntry> out;
  if (d == 0 || d > depths.size()) return out;
  for (const auto& e : depths[d - 1]) {
    if (e.score >= params.threshold) out.push_back(e);
  }
  return out;
}

std::vector<std::pair<TermId, double>> incoming_path_counts(const Graph& g, TermId target, std::size_t depth) {
  NodeCounts current{{target, 1.0}};
  g.in_neighbors(target);  // validates the id
  for (std::size_t step = 0; step < depth && !current.empty(); ++step) {
    NodeCounts next;
    for (const auto& [node, count] : current) {
      for (const Edge& e : g.in_neighbors(node)) next.emplace_back(e.node, count);
    }
    merge_counts(next);
    current = std::move(next);
  }
  return current;
}

double node_to_node_specificity(const Graph& g, TermId target, TermId source, std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("depth must be at least 1");
  if (!g.contains(source)) throw UnknownTermError("unknown term id " + std::to_string(source.value));
  double total = 0.0;
  double from_source = 0.0;
  for (const auto& [node, count] : incoming_path_counts(g, target, depth)) {
    total += count;
    if (node == source) from_source += count;
  }
  return total > 0.0 ? from_source / total : 0.0;
}

std::vector<std::pair<TermId, double>> forward_reach(const Graph& g, std::span<const TermId> starts,
                                                     const Relationship& rel) {
  NodeCounts current;
  current.reserve(starts.size());
  for (TermId s : starts) current.emplace_back(s, 1.0);
  merge_counts(current);
  for (TermId p : rel.predicates) {
    NodeCounts next;
    for (const auto& [node, count] : current) {
      for (const Edge& e : g.out_edges_with_predicate(node, p)) next.emplace_back(e.node, count);
    }
    merge_counts(next);
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

double relationship_frequency(const Graph& g, std::span<const TermId> starts, const Relationship& rel) {
  double total = 0.0;
  for (const auto& [node, count] : forward_reach(g, starts, rel)) total += count;
  return total;
}

SpecificityEntry exact_specificity(const Graph& g, const Relationship& rel, TermId type) {
  if (rel.predicates.empty()) throw std::invalid_argument("relationship must have at least one predicate");
  const auto members = g.entities_of_type(type);
  if (members.empty()) {
    throw DataError("type has no instances: " + (g.contains(type) ? std::string(g.term(type)) : std::to_string(type.value)));
  }
  const auto reached = forward_reach(g, members, rel);
  if (reached.empty()) return {rel, 0.0, 0};

  double ratio_sum = 0.0;
  double paths = 0.0;
  for (const auto& [node, multiplicity] : reached) {
    paths += multiplicity;
    double total = 0.0;
    double from_type = 0.0;
    for (const auto& [start, count] : incoming_path_counts(g, node, rel.depth())) {
      total += count;
      if (g.has_type(start, type)) from_type += count;
    }
    ratio_sum += from_type / total;  // total >= multiplicity > 0
  }
  return {rel, ratio_sum / static_cast<double>(reached.size()), static_cast<std::uint64_t>(paths)};
}

std::vector<SpecificityEntry> estimate_specificity(const Graph& g, std::span<const Relationship> candidates,
                                                   std::span<const TermId> seeds, TermId type, std::size_t depth,
                                                   std::size_t n_walks, std::uint64_t seed,
                                                   const EstimateOptions& options) {
  if (seeds.empty()) throw std::invalid_argument("seed set is empty");
  if (n_walks <= seeds.size()) throw std::invalid_argument("number of walks must exceed the seed set size");
  for (const auto& rel : candidates) {
    if (rel.depth() != depth) throw std::invalid_argument("candidate depth does not match");
  }

  std::vector<SpecificityEntry> result(candidates.size());
  parallel_for(candidates.size(), options.workers, [&](std::size_t ci) {
    const Relationship& rel = candidates[ci];
    Rng rng(derive_seed(seed, relationship_stream(rel)));
    std::uint64_t hits = 0;
    for (std::size_t trial = 0; trial < n_walks; ++trial) {
      std::optional<TermId> reached;
      for (std::size_t attempt = 0; attempt <= options.forward_retry_limit && !reached; ++attempt) {
        TermId v = seeds[uniform_index(rng, seeds.size())];
        bool complete = true;
        for (TermId p : rel.predicates) {
          const auto edges = g.out_edges_with_predicate(v, p);
          if (edges.empty()) {
            complete = false;
            break;
          }
          v = edges[uniform_index(rng, edges.size())].node;
        }
        if (complete) reached = v;
      }
      if (!reached) continue;

      TermId v = *reached;
      bool complete = true;
      for (std::size_t step = 0; step < depth; ++step) {
        const auto edges = g.in_neighbors(v);
        if (edges.empty()) {
          complete = false;
          break;
        }
        v = edges[uniform_index(rng, edges.size())].node;
      }
      if (complete && g.has_type(v, type)) ++hits;
    }
    result[ci] = {rel, static_cast<double>(hits) / static_cast<double>(n_walks), n_walks};
  });
  return result;
}

std::vector<CandidatePath> select_paths(const Graph& g, std::span<const TermId> seeds, std::size_t depth,
                                        std::size_t n_paths, const std::vector<SpecificityEntry>* previous,
                                        std::uint64_t seed, const SelectOptions& options) {
  if (seeds.empty()) throw std::invalid_argument("seed set is empty");
  if (depth == 0) throw std::invalid_argument("depth must be at least 1");
  const auto allowed = [&](TermId p) { return template_predicate_allowed(g, p, options.type_edges_in_templates); };

  std::map<Relationship, double> frequency;
  if (depth == 1) {
    for (TermId s : seeds) {
      for (const Edge& e : g.out_neighbors(s)) {
        if (allowed(e.predicate)) frequency[Relationship{{e.predicate}}] += 1.0;
      }
    }
  } else if (options.mode == SelectionMode::extend) {
    if (previous == nullptr) throw std::invalid_argument("extension mode needs the previous depth's entries");
    for (const auto& entry : *previous) {
      if (entry.score < options.threshold || entry.relationship.depth() != depth - 1) continue;
      for (const auto& [node, count] : forward_reach(g, seeds, entry.relationship)) {
        for (const Edge& e : g.out_neighbors(node)) {
          if (!allowed(e.predicate)) continue;
          Relationship extended = entry.relationship;
          extended.predicates.push_back(e.predicate);
          frequency[std::move(extended)] += count;
        }
      }
    }
  } else {
    Rng rng(seed);
    std::vector<const Edge*> choices;
    for (std::size_t sample = 0; sample < options.samples; ++sample) {
      TermId v = seeds[uniform_index(rng, seeds.size())];
      Relationship rel;
      for (std::size_t step = 0; step < depth; ++step) {
        choices.clear();
        for (const Edge& e : g.out_neighbors(v)) {
          if (allowed(e.predicate)) choices.push_back(&e);
        }
        if (choices.empty()) break;
        const Edge* e = choices[uniform_index(rng, choices.size())];
        rel.predicates.push_back(e->predicate);
        v = e->node;
      }
      if (rel.depth() == depth) frequency[std::move(rel)] += 1.0;
    }
  }

  std::vector<CandidatePath> ranked;
  ranked.reserve(frequency.size());
  for (auto& [rel, f] : frequency) ranked.push_back({rel, f});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const CandidatePath& a, const CandidatePath& b) { return a.frequency > b.frequency; });
  if (ranked.size() > n_paths) ranked.resize(n_paths);
  return ranked;
}

SpecificityTable rank_by_specificity(const Graph& g, TermId type, const EstimatorParams& params) {
  params.validate();
  auto sample = sample_entities(g, type, params.seed_set_size, derive_seed(params.seed, 1));
  if (params.estimator == Estimator::alg2 && params.n_walks <= sample.entities.size()) {
    throw std::invalid_argument("number of walks (" + std::to_string(params.n_walks) +
                                ") must exceed the seed set size (" + std::to_string(sample.entities.size()) + ")");
  }

  SpecificityTable table;
  table.type = type;
  table.type_iri = std::string(g.term(type));
  table.params = params;
  table.seed_set_actual = sample.entities.size();
  table.seed_shortfall = params.seed_set_size == static_cast<std::size_t>(-1) ? 0 : sample.shortfall;
  table.graph_checksum = g.checksum();

  SelectOptions select;
  select.mode = params.selection;
  select.threshold = params.threshold;
  select.type_edges_in_templates = params.type_edges_in_templates;
  select.samples = params.selection_samples;

  for (std::size_t depth = 1; depth <= params.max_depth; ++depth) {
    const std::vector<SpecificityEntry>* previous = depth >= 2 ? &table.depths[depth - 2] : nullptr;
    const auto candidates = select_paths(g, sample.entities, depth, params.candidates_per_depth * depth, previous,
                                         derive_seed(params.seed, 100 + depth), select);
    std::vector<Relationship> rels;
    rels.reserve(candidates.size());
    for (const auto& c : candidates) rels.push_back(c.relationship);

    std::vector<SpecificityEntry> entries;
    if (params.estimator == Estimator::alg2) {
      entries = estimate_specificity(g, rels, sample.entities, type, depth, params.n_walks,
                                     derive_seed(params.seed, 200 + depth),
                                     {params.forward_retry_limit, params.workers});
    } else {
      entries.resize(rels.size());
      parallel_for(rels.size(), params.workers, [&](std::size_t i) { entries[i] = exact_specificity(g, rels[i], type); });
    }
    sort_entries(entries);
    table.depths.push_back(std::move(entries));
  }
  return table;
}

void write_table_tsv(const SpecificityTable& table, const Graph& g, std::ostream& out) {
  out << "depth\trelationship\tscore\tsupport\n";
  char score[32];
  for (std::size_t d = 0; d < table.depths.size(); ++d) {
    for (const auto& e : table.depths[d]) {
      std::snprintf(score, sizeof score, "%.6f", e.score);
      out << (d + 1) << '\t' << render_relationship(e.relationship, g) << '\t' << score << '\t' << e.support << '\n';
    }
  }
}

SpecificityTable read_table_tsv(std::istream& in, const Graph& g) {
  SpecificityTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("depth\t") || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 4) throw DataError("specificity table line " + std::to_string(line_no) + ": expected 4 fields");
    std::size_t depth = 0;
    SpecificityEntry entry;
    try {
      depth = std::stoul(fields[0]);
      entry.score = std::stod(fields[2]);
      entry.support = std::stoull(fields[3]);
    } catch (const std::exception&) {
      throw DataError("specificity table line " + std::to_string(line_no) + ": malformed number");
    }
    entry.relationship = parse_relationship(fields[1], g);
    if (depth == 0 || entry.relationship.depth() != depth) {
      throw DataError("specificity table line " + std::to_string(line_no) + ": depth does not match relationship");
    }
    if (table.depths.size() < depth) table.depths.resize(depth);
    table.depths[depth - 1].push_back(std::move(entry));
  }
  for (auto& entries : table.depths) sort_entries(entries);
  table.params.max_depth = table.depths.size();
  table.graph_checksum = g.checksum();
  return table;
}

std::string table_metadata_json(const SpecificityTable& table) {
  const auto& p = table.params;
  nlohmann::ordered_json meta;
  meta["type"] = table.type_iri;
  meta["estimator"] = to_string(p.estimator);
  meta["estimator_note"] =
      p.estimator == Estimator::alg2
          ? "alg2 weights reached nodes by forward-path multiplicity; eq2 averages uniformly over distinct reached nodes"
          : "eq2 exact mean over distinct reached nodes";
  meta["seed"] = p.seed;
  meta["graph_checksum"] = table.graph_checksum;
  meta["seed_set_size"] = p.seed_set_size == static_cast<std::size_t>(-1) ? nlohmann::ordered_json("all")
                                                                        : nlohmann::ordered_json(p.seed_set_size);
  meta["seed_set_actual"] = table.seed_set_actual;
  meta["seed_shortfall"] = table.seed_shortfall;
  meta["n_walks"] = p.n_walks;
  meta["candidates_per_depth"] = p.candidates_per_depth;
  meta["max_depth"] = p.max_depth;
  meta["threshold"] = p.threshold;
  meta["forward_retry_limit"] = p.forward_retry_limit;
  meta["selection"] = to_string(p.selection);
  meta["type_edges_in_templates"] = p.type_edges_in_templates;
  auto counts = nlohmann::ordered_json::array();
  for (const auto& d : table.depths) counts.push_back(d.size());
  meta["entries_per_depth"] = counts;
  return meta.dump(2) + "\n";
}

}  // namespace kgwalk
