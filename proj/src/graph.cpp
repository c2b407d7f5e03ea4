#include "kgwalk/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <tuple>

#include "kgwalk/random.hpp"

namespace kgwalk {

namespace {

std::uint64_t hash_u32(std::uint64_t h, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return fnv1a(std::string_view(buf, 4), h);
}

std::span<const Edge> predicate_range(std::span<const Edge> edges, TermId predicate) {
  auto lo = std::lower_bound(edges.begin(), edges.end(), predicate,
                             [](const Edge& e, TermId p) { return e.predicate < p; });
  auto hi = std::upper_bound(lo, edges.end(), predicate,
                             [](TermId p, const Edge& e) { return p < e.predicate; });
  return {lo, hi};
}

}  // namespace

std::string_view strip_iri_brackets(std::string_view term) {
  if (term.size() >= 2 && term.front() == '<' && term.back() == '>') return term.substr(1, term.size() - 2);
  return term;
}

void Graph::check(TermId v) const {
  if (!contains(v)) throw UnknownTermError("unknown term id " + std::to_string(v.value));
}

std::string_view Graph::term(TermId v) const {
  check(v);
  const auto begin = term_offsets_[v.value];
  const auto end = term_offsets_[v.value + 1];
  return {term_data_.data() + begin, static_cast<std::size_t>(end - begin)};
}

std::optional<TermId> Graph::find(std::string_view name) const {
  name = strip_iri_brackets(name);
  std::uint32_t lo = 0;
  auto hi = static_cast<std::uint32_t>(term_count());
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (term(TermId{mid}) < name) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < term_count() && term(TermId{lo}) == name) return TermId{lo};
  return std::nullopt;
}

TermId Graph::require(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw UnknownTermError("term not in graph: " + std::string(name));
}

bool Graph::is_literal(TermId v) const {
  check(v);
  return literal_[v.value] != 0;
}

bool Graph::is_node(TermId v) const {
  check(v);
  return out_offsets_[v.value] != out_offsets_[v.value + 1] || in_offsets_[v.value] != in_offsets_[v.value + 1];
}

std::span<const Edge> Graph::out_neighbors(TermId v) const {
  check(v);
  return {out_edges_.data() + out_offsets_[v.value], out_edges_.data() + out_offsets_[v.value + 1]};
}

std::span<const Edge> Graph::in_neighbors(TermId v) const {
  check(v);
  return {in_edges_.data() + in_offsets_[v.value], in_edges_.data() + in_offsets_[v.value + 1]};
}

std::span<const Edge> Graph::out_edges_with_predicate(TermId v, TermId predicate) const {
  return predicate_range(out_neighbors(v), predicate);
}

std::span<const Edge> Graph::in_edges_with_predicate(TermId v, TermId predicate) const {
  return predicate_range(in_neighbors(v), predicate);
}

std::span<const TermId> Graph::entities_of_type(TermId type) const {
  auto it = std::lower_bound(types_.begin(), types_.end(), type);
  if (it == types_.end() || *it != type) return {};
  const auto i = static_cast<std::size_t>(it - types_.begin());
  return {type_members_.data() + type_offsets_[i], type_members_.data() + type_offsets_[i + 1]};
}

std::span<const Edge> Graph::type_edges(TermId v) const {
  if (!type_predicate_) {
    check(v);
    return {};
  }
  return out_edges_with_predicate(v, *type_predicate_);
}

bool Graph::has_type(TermId v, TermId type) const {
  if (!type_predicate_) return false;
  const auto edges = type_edges(v);
  return std::binary_search(edges.begin(), edges.end(), Edge{*type_predicate_, type});
}

bool Graph::shares_type(TermId a, TermId b) const {
  const auto ta = type_edges(a);
  const auto tb = type_edges(b);
  // Both ranges are sorted by node within the single type predicate.
  auto i = ta.begin();
  auto j = tb.begin();
  while (i != ta.end() && j != tb.end()) {
    if (i->node == j->node) return true;
    if (i->node < j->node) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

std::vector<Triple> Graph::triples() const {
  std::vector<Triple> out;
  out.reserve(triple_count());
  for_each_triple([&](const Triple& t) { out.push_back(t); });
  return out;
}

void Graph::finalize() {
  const std::size_t n = term_count();
  type_predicate_ = find(type_predicate_iri_);

  predicate_frequency_.assign(n, 0);
  for (const Edge& e : out_edges_) ++predicate_frequency_[e.predicate.value];

  std::vector<std::pair<TermId, TermId>> assertions;  // (type, entity)
  if (type_predicate_) {
    for (std::size_t s = 0; s < n; ++s) {
      for (const Edge& e : type_edges(TermId{static_cast<std::uint32_t>(s)})) {
        assertions.emplace_back(e.node, TermId{static_cast<std::uint32_t>(s)});
      }
    }
  }
  std::sort(assertions.begin(), assertions.end());
  types_.clear();
  type_offsets_.clear();
  type_members_.clear();
  for (std::size_t i = 0; i < assertions.size(); ++i) {
    if (i == 0 || assertions[i].first != assertions[i - 1].first) {
      types_.push_back(assertions[i].first);
      type_offsets_.push_back(type_members_.size());
    }
    type_members_.push_back(assertions[i].second);
  }
  type_offsets_.push_back(type_members_.size());

  std::uint64_t h = fnv1a("kgwalk-graph");
  h = hash_u32(h, static_cast<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = term(TermId{static_cast<std::uint32_t>(i)});
    h = hash_u32(h, static_cast<std::uint32_t>(t.size()));
    h = fnv1a(t, h);
  }
  for_each_triple([&](const Triple& t) {
    h = hash_u32(h, t.subject.value);
    h = hash_u32(h, t.predicate.value);
    h = hash_u32(h, t.object.value);
  });
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  checksum_ = buf;
}

GraphBuilder::GraphBuilder(std::string type_predicate_iri) : type_predicate_iri_(std::move(type_predicate_iri)) {}

std::uint32_t GraphBuilder::intern(std::string_view name) {
  auto [it, inserted] = ids_.try_emplace(std::string(name), static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.push_back(&it->first);
  return it->second;
}

void GraphBuilder::add(std::string_view subject, std::string_view predicate, std::string_view object) {
  if (subject.empty() || predicate.empty() || object.empty()) throw std::invalid_argument("empty term in triple");
  if (is_literal_form(subject)) throw std::invalid_argument("literal in subject position: " + std::string(subject));
  if (is_literal_form(predicate) || is_blank_form(predicate)) {
    throw std::invalid_argument("predicate must be an IRI: " + std::string(predicate));
  }
  const auto s = intern(subject);
  const auto p = intern(predicate);
  const auto o = intern(object);
  triples_.push_back({TermId{s}, TermId{p}, TermId{o}});
}

Graph GraphBuilder::build() && {
  const std::size_t n = names_.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return *names_[a] < *names_[b]; });
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t i = 0; i < n; ++i) rank[order[i]] = i;

  Graph g;
  g.type_predicate_iri_ = type_predicate_iri_;
  g.term_offsets_.reserve(n + 1);
  g.literal_.reserve(n);
  g.term_offsets_.push_back(0);
  for (std::uint32_t old : order) {
    const std::string& name = *names_[old];
    g.term_data_.insert(g.term_data_.end(), name.begin(), name.end());
    g.term_offsets_.push_back(g.term_data_.size());
    g.literal_.push_back(is_literal_form(name) ? 1 : 0);
  }

  for (Triple& t : triples_) {
    t = {TermId{rank[t.subject.value]}, TermId{rank[t.predicate.value]}, TermId{rank[t.object.value]}};
  }
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const Triple& t : triples_) {
    ++g.out_offsets_[t.subject.value + 1];
    ++g.in_offsets_[t.object.value + 1];
  }
  std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());

  g.out_edges_.reserve(triples_.size());
  for (const Triple& t : triples_) g.out_edges_.push_back({t.predicate, t.object});

  // Sorting by (object, predicate, subject) gives in-edges grouped per object
  // and ordered by (predicate, subject).
  std::sort(triples_.begin(), triples_.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.object, a.predicate, a.subject) < std::tie(b.object, b.predicate, b.subject);
  });
  g.in_edges_.reserve(triples_.size());
  for (const Triple& t : triples_) g.in_edges_.push_back({t.predicate, t.subject});

  triples_.clear();
  triples_.shrink_to_fit();
  ids_.clear();
  names_.clear();

  g.finalize();
  return g;
}

SampleResult sample_entities(const Graph& g, TermId type, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  const auto members = g.entities_of_type(type);
  if (members.empty()) {
    const std::string name = g.contains(type) ? std::string(g.term(type)) : std::to_string(type.value);
    throw DataError("type has no instances: " + name);
  }
  std::vector<TermId> pool(members.begin(), members.end());
  const std::size_t k = std::min(n, pool.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return {std::move(pool), n - k};
}

}  // namespace kgwalk
