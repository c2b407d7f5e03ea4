#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgwalk {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Dense identifier of an interned term. Ids follow the lexicographic order of
/// the term strings, so two graphs with the same triple set share all ids.
struct TermId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(TermId, TermId) = default;
};

struct Edge {
  TermId predicate;
  TermId node;
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

struct Triple {
  TermId subject;
  TermId predicate;
  TermId object;
  friend constexpr auto operator<=>(const Triple&, const Triple&) = default;
};

/// Base class for recoverable data problems (bad input files, unknown terms).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownTermError : public DataError {
 public:
  using DataError::DataError;
};

// Terms are stored in their canonical form: IRIs without angle brackets,
// blank nodes as `_:label`, literals verbatim from the N-Triples source
// (quotes, escapes, language tag or datatype included).
inline bool is_literal_form(std::string_view term) { return !term.empty() && term.front() == '"'; }
inline bool is_blank_form(std::string_view term) { return term.starts_with("_:"); }

/// Strips one pair of enclosing angle brackets, if present.
std::string_view strip_iri_brackets(std::string_view term);

class GraphBuilder;

/// Immutable RDF multigraph with compressed forward and reverse adjacency.
///
/// Out edges of a node are sorted by (predicate, object) and in edges by
/// (predicate, subject), so edges with a given predicate form a contiguous
/// range. Safe to share between threads once built.
class Graph {
 public:
  Graph() = default;
  Graph(Graph&&) noexcept = default;
  Graph& operator=(Graph&&) noexcept = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  std::size_t term_count() const { return term_offsets_.empty() ? 0 : term_offsets_.size() - 1; }
  std::size_t triple_count() const { return out_edges_.size(); }
  bool contains(TermId v) const { return v.value < term_count(); }

  /// Canonical string of a term. Throws UnknownTermError for ids out of range.
  std::string_view term(TermId v) const;
  /// Looks a term up by canonical form; `<iri>` is accepted as well.
  std::optional<TermId> find(std::string_view term) const;
  /// Like find() but throws UnknownTermError.
  TermId require(std::string_view term) const;

  bool is_literal(TermId v) const;
  /// True if the term occurs as subject or object of some triple.
  bool is_node(TermId v) const;

  std::span<const Edge> out_neighbors(TermId v) const;
  std::span<const Edge> in_neighbors(TermId v) const;
  std::span<const Edge> out_edges_with_predicate(TermId v, TermId predicate) const;
  std::span<const Edge> in_edges_with_predicate(TermId v, TermId predicate) const;

  const std::string& type_predicate_iri() const { return type_predicate_iri_; }
  std::optional<TermId> type_predicate() const { return type_predicate_; }

  /// Direct rdf:type assertions only; empty for unknown types.
  std::span<const TermId> entities_of_type(TermId type) const;
  /// Out edges of `v` whose predicate is the type predicate.
  std::span<const Edge> type_edges(TermId v) const;
  bool has_type(TermId v, TermId type) const;
  bool shares_type(TermId a, TermId b) const;
  /// All types with at least one instance, ascending.
  std::span<const TermId> types() const { return types_; }

  /// Number of triples per predicate, indexed by TermId value.
  const std::vector<std::uint64_t>& predicate_frequencies() const { return predicate_frequency_; }

  /// Hex FNV-1a digest over the term table and the triple set.
  const std::string& checksum() const { return checksum_; }

  std::vector<Triple> triples() const;

  template <class F>
  void for_each_triple(F&& f) const {
    for (std::size_t s = 0; s + 1 < out_offsets_.size(); ++s) {
      for (std::uint64_t i = out_offsets_[s]; i < out_offsets_[s + 1]; ++i) {
        f(Triple{TermId{static_cast<std::uint32_t>(s)}, out_edges_[i].predicate, out_edges_[i].node});
      }
    }
  }

 private:
  friend class GraphBuilder;
  friend void write_snapshot(const Graph&, std::ostream&);
  friend Graph read_snapshot(std::istream&);

  void check(TermId v) const;
  void finalize();  // rebuilds type index, frequencies and checksum from adjacency

  std::vector<char> term_data_;
  std::vector<std::uint64_t> term_offsets_;
  std::vector<std::uint8_t> literal_;

  std::vector<std::uint64_t> out_offsets_;
  std::vector<Edge> out_edges_;
  std::vector<std::uint64_t> in_offsets_;
  std::vector<Edge> in_edges_;

  std::string type_predicate_iri_{kRdfType};
  std::optional<TermId> type_predicate_;
  std::vector<TermId> types_;
  std::vector<std::uint64_t> type_offsets_;
  std::vector<TermId> type_members_;

  std::vector<std::uint64_t> predicate_frequency_;
  std::string checksum_;
};

/// Single-writer construction of a Graph. Duplicate triples collapse.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::string type_predicate_iri = std::string(kRdfType));

  /// Adds a triple of canonical term strings. Throws std::invalid_argument if
  /// the subject is a literal or the predicate is not an IRI.
  void add(std::string_view subject, std::string_view predicate, std::string_view object);

  /// Triples added so far, duplicates included.
  std::size_t added() const { return triples_.size(); }

  Graph build() &&;

 private:
  std::uint32_t intern(std::string_view term);

  std::string type_predicate_iri_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<const std::string*> names_;
  std::vector<Triple> triples_;
};

struct SampleResult {
  std::vector<TermId> entities;
  std::size_t shortfall = 0;  // requested minus returned
};

/// Uniform sample without replacement of `n` entities of `type`. Throws
/// DataError if the type has no instances.
SampleResult sample_entities(const Graph& g, TermId type, std::size_t n, std::uint64_t seed);

}  // namespace kgwalk

template <>
struct std::hash<kgwalk::TermId> {
  std::size_t operator()(kgwalk::TermId v) const noexcept { return std::hash<std::uint32_t>{}(v.value); }
};
