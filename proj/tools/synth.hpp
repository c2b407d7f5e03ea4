#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kgwalk/graph.hpp"
#include "kgwalk/recommend.hpp"

namespace kgwalk::synth {

inline const std::string kResource = "http://example.org/resource/";
inline const std::string kOntology = "http://example.org/ontology/";
inline const std::string kXsd = "http://www.w3.org/2001/XMLSchema#";

inline std::string res(const std::string& local) { return kResource + local; }
inline std::string onto(const std::string& local) { return kOntology + local; }

/// Triples in canonical term form plus whatever ground truth the generator plants.
struct SynthGraph {
  std::vector<std::array<std::string, 3>> triples;
  GroundTruth truth;
  std::string type_iri;                      // the type the fixture is built around
  std::map<std::string, std::string> notes;  // generator parameters, written to metadata

  void add(const std::string& s, const std::string& p, const std::string& o) { triples.push_back({s, p, o}); }
  void type(const std::string& s, const std::string& t) { add(s, std::string(kRdfType), t); }
  Graph build() const;
  void write(std::ostream& out) const;  // N-Triples
};

/// <f> a Film; f -p-> x -q-> y.
SynthGraph chain();

struct FranchiseOptions {
  std::size_t franchises = 5;
  std::size_t films_per = 4;
  std::size_t standalone = 40;
  std::size_t books = 150;
  std::size_t persons = 300;
  std::uint64_t seed = 1;
};

/// Franchise films share a director (with a franchise style), recurring
/// characters (portrayed by franchise actors) and a composer. Standalone films
/// get their own crew. Genres, countries, subject categories, birth places and
/// birth years are hubs shared with books and unrelated persons. Ground truth
/// maps every franchise film to the other films of its franchise.
SynthGraph franchise(const FranchiseOptions& options);

struct RegularOptions {
  std::size_t films = 120;  // multiple of 24
  std::uint64_t seed = 1;
};

/// Mixed hub/specific graph in which every film-rooted relationship of depth
/// 1 or 2 reaches each end node by the same number of paths and every person
/// (the only middle layer of depth-2 paths) has in-degree 4. Under those
/// conditions the random-walk estimate is unbiased for the exact score.
SynthGraph regular(const RegularOptions& options);

struct RelevanceOptions {
  std::size_t films = 100;
  std::size_t directors = 25;
  std::size_t styles = 10;
  std::size_t categories = 300;
  std::size_t categories_per_director = 60;
  std::size_t others = 1000;
  std::size_t categories_per_other = 20;
  std::size_t cities = 20;
  std::size_t writers = 20;
  std::uint64_t seed = 1;
};

/// Directors with one style (known almost only by directors), dozens of broad
/// subject categories shared with a large population of other persons, and a
/// birth place shared with that population.
SynthGraph relevance(const RelevanceOptions& options);

struct MixedOptions {
  std::size_t films = 400;
  std::size_t books = 200;
  std::size_t predicates = 30;
  std::uint64_t seed = 1;
};

/// Films and books share a set of predicates; each predicate has its own
/// target pool and film/book usage rates, spreading specificity over [0, 1].
SynthGraph mixed(const MixedOptions& options);

struct DenseOptions {
  std::size_t films = 10;
  std::size_t persons = 10;
  std::uint64_t seed = 1;
};

/// Films star persons, persons act in films and each class node lists its
/// members, so every depth-3 walk from a film meets two entities of one type.
SynthGraph dense(const DenseOptions& options);

}  // namespace kgwalk::synth
