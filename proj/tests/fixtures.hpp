#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "kgwalk/graph.hpp"

namespace fixtures {

inline const std::string kType{kgwalk::kRdfType};

inline std::string iri(const std::string& local) { return "http://x/" + local; }

/// Builds a graph from (s, p, o) triples given as local names; objects
/// starting with '"' are taken verbatim as literals.
inline kgwalk::Graph graph(const std::vector<std::array<std::string, 3>>& triples) {
  kgwalk::GraphBuilder b;
  for (const auto& t : triples) {
    const std::string p = t[1] == "a" ? kType : iri(t[1]);
    const std::string o = t[2].starts_with('"') ? t[2] : iri(t[2]);
    b.add(iri(t[0]), p, o);
  }
  return std::move(b).build();
}

inline kgwalk::TermId id(const kgwalk::Graph& g, const std::string& local) { return g.require(iri(local)); }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kgwalk_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
