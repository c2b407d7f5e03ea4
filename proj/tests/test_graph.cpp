#include <doctest.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "kgwalk/graph.hpp"
#include "kgwalk/ntriples.hpp"
#include "kgwalk/random.hpp"
#include "kgwalk/snapshot.hpp"

using namespace kgwalk;
using fixtures::id;
using fixtures::iri;

namespace {

LoadedGraph parse(const std::string& text, bool strict = false) {
  std::istringstream in(text);
  ParseOptions options;
  options.strict = strict;
  return parse_ntriples(in, options);
}

}  // namespace

TEST_CASE("single well-formed line gives one triple of three resources") {
  auto loaded = parse("<http://x/s> <http://x/p> <http://x/o> .\n");
  const Graph& g = loaded.graph;
  CHECK(g.triple_count() == 1);
  CHECK(g.term_count() == 3);
  for (std::uint32_t v = 0; v < 3; ++v) CHECK_FALSE(g.is_literal(TermId{v}));
  CHECK(loaded.report.parsed == 1);
  CHECK(loaded.report.skipped == 0);
}

TEST_CASE("typed literal object is flagged literal and has no out edges") {
  auto loaded = parse("<http://x/s> <http://x/p> \"1989\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n");
  const Graph& g = loaded.graph;
  REQUIRE(g.triple_count() == 1);
  const auto lit = g.find("\"1989\"^^<http://www.w3.org/2001/XMLSchema#integer>");
  REQUIRE(lit);
  CHECK(g.is_literal(*lit));
  CHECK(g.out_neighbors(*lit).empty());
  CHECK(g.in_neighbors(*lit).size() == 1);
}

TEST_CASE("line without terminating dot is skipped in lenient mode and fatal in strict mode") {
  const std::string text =
      "<http://x/a> <http://x/p> <http://x/b> .\n"
      "<http://x/b> <http://x/p> <http://x/c> .\n"
      "<http://x/c> <http://x/p> <http://x/d>\n"
      "<http://x/d> <http://x/p> \"hi\"@en .\n"
      "_:n1 <http://x/p> <http://x/a> .\n";
  auto loaded = parse(text);
  CHECK(loaded.graph.triple_count() == 4);
  CHECK(loaded.report.skipped == 1);
  REQUIRE(loaded.report.issues.size() == 1);
  CHECK(loaded.report.issues[0].line == 3);
  CHECK(loaded.graph.find("_:n1").has_value());
  CHECK(loaded.graph.find("\"hi\"@en").has_value());

  try {
    parse(text, true);
    FAIL("strict parse should throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("malformed statements are rejected") {
  ParsedTriple t;
  std::string error;
  CHECK_FALSE(parse_ntriples_line("\"lit\" <http://x/p> <http://x/o> .", t, error));
  CHECK_FALSE(parse_ntriples_line("<http://x/s> \"p\" <http://x/o> .", t, error));
  CHECK_FALSE(parse_ntriples_line("<http://x/s> <http://x/p> .", t, error));
  CHECK_FALSE(parse_ntriples_line("<http://x/s> <http://x/p> \"open .", t, error));
  CHECK(parse_ntriples_line("<http://x/s>\t<http://x/p>  \"a \\\" b\" .  # trailing", t, error));
  CHECK(t.object == "\"a \\\" b\"");
}

TEST_CASE("comments and blank lines are ignored") {
  auto loaded = parse("# header\n\n   \n<http://x/a> <http://x/p> <http://x/b> .\n");
  CHECK(loaded.graph.triple_count() == 1);
  CHECK(loaded.report.ignored == 3);
  CHECK(loaded.report.skipped == 0);
}

TEST_CASE("adjacency lists") {
  const Graph g = fixtures::graph({{"v", "p", "a"}, {"v", "q", "b"}, {"v", "p", "a"}, {"a", "r", "v"}});
  CHECK(g.triple_count() == 3);

  const auto out = g.out_neighbors(id(g, "v"));
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& e : out) got.insert({std::string(g.term(e.predicate)), std::string(g.term(e.node))});
  CHECK(got == std::set<std::pair<std::string, std::string>>{{iri("p"), iri("a")}, {iri("q"), iri("b")}});

  const auto in = g.in_neighbors(id(g, "v"));
  REQUIRE(in.size() == 1);
  CHECK(in[0].predicate == id(g, "r"));
  CHECK(in[0].node == id(g, "a"));
  CHECK(g.in_neighbors(id(g, "a")).size() == 1);
  CHECK(g.out_edges_with_predicate(id(g, "v"), id(g, "q")).size() == 1);
}

TEST_CASE("star hub collects every incoming triple") {
  std::vector<std::array<std::string, 3>> triples;
  for (int i = 0; i < 17; ++i) triples.push_back({"leaf" + std::to_string(i), "p", "hub"});
  const Graph g = fixtures::graph(triples);
  CHECK(g.in_neighbors(id(g, "hub")).size() == 17);
  CHECK(g.out_neighbors(id(g, "hub")).empty());
}

TEST_CASE("forward and reverse adjacency encode the same triple set") {
  std::vector<std::array<std::string, 3>> triples;
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    triples.push_back({"n" + std::to_string(uniform_index(rng, 60)), "p" + std::to_string(uniform_index(rng, 4)),
                       "n" + std::to_string(uniform_index(rng, 60))});
  }
  const Graph g = fixtures::graph(triples);
  std::set<Triple> forward;
  std::set<Triple> reverse;
  for (std::uint32_t v = 0; v < g.term_count(); ++v) {
    for (const auto& e : g.out_neighbors(TermId{v})) forward.insert({TermId{v}, e.predicate, e.node});
    for (const auto& e : g.in_neighbors(TermId{v})) reverse.insert({e.node, e.predicate, TermId{v}});
  }
  CHECK(forward == reverse);
  CHECK(forward.size() == g.triple_count());
  const auto all = g.triples();
  CHECK(std::set<Triple>(all.begin(), all.end()) == forward);
}

TEST_CASE("interning is bijective and ids follow term order") {
  const Graph g = fixtures::graph({{"b", "p", "a"}, {"c", "p", "\"lit\""}});
  std::set<std::string> seen;
  for (std::uint32_t v = 0; v < g.term_count(); ++v) {
    const std::string term(g.term(TermId{v}));
    CHECK(seen.insert(term).second);
    CHECK(g.require(term) == TermId{v});
    if (v > 0) CHECK(std::string(g.term(TermId{v - 1})) < term);
  }
  CHECK(g.find("<" + iri("a") + ">") == g.find(iri("a")));
  CHECK_THROWS_AS(g.require("http://x/missing"), UnknownTermError);
  CHECK_THROWS_AS((void)g.term(TermId{999}), UnknownTermError);
}

TEST_CASE("type index holds direct assertions only") {
  const Graph g = fixtures::graph({{"f1", "a", "Film"},
                                   {"f2", "a", "Film"},
                                   {"f3", "a", "Film"},
                                   {"f3", "a", "Work"},
                                   {"Film", "subClassOf", "Work"},
                                   {"x", "p", "f1"}});
  CHECK(g.entities_of_type(id(g, "Film")).size() == 3);
  CHECK(g.entities_of_type(id(g, "Work")).size() == 1);
  CHECK(g.has_type(id(g, "f3"), id(g, "Work")));
  CHECK_FALSE(g.has_type(id(g, "f1"), id(g, "Work")));
  CHECK(g.entities_of_type(id(g, "x")).empty());
  CHECK(g.shares_type(id(g, "f1"), id(g, "f3")));
  CHECK_FALSE(g.shares_type(id(g, "f1"), id(g, "x")));
  CHECK(g.types().size() == 2);
}

TEST_CASE("custom type predicate") {
  GraphBuilder b("http://x/instanceOf");
  b.add(iri("e"), "http://x/instanceOf", iri("T"));
  b.add(iri("e"), std::string(kRdfType), iri("U"));
  const Graph g = std::move(b).build();
  CHECK(g.entities_of_type(id(g, "T")).size() == 1);
  CHECK(g.entities_of_type(id(g, "U")).empty());
}

TEST_CASE("builder rejects literal subjects and non-IRI predicates") {
  GraphBuilder b;
  CHECK_THROWS_AS(b.add("\"x\"", iri("p"), iri("o")), std::invalid_argument);
  CHECK_THROWS_AS(b.add(iri("s"), "\"p\"", iri("o")), std::invalid_argument);
  CHECK_THROWS_AS(b.add(iri("s"), "_:p", iri("o")), std::invalid_argument);
}

TEST_CASE("checksum depends only on the triple set") {
  const Graph a = fixtures::graph({{"s", "p", "o"}, {"o", "q", "\"1\""}});
  const Graph b = fixtures::graph({{"o", "q", "\"1\""}, {"s", "p", "o"}, {"s", "p", "o"}});
  const Graph c = fixtures::graph({{"s", "p", "o"}, {"o", "q", "\"2\""}});
  CHECK(a.checksum() == b.checksum());
  CHECK(a.checksum() != c.checksum());
}

TEST_CASE("snapshot round trip") {
  const Graph g = fixtures::graph({{"f1", "a", "Film"}, {"f1", "director", "d"}, {"d", "born", "\"1950\""}});
  std::stringstream buf;
  write_snapshot(g, buf);
  const Graph back = read_snapshot(buf);
  CHECK(back.checksum() == g.checksum());
  CHECK(back.triple_count() == g.triple_count());
  CHECK(back.entities_of_type(id(back, "Film")).size() == 1);
  CHECK(back.is_literal(back.require("\"1950\"")));

  std::string bytes = [&] {
    std::stringstream s;
    write_snapshot(g, s);
    return s.str();
  }();
  std::string truncated = bytes.substr(0, bytes.size() / 2);
  std::istringstream bad(truncated);
  CHECK_THROWS_AS(read_snapshot(bad), DataError);
  std::string flipped = bytes;
  flipped[0] = 'X';
  std::istringstream bad_magic(flipped);
  CHECK_THROWS_AS(read_snapshot(bad_magic), DataError);
}

TEST_CASE("N-Triples and TSV serializations reload to the same checksum") {
  const Graph g = fixtures::graph(
      {{"f1", "a", "Film"}, {"f1", "title", "\"A \\\"quoted\\\" title\"@en"}, {"f1", "year", "\"1999\"^^<http://x/int>"}});
  std::stringstream nt;
  write_ntriples(g, nt);
  CHECK(parse_ntriples(nt).graph.checksum() == g.checksum());
  std::stringstream tsv;
  write_tsv_edges(g, tsv);
  CHECK(parse_tsv_edges(tsv).graph.checksum() == g.checksum());
}

TEST_CASE("gzip input parses like plain input") {
  const auto dir = fixtures::scratch("gzip");
  const std::string text =
      "<http://x/a> <http://x/p> <http://x/b> .\n"
      "<http://x/b> <http://x/p> \"v\" .\n"
      "<http://x/b> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T> .\n";
  {
    std::ofstream plain(dir / "g.nt");
    plain << text;
  }
  gzFile gz = gzopen((dir / "g.nt.gz").string().c_str(), "wb");
  REQUIRE(gz != nullptr);
  gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
  gzclose(gz);
  const auto plain = load_graph_file(dir / "g.nt");
  const auto zipped = load_graph_file(dir / "g.nt.gz");
  CHECK(plain.graph.triple_count() == 3);
  CHECK(zipped.graph.triple_count() == 3);
  CHECK(plain.graph.checksum() == zipped.graph.checksum());
  CHECK_THROWS_AS(load_graph_file(dir / "missing.nt"), DataError);
}

TEST_CASE("sample_entities") {
  std::vector<std::array<std::string, 3>> triples;
  for (int i = 0; i < 20; ++i) triples.push_back({"f" + std::to_string(i), "a", "Film"});
  const Graph g = fixtures::graph(triples);
  const TermId film = id(g, "Film");

  SUBCASE("n at least the population returns all of it") {
    auto r = sample_entities(g, film, 20, 3);
    std::set<TermId> got(r.entities.begin(), r.entities.end());
    const auto members = g.entities_of_type(film);
    CHECK(got == std::set<TermId>(members.begin(), members.end()));
    CHECK(r.shortfall == 0);
    CHECK(sample_entities(g, film, 25, 3).shortfall == 5);
  }
  SUBCASE("same seed gives the same sample") {
    CHECK(sample_entities(g, film, 7, 11).entities == sample_entities(g, film, 7, 11).entities);
    CHECK(sample_entities(g, film, 7, 11).entities != sample_entities(g, film, 7, 12).entities);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(sample_entities(g, id(g, "f0"), 3, 1), DataError);
    CHECK_THROWS_AS(sample_entities(g, film, 0, 1), std::invalid_argument);
  }
}

TEST_CASE("sample_entities is uniform (chi-square, alpha 0.01)") {
  constexpr std::size_t kFilms = 10000, kDraw = 300, kReps = 1000;
  GraphBuilder b;
  for (std::size_t i = 0; i < kFilms; ++i) b.add(iri("f" + std::to_string(i)), std::string(kRdfType), iri("Film"));
  const Graph g = std::move(b).build();
  const TermId film = id(g, "Film");
  std::vector<double> hits(g.term_count(), 0.0);
  for (std::size_t r = 0; r < kReps; ++r) {
    const auto s = sample_entities(g, film, kDraw, derive_seed(77, r));
    REQUIRE(s.entities.size() == kDraw);
    REQUIRE(std::set<TermId>(s.entities.begin(), s.entities.end()).size() == kDraw);
    for (TermId e : s.entities) hits[e.value] += 1.0;
  }
  const double expected = static_cast<double>(kDraw * kReps) / kFilms;
  double chi2 = 0.0;
  for (TermId e : g.entities_of_type(film)) chi2 += (hits[e.value] - expected) * (hits[e.value] - expected) / expected;
  // Wilson-Hilferty upper 1% point of chi-square with kFilms - 1 dof; the
  // without-replacement draws only shrink the variance.
  const double k = kFilms - 1;
  const double z = 2.326347874;
  const double critical = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3);
  CHECK(chi2 < critical);
}
