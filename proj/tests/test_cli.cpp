#include <doctest.h>
#include <zlib.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "kgwalk/ntriples.hpp"
#include "kgwalk/snapshot.hpp"

namespace fs = std::filesystem;
using kgwalk::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& text, bool skip_comments = true) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !(skip_comments && line.starts_with("#"));
  return n;
}

nlohmann::json meta(const fs::path& artifact) { return nlohmann::json::parse(slurp(artifact.string() + ".meta.json")); }

const std::string kFilm = "http://example.org/ontology/Film";

}  // namespace

TEST_CASE("usage errors exit with 1 and help with 0") {
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"ingest", "--input", "x.nt"}).code == 1);
  CHECK(run({"walk", "--graph", "g", "--output", "o", "--type", "t", "--bias", "sideways"}).code == 1);
}

TEST_CASE("synth and ingest") {
  const auto dir = fixtures::scratch("cli_ingest");
  auto r = run({"synth", "--kind", "franchise", "--franchises", "5", "--films-per", "4", "--output", (dir / "kg.nt").string()});
  REQUIRE(r.code == 0);
  const auto truth = nlohmann::json::parse(slurp(dir / "kg.nt.truth.json"));
  CHECK(truth.size() == 20);
  for (const auto& [query, items] : truth.items()) CHECK(items.size() == 3);

  SUBCASE("five-triple file") {
    std::ofstream(dir / "five.nt") << "<http://x/a> <http://x/p> <http://x/b> .\n"
                                      "<http://x/b> <http://x/p> <http://x/c> .\n"
                                      "<http://x/c> <http://x/p> \"1\" .\n"
                                      "<http://x/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/T> .\n"
                                      "<http://x/c> <http://x/q> <http://x/a> .\n";
    r = run({"ingest", "--input", (dir / "five.nt").string(), "--output", (dir / "five.snap").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("triples 5\n") != std::string::npos);
    CHECK(meta(dir / "five.snap")["triples"] == 5);

    const std::string text = slurp(dir / "five.nt");
    gzFile gz = gzopen((dir / "five.nt.gz").string().c_str(), "wb");
    gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
    gzclose(gz);
    r = run({"ingest", "--input", (dir / "five.nt.gz").string(), "--output", (dir / "five_gz.snap").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("triples 5\n") != std::string::npos);
    CHECK(meta(dir / "five_gz.snap")["graph_checksum"] == meta(dir / "five.snap")["graph_checksum"]);
  }
  SUBCASE("re-ingesting a serialized snapshot keeps the checksum") {
    REQUIRE(run({"ingest", "--input", (dir / "kg.nt").string(), "--output", (dir / "kg.snap").string()}).code == 0);
    const auto g = kgwalk::load_snapshot(dir / "kg.snap");
    {
      std::ofstream out(dir / "again.nt");
      kgwalk::write_ntriples(g, out);
    }
    REQUIRE(run({"ingest", "--input", (dir / "again.nt").string(), "--output", (dir / "again.snap").string()}).code == 0);
    CHECK(meta(dir / "again.snap")["graph_checksum"] == meta(dir / "kg.snap")["graph_checksum"]);
    CHECK(meta(dir / "kg.snap")["graph_checksum"] == g.checksum());
  }
  SUBCASE("missing and malformed input") {
    CHECK(run({"ingest", "--input", (dir / "nope.nt").string(), "--output", (dir / "x.snap").string()}).code == 2);
    std::ofstream(dir / "bad.nt") << "<http://x/a> <http://x/p> <http://x/b> .\nnot a triple\n";
    r = run({"ingest", "--input", (dir / "bad.nt").string(), "--output", (dir / "bad.snap").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("skipped 1\n") != std::string::npos);
    r = run({"ingest", "--strict", "--input", (dir / "bad.nt").string(), "--output", (dir / "bad.snap").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
}

TEST_CASE("specificity command") {
  const auto dir = fixtures::scratch("cli_spec");
  REQUIRE(run({"synth", "--kind", "chain", "--output", (dir / "chain.nt").string()}).code == 0);
  auto r = run({"specificity", "--graph", (dir / "chain.nt").string(), "--type", kFilm, "--max-depth", "1", "--walks",
                "100", "--output", (dir / "spec.tsv").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "spec.tsv") == "depth\trelationship\tscore\tsupport\n1\thttp://example.org/ontology/p\t1.000000\t100\n");
  CHECK(meta(dir / "spec.tsv")["seed_set_actual"] == 1);
  CHECK(r.err.find("fewer than the requested seed set") != std::string::npos);

  r = run({"specificity", "--graph", (dir / "chain.nt").string(), "--type", "http://example.org/ontology/Nothing",
           "--output", (dir / "x.tsv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("type not found") != std::string::npos);
  r = run({"specificity", "--graph", (dir / "chain.nt").string(), "--type", kFilm, "--walks", "1", "--output",
           (dir / "x.tsv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("must exceed") != std::string::npos);
  r = run({"specificity", "--graph", (dir / "chain.nt").string(), "--type", kFilm, "--seed-set-size", "lots", "--output",
           (dir / "x.tsv").string()});
  CHECK(r.code == 1);
}

TEST_CASE("walk command") {
  const auto dir = fixtures::scratch("cli_walk");
  REQUIRE(run({"synth", "--kind", "franchise", "--output", (dir / "kg.nt").string()}).code == 0);
  const std::string graph = (dir / "kg.nt").string();

  auto r = run({"walk", "--graph", graph, "--type", kFilm, "--depth", "1", "--walks-per-entity", "500", "--output",
                (dir / "w1.txt").string()});
  REQUIRE(r.code == 0);
  const auto n_films = nlohmann::json::parse(slurp(dir / "kg.nt.truth.json")).size() + 40;
  CHECK(lines(slurp(dir / "w1.txt")) <= 500 * n_films);
  CHECK(lines(slurp(dir / "w1.txt.stats.csv")) == n_films + 1);

  r = run({"walk", "--graph", graph, "--type", kFilm, "--bias", "specificity", "--output", (dir / "w.txt").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("--table") != std::string::npos);
  r = run({"walk", "--graph", graph, "--output", (dir / "w.txt").string()});
  CHECK(r.code == 1);

  std::ofstream(dir / "entities.txt") << "# two films\nhttp://example.org/resource/Film_0\n<http://example.org/resource/Film_1>\n";
  r = run({"walk", "--graph", graph, "--entities", (dir / "entities.txt").string(), "--depth", "1", "--walks-per-entity",
           "10", "--output", (dir / "w2.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(lines(slurp(dir / "w2.txt")) == 20);
  std::ofstream(dir / "unknown.txt") << "http://example.org/resource/Nobody\n";
  r = run({"walk", "--graph", graph, "--entities", (dir / "unknown.txt").string(), "--output", (dir / "w3.txt").string()});
  CHECK(r.code == 2);
}

TEST_CASE("UET at depth 3 on the dense fixture yields an empty corpus with a warning") {
  const auto dir = fixtures::scratch("cli_uet");
  REQUIRE(run({"synth", "--kind", "dense", "--output", (dir / "dense.nt").string()}).code == 0);
  const auto r = run({"walk", "--graph", (dir / "dense.nt").string(), "--type", kFilm, "--pruning", "UET", "--depth", "3",
                      "--no-depth1", "--output", (dir / "w.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(lines(slurp(dir / "w.txt")) == 0);
  CHECK(r.err.find("no walks were generated at depth 3") != std::string::npos);
  CHECK(meta(dir / "w.txt")["walks"] == 0);
}

TEST_CASE("full pipeline on the planted franchise graph") {
  const auto dir = fixtures::scratch("cli_pipeline");
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  REQUIRE(run({"synth", "--kind", "franchise", "--output", p("kg.nt")}).code == 0);
  REQUIRE(run({"ingest", "--input", p("kg.nt"), "--output", p("kg.snap")}).code == 0);
  REQUIRE(run({"pagerank", "--graph", p("kg.snap"), "--output", p("pr.tsv")}).code == 0);
  auto r = run({"specificity", "--graph", p("kg.snap"), "--type", kFilm, "--output", p("spec.tsv"), "--relevance",
                p("rel.csv"), "--pagerank", p("pr.tsv")});
  REQUIRE(r.code == 0);
  CHECK(slurp(p("rel.csv")).starts_with("depth,relationship,specificity,pagerank,frequency\n"));

  for (const std::string scheme : {"uniform", "specificity"}) {
    std::vector<std::string> args{"walk", "--graph", p("kg.snap"), "--type", kFilm, "--bias", scheme, "--walks-per-entity",
                                  "100", "--output", p(scheme + ".txt")};
    if (scheme == "specificity") args.insert(args.end(), {"--table", p("spec.tsv")});
    REQUIRE(run(args).code == 0);
    REQUIRE(run({"train", "--corpus", p(scheme + ".txt"), "--output", p(scheme + ".vec"), "--dim", "32", "--epochs", "2",
                 "--workers", "1"})
                .code == 0);
    CHECK(meta(p(scheme + ".vec"))["graph_checksum"] == meta(p("kg.snap"))["graph_checksum"]);
  }
  r = run({"eval", "--vectors", p("uniform.vec"), "--vectors", p("specificity.vec"), "--scheme", "R2V", "--scheme",
           "R2V_Sp", "--depth", "2", "--truth", p("kg.nt.truth.json"), "--graph", p("kg.snap"), "--type", kFilm,
           "--output", p("eval.csv")});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(p("eval.csv"));
  CHECK(csv.starts_with("scheme,depth,query,k,precision,recall\n"));
  CHECK(lines(csv) == 1 + 2 * 20);
  CHECK(csv.find("R2V_Sp,2,\"http://example.org/resource/Franchise0_Film0\",3,") != std::string::npos);

  r = run({"eval", "--vectors", p("uniform.vec"), "--truth", p("kg.nt.truth.json"), "--k", "5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--allow-mismatch") != std::string::npos);
  r = run({"eval", "--vectors", p("uniform.vec"), "--truth", p("kg.nt.truth.json"), "--k", "5", "--allow-mismatch"});
  CHECK(r.code == 0);

  r = run({"recommend", "--vectors", p("specificity.vec"), "--query", "http://example.org/resource/Franchise1_Film2", "--k",
           "3", "--graph", p("kg.snap"), "--type", kFilm});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out) == 4);
  r = run({"recommend", "--vectors", p("specificity.vec"), "--query", "http://example.org/resource/Nobody"});
  CHECK(r.code == 2);

  r = run({"sensitivity", "--graph", p("kg.snap"), "--type", kFilm, "--values", "100", "--values", "400", "--fixed-seed-set",
           "20", "--repeats", "2", "--output", p("sens.csv")});
  REQUIRE(r.code == 0);
  CHECK(lines(slurp(p("sens.csv"))) == 3);
}

TEST_CASE("JSON config files") {
  const auto dir = fixtures::scratch("cli_config");
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  REQUIRE(run({"synth", "--kind", "franchise", "--output", p("kg.nt")}).code == 0);
  std::ofstream(p("cfg.json")) << R"({"seed": 7, "walk": {"depth": 1, "walks-per-entity": 3}})";
  auto r = run({"--config", p("cfg.json"), "walk", "--graph", p("kg.nt"), "--type", kFilm, "--output", p("w.txt")});
  REQUIRE(r.code == 0);
  CHECK(meta(p("w.txt"))["seed"] == 7);
  CHECK(meta(p("w.txt"))["depth"] == 1);
  CHECK(meta(p("w.txt"))["walks_per_entity"] == 3);

  r = run({"--config", p("cfg.json"), "walk", "--graph", p("kg.nt"), "--type", kFilm, "--walks-per-entity", "2", "--output",
           p("w2.txt")});
  REQUIRE(r.code == 0);
  CHECK(meta(p("w2.txt"))["walks_per_entity"] == 2);
  CHECK(meta(p("w2.txt"))["config_hash"] != meta(p("w.txt"))["config_hash"]);

  std::ofstream(p("bad.json")) << "{ not json";
  CHECK(run({"--config", p("bad.json"), "walk", "--graph", p("kg.nt"), "--type", kFilm, "--output", p("w3.txt")}).code == 1);
}
