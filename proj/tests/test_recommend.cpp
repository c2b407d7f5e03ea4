#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "kgwalk/recommend.hpp"

using namespace kgwalk;

namespace {

KeyedVectors hand_vectors() {
  KeyedVectors kv;
  kv.dim = 2;
  const std::vector<std::pair<std::string, std::vector<double>>> rows{
      {"q", {1.0, 0.0}}, {"a", {1.0, 1.0}}, {"b", {1.0, 3.0}}, {"c", {1.0, -0.5}}, {"z", {0.0, 0.0}}};
  for (const auto& [tok, v] : rows) kv.add(tok, v);
  return kv;
}

SpecificityEntry entry(std::uint32_t p, double score) { return {Relationship{{TermId{p}}}, score, 0}; }

}  // namespace

TEST_CASE("cosine") {
  const std::vector<double> v{0.3, -2.0, 5.0};
  CHECK(cosine(v, v) == doctest::Approx(1.0));
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(cosine(v, zero) == 0.0);
  const std::vector<double> w{-0.3, 2.0, -5.0};
  CHECK(cosine(v, w) == doctest::Approx(-1.0));
}

TEST_CASE("top_k on hand-set vectors") {
  const auto kv = hand_vectors();
  const auto rec = top_k(kv, "q", 4);
  REQUIRE(rec.items.size() == 4);
  // cos(q,c)=1/sqrt(1.25), cos(q,a)=1/sqrt(2), cos(q,b)=1/sqrt(10), z has cosine 0
  CHECK(rec.items[0].first == "c");
  CHECK(rec.items[0].second == doctest::Approx(1.0 / std::sqrt(1.25)));
  CHECK(rec.items[1].first == "a");
  CHECK(rec.items[2].first == "b");
  CHECK(rec.items[2].second == doctest::Approx(1.0 / std::sqrt(10.0)));
  CHECK(rec.items[3].first == "z");
  CHECK(rec.items[3].second == 0.0);
  for (const auto& item : rec.items) CHECK(item.first != "q");
  CHECK(top_k(kv, "q", 10).items.size() == 4);

  const auto filtered = top_k(kv, "q", 2, [](std::string_view t) { return t != "c"; });
  CHECK(filtered.items[0].first == "a");
  CHECK_THROWS_AS(top_k(kv, "missing", 2), DataError);
  CHECK_THROWS_AS(top_k(kv, "q", 0), std::invalid_argument);
}

TEST_CASE("top_k breaks ties lexicographically") {
  KeyedVectors kv;
  kv.dim = 2;
  kv.add("q", std::vector<double>{1.0, 0.0});
  kv.add("y", std::vector<double>{2.0, 1.0});
  kv.add("x", std::vector<double>{4.0, 2.0});
  const auto rec = top_k(kv, "q", 2);
  CHECK(rec.items[0].first == "x");
  CHECK(rec.items[1].first == "y");
}

TEST_CASE("precision and recall at k") {
  Recommendation rec;
  rec.k = 3;
  rec.items = {{"a", 0.9}, {"b", 0.8}, {"c", 0.7}};
  CHECK(precision_at_k(rec, {"a", "b", "c"}) == 1.0);
  CHECK(precision_at_k(rec, {"x", "y", "z"}) == 0.0);
  CHECK(precision_at_k(rec, {"a", "x", "y"}) == doctest::Approx(1.0 / 3.0));
  CHECK(recall_at_k(rec, {"a", "x"}) == 0.5);
}

TEST_CASE("word2vec text round trip and errors") {
  const auto kv = hand_vectors();
  std::stringstream buf;
  buf << kv.size() << ' ' << kv.dim << '\n';
  for (std::uint32_t i = 0; i < kv.size(); ++i) {
    buf << kv.tokens[i];
    for (double x : kv.row(i)) buf << ' ' << x;
    buf << '\n';
  }
  const auto back = load_word2vec_text(buf);
  CHECK(back.tokens == kv.tokens);
  CHECK(back.data == kv.data);
  std::istringstream short_row("2 3\na 1 2 3\nb 1 2\n");
  CHECK_THROWS_AS(load_word2vec_text(short_row), DataError);
  std::istringstream bad_header("x y\n");
  CHECK_THROWS_AS(load_word2vec_text(bad_header), DataError);
}

TEST_CASE("ground truth files") {
  std::istringstream in(R"({"<http://x/f1>": ["http://x/f2", "<http://x/f3>"], "http://x/f2": []})");
  const auto truth = load_ground_truth(in);
  REQUIRE(truth.size() == 2);
  CHECK(truth.at("http://x/f1") == std::set<std::string>{"http://x/f2", "http://x/f3"});
  std::stringstream out;
  save_ground_truth(truth, out);
  CHECK(load_ground_truth(out) == truth);
  std::istringstream self(R"({"http://x/f1": ["http://x/f1"]})");
  CHECK_THROWS_AS(load_ground_truth(self), DataError);
  std::istringstream broken("[1, 2");
  CHECK_THROWS_AS(load_ground_truth(broken), DataError);
}

TEST_CASE("NDCG") {
  const std::vector<SpecificityEntry> ideal{entry(1, 0.9), entry(2, 0.6), entry(3, 0.3), entry(4, 0.1)};
  SUBCASE("identical ranking") { CHECK(ndcg(ideal, ideal).value == doctest::Approx(1.0)); }
  SUBCASE("single item") {
    const std::vector<SpecificityEntry> one{entry(7, 0.4)};
    CHECK(ndcg(one, one).value == 1.0);
  }
  SUBCASE("one adjacent swap") {
    const std::vector<SpecificityEntry> swapped{entry(1, 0.9), entry(3, 0.35), entry(2, 0.3), entry(4, 0.1)};
    // (0.9 + 0.3/log2 3 + 0.6/2 + 0.1/log2 5) / (0.9 + 0.6/log2 3 + 0.3/2 + 0.1/log2 5)
    CHECK(ndcg(swapped, ideal).value == doctest::Approx(0.9733091565352469).epsilon(1e-12));
  }
  SUBCASE("every permutation scores at most the ideal order") {
    std::vector<SpecificityEntry> perm = ideal;
    std::sort(perm.begin(), perm.end(), [](const auto& a, const auto& b) { return a.relationship < b.relationship; });
    int best = 0;
    do {
      const double v = ndcg(perm, ideal).value;
      CHECK(v <= 1.0 + 1e-12);
      CHECK(v > 0.0);
      best += v > 1.0 - 1e-12;
    } while (std::next_permutation(perm.begin(), perm.end(),
                                   [](const auto& a, const auto& b) { return a.relationship < b.relationship; }));
    CHECK(best == 1);
  }
  SUBCASE("items missing from the ideal list gain nothing") {
    const std::vector<SpecificityEntry> other{entry(8, 1.0), entry(9, 1.0)};
    CHECK(ndcg(other, ideal).value == 0.0);
  }
  SUBCASE("all-zero ideal is degenerate") {
    const std::vector<SpecificityEntry> zeros{entry(1, 0.0), entry(2, 0.0)};
    const auto r = ndcg(ideal, zeros);
    CHECK(r.degenerate);
    CHECK(r.value == 1.0);
  }
}

TEST_CASE("sensitivity sweep") {
  std::vector<std::array<std::string, 3>> t;
  for (int i = 0; i < 40; ++i) {
    const std::string f = "f" + std::to_string(i);
    t.push_back({f, "a", "Film"});
    t.push_back({f, "genre", "g" + std::to_string(i % 3)});
    t.push_back({f, "director", "d" + std::to_string(i % 9)});
    t.push_back({f, "year", "y" + std::to_string(i % 5)});
  }
  for (int i = 0; i < 30; ++i) {
    t.push_back({"b" + std::to_string(i), "genre", "g" + std::to_string(i % 3)});
    t.push_back({"b" + std::to_string(i), "year", "y" + std::to_string(i % 5)});
  }
  const Graph g = fixtures::graph(t);
  const TermId film = fixtures::id(g, "Film");
  EstimatorParams base;
  base.max_depth = 1;

  SUBCASE("a single point compares with itself") {
    const std::vector<SweepPoint> one{{200, 20}};
    const auto rows = sensitivity_sweep(g, film, base, one, {3, 1});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_ndcg == 1.0);
    CHECK(rows[0].ground_truth);
    CHECK(rows[0].repeats == 3);
  }
  SUBCASE("largest point is the reference and results ignore worker count") {
    const std::vector<SweepPoint> pts{{50, 20}, {400, 20}, {2000, 20}};
    const auto a = sensitivity_sweep(g, film, base, pts, {6, 1});
    const auto b = sensitivity_sweep(g, film, base, pts, {6, 3});
    REQUIRE(a.size() == 3);
    CHECK(a[2].ground_truth);
    CHECK(a[2].mean_ndcg == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[i].mean_ndcg == b[i].mean_ndcg);
    CHECK(a[0].mean_ndcg <= 1.0);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(sensitivity_sweep(g, film, base, {}, {}), std::invalid_argument);
    const std::vector<SweepPoint> one{{200, 20}};
    CHECK_THROWS_AS(sensitivity_sweep(g, film, base, one, {0, 1}), std::invalid_argument);
  }
}
