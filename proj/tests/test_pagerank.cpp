#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>

#include "fixtures.hpp"
#include "kgwalk/pagerank.hpp"
#include "kgwalk/random.hpp"

using namespace kgwalk;
using fixtures::id;

namespace {

// Direct solve of x = (1-d)/n + d (P^T x + dangling mass / n) with sum x = 1.
std::unordered_map<TermId, double> dense_pagerank(const Graph& g, double d) {
  std::vector<TermId> nodes;
  std::unordered_map<TermId, Eigen::Index> index;
  for (std::uint32_t v = 0; v < g.term_count(); ++v) {
    if (!g.is_literal(TermId{v}) && g.is_node(TermId{v})) {
      index[TermId{v}] = static_cast<Eigen::Index>(nodes.size());
      nodes.push_back(TermId{v});
    }
  }
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  g.for_each_triple([&](const Triple& t) {
    if (index.count(t.object)) a(index[t.subject], index[t.object]) += 1.0;
  });
  Eigen::MatrixXd transition(n, n);  // column j: where mass at j goes
  for (Eigen::Index j = 0; j < n; ++j) {
    const double out = a.row(j).sum();
    for (Eigen::Index i = 0; i < n; ++i) transition(i, j) = out > 0 ? a(j, i) / out : 1.0 / static_cast<double>(n);
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - d * transition;
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, (1.0 - d) / static_cast<double>(n));
  const Eigen::VectorXd x = system.fullPivLu().solve(rhs);
  std::unordered_map<TermId, double> out;
  for (Eigen::Index i = 0; i < n; ++i) out[nodes[static_cast<std::size_t>(i)]] = x(i) / x.sum();
  return out;
}

}  // namespace

TEST_CASE("two-node cycle is symmetric") {
  const Graph g = fixtures::graph({{"a", "p", "b"}, {"b", "p", "a"}});
  const auto r = compute_pagerank(g);
  CHECK(r.scores.weight(id(g, "a")) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.scores.weight(id(g, "b")) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.converged);
}

TEST_CASE("three-node star matches the closed-form linear solve") {
  const Graph g = fixtures::graph({{"l1", "p", "hub"}, {"l2", "p", "hub"}});
  const double d = 0.85;
  // leaves: x_l = (1-d)/3 + d x_h / 3; hub: x_h = (1-d)/3 + 2 d x_l + d x_h / 3
  Eigen::Matrix2d m;
  m << 1.0, -d / 3.0, -2.0 * d, 1.0 - d / 3.0;
  const Eigen::Vector2d x = m.inverse() * Eigen::Vector2d::Constant((1.0 - d) / 3.0);
  const auto r = compute_pagerank(g);
  CHECK(r.scores.weight(id(g, "hub")) == doctest::Approx(x(1) / (x(1) + 2 * x(0))).epsilon(1e-9));
  CHECK(r.scores.weight(id(g, "l1")) == doctest::Approx(x(0) / (x(1) + 2 * x(0))).epsilon(1e-9));
}

TEST_CASE("power iteration agrees with a dense solve on random small graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    std::vector<std::array<std::string, 3>> t;
    const std::size_t n = 5 + uniform_index(rng, 45);
    const std::size_t m = n + uniform_index(rng, 3 * n);
    for (std::size_t e = 0; e < m; ++e) {
      t.push_back({"n" + std::to_string(uniform_index(rng, n)), "p" + std::to_string(uniform_index(rng, 3)),
                   "n" + std::to_string(uniform_index(rng, n))});
    }
    t.push_back({"n0", "label", "\"literal\""});
    const Graph g = fixtures::graph(t);
    PageRankOptions options;
    options.epsilon = 1e-13;
    options.max_iters = 1000;
    const auto r = compute_pagerank(g, options);
    const auto oracle = dense_pagerank(g, options.damping);
    REQUIRE(r.scores.scores.size() == oracle.size());
    double sum = 0.0;
    for (const auto& [v, x] : oracle) {
      CHECK(std::abs(r.scores.weight(v) - x) < 1e-6);
      sum += r.scores.weight(v);
    }
    CHECK(std::abs(sum - 1.0) < 1e-8);
    CHECK_FALSE(r.scores.get(g.require("\"literal\"")).has_value());
    for (std::size_t i = 2; i < r.residuals.size(); ++i) CHECK(r.residuals[i] <= r.residuals[i - 1] * (1 + 1e-9));
  }
}

TEST_CASE("worker count does not change scores") {
  Rng rng(3);
  std::vector<std::array<std::string, 3>> t;
  for (int e = 0; e < 30000; ++e) {
    t.push_back({"n" + std::to_string(uniform_index(rng, 9000)), "p", "n" + std::to_string(uniform_index(rng, 9000))});
  }
  const Graph g = fixtures::graph(t);
  PageRankOptions one;
  PageRankOptions many;
  many.workers = 4;
  const auto a = compute_pagerank(g, one);
  const auto b = compute_pagerank(g, many);
  CHECK(a.iterations == b.iterations);
  for (const auto& [v, x] : a.scores.scores) REQUIRE(b.scores.weight(v) == x);
}

TEST_CASE("pagerank argument checks") {
  const Graph g = fixtures::graph({{"a", "p", "b"}});
  PageRankOptions bad;
  bad.damping = 1.0;
  CHECK_THROWS_AS(compute_pagerank(g, bad), std::invalid_argument);
  CHECK_THROWS_AS(compute_pagerank(Graph{}), DataError);
}

TEST_CASE("score files") {
  SUBCASE("three rows") {
    std::istringstream in("iri\tscore\nhttp://x/a\t1\nhttp://x/b\t2.5\n# note\nhttp://x/c\t3e-2\n");
    const auto t = load_scores(in);
    CHECK(t.rows.size() == 3);
    CHECK(t.rows[2].second == 0.03);
  }
  SUBCASE("raw score values parse exactly") {
    std::istringstream in(
        "<http://dbpedia.org/resource/Category:Gothic_films>\t0.586402\n"
        "<http://dbpedia.org/resource/Category:1958_births> 161.258\n"
        "http://dbpedia.org/resource/Burbank,_California\t57.1176\n");
    const auto t = load_scores(in);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0] == std::pair<std::string, double>{"http://dbpedia.org/resource/Category:Gothic_films", 0.586402});
    CHECK(t.rows[1].second == 161.258);
    CHECK(t.rows[2].first == "http://dbpedia.org/resource/Burbank,_California");
    CHECK(t.rows[2].second == 57.1176);
  }
  SUBCASE("duplicate IRIs keep the last value with a warning") {
    std::istringstream in("http://x/a\t1\nhttp://x/b\t2\nhttp://x/a\t5\n");
    const auto t = load_scores(in);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].second == 5.0);
    CHECK(t.warnings.size() == 1);
  }
  SUBCASE("malformed rows") {
    std::istringstream lenient("http://x/a\tnot-a-number\nhttp://x/b\t2\n");
    const auto t = load_scores(lenient);
    CHECK(t.rows.size() == 1);
    CHECK(t.skipped == 1);
    std::istringstream strict("http://x/a\tnot-a-number\n");
    CHECK_THROWS_AS(load_scores(strict, true), DataError);
  }
  SUBCASE("join, write and reload") {
    const Graph g = fixtures::graph({{"a", "p", "b"}, {"b", "p", "c"}});
    const auto r = compute_pagerank(g);
    std::stringstream buf;
    write_scores(r.scores, g, buf);
    const auto table = load_scores(buf);
    const auto joined = join_scores(table, g);
    CHECK(joined.unmatched.empty());
    CHECK_FALSE(joined.map.normalized);
    for (const auto& [v, x] : r.scores.scores) CHECK(joined.map.weight(v) == x);
    std::istringstream extra("http://x/zzz\t1\n");
    CHECK(join_scores(load_scores(extra), g).unmatched.size() == 1);
  }
}
