#include "kgwalk/pagerank.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "kgwalk/parallel.hpp"

namespace kgwalk {

namespace {

constexpr std::size_t kChunk = 4096;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

PageRankResult compute_pagerank(const Graph& g, const PageRankOptions& options) {
  if (!(options.damping > 0.0 && options.damping < 1.0)) throw std::invalid_argument("damping must lie in (0, 1)");
  if (!(options.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");

  constexpr std::uint32_t kNone = ~0u;
  std::vector<TermId> nodes;
  std::vector<std::uint32_t> index(g.term_count(), kNone);
  for (std::uint32_t v = 0; v < g.term_count(); ++v) {
    const TermId id{v};
    if (!g.is_literal(id) && g.is_node(id)) {
      index[v] = static_cast<std::uint32_t>(nodes.size());
      nodes.push_back(id);
    }
  }
  const std::size_t n = nodes.size();
  if (n == 0) throw DataError("graph has no resource nodes");

  std::vector<double> out_degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : g.out_neighbors(nodes[i])) {
      if (index[e.node.value] != kNone) out_degree[i] += 1.0;
    }
  }

  const double d = options.damping;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n);
  std::vector<double> next(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> chunk_residual(chunks);

  PageRankResult result;
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (out_degree[i] == 0.0) dangling += rank[i];
    }
    const double base = (1.0 - d) * inv_n + d * dangling * inv_n;

    parallel_for(chunks, options.workers, [&](std::size_t c) {
      const std::size_t end = std::min(n, (c + 1) * kChunk);
      double residual = 0.0;
      for (std::size_t i = c * kChunk; i < end; ++i) {
        double pulled = 0.0;
        for (const Edge& e : g.in_neighbors(nodes[i])) {
          const auto j = index[e.node.value];
          pulled += rank[j] / out_degree[j];
        }
        next[i] = base + d * pulled;
        residual += std::abs(next[i] - rank[i]);
      }
      chunk_residual[c] = residual;
    });

    double residual = 0.0;
    for (double r : chunk_residual) residual += r;
    rank.swap(next);
    result.residuals.push_back(residual);
    result.iterations = iter + 1;
    if (residual < options.epsilon) {
      result.converged = true;
      break;
    }
  }

  double total = 0.0;
  for (double r : rank) total += r;
  result.scores.normalized = true;
  result.scores.scores.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.scores.scores.emplace(nodes[i], rank[i] / total);
  return result;
}

ScoreTable load_scores(std::istream& in, bool strict) {
  ScoreTable table;
  std::unordered_map<std::string, std::size_t> position;
  std::string line;
  std::size_t line_no = 0;
  auto reject = [&](const std::string& message) {
    const std::string text = "score file line " + std::to_string(line_no) + ": " + message;
    if (strict) throw DataError(text);
    ++table.skipped;
    table.warnings.push_back(text);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    auto split = row.find('\t');
    if (split == std::string_view::npos) split = row.find_last_of(' ');
    if (split == std::string_view::npos) {
      reject("expected two columns");
      continue;
    }
    const auto iri = strip_iri_brackets(trim(row.substr(0, split)));
    const auto value = trim(row.substr(split + 1));
    if (line_no == 1 && iri == "iri" && value == "score") continue;
    double score = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
    if (ec != std::errc() || end != value.data() + value.size() || iri.empty()) {
      reject("malformed score '" + std::string(value) + "'");
      continue;
    }
    if (!std::isfinite(score) || score < 0.0) {
      reject("score must be finite and non-negative");
      continue;
    }
    auto [it, inserted] = position.try_emplace(std::string(iri), table.rows.size());
    if (inserted) {
      table.rows.emplace_back(std::string(iri), score);
    } else {
      table.warnings.push_back("score file line " + std::to_string(line_no) + ": duplicate IRI " + it->first +
                               ", keeping the later value");
      table.rows[it->second].second = score;
    }
  }
  return table;
}

JoinedScores join_scores(const ScoreTable& table, const Graph& g) {
  JoinedScores joined;
  joined.map.normalized = false;
  for (const auto& [iri, score] : table.rows) {
    const auto id = g.find(iri);
    if (id && !g.is_literal(*id)) {
      joined.map.scores[*id] = score;
    } else {
      joined.unmatched.push_back(iri);
    }
  }
  return joined;
}

void write_scores(const ScoreMap& scores, const Graph& g, std::ostream& out) {
  std::vector<std::pair<TermId, double>> rows(scores.scores.begin(), scores.scores.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  out << "iri\tscore\n";
  char buf[32];
  for (const auto& [id, score] : rows) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, score);
    out << g.term(id) << '\t' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

}  // namespace kgwalk
