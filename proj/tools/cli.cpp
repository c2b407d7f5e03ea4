#include "cli.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_config.hpp"
#include "kgwalk/graph.hpp"
#include "kgwalk/ntriples.hpp"
#include "kgwalk/pagerank.hpp"
#include "kgwalk/parallel.hpp"
#include "kgwalk/random.hpp"
#include "kgwalk/recommend.hpp"
#include "kgwalk/relevance.hpp"
#include "kgwalk/skipgram.hpp"
#include "kgwalk/snapshot.hpp"
#include "kgwalk/specificity.hpp"
#include "kgwalk/walks.hpp"
#include "synth.hpp"

namespace kgwalk::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kAll = static_cast<std::size_t>(-1);

struct Common {
  std::uint64_t seed = 1;
  unsigned workers = default_workers();
};

struct Run {
  std::ostream& out;
  std::ostream& err;
  std::string command;
  const Common& common;
  std::string config_hash;
};

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

fs::path sidecar(const fs::path& artifact) { return artifact.string() + ".meta.json"; }

void write_meta(const fs::path& artifact, const Run& run, const std::string& graph_checksum, const ojson& extra = {}) {
  ojson meta;
  meta["artifact"] = artifact.filename().string();
  meta["command"] = run.command;
  meta["seed"] = run.common.seed;
  meta["config_hash"] = run.config_hash;
  meta["graph_checksum"] = graph_checksum;
  if (extra.is_object()) {
    for (const auto& [key, value] : extra.items()) meta[key] = value;
  }
  auto out = open_output(sidecar(artifact));
  out << meta.dump(2) << '\n';
}

/// Graph checksum recorded in an artifact's sidecar, if any.
std::string inherited_checksum(const fs::path& artifact) {
  std::ifstream in(sidecar(artifact));
  if (!in) return "";
  try {
    const auto meta = nlohmann::json::parse(in);
    if (meta.contains("graph_checksum") && meta["graph_checksum"].is_string()) return meta["graph_checksum"];
  } catch (const nlohmann::json::exception&) {
  }
  return "";
}

Graph load_graph(const std::string& path, const std::string& type_predicate, bool strict, std::ostream& err) {
  if (!fs::exists(path)) throw DataError("no such file: " + path);
  {
    std::ifstream probe(path, std::ios::binary);
    char magic[8] = {};
    probe.read(magic, sizeof magic);
    if (probe.gcount() == 8 && std::memcmp(magic, "KGWSNAP", 8) == 0) return load_snapshot(path);
  }
  ParseOptions options;
  options.strict = strict;
  options.type_predicate = type_predicate;
  auto loaded = load_graph_file(path, options);
  if (loaded.report.skipped > 0) {
    err << "warning: skipped " << loaded.report.skipped << " malformed line(s) in " << path << '\n';
    for (const auto& issue : loaded.report.issues) err << "  line " << issue.line << ": " << issue.message << '\n';
  }
  return std::move(loaded.graph);
}

TermId require_type(const Graph& g, const std::string& iri) {
  const auto id = g.find(iri);
  if (!id) throw DataError("type not found in graph: " + iri);
  if (g.entities_of_type(*id).empty()) throw DataError("type has no instances: " + iri);
  return *id;
}

std::size_t parse_seed_set(const std::string& text) {
  if (text == "all") return kAll;
  std::size_t pos = 0;
  std::size_t value = 0;
  try {
    value = std::stoul(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || value == 0) throw UsageError("seed set size must be a positive number or 'all'");
  return value;
}

std::string seed_set_label(std::size_t n) { return n == kAll ? "all" : std::to_string(n); }

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads; 1 gives reproducible output")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_graph_options(CLI::App* sub, std::string& graph, std::string& type_predicate, bool& strict) {
  sub->add_option("--graph", graph, "Graph snapshot, N-Triples (.nt, .nt.gz) or TSV edge list")->required();
  sub->add_option("--type-predicate", type_predicate, "IRI used for type assertions")->capture_default_str();
  sub->add_flag("--strict", strict, "Abort on the first malformed input line");
}

ScoreMap load_score_file(const std::string& path, const Graph& g, bool strict, std::ostream& err) {
  auto in = open_input(path);
  const auto table = load_scores(in, strict);
  for (const auto& w : table.warnings) err << "warning: " << w << '\n';
  auto joined = join_scores(table, g);
  if (!joined.unmatched.empty()) {
    err << "warning: " << joined.unmatched.size() << " scored IRI(s) not in the graph\n";
  }
  return std::move(joined.map);
}

KeyedVectors load_vectors(const std::string& path) {
  auto in = open_input(path);
  return load_word2vec_text(in);
}

CandidateFilter type_filter(const Graph& g, const std::string& type_iri, std::set<std::string>& storage) {
  const TermId type = require_type(g, type_iri);
  for (TermId e : g.entities_of_type(type)) storage.insert(corpus_token(g.term(e)));
  return [&storage](std::string_view token) { return storage.count(std::string(token)) != 0; };
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
  Common common;
  std::string input;
  std::string output;
  std::string type_predicate{kRdfType};
  bool strict = false;
};

int run_ingest(Run& run, const IngestOptions& o) {
  ParseOptions options;
  options.strict = o.strict;
  options.type_predicate = o.type_predicate;
  auto loaded = load_graph_file(o.input, options);
  const Graph& g = loaded.graph;
  for (const auto& issue : loaded.report.issues) run.err << "warning: line " << issue.line << ": " << issue.message << '\n';
  {
    auto out = open_output(o.output);
    write_snapshot(g, out);
    if (!out) throw DataError("failed to write " + o.output);
  }
  std::size_t entities = 0;
  for (std::uint32_t v = 0; v < g.term_count(); ++v) {
    if (!g.is_literal(TermId{v}) && g.is_node(TermId{v})) ++entities;
  }
  run.out << "triples " << g.triple_count() << '\n'
          << "entities " << entities << '\n'
          << "types " << g.types().size() << '\n'
          << "lines " << loaded.report.lines << '\n'
          << "skipped " << loaded.report.skipped << '\n'
          << "checksum " << g.checksum() << '\n';
  write_meta(o.output, run, g.checksum(),
             {{"input", fs::path(o.input).filename().string()},
              {"triples", g.triple_count()},
              {"entities", entities},
              {"types", g.types().size()},
              {"parsed_lines", loaded.report.parsed},
              {"skipped_lines", loaded.report.skipped}});
  return kExitOk;
}

// -------------------------------------------------------------- pagerank

struct PageRankCommand {
  Common common;
  std::string graph;
  std::string output;
  std::string type_predicate{kRdfType};
  bool strict = false;
  double damping = 0.85;
  double epsilon = 1e-10;
  std::size_t max_iters = 100;
};

int run_pagerank(Run& run, const PageRankCommand& o) {
  const Graph g = load_graph(o.graph, o.type_predicate, o.strict, run.err);
  PageRankOptions options;
  options.damping = o.damping;
  options.epsilon = o.epsilon;
  options.max_iters = o.max_iters;
  options.workers = run.common.workers;
  const auto result = compute_pagerank(g, options);
  {
    auto out = open_output(o.output);
    write_scores(result.scores, g, out);
  }
  if (!result.converged) run.err << "warning: pagerank did not converge in " << o.max_iters << " iterations\n";
  run.out << "nodes " << result.scores.scores.size() << '\n'
          << "iterations " << result.iterations << '\n'
          << "residual " << (result.residuals.empty() ? 0.0 : result.residuals.back()) << '\n';
  write_meta(o.output, run, g.checksum(),
             {{"damping", o.damping},
              {"epsilon", o.epsilon},
              {"max_iters", o.max_iters},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"normalized", true}});
  return kExitOk;
}

// ----------------------------------------------------------- specificity

struct SpecificityCommand {
  Common common;
  std::string graph;
  std::string type;
  std::string output;
  std::string type_predicate{kRdfType};
  bool strict = false;
  std::string seed_set = "300";
  std::size_t walks = 2000;
  std::size_t candidates = 25;
  std::size_t max_depth = 3;
  double threshold = 0.5;
  std::size_t retry_limit = 10;
  bool exact = false;
  std::string selection = "extend";
  std::size_t selection_samples = 20000;
  bool type_edges = false;
  std::string relevance;
  std::string pagerank;
};

int run_specificity(Run& run, const SpecificityCommand& o) {
  EstimatorParams params;
  params.seed_set_size = parse_seed_set(o.seed_set);
  params.n_walks = o.walks;
  params.candidates_per_depth = o.candidates;
  params.max_depth = o.max_depth;
  params.threshold = o.threshold;
  params.forward_retry_limit = o.retry_limit;
  params.seed = run.common.seed;
  params.estimator = o.exact ? Estimator::eq2 : Estimator::alg2;
  params.selection = o.selection == "scratch" ? SelectionMode::scratch : SelectionMode::extend;
  params.selection_samples = o.selection_samples;
  params.type_edges_in_templates = o.type_edges;
  params.workers = run.common.workers;
  params.validate();

  const Graph g = load_graph(o.graph, o.type_predicate, o.strict, run.err);
  const TermId type = require_type(g, o.type);
  const auto table = rank_by_specificity(g, type, params);
  if (table.seed_shortfall > 0) {
    run.err << "warning: type has " << table.seed_set_actual << " instances, fewer than the requested seed set\n";
  }
  {
    auto out = open_output(o.output);
    write_table_tsv(table, g, out);
  }
  write_meta(o.output, run, g.checksum(), ojson::parse(table_metadata_json(table)));

  for (std::size_t d = 1; d <= table.depths.size(); ++d) {
    run.out << "depth " << d << ": " << table.depths[d - 1].size() << " relationships, "
            << table.above_threshold(d).size() << " above threshold\n";
  }

  if (!o.relevance.empty()) {
    std::optional<ScoreMap> scores;
    if (!o.pagerank.empty()) scores = load_score_file(o.pagerank, g, false, run.err);
    std::vector<SpecificityEntry> entries;
    for (const auto& depth : table.depths) entries.insert(entries.end(), depth.begin(), depth.end());
    const auto rows = compare_relevance(g, type, entries, scores ? &*scores : nullptr);
    {
      auto out = open_output(o.relevance);
      write_relevance_csv(rows, g, out);
    }
    write_meta(o.relevance, run, g.checksum(),
               {{"type", o.type}, {"pagerank_file", o.pagerank.empty() ? "" : fs::path(o.pagerank).filename().string()}});
  }
  return kExitOk;
}

// ------------------------------------------------------------------ walk

struct WalkCommand {
  Common common;
  std::string graph;
  std::string output;
  std::string stats;
  std::string type;
  std::string entities;
  std::string type_predicate{kRdfType};
  bool strict = false;
  std::string bias = "uniform";
  std::string pruning = "none";
  std::size_t depth = 2;
  std::size_t walks_per_entity = 500;
  std::string table;
  double threshold = 0.5;
  std::string pagerank;
  bool no_depth1 = false;
};

int run_walk(Run& run, const WalkCommand& o) {
  WalkStrategy strategy;
  strategy.bias = *parse_bias(o.bias);
  strategy.pruning = *parse_pruning(o.pruning);
  strategy.depth = o.depth;
  strategy.walks_per_entity = o.walks_per_entity;
  if (strategy.bias == Bias::specificity && o.table.empty()) {
    throw UsageError("--table is required for specificity bias");
  }
  if (strategy.bias == Bias::pagerank && o.pagerank.empty()) throw UsageError("--pagerank is required for pagerank bias");
  if (o.type.empty() == o.entities.empty()) throw UsageError("give exactly one of --type and --entities");

  const Graph g = load_graph(o.graph, o.type_predicate, o.strict, run.err);
  std::vector<TermId> entities;
  if (!o.type.empty()) {
    const auto members = g.entities_of_type(require_type(g, o.type));
    entities.assign(members.begin(), members.end());
  } else {
    auto in = open_input(o.entities);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      entities.push_back(g.require(line));
    }
  }

  SpecificityTable table;
  if (!o.table.empty()) {
    auto in = open_input(o.table);
    table = read_table_tsv(in, g);
    table.params.threshold = o.threshold;
    strategy.table = &table;
  }
  std::optional<ScoreMap> scores;
  if (!o.pagerank.empty()) {
    scores = load_score_file(o.pagerank, g, false, run.err);
    strategy.pagerank = &*scores;
  }
  strategy.validate();

  WalkCorpus corpus;
  if (strategy.depth > 1 && !o.no_depth1) {
    WalkStrategy shallow = strategy;
    shallow.depth = 1;
    corpus = extract_corpus(g, entities, shallow, run.common.seed, run.common.workers);
  }
  corpus.append(extract_corpus(g, entities, strategy, run.common.seed, run.common.workers));

  std::map<std::size_t, std::size_t> per_depth;
  for (const auto& e : corpus.entities) per_depth[e.depth] += e.walks;
  for (const auto& [depth, walks] : per_depth) {
    if (walks == 0) run.err << "warning: no walks were generated at depth " << depth << '\n';
  }

  std::ostringstream header;
  header << "bias=" << to_string(strategy.bias) << " pruning=" << to_string(strategy.pruning)
         << " depth=" << strategy.depth << " depth1=" << (o.no_depth1 || strategy.depth == 1 ? "no" : "yes")
         << " walks_per_entity=" << strategy.walks_per_entity << " seed=" << run.common.seed
         << " graph=" << g.checksum() << " config=" << run.config_hash;
  {
    auto out = open_output(o.output);
    write_corpus(corpus, g, out, header.str());
  }
  const std::string stats_path = o.stats.empty() ? o.output + ".stats.csv" : o.stats;
  {
    auto out = open_output(stats_path);
    write_walk_stats_csv(corpus, g, out);
  }

  const auto stats = corpus_stats(corpus);
  run.out << "entities " << entities.size() << '\n'
          << "attempts " << stats.attempts << '\n'
          << "walks " << stats.walks << '\n'
          << "distinct " << stats.distinct << '\n';
  ojson summary{{"bias", to_string(strategy.bias)},
                {"pruning", to_string(strategy.pruning)},
                {"depth", strategy.depth},
                {"include_depth1", !(o.no_depth1 || strategy.depth == 1)},
                {"walks_per_entity", strategy.walks_per_entity},
                {"entities", entities.size()},
                {"attempts", stats.attempts},
                {"walks", stats.walks},
                {"distinct", stats.distinct},
                {"mean_depth", stats.mean_depth}};
  write_meta(o.output, run, g.checksum(), summary);
  write_meta(stats_path, run, g.checksum(), {{"note", "millis is wall-clock time and varies between runs"}});
  return kExitOk;
}

// ----------------------------------------------------------------- train

struct TrainCommand {
  Common common;
  std::vector<std::string> corpus;
  std::string output;
  std::size_t dim = 500;
  std::size_t window = 10;
  std::size_t negatives = 25;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t min_count = 1;
  double power = 0.75;
  double subsample = 0.0;
};

int run_train(Run& run, const TrainCommand& o) {
  TrainConfig config;
  config.dim = o.dim;
  config.window = o.window;
  config.negatives = o.negatives;
  config.epochs = o.epochs;
  config.learning_rate = o.learning_rate;
  config.min_count = o.min_count;
  config.power = o.power;
  config.subsample = o.subsample;
  config.seed = run.common.seed;
  config.workers = run.common.workers;
  config.validate();

  std::stringstream text;
  for (const auto& path : o.corpus) {
    auto in = open_input(path);
    text << in.rdbuf() << '\n';
  }
  const auto corpus = read_corpus(text, config.min_count);
  TrainReport report;
  const auto model = train(corpus, config, &report);
  {
    auto out = open_output(o.output);
    save_word2vec_text(model, out);
  }
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    run.out << "epoch " << e + 1 << " loss " << report.epoch_loss[e] << " pairs " << report.epoch_pairs[e] << '\n';
  }
  std::vector<std::string> names;
  for (const auto& path : o.corpus) names.push_back(fs::path(path).filename().string());
  write_meta(o.output, run, o.corpus.empty() ? "" : inherited_checksum(o.corpus.front()),
             {{"corpus", names},
              {"vocabulary", model.vocab.size()},
              {"sentences", corpus.sentences.size()},
              {"dim", o.dim},
              {"window", o.window},
              {"negatives", o.negatives},
              {"epochs", o.epochs},
              {"learning_rate", o.learning_rate},
              {"min_count", o.min_count},
              {"power", o.power},
              {"subsample", o.subsample},
              {"epoch_loss", report.epoch_loss},
              {"epoch_pairs", report.epoch_pairs}});
  return kExitOk;
}

// ------------------------------------------------------------- recommend

struct RecommendCommand {
  Common common;
  std::string vectors;
  std::vector<std::string> queries;
  std::size_t k = 10;
  std::string graph;
  std::string type;
  std::string type_predicate{kRdfType};
  std::string output;
};

int run_recommend(Run& run, const RecommendCommand& o) {
  const auto kv = load_vectors(o.vectors);
  std::optional<Graph> g;
  std::set<std::string> allowed;
  CandidateFilter filter;
  if (!o.graph.empty()) {
    g = load_graph(o.graph, o.type_predicate, false, run.err);
    if (!o.type.empty()) filter = type_filter(*g, o.type, allowed);
  } else if (!o.type.empty()) {
    throw UsageError("--type needs --graph");
  }

  std::ostringstream csv;
  csv << "query,rank,token,score\n";
  for (const auto& q : o.queries) {
    const auto rec = top_k(kv, corpus_token(strip_iri_brackets(q)), o.k, filter);
    for (std::size_t i = 0; i < rec.items.size(); ++i) {
      csv << '"' << strip_iri_brackets(q) << "\"," << i + 1 << ",\"" << decode_corpus_token(rec.items[i].first) << "\","
          << rec.items[i].second << '\n';
    }
  }
  if (o.output.empty()) {
    run.out << csv.str();
  } else {
    {
      auto out = open_output(o.output);
      out << csv.str();
    }
    write_meta(o.output, run, g ? g->checksum() : inherited_checksum(o.vectors),
               {{"vectors", fs::path(o.vectors).filename().string()}, {"k", o.k}});
  }
  return kExitOk;
}

// ------------------------------------------------------------------ eval

struct EvalCommand {
  Common common;
  std::vector<std::string> vectors;
  std::vector<std::string> schemes;
  std::vector<std::size_t> depths;
  std::string truth;
  std::size_t k = 0;  // 0: the size of each query's relevant set
  bool allow_mismatch = false;
  std::string graph;
  std::string type;
  std::string type_predicate{kRdfType};
  std::string output;
};

int run_eval(Run& run, const EvalCommand& o) {
  if (!o.schemes.empty() && o.schemes.size() != o.vectors.size()) {
    throw UsageError("--scheme must be given once per --vectors");
  }
  if (o.depths.size() > 1 && o.depths.size() != o.vectors.size()) {
    throw UsageError("--depth must be given once or once per --vectors");
  }
  GroundTruth truth;
  {
    auto in = open_input(o.truth);
    truth = load_ground_truth(in);
  }
  if (o.k != 0 && !o.allow_mismatch) {
    for (const auto& [query, relevant] : truth) {
      if (relevant.size() != o.k) {
        throw UsageError("k = " + std::to_string(o.k) + " differs from the " + std::to_string(relevant.size()) +
                         " relevant items of " + query + "; pass --allow-mismatch to evaluate anyway");
      }
    }
  }

  std::optional<Graph> g;
  std::set<std::string> allowed;
  CandidateFilter filter;
  if (!o.graph.empty()) {
    g = load_graph(o.graph, o.type_predicate, false, run.err);
    if (!o.type.empty()) filter = type_filter(*g, o.type, allowed);
  } else if (!o.type.empty()) {
    throw UsageError("--type needs --graph");
  }

  std::ostringstream csv;
  csv << "scheme,depth,query,k,precision,recall\n";
  ojson summary = ojson::array();
  for (std::size_t m = 0; m < o.vectors.size(); ++m) {
    const auto kv = load_vectors(o.vectors[m]);
    const std::string scheme = o.schemes.empty() ? fs::path(o.vectors[m]).stem().string() : o.schemes[m];
    const std::size_t depth = o.depths.empty() ? 0 : (o.depths.size() == 1 ? o.depths[0] : o.depths[m]);
    double sum = 0.0;
    std::size_t queries = 0;
    for (const auto& [query, relevant] : truth) {
      if (relevant.empty()) {
        run.err << "warning: " << query << " has no relevant items, skipped\n";
        continue;
      }
      const std::size_t k = o.k != 0 ? o.k : relevant.size();
      std::set<std::string> tokens;
      for (const auto& r : relevant) tokens.insert(corpus_token(r));
      double precision = 0.0;
      double recall = 0.0;
      const std::string token = corpus_token(query);
      if (kv.find(token)) {
        const auto rec = top_k(kv, token, k, filter);
        precision = precision_at_k(rec, tokens);
        recall = recall_at_k(rec, tokens);
      } else {
        run.err << "warning: " << query << " is not in " << o.vectors[m] << ", counted as a miss\n";
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", precision, recall);
      csv << scheme << ',' << depth << ",\"" << query << "\"," << k << ',' << buf << '\n';
      sum += precision;
      ++queries;
    }
    const double mean = queries == 0 ? 0.0 : sum / static_cast<double>(queries);
    run.out << "scheme " << scheme << " depth " << depth << " mean_precision " << mean << " queries " << queries
            << '\n';
    summary.push_back({{"scheme", scheme}, {"depth", depth}, {"mean_precision", mean}, {"queries", queries}});
  }
  if (o.output.empty()) {
    run.out << csv.str();
  } else {
    {
      auto out = open_output(o.output);
      out << csv.str();
    }
    write_meta(o.output, run, g ? g->checksum() : (o.vectors.empty() ? "" : inherited_checksum(o.vectors.front())),
               {{"truth", fs::path(o.truth).filename().string()}, {"summary", summary}});
  }
  return kExitOk;
}

// ----------------------------------------------------------- sensitivity

struct SensitivityCommand {
  Common common;
  std::string graph;
  std::string type;
  std::string output;
  std::string type_predicate{kRdfType};
  bool strict = false;
  std::string sweep = "walks";
  std::vector<std::string> values;
  std::size_t fixed_walks = 2000;
  std::string fixed_seed_set = "300";
  std::size_t repeats = 20;
  std::size_t candidates = 25;
  std::size_t max_depth = 1;
  double threshold = 0.5;
  std::size_t retry_limit = 10;
  bool exact = false;
};

int run_sensitivity(Run& run, const SensitivityCommand& o) {
  std::vector<SweepPoint> points;
  std::vector<std::string> values = o.values;
  if (values.empty()) {
    values = o.sweep == "walks" ? std::vector<std::string>{"100", "500", "2000", "5000"}
                                : std::vector<std::string>{"50", "300", "all"};
  }
  for (const auto& v : values) {
    if (o.sweep == "walks") {
      std::size_t n = 0;
      try {
        n = std::stoul(v);
      } catch (const std::exception&) {
        throw UsageError("sweep value is not a number: " + v);
      }
      points.push_back({n, parse_seed_set(o.fixed_seed_set)});
    } else {
      points.push_back({o.fixed_walks, parse_seed_set(v)});
    }
  }

  EstimatorParams base;
  base.candidates_per_depth = o.candidates;
  base.max_depth = o.max_depth;
  base.threshold = o.threshold;
  base.forward_retry_limit = o.retry_limit;
  base.seed = run.common.seed;
  base.estimator = o.exact ? Estimator::eq2 : Estimator::alg2;
  base.validate();

  const Graph g = load_graph(o.graph, o.type_predicate, o.strict, run.err);
  const TermId type = require_type(g, o.type);
  const auto rows = sensitivity_sweep(g, type, base, points, {o.repeats, run.common.workers});

  std::ostringstream csv;
  csv << "n_walks,seed_set_size,depth,ndcg,stddev,repeats,degenerate,ground_truth\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", row.mean_ndcg, row.stddev);
    csv << row.point.n_walks << ',' << seed_set_label(row.point.seed_set_size) << ',' << row.depth << ',' << buf
        << ',' << row.repeats << ',' << row.degenerate << ',' << (row.ground_truth ? 1 : 0) << '\n';
  }
  {
    auto out = open_output(o.output);
    out << csv.str();
  }
  run.out << csv.str();
  write_meta(o.output, run, g.checksum(),
             {{"type", o.type}, {"sweep", o.sweep}, {"repeats", o.repeats}, {"max_depth", o.max_depth}});
  return kExitOk;
}

// ----------------------------------------------------------------- synth

struct SynthCommand {
  Common common;
  std::string kind = "franchise";
  std::string output;
  std::string truth;
  std::size_t franchises = 5;
  std::size_t films_per = 4;
  std::size_t standalone = 40;
  std::size_t films = 0;  // 0: generator default
};

int run_synth(Run& run, const SynthCommand& o) {
  synth::SynthGraph kg;
  const auto seed = run.common.seed;
  if (o.kind == "chain") {
    kg = synth::chain();
  } else if (o.kind == "franchise") {
    synth::FranchiseOptions f;
    f.franchises = o.franchises;
    f.films_per = o.films_per;
    f.standalone = o.standalone;
    f.seed = seed;
    kg = synth::franchise(f);
  } else if (o.kind == "regular") {
    synth::RegularOptions r;
    if (o.films != 0) r.films = o.films;
    r.seed = seed;
    kg = synth::regular(r);
  } else if (o.kind == "relevance") {
    synth::RelevanceOptions r;
    if (o.films != 0) r.films = o.films;
    r.seed = seed;
    kg = synth::relevance(r);
  } else if (o.kind == "mixed") {
    synth::MixedOptions m;
    if (o.films != 0) m.films = o.films;
    m.seed = seed;
    kg = synth::mixed(m);
  } else {
    synth::DenseOptions d;
    if (o.films != 0) d.films = o.films;
    d.seed = seed;
    kg = synth::dense(d);
  }

  const Graph g = kg.build();
  {
    auto out = open_output(o.output);
    kg.write(out);
  }
  ojson notes(kg.notes);
  write_meta(o.output, run, g.checksum(), {{"kind", o.kind}, {"type", kg.type_iri}, {"parameters", notes}});
  run.out << "triples " << g.triple_count() << '\n' << "type " << kg.type_iri << '\n';
  if (!kg.truth.empty()) {
    const std::string truth_path = o.truth.empty() ? o.output + ".truth.json" : o.truth;
    {
      auto out = open_output(truth_path);
      save_ground_truth(kg.truth, out);
    }
    write_meta(truth_path, run, g.checksum(), {{"kind", o.kind}, {"queries", kg.truth.size()}});
    run.out << "truth " << truth_path << " (" << kg.truth.size() << " queries)\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> names = {"ingest", "pagerank", "specificity", "walk",   "train",
                                          "recommend", "eval",   "sensitivity", "synth"};
  CLI::App app{"Specificity-guided random walks and embeddings for RDF knowledge graphs", "kgwalk"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.config_formatter(std::make_shared<JsonConfig>(names));
  app.set_config("--config", "", "JSON file with option values; flags given on the command line win");

  IngestOptions ingest;
  PageRankCommand pagerank;
  SpecificityCommand specificity;
  WalkCommand walk;
  TrainCommand trainer;
  RecommendCommand recommend;
  EvalCommand eval;
  SensitivityCommand sensitivity;
  SynthCommand synthesize;
  std::map<std::string, std::pair<CLI::App*, const Common*>> subs;
  std::map<std::string, std::function<int(Run&)>> runners;

  {
    auto* sub = app.add_subcommand("ingest", "Parse N-Triples into a binary snapshot");
    add_common(sub, ingest.common);
    sub->add_option("--input", ingest.input, "N-Triples (.nt, .nt.gz) or TSV edge list")->required();
    sub->add_option("--output", ingest.output, "Snapshot path")->required();
    sub->add_option("--type-predicate", ingest.type_predicate, "IRI used for type assertions")->capture_default_str();
    sub->add_flag("--strict", ingest.strict, "Abort on the first malformed line");
    subs["ingest"] = {sub, &ingest.common};
    runners["ingest"] = [&](Run& r) { return run_ingest(r, ingest); };
  }
  {
    auto* sub = app.add_subcommand("pagerank", "Compute PageRank scores by power iteration");
    add_common(sub, pagerank.common);
    add_graph_options(sub, pagerank.graph, pagerank.type_predicate, pagerank.strict);
    sub->add_option("--output", pagerank.output, "Score TSV")->required();
    sub->add_option("--damping", pagerank.damping)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--epsilon", pagerank.epsilon)->capture_default_str();
    sub->add_option("--max-iters", pagerank.max_iters)->capture_default_str();
    subs["pagerank"] = {sub, &pagerank.common};
    runners["pagerank"] = [&](Run& r) { return run_pagerank(r, pagerank); };
  }
  {
    auto& s = specificity;
    auto* sub = app.add_subcommand("specificity", "Rank relationships by specificity to a type");
    add_common(sub, s.common);
    add_graph_options(sub, s.graph, s.type_predicate, s.strict);
    sub->add_option("--type", s.type, "Target type IRI")->required();
    sub->add_option("--output", s.output, "Specificity table TSV")->required();
    sub->add_option("--seed-set-size", s.seed_set, "Seed entities per run, or 'all'")->capture_default_str();
    sub->add_option("--walks", s.walks, "Bidirectional walks per relationship")->capture_default_str();
    sub->add_option("--candidates", s.candidates, "Candidates per depth unit (depth i scores candidates * i)")
        ->capture_default_str();
    sub->add_option("--max-depth", s.max_depth)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--threshold", s.threshold)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--retry-limit", s.retry_limit, "Fresh seeds tried when a forward walk dead-ends")
        ->capture_default_str();
    sub->add_flag("--exact", s.exact, "Score candidates exhaustively instead of by random walks");
    sub->add_option("--selection", s.selection, "Candidate selection at depth >= 2")
        ->capture_default_str()
        ->check(CLI::IsMember({"extend", "scratch"}));
    sub->add_option("--selection-samples", s.selection_samples)->capture_default_str();
    sub->add_flag("--type-edges-in-templates", s.type_edges, "Allow the type predicate inside relationships");
    sub->add_option("--relevance", s.relevance, "Also write a specificity/PageRank/frequency comparison CSV");
    sub->add_option("--pagerank", s.pagerank, "Score TSV for the relevance comparison");
    subs["specificity"] = {sub, &s.common};
    runners["specificity"] = [&](Run& r) { return run_specificity(r, specificity); };
  }
  {
    auto& w = walk;
    auto* sub = app.add_subcommand("walk", "Extract walk corpora for entities");
    add_common(sub, w.common);
    add_graph_options(sub, w.graph, w.type_predicate, w.strict);
    sub->add_option("--output", w.output, "Corpus file")->required();
    sub->add_option("--stats", w.stats, "Per-entity statistics CSV (default: <output>.stats.csv)");
    sub->add_option("--type", w.type, "Walk from every instance of this type");
    sub->add_option("--entities", w.entities, "File with one entity IRI per line");
    sub->add_option("--bias", w.bias)
        ->capture_default_str()
        ->check(CLI::IsMember({"uniform", "frequency", "pagerank", "specificity"}));
    sub->add_option("--pruning", w.pruning)
        ->capture_default_str()
        ->check(CLI::IsMember({"none", "nrse", "ue", "nrst", "uet"}, CLI::ignore_case));
    sub->add_option("--depth", w.depth)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--walks-per-entity", w.walks_per_entity, "Attempts per entity")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--table", w.table, "Specificity table TSV (specificity bias)");
    sub->add_option("--threshold", w.threshold, "Minimum score of usable relationships")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--pagerank", w.pagerank, "Score TSV (pagerank bias)");
    sub->add_flag("--no-depth1", w.no_depth1, "Do not prepend depth-1 walks to deeper corpora");
    subs["walk"] = {sub, &w.common};
    runners["walk"] = [&](Run& r) { return run_walk(r, walk); };
  }
  {
    auto& t = trainer;
    auto* sub = app.add_subcommand("train", "Train skip-gram embeddings on walk corpora");
    add_common(sub, t.common);
    sub->add_option("--corpus", t.corpus, "Corpus file(s)")->required();
    sub->add_option("--output", t.output, "Vectors in word2vec text format")->required();
    sub->add_option("--dim", t.dim)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--window", t.window)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--negatives", t.negatives)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--epochs", t.epochs)->capture_default_str();
    sub->add_option("--learning-rate", t.learning_rate)->capture_default_str();
    sub->add_option("--min-count", t.min_count)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--power", t.power, "Unigram exponent for negative sampling")->capture_default_str();
    sub->add_option("--subsample", t.subsample, "Frequent-token subsampling threshold (0 disables)")
        ->capture_default_str();
    subs["train"] = {sub, &t.common};
    runners["train"] = [&](Run& r) { return run_train(r, trainer); };
  }
  {
    auto& rc = recommend;
    auto* sub = app.add_subcommand("recommend", "Most similar entities by cosine similarity");
    add_common(sub, rc.common);
    sub->add_option("--vectors", rc.vectors)->required();
    sub->add_option("--query", rc.queries, "Query IRI(s)")->required();
    sub->add_option("--k", rc.k)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--graph", rc.graph, "Graph used to restrict candidates to --type");
    sub->add_option("--type", rc.type);
    sub->add_option("--type-predicate", rc.type_predicate)->capture_default_str();
    sub->add_option("--output", rc.output, "CSV path (default: stdout)");
    subs["recommend"] = {sub, &rc.common};
    runners["recommend"] = [&](Run& r) { return run_recommend(r, recommend); };
  }
  {
    auto& e = eval;
    auto* sub = app.add_subcommand("eval", "Precision@k of recommendations against a ground truth");
    add_common(sub, e.common);
    sub->add_option("--vectors", e.vectors, "Vectors file(s), one per scheme")->required();
    sub->add_option("--scheme", e.schemes, "Scheme label per vectors file");
    sub->add_option("--depth", e.depths, "Depth label, once or per vectors file");
    sub->add_option("--truth", e.truth, "Ground truth JSON")->required();
    sub->add_option("--k", e.k, "Cut-off (default: size of each relevant set)");
    sub->add_flag("--allow-mismatch", e.allow_mismatch, "Permit k different from the relevant set size");
    sub->add_option("--graph", e.graph, "Graph used to restrict candidates to --type");
    sub->add_option("--type", e.type);
    sub->add_option("--type-predicate", e.type_predicate)->capture_default_str();
    sub->add_option("--output", e.output, "CSV path (default: stdout)");
    subs["eval"] = {sub, &e.common};
    runners["eval"] = [&](Run& r) { return run_eval(r, eval); };
  }
  {
    auto& s = sensitivity;
    auto* sub = app.add_subcommand("sensitivity", "NDCG of specificity rankings across N_walks or |S|");
    add_common(sub, s.common);
    add_graph_options(sub, s.graph, s.type_predicate, s.strict);
    sub->add_option("--type", s.type)->required();
    sub->add_option("--output", s.output, "CSV path")->required();
    sub->add_option("--sweep", s.sweep)->capture_default_str()->check(CLI::IsMember({"walks", "seeds"}));
    sub->add_option("--values", s.values, "Sweep values (default 100 500 2000 5000, or 50 300 all)");
    sub->add_option("--fixed-walks", s.fixed_walks, "N_walks while sweeping |S|")->capture_default_str();
    sub->add_option("--fixed-seed-set", s.fixed_seed_set, "|S| while sweeping N_walks")->capture_default_str();
    sub->add_option("--repeats", s.repeats)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--candidates", s.candidates)->capture_default_str();
    sub->add_option("--max-depth", s.max_depth)->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--threshold", s.threshold)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--retry-limit", s.retry_limit)->capture_default_str();
    subs["sensitivity"] = {sub, &s.common};
    runners["sensitivity"] = [&](Run& r) { return run_sensitivity(r, sensitivity); };
  }
  {
    auto& s = synthesize;
    auto* sub = app.add_subcommand("synth", "Generate synthetic graphs with planted structure");
    add_common(sub, s.common);
    sub->add_option("--kind", s.kind)
        ->capture_default_str()
        ->check(CLI::IsMember({"chain", "franchise", "regular", "relevance", "mixed", "dense"}));
    sub->add_option("--output", s.output, "N-Triples path")->required();
    sub->add_option("--truth", s.truth, "Ground truth JSON (default: <output>.truth.json)");
    sub->add_option("--franchises", s.franchises)->capture_default_str();
    sub->add_option("--films-per", s.films_per)->capture_default_str();
    sub->add_option("--standalone", s.standalone)->capture_default_str();
    sub->add_option("--films", s.films, "Film count for the regular, relevance, mixed and dense kinds");
    subs["synth"] = {sub, &s.common};
    runners["synth"] = [&](Run& r) { return run_synth(r, synthesize); };
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& [name, entry] : subs) {
    auto* sub = entry.first;
    if (!app.got_subcommand(sub)) continue;
    Run run{out, err, name, *entry.second, hex64(fnv1a(sub->config_to_str(true, false)))};
    try {
      return runners.at(name)(run);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitData;
    }
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace kgwalk::cli
