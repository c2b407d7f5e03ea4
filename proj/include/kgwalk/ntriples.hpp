#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kgwalk/graph.hpp"

namespace kgwalk {

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : DataError("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  bool strict = false;  // abort on the first malformed line
  std::string type_predicate = std::string(kRdfType);
  std::size_t max_recorded_issues = 100;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseReport {
  std::size_t lines = 0;
  std::size_t parsed = 0;   // well-formed triple lines, duplicates included
  std::size_t skipped = 0;  // malformed lines
  std::size_t ignored = 0;  // blank and comment lines
  std::vector<ParseIssue> issues;
};

struct LoadedGraph {
  Graph graph;
  ParseReport report;
};

struct ParsedTriple {
  std::string_view subject;
  std::string_view predicate;
  std::string_view object;
};

/// Parses one N-Triples statement. Term views point into `line` and are in
/// canonical form. Returns false and fills `error` on malformed input.
bool parse_ntriples_line(std::string_view line, ParsedTriple& out, std::string& error);

LoadedGraph parse_ntriples(std::istream& in, const ParseOptions& options = {});

/// Tab separated `subject predicate object is_literal` rows with a header.
LoadedGraph parse_tsv_edges(std::istream& in, const ParseOptions& options = {});

/// Reads N-Triples (or TSV when the name ends in .tsv / .tsv.gz); names
/// ending in .gz are decompressed on the fly.
LoadedGraph load_graph_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Renders a canonical term in N-Triples syntax.
std::string ntriples_term(std::string_view term);

void write_ntriples(const Graph& g, std::ostream& out);
void write_tsv_edges(const Graph& g, std::ostream& out);

}  // namespace kgwalk
