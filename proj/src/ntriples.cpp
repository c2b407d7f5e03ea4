#include "kgwalk/ntriples.hpp"

#include <zlib.h>

#include <array>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <streambuf>

namespace kgwalk {

namespace {

/// Read-only streambuf over a gzip file.
class GzInputBuffer : public std::streambuf {
 public:
  explicit GzInputBuffer(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw DataError("cannot open " + path.string());
    gzbuffer(file_, 1 << 17);
  }
  ~GzInputBuffer() override {
    if (file_ != nullptr) gzclose(file_);
  }
  GzInputBuffer(const GzInputBuffer&) = delete;
  GzInputBuffer& operator=(const GzInputBuffer&) = delete;

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const int n = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
    if (n < 0) {
      int code = 0;
      throw DataError(std::string("gzip read error: ") + gzerror(file_, &code));
    }
    if (n == 0) return traits_type::eof();
    setg(buffer_.data(), buffer_.data(), buffer_.data() + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_;
  std::array<char, 1 << 16> buffer_{};
};

bool is_space(char c) { return c == ' ' || c == '\t'; }

void skip_space(std::string_view s, std::size_t& i) {
  while (i < s.size() && is_space(s[i])) ++i;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

bool hex_run(std::string_view s, std::size_t at, std::size_t n) {
  if (at + n > s.size()) return false;
  for (std::size_t k = 0; k < n; ++k) {
    if (!is_hex(s[at + k])) return false;
  }
  return true;
}

// Parses `<iri>` starting at s[i]; the returned view excludes the brackets.
bool read_iri(std::string_view s, std::size_t& i, std::string_view& out, std::string& error) {
  const std::size_t start = i + 1;
  std::size_t j = start;
  for (; j < s.size() && s[j] != '>'; ++j) {
    const char c = s[j];
    if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`') {
      error = "invalid character in IRI";
      return false;
    }
    if (c == '\\') {
      if (j + 1 < s.size() && s[j + 1] == 'u' && hex_run(s, j + 2, 4)) {
        j += 5;
      } else if (j + 1 < s.size() && s[j + 1] == 'U' && hex_run(s, j + 2, 8)) {
        j += 9;
      } else {
        error = "invalid escape in IRI";
        return false;
      }
    }
  }
  if (j >= s.size()) {
    error = "unterminated IRI";
    return false;
  }
  out = s.substr(start, j - start);
  if (out.find(':') == std::string_view::npos) {
    error = "IRI is not absolute";
    return false;
  }
  i = j + 1;
  return true;
}

bool read_blank(std::string_view s, std::size_t& i, std::string_view& out, std::string& error) {
  std::size_t j = i + 2;
  while (j < s.size()) {
    const char c = s[j];
    const bool ok = is_alpha(c) || is_digit(c) || c == '_' || c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
    if (!ok) break;
    ++j;
  }
  // a label may not end in '.', which belongs to the statement terminator
  while (j > i + 2 && s[j - 1] == '.') --j;
  if (j == i + 2) {
    error = "empty blank node label";
    return false;
  }
  out = s.substr(i, j - i);
  i = j;
  return true;
}

bool read_literal(std::string_view s, std::size_t& i, std::string_view& out, std::string& error) {
  const std::size_t start = i;
  std::size_t j = i + 1;
  for (;; ++j) {
    if (j >= s.size()) {
      error = "unterminated literal";
      return false;
    }
    const char c = s[j];
    if (c == '"') break;
    if (c == '\\') {
      if (j + 1 >= s.size()) {
        error = "dangling escape in literal";
        return false;
      }
      const char e = s[j + 1];
      if (e == 't' || e == 'b' || e == 'n' || e == 'r' || e == 'f' || e == '"' || e == '\'' || e == '\\') {
        ++j;
      } else if (e == 'u' && hex_run(s, j + 2, 4)) {
        j += 5;
      } else if (e == 'U' && hex_run(s, j + 2, 8)) {
        j += 9;
      } else {
        error = "invalid escape in literal";
        return false;
      }
    }
  }
  j += 1;  // closing quote
  if (j < s.size() && s[j] == '@') {
    std::size_t k = j + 1;
    while (k < s.size() && is_alpha(s[k])) ++k;
    if (k == j + 1) {
      error = "empty language tag";
      return false;
    }
    while (k < s.size() && s[k] == '-') {
      const std::size_t sub = k + 1;
      k = sub;
      while (k < s.size() && (is_alpha(s[k]) || is_digit(s[k]))) ++k;
      if (k == sub) {
        error = "malformed language tag";
        return false;
      }
    }
    j = k;
  } else if (j + 1 < s.size() && s[j] == '^' && s[j + 1] == '^') {
    std::size_t k = j + 2;
    if (k >= s.size() || s[k] != '<') {
      error = "datatype must be an IRI";
      return false;
    }
    std::string_view datatype;
    if (!read_iri(s, k, datatype, error)) return false;
    j = k;
  }
  out = s.substr(start, j - start);
  i = j;
  return true;
}

bool read_term(std::string_view s, std::size_t& i, bool allow_blank, bool allow_literal, std::string_view& out,
               std::string& error) {
  if (i >= s.size()) {
    error = "unexpected end of line";
    return false;
  }
  if (s[i] == '<') return read_iri(s, i, out, error);
  if (allow_blank && s.substr(i, 2) == "_:") return read_blank(s, i, out, error);
  if (allow_literal && s[i] == '"') return read_literal(s, i, out, error);
  error = "unexpected character '" + std::string(1, s[i]) + "'";
  return false;
}

std::string_view trim_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

bool is_ignorable(std::string_view line) {
  std::size_t i = 0;
  skip_space(line, i);
  return i == line.size() || line[i] == '#';
}

class IssueLog {
 public:
  IssueLog(ParseReport& report, const ParseOptions& options) : report_(report), options_(options) {}

  void malformed(std::size_t line, std::string message) {
    if (options_.strict) throw ParseError(line, message);
    ++report_.skipped;
    if (report_.issues.size() < options_.max_recorded_issues) report_.issues.push_back({line, std::move(message)});
  }

 private:
  ParseReport& report_;
  const ParseOptions& options_;
};

void add_checked(GraphBuilder& builder, IssueLog& log, ParseReport& report, std::size_t line_no,
                 std::string_view s, std::string_view p, std::string_view o) {
  try {
    builder.add(s, p, o);
    ++report.parsed;
  } catch (const std::invalid_argument& e) {
    log.malformed(line_no, e.what());
  }
}

std::string quote_literal(std::string_view raw) {
  std::string out = "\"";
  for (char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

bool parse_ntriples_line(std::string_view line, ParsedTriple& out, std::string& error) {
  std::size_t i = 0;
  skip_space(line, i);
  if (!read_term(line, i, true, false, out.subject, error)) return false;
  if (i >= line.size() || !is_space(line[i])) {
    error = "expected whitespace after subject";
    return false;
  }
  skip_space(line, i);
  if (!read_term(line, i, false, false, out.predicate, error)) return false;
  skip_space(line, i);
  if (!read_term(line, i, true, true, out.object, error)) return false;
  skip_space(line, i);
  if (i >= line.size() || line[i] != '.') {
    error = "missing terminating '.'";
    return false;
  }
  ++i;
  skip_space(line, i);
  if (i < line.size() && line[i] != '#') {
    error = "trailing content after '.'";
    return false;
  }
  return true;
}

LoadedGraph parse_ntriples(std::istream& in, const ParseOptions& options) {
  ParseReport report;
  IssueLog log(report, options);
  GraphBuilder builder(options.type_predicate);
  std::string buffer;
  std::string error;
  while (std::getline(in, buffer)) {
    ++report.lines;
    const std::string_view line = trim_line(buffer);
    if (is_ignorable(line)) {
      ++report.ignored;
      continue;
    }
    ParsedTriple t;
    if (!parse_ntriples_line(line, t, error)) {
      log.malformed(report.lines, error);
      continue;
    }
    add_checked(builder, log, report, report.lines, t.subject, t.predicate, t.object);
  }
  return {std::move(builder).build(), std::move(report)};
}

LoadedGraph parse_tsv_edges(std::istream& in, const ParseOptions& options) {
  ParseReport report;
  IssueLog log(report, options);
  GraphBuilder builder(options.type_predicate);
  std::string buffer;
  while (std::getline(in, buffer)) {
    ++report.lines;
    const std::string_view line = trim_line(buffer);
    if (line.empty() || line.front() == '#' || (report.lines == 1 && line.starts_with("subject\t"))) {
      ++report.ignored;
      continue;
    }
    std::array<std::string_view, 4> fields{};
    std::size_t count = 0;
    std::size_t pos = 0;
    while (count < 4) {
      const auto tab = line.find('\t', pos);
      fields[count++] = line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos);
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (count != 4 || line.find('\t', pos) != std::string_view::npos) {
      log.malformed(report.lines, "expected 4 tab separated fields");
      continue;
    }
    const auto flag = fields[3];
    if (flag != "0" && flag != "1") {
      log.malformed(report.lines, "is_literal must be 0 or 1");
      continue;
    }
    std::string object(fields[2]);
    if (flag == "1" && !is_literal_form(object)) object = quote_literal(object);
    if (flag == "0" && is_literal_form(object)) {
      log.malformed(report.lines, "object looks like a literal but is_literal is 0");
      continue;
    }
    add_checked(builder, log, report, report.lines, strip_iri_brackets(fields[0]), strip_iri_brackets(fields[1]),
                flag == "1" ? std::string_view(object) : strip_iri_brackets(object));
  }
  return {std::move(builder).build(), std::move(report)};
}

LoadedGraph load_graph_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::string name = path.filename().string();
  const bool gz = name.ends_with(".gz");
  if (gz) name.resize(name.size() - 3);
  const bool tsv = name.ends_with(".tsv");

  std::unique_ptr<std::streambuf> gzbuf;
  std::ifstream file;
  std::istream* in = nullptr;
  std::istream gzstream(nullptr);
  if (gz) {
    gzbuf = std::make_unique<GzInputBuffer>(path);
    gzstream.rdbuf(gzbuf.get());
    in = &gzstream;
  } else {
    file.open(path, std::ios::binary);
    if (!file) throw DataError("cannot open " + path.string());
    in = &file;
  }
  return tsv ? parse_tsv_edges(*in, options) : parse_ntriples(*in, options);
}

std::string ntriples_term(std::string_view term) {
  if (is_literal_form(term) || is_blank_form(term)) return std::string(term);
  std::string out;
  out.reserve(term.size() + 2);
  out += '<';
  out += term;
  out += '>';
  return out;
}

void write_ntriples(const Graph& g, std::ostream& out) {
  g.for_each_triple([&](const Triple& t) {
    out << ntriples_term(g.term(t.subject)) << ' ' << ntriples_term(g.term(t.predicate)) << ' '
        << ntriples_term(g.term(t.object)) << " .\n";
  });
}

void write_tsv_edges(const Graph& g, std::ostream& out) {
  out << "subject\tpredicate\tobject\tis_literal\n";
  g.for_each_triple([&](const Triple& t) {
    out << g.term(t.subject) << '\t' << g.term(t.predicate) << '\t' << g.term(t.object) << '\t'
        << (g.is_literal(t.object) ? '1' : '0') << '\n';
  });
}

}  // namespace kgwalk
