#include "kgwalk/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace kgwalk {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'W', 'S', 'N', 'A', 'P', '\0'};
constexpr std::uint32_t kByteOrderMark = 0x01020304;

template <class T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
void put_vector(std::ostream& out, const std::vector<T>& v) {
  put<std::uint64_t>(out, v.size());
  if (!v.empty()) out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("truncated snapshot");
  return value;
}

template <class T>
std::vector<T> get_vector(std::istream& in, std::uint64_t limit) {
  const auto n = get<std::uint64_t>(in);
  if (n > limit) throw DataError("corrupt snapshot: array length out of range");
  std::vector<T> v(n);
  if (n > 0) in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw DataError("truncated snapshot");
  return v;
}

void check_offsets(const std::vector<std::uint64_t>& offsets, std::size_t expected_size, std::uint64_t total) {
  if (offsets.size() != expected_size || offsets.front() != 0 || offsets.back() != total) {
    throw DataError("corrupt snapshot: inconsistent offsets");
  }
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (offsets[i] < offsets[i - 1]) throw DataError("corrupt snapshot: offsets not monotone");
  }
}

}  // namespace

void write_snapshot(const Graph& g, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, kByteOrderMark);
  put<std::uint64_t>(out, g.type_predicate_iri_.size());
  out.write(g.type_predicate_iri_.data(), static_cast<std::streamsize>(g.type_predicate_iri_.size()));
  put_vector(out, g.term_offsets_);
  put_vector(out, g.term_data_);
  put_vector(out, g.literal_);
  put_vector(out, g.out_offsets_);
  put_vector(out, g.out_edges_);
  put_vector(out, g.in_offsets_);
  put_vector(out, g.in_edges_);
  put<std::uint64_t>(out, std::stoull(g.checksum_, nullptr, 16));
  if (!out) throw DataError("failed to write snapshot");
}

Graph read_snapshot(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw DataError("not a kgwalk snapshot");
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) throw DataError("unsupported snapshot version " + std::to_string(version));
  if (get<std::uint32_t>(in) != kByteOrderMark) throw DataError("snapshot byte order does not match this machine");

  constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
  Graph g;
  const auto iri_size = get<std::uint64_t>(in);
  if (iri_size > (1u << 20)) throw DataError("corrupt snapshot: type predicate too long");
  g.type_predicate_iri_.resize(iri_size);
  in.read(g.type_predicate_iri_.data(), static_cast<std::streamsize>(iri_size));
  g.term_offsets_ = get_vector<std::uint64_t>(in, kLimit);
  g.term_data_ = get_vector<char>(in, kLimit);
  g.literal_ = get_vector<std::uint8_t>(in, kLimit);
  g.out_offsets_ = get_vector<std::uint64_t>(in, kLimit);
  g.out_edges_ = get_vector<Edge>(in, kLimit);
  g.in_offsets_ = get_vector<std::uint64_t>(in, kLimit);
  g.in_edges_ = get_vector<Edge>(in, kLimit);
  const auto stored = get<std::uint64_t>(in);

  if (g.term_offsets_.empty()) throw DataError("corrupt snapshot: empty term table");
  const std::size_t n = g.term_offsets_.size() - 1;
  check_offsets(g.term_offsets_, n + 1, g.term_data_.size());
  if (g.literal_.size() != n || g.in_edges_.size() != g.out_edges_.size()) {
    throw DataError("corrupt snapshot: array sizes disagree");
  }
  check_offsets(g.out_offsets_, n + 1, g.out_edges_.size());
  check_offsets(g.in_offsets_, n + 1, g.in_edges_.size());
  for (const auto* edges : {&g.out_edges_, &g.in_edges_}) {
    for (const Edge& e : *edges) {
      if (e.predicate.value >= n || e.node.value >= n) throw DataError("corrupt snapshot: edge out of range");
    }
  }

  g.finalize();
  if (std::stoull(g.checksum_, nullptr, 16) != stored) throw DataError("snapshot checksum mismatch");
  return g;
}

void save_snapshot(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_snapshot(g, out);
}

Graph load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace kgwalk
