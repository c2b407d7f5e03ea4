#pragma once

#include <filesystem>
#include <iosfwd>

#include "kgwalk/graph.hpp"

namespace kgwalk {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Binary graph snapshot; layout documented in docs/snapshot-format.md.
void write_snapshot(const Graph& g, std::ostream& out);
Graph read_snapshot(std::istream& in);

void save_snapshot(const Graph& g, const std::filesystem::path& path);
Graph load_snapshot(const std::filesystem::path& path);

}  // namespace kgwalk
