#pragma once

#include "threatnet/graph.hpp"
#include "threatnet/observation.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace threatnet::io {

/// Maps external string identifiers to dense vertex indices in order of first
/// appearance. Persisted as CSV `index,id`.
class SymbolTable {
 public:
  Vertex intern(std::string_view id);
  std::optional<Vertex> find(std::string_view id) const;
  /// Throws InputError for unknown ids.
  Vertex at(std::string_view id) const;
  const std::string& name(Vertex v) const { return names_.at(v); }
  std::size_t size() const noexcept { return names_.size(); }

  /// Identity table "0".."n-1".
  static SymbolTable identity(std::size_t n);

  void save(const std::filesystem::path& path) const;
  static SymbolTable load(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Vertex> index_;
};

/// Split one CSV line. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a finite double; throws InputError mentioning `what` on failure.
double parse_double(std::string_view text, std::string_view what);

/// Rows of a CSV file keyed by header name. Blank lines and lines starting with
/// '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  /// Column index or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

struct EdgeList {
  std::vector<EdgeRecord> records;
  SymbolTable symbols;
};

/// Edge CSV with header `src,dst[,weight][,t_src,t_dst]`. Empty time fields
/// denote static edges. When `symbols` is given, ids resolve through it (and
/// new ids are appended); otherwise a fresh table is built.
EdgeList read_edge_csv(const std::filesystem::path& path, SymbolTable symbols = {});

/// Writes the graph's links (unmerged, with time stamps) in edge CSV format.
void write_edge_csv(const std::filesystem::path& path, const Graph& g, const SymbolTable& symbols,
                    std::string_view comment = {});

/// Observations: `vertex,p` or `vertex,t,p` (empty t means untimed).
ObservationSet read_observations_csv(const std::filesystem::path& path, const SymbolTable& symbols);

/// `vertex,<column>` with one row per vertex.
void write_vertex_values(const std::filesystem::path& path, std::string_view column,
                         std::span<const double> values, const SymbolTable& symbols,
                         std::string_view comment = {});

std::vector<double> read_vertex_values(const std::filesystem::path& path, std::string_view column,
                                       const SymbolTable& symbols);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// Opens `path` for writing (creating parent directories) or throws InputError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace threatnet::io
