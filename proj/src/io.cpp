#include "threatnet/io.hpp"

#include "threatnet/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace threatnet::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return fmt::format("{}:{}", path.string(), line);
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\n") != std::string_view::npos;
}

std::string csv_field(std::string_view s) {
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_comment(std::ofstream& out, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
}

}  // namespace

Vertex SymbolTable::intern(std::string_view id) {
  std::string key(id);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const Vertex v = names_.size();
  names_.push_back(key);
  index_.emplace(std::move(key), v);
  return v;
}

std::optional<Vertex> SymbolTable::find(std::string_view id) const {
  if (auto it = index_.find(std::string(id)); it != index_.end()) return it->second;
  return std::nullopt;
}

Vertex SymbolTable::at(std::string_view id) const {
  if (auto v = find(id)) return *v;
  throw InputError("unknown vertex id: " + std::string(id));
}

SymbolTable SymbolTable::identity(std::size_t n) {
  SymbolTable t;
  for (std::size_t v = 0; v < n; ++v) t.intern(std::to_string(v));
  return t;
}

void SymbolTable::save(const std::filesystem::path& path) const {
  auto out = open_output(path);
  out << "index,id\n";
  for (std::size_t v = 0; v < names_.size(); ++v) out << v << ',' << csv_field(names_[v]) << '\n';
}

SymbolTable SymbolTable::load(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  const auto ci = csv.require("index");
  const auto cid = csv.require("id");
  SymbolTable t;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const Vertex v = t.intern(row.at(cid));
    if (std::to_string(v) != row.at(ci)) {
      throw InputError(where(path, csv.line_numbers[r]) + ": symbol table indices must be dense and ordered");
    }
  }
  return t;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw InputError("unterminated quote in CSV line");
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InputError(fmt::format("bad number for {}: '{}'", what, s));
  }
  return value;
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::require(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw InputError("CSV is missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(line);
    } catch (const InputError& e) {
      throw InputError(where(path, number) + ": " + e.what());
    }
    if (!have_header) {
      table.header = std::move(fields);
      std::set<std::string> seen;
      for (const auto& h : table.header) {
        if (!seen.insert(h).second) throw InputError(where(path, number) + ": duplicate column " + h);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw InputError(fmt::format("{}: expected {} fields, found {}", where(path, number),
                                   table.header.size(), fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(number);
  }
  if (!have_header) throw InputError(path.string() + ": missing CSV header");
  return table;
}

EdgeList read_edge_csv(const std::filesystem::path& path, SymbolTable symbols) {
  const CsvTable csv = read_csv(path);
  const auto csrc = csv.require("src");
  const auto cdst = csv.require("dst");
  const auto cw = csv.column("weight");
  const auto cts = csv.column("t_src");
  const auto ctd = csv.column("t_dst");
  if (cts.has_value() != ctd.has_value()) {
    throw InputError(path.string() + ": t_src and t_dst columns must appear together");
  }
  EdgeList out;
  out.records.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const auto loc = where(path, csv.line_numbers[r]);
    if (row[csrc].empty() || row[cdst].empty()) throw InputError(loc + ": empty vertex id");
    EdgeRecord rec;
    rec.src = symbols.intern(row[csrc]);
    rec.dst = symbols.intern(row[cdst]);
    try {
      if (cw && !row[*cw].empty()) rec.weight = parse_double(row[*cw], "weight");
      if (cts) {
        const bool has_s = !row[*cts].empty();
        const bool has_d = !row[*ctd].empty();
        if (has_s != has_d) throw InputError("time stamp given at only one endpoint");
        if (has_s) {
          rec.t_src = parse_double(row[*cts], "t_src");
          rec.t_dst = parse_double(row[*ctd], "t_dst");
        }
      }
    } catch (const InputError& e) {
      throw InputError(loc + ": " + e.what());
    }
    if (rec.weight < 0.0) throw InputError(loc + ": negative weight");
    out.records.push_back(rec);
  }
  out.symbols = std::move(symbols);
  return out;
}

void write_edge_csv(const std::filesystem::path& path, const Graph& g, const SymbolTable& symbols,
                    std::string_view comment) {
  auto out = open_output(path);
  write_comment(out, comment);
  out << "src,dst,weight,t_src,t_dst\n";
  for (const auto& l : g.links()) {
    out << csv_field(symbols.name(l.u)) << ',' << csv_field(symbols.name(l.v)) << ','
        << format_double(l.weight) << ',';
    if (l.times) out << format_double(l.times->first) << ',' << format_double(l.times->second);
    else out << ',';
    out << '\n';
  }
}

ObservationSet read_observations_csv(const std::filesystem::path& path, const SymbolTable& symbols) {
  const CsvTable csv = read_csv(path);
  const auto cv = csv.require("vertex");
  const auto cp = csv.require("p");
  const auto ct = csv.column("t");
  std::vector<Observation> entries;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const auto loc = where(path, csv.line_numbers[r]);
    try {
      Observation o;
      o.vertex = symbols.at(row[cv]);
      o.probability = parse_double(row[cp], "p");
      if (ct && !row[*ct].empty()) o.time = parse_double(row[*ct], "t");
      if (!(o.probability >= 0.0 && o.probability <= 1.0)) throw InputError("p outside [0, 1]");
      entries.push_back(o);
    } catch (const InputError& e) {
      throw InputError(loc + ": " + e.what());
    }
  }
  if (entries.empty()) throw InputError(path.string() + ": no observations");
  return ObservationSet(std::move(entries));
}

void write_vertex_values(const std::filesystem::path& path, std::string_view column,
                         std::span<const double> values, const SymbolTable& symbols,
                         std::string_view comment) {
  auto out = open_output(path);
  write_comment(out, comment);
  out << "vertex," << column << '\n';
  for (std::size_t v = 0; v < values.size(); ++v) {
    out << csv_field(symbols.name(v)) << ',' << format_double(values[v]) << '\n';
  }
}

std::vector<double> read_vertex_values(const std::filesystem::path& path, std::string_view column,
                                       const SymbolTable& symbols) {
  const CsvTable csv = read_csv(path);
  const auto cv = csv.require("vertex");
  const auto cx = csv.require(column);
  std::vector<double> values(symbols.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    values.at(symbols.at(row[cv])) = parse_double(row[cx], column);
  }
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (std::isnan(values[v])) {
      throw InputError(path.string() + ": missing value for vertex " + symbols.name(v));
    }
  }
  return values;
}

std::string format_double(double x) { return fmt::format("{}", x); }

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace threatnet::io
