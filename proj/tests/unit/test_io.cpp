#include "threatnet/error.hpp"
#include "threatnet/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace threatnet;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / "threatnet_io_test") {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

}  // namespace

TEST_CASE("CSV field splitting") {
  CHECK(io::split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(io::split_csv_line("\"x,y\",z") == std::vector<std::string>{"x,y", "z"});
  CHECK_THROWS_AS(io::split_csv_line("\"open,x"), InputError);
  CHECK(io::parse_double("2.5", "w") == 2.5);
  CHECK_THROWS_AS(io::parse_double("2.5x", "w"), InputError);
}

TEST_CASE("edge lists with string ids and time stamps") {
  TempDir tmp;
  const auto f = tmp.write("edges.csv", "# comment\nsrc,dst,weight,t_src,t_dst\nalice,bob,2,0.1,0.2\nbob,carol,,,\n");
  const auto el = io::read_edge_csv(f);
  REQUIRE(el.records.size() == 2);
  CHECK(el.symbols.size() == 3);
  CHECK(el.symbols.at("carol") == 2);
  CHECK(el.records[0].weight == 2.0);
  CHECK(el.records[0].t_src == 0.1);
  CHECK(el.records[1].weight == 1.0);
  CHECK_FALSE(el.records[1].t_src.has_value());

  const Graph g = build_graph(el.symbols.size(), el.records);
  io::write_edge_csv(tmp.path / "out.csv", g, el.symbols);
  const auto back = io::read_edge_csv(tmp.path / "out.csv", el.symbols);
  CHECK(back.records.size() == 2);
  CHECK(back.records[0].t_dst == 0.2);

  const auto obs = io::read_observations_csv(tmp.write("obs.csv", "vertex,p\ncarol,0.5\n"), el.symbols);
  CHECK(obs.entries()[0].vertex == 2);
  CHECK(obs.entries()[0].probability == 0.5);
  CHECK_THROWS_AS(io::read_observations_csv(tmp.write("bad.csv", "vertex,p\ndave,1\n"), el.symbols), InputError);

  const std::vector<double> values{0.25, 1.0 / 3.0, 1.0};
  io::write_vertex_values(tmp.path / "theta.csv", "theta", values, el.symbols);
  CHECK(io::read_vertex_values(tmp.path / "theta.csv", "theta", el.symbols) == values);
}

TEST_CASE("malformed edge files") {
  TempDir tmp;
  CHECK_THROWS_AS(io::read_edge_csv(tmp.write("a.csv", "u,v\n1,2\n")), InputError);
  CHECK_THROWS_AS(io::read_edge_csv(tmp.write("b.csv", "src,dst,weight\n1,2,-1\n")), InputError);
  CHECK_THROWS_AS(io::read_edge_csv(tmp.write("c.csv", "src,dst,t_src,t_dst\n1,2,0.5,\n")), InputError);
  CHECK_THROWS_AS(io::read_edge_csv(tmp.write("d.csv", "src,dst\n1,2,3\n")), InputError);
  CHECK_THROWS_AS(io::read_edge_csv(tmp.path / "missing.csv"), InputError);
}

TEST_CASE("symbol tables round trip") {
  TempDir tmp;
  io::SymbolTable s;
  CHECK(s.intern("x") == 0);
  CHECK(s.intern("y") == 1);
  CHECK(s.intern("x") == 0);
  s.save(tmp.path / "symbols.csv");
  const auto t = io::SymbolTable::load(tmp.path / "symbols.csv");
  CHECK(t.size() == 2);
  CHECK(t.name(1) == "y");
  CHECK_FALSE(t.find("z").has_value());
}
