#include "threatnet/error.hpp"
#include "threatnet/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace threatnet;

namespace {

bool same_links(const Graph& a, const Graph& b, bool with_times) {
  if (a.links().size() != b.links().size()) return false;
  for (std::size_t i = 0; i < a.links().size(); ++i) {
    const auto& x = a.links()[i];
    const auto& y = b.links()[i];
    if (x.u != y.u || x.v != y.v || x.weight != y.weight) return false;
    if (with_times && x.times != y.times) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("reference SBM embeds the foreground into the third block") {
  const auto net = generate_sbm(sbm_reference(1.1), 12);
  CHECK(net.graph.order() == 256);
  CHECK(std::accumulate(net.truth.begin(), net.truth.end(), 0) == 30);
  CHECK(std::count(net.community.begin(), net.community.end(), 2) == 30);
  for (std::size_t v = 0; v < 256; ++v) CHECK((net.truth[v] == 1) == (net.community[v] == 2));
  CHECK(net.meta["generator"] == "sbm");
  CHECK(net.meta["seed"] == 12);

  // Coordinated foreground: every link inside the covert block carries one instant.
  std::set<double> instants;
  for (std::size_t i = 0; i < net.graph.links().size(); ++i) {
    if (!net.foreground_link(i)) continue;
    const auto& l = net.graph.links()[i];
    REQUIRE(l.times.has_value());
    CHECK(l.times->first == l.times->second);
    instants.insert(l.times->first);
  }
  CHECK(instants.size() == 1);
}

TEST_CASE("S = 0 generates no links") {
  SbmParams p;
  p.sizes = {10, 10};
  p.s = {{0.0, 0.0}, {0.0, 0.0}};
  CHECK(generate_sbm(p, 1).graph.size() == 0);
}

TEST_CASE("block densities match S") {
  SbmParams p;
  p.sizes = {20, 20, 20};
  p.s = {{0.3, 0.05, 0.1}, {0.05, 0.2, 0.05}, {0.1, 0.05, 0.5}};
  const std::size_t trials = 200;
  double count[3][3] = {};
  for (std::size_t t = 0; t < trials; ++t) {
    const auto net = generate_sbm(p, 1000 + t);
    for (const auto& e : net.graph.edges()) {
      auto a = static_cast<std::size_t>(net.community[e.u]);
      auto b = static_cast<std::size_t>(net.community[e.v]);
      if (a > b) std::swap(a, b);
      count[a][b] += 1.0;
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a; b < 3; ++b) {
      const double pairs = (a == b ? 20.0 * 19.0 / 2.0 : 400.0) * trials;
      const double mean = pairs * p.s[a][b];
      const double sd = std::sqrt(pairs * p.s[a][b] * (1.0 - p.s[a][b]));
      CHECK(std::abs(count[a][b] - mean) <= 3.0 * sd);
    }
  }
}

TEST_CASE("activity sets the diagonal to r log N / N") {
  SbmParams p;
  p.sizes = {50, 50};
  p.s = {{0.0, 0.0}, {0.0, 0.0}};
  p.activity = {1.0, 0.0};
  double links = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) links += static_cast<double>(generate_sbm(p, t).graph.size());
  const double prob = std::log(50.0) / 50.0;
  const double pairs = 50.0 * 49.0 / 2.0 * 200.0;
  CHECK(std::abs(links - pairs * prob) <= 3.0 * std::sqrt(pairs * prob * (1.0 - prob)));
}

TEST_CASE("generators do not depend on the thread schedule") {
  const auto a = generate_sbm(sbm_reference(2.0), 4, false);
  const auto b = generate_sbm(sbm_reference(2.0), 4, true);
  CHECK(same_links(a.graph, b.graph, true));
  const auto c = generate_hmmb(hmmb_reference(10.0), 4, false);
  const auto d = generate_hmmb(hmmb_reference(10.0), 4, true);
  CHECK(same_links(c.graph, d.graph, true));
  CHECK(c.truth == d.truth);
}

TEST_CASE("HMMB topology does not depend on the event pool size") {
  const auto a = generate_hmmb(hmmb_reference(1.0), 99);
  const auto b = generate_hmmb(hmmb_reference(24.0), 99);
  CHECK(a.graph.size() > 0);
  CHECK(same_links(a.graph, b.graph, false));
  CHECK(a.truth == b.truth);
  CHECK_FALSE(same_links(a.graph, b.graph, true));
}

TEST_CASE("HMMB stamps come from the community event pools") {
  const auto net = generate_hmmb(hmmb_reference(3.0), 7);
  const auto sizes = net.meta["event_pool_sizes"].get<std::vector<std::size_t>>();
  REQUIRE(sizes.size() == 10);
  for (auto s : sizes) CHECK(s >= 1);
  std::vector<std::set<double>> seen(10);
  for (std::size_t i = 0; i < net.graph.links().size(); ++i) {
    const auto& l = net.graph.links()[i];
    const auto [cu, cv] = net.link_community[i];
    REQUIRE(l.times.has_value());
    seen[static_cast<std::size_t>(cu)].insert(l.times->first);
    seen[static_cast<std::size_t>(cv)].insert(l.times->second);
  }
  for (std::size_t c = 0; c < 10; ++c) CHECK(seen[c].size() <= sizes[c]);
  const auto truth = std::accumulate(net.truth.begin(), net.truth.end(), 0);
  CHECK(truth > 0);
  CHECK(truth < 256);
}

TEST_CASE("HMMB with one block and one lifestyle") {
  HmmbParams p;
  p.n = 300;
  p.phi = {1.0};
  p.x = {{1.0}};
  p.b = {{1.0}};
  p.s = {{1.0}};
  p.gamma = {0.0};
  p.lambda_min = 5.0;
  const auto net = generate_hmmb(p, 3);
  CHECK(net.meta["event_pool_sizes"][0] == 1);
  // Expected total weight is at least of order n λ_min / 2.
  double total = 0.0;
  for (const auto& e : net.graph.edges()) total += e.weight;
  CHECK(total > 0.25 * 300 * 5.0);
  for (const auto& l : net.graph.links()) CHECK(l.times->first == l.times->second);
}

TEST_CASE("parameter validation") {
  auto p = hmmb_reference(1.0);
  p.x[0][0] = 0.0;
  CHECK_THROWS_AS(generate_hmmb(p, 1), InputError);
  p = hmmb_reference(1.0);
  p.phi[0] = 0.9;
  CHECK_THROWS_AS(generate_hmmb(p, 1), InputError);
  p = hmmb_reference(1.0);
  p.alpha = 1.0;
  CHECK_THROWS_AS(generate_hmmb(p, 1), InputError);
  auto s = sbm_reference(1.1);
  s.s[0][1] = 0.5;
  CHECK_THROWS_AS(generate_sbm(s, 1), InputError);
  s = sbm_reference(1.1);
  s.embed_count = 1000;
  CHECK_THROWS_AS(generate_sbm(s, 1), InputError);
}

TEST_CASE("JSON round trip of generator parameters") {
  const auto p = hmmb_reference(5.0);
  const auto q = hmmb_from_json(to_json(p));
  CHECK(q.gamma == p.gamma);
  CHECK(q.x == p.x);
  CHECK(q.lambda_min == p.lambda_min);
  const auto s = sbm_from_json(to_json(sbm_reference(2.0)));
  CHECK(s.s == sbm_reference(2.0).s);
}

TEST_CASE("Erdos-Renyi helper") {
  CHECK(erdos_renyi(20, 0.0, 1, false).size() == 0);
  CHECK(erdos_renyi(20, 1.0, 1, false).size() == 190);
  CHECK(is_connected(erdos_renyi(100, 0.05, 2, true)));
  CHECK_THROWS_AS(erdos_renyi(20, 1.5, 1), InputError);
}
