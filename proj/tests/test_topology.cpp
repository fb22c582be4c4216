#include <doctest.h>

#include <cmath>
#include <queue>
#include <set>

#include "ppgcoop/errors.hpp"
#include "ppgcoop/topology.hpp"

using namespace ppgcoop;

namespace {

// Breadth-first distances over the link list only.
std::vector<int> bfs(const PpgGrid& g, int from) {
  std::vector<std::vector<int>> adj(g.node_count());
  for (const auto& l : g.links()) {
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }
  std::vector<int> dist(g.node_count(), -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

constexpr double kResistance = 0.023 * 100.0 / 10.0;       // 0.23 ohm
constexpr double kLoss = kResistance * 20e3 / (380.0 * 380.0);  // 20 kW on 380 V

}  // namespace

TEST_CASE("cable and loss values for the default deployment") {
  CHECK(line_resistance(0.023, 100, 10) == doctest::Approx(0.23).epsilon(1e-12));
  CHECK(per_hop_loss(0.23, 20e3, 380) == doctest::Approx(0.03185595567867036).epsilon(1e-12));
  PpgGrid g(4, 6);
  CHECK(g.resistance() == doctest::Approx(kResistance).epsilon(1e-12));
  CHECK(g.delivered_fraction(0, 20e3) == 1.0);
  CHECK(g.delivered_fraction(1, 20e3) == doctest::Approx(1 - kLoss).epsilon(1e-12));
  CHECK(g.delivered_fraction(2, 20e3) == doctest::Approx(0.9373028905548606).epsilon(1e-12));
  CHECK(g.delivered_fraction(5, 20e3) == doctest::Approx(std::pow(1 - kLoss, 5)).epsilon(1e-12));
}

TEST_CASE("invalid cable parameters") {
  CHECK_THROWS_AS(line_resistance(0, 100, 10), DomainError);
  CHECK_THROWS_AS(line_resistance(0.023, -1, 10), DomainError);
  CHECK_THROWS_AS(line_resistance(0.023, 100, 0), DomainError);
  CHECK_THROWS_AS(per_hop_loss(0.23, 20e3, 0), DomainError);
  // A link power that dissipates everything is rejected.
  PpgGrid g(2, 2);
  CHECK_THROWS_AS(g.delivered_fraction(1, 1e6), ConfigError);
  CHECK_THROWS_AS(g.delivered_fraction(-1, 20e3), DomainError);
}

TEST_CASE("grid construction and ids") {
  PpgGrid g(4, 6);
  CHECK(g.node_count() == 24);
  CHECK(g.links().size() == 4 * 5 + 3 * 6);
  CHECK(g.id_of({2, 3}) == 15);
  CHECK(g.node_of(15) == GridNode{2, 3});
  CHECK_THROWS_AS(g.node_of(24), DomainError);
  CHECK_THROWS_AS(g.id_of({4, 0}), DomainError);
  CHECK_THROWS_AS(PpgGrid(0, 3), ConfigError);
  for (const auto& l : g.links()) CHECK(l.a < l.b);
  CHECK(g.link_index(0, 1) == g.link_index(1, 0));
  CHECK_THROWS_AS(g.link_index(5, 6), RouteError);  // row wrap is not a link
  CHECK_THROWS_AS(g.link_index(0, 7), RouteError);
}

TEST_CASE("hop metric equals graph distance for every pair") {
  PpgGrid g(4, 6);
  for (int a = 0; a < g.node_count(); ++a) {
    const auto dist = bfs(g, a);
    for (int b = 0; b < g.node_count(); ++b) REQUIRE(g.hop_count(a, b) == dist[b]);
  }
}

TEST_CASE("static routes are shortest, contiguous and rows-first") {
  PpgGrid g(4, 6);
  for (int a = 0; a < g.node_count(); ++a) {
    for (int b = 0; b < g.node_count(); ++b) {
      if (a == b) continue;
      const auto r = g.static_route(g.node_of(a), g.node_of(b));
      REQUIRE(r.hop_count() == g.hop_count(a, b));
      REQUIRE(r.hops.front() == g.node_of(a));
      REQUIRE(r.hops.back() == g.node_of(b));
      const auto links = g.route_links(r);
      REQUIRE(links.size() == static_cast<std::size_t>(r.hop_count()));
      REQUIRE(std::set<std::size_t>(links.begin(), links.end()).size() == links.size());
      bool seen_col_move = false;
      for (std::size_t i = 1; i < r.hops.size(); ++i) {
        const bool col_move = r.hops[i].col != r.hops[i - 1].col;
        REQUIRE_FALSE((seen_col_move && !col_move));
        seen_col_move = seen_col_move || col_move;
      }
    }
  }
  CHECK_THROWS_AS(g.static_route({0, 0}, {0, 0}), RouteError);
  CHECK_THROWS_AS(g.static_route({0, 0}, {9, 0}), DomainError);
}

TEST_CASE("link schedule reservations") {
  LinkSchedule s(3);
  CHECK(s.is_free(0, {0, 12}));
  s.reserve_link(0, {0, 2}, 1);
  CHECK_FALSE(s.is_free(0, {1, 3}));
  CHECK(s.is_free(0, {2, 4}));
  CHECK_THROWS_AS(s.reserve_link(0, {1, 2}, 2), LinkBusyError);
  CHECK_THROWS_AS(s.reserve_link(1, {3, 3}, 2), DomainError);
  s.reserve_link(1, {0, 5}, 2);
  CHECK(s.earliest_common_start({0}, 1) == 2);
  CHECK(s.earliest_common_start({0, 1}, 1) == 5);
  CHECK(s.earliest_common_start({2}, 4) == 0);
  CHECK(s.earliest_common_start({0}, 1, 7) == 7);
  CHECK(s.release_link(1, 2));
  CHECK_FALSE(s.release_link(1, 2));
  CHECK(s.earliest_common_start({0, 1}, 1) == 2);
  s.clear();
  CHECK(s.reservations(0).empty());
  CHECK(MiniSlotRange{0, 2}.overlaps({1, 3}));
  CHECK_FALSE(MiniSlotRange{0, 2}.overlaps({2, 3}));
}

TEST_CASE("worked examples for distances, routes and reservations") {
  CHECK(line_resistance(0.046, 100, 10) == doctest::Approx(0.46).epsilon(1e-12));
  PpgGrid g(4, 6);
  CHECK(g.hop_count({0, 0}, {0, 1}) == 1);
  CHECK(g.hop_count({0, 0}, {3, 5}) == 8);
  CHECK(g.hop_count({1, 2}, {1, 2}) == 0);
  CHECK(g.static_route({0, 0}, {2, 0}).hops == std::vector<GridNode>{{0, 0}, {1, 0}, {2, 0}});
  CHECK(g.static_route({0, 0}, {1, 1}).hops == std::vector<GridNode>{{0, 0}, {1, 0}, {1, 1}});
  CHECK(std::round(g.delivered_fraction(1, 20e3) * 1e6) / 1e6 == 0.968144);
  CHECK(std::round(g.delivered_fraction(2, 20e3) * 1e6) / 1e6 == 0.937303);

  LinkSchedule s(1);
  CHECK_NOTHROW(s.reserve_link(0, {0, 3}, 1));
  CHECK_THROWS_AS(s.reserve_link(0, {2, 4}, 2), LinkBusyError);
  CHECK(s.release_link(0, 1));
  CHECK_NOTHROW(s.reserve_link(0, {2, 4}, 2));
}
