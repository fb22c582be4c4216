#include <doctest.h>

#include <cmath>

#include "ppgcoop/mobility.hpp"

using namespace ppgcoop;

TEST_CASE("member offsets stay inside the disc and fill it uniformly") {
  Rng rng(2024);
  int inner = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = draw_offset(20.0, rng);
    const double r = std::hypot(p.x, p.y);
    REQUIRE(r <= 20.0);
    if (r <= 10.0) ++inner;
  }
  // Area share of the inner half-radius disc is one quarter.
  CHECK(std::abs(inner / 10000.0 - 0.25) < 0.02);
}

TEST_CASE("groups alternate lanes with speeds in range") {
  HighwayParams hp;
  Rng rng(1);
  const auto groups = init_groups(hp, rng);
  REQUIRE(groups.size() == 10);
  for (const auto& g : groups) {
    CHECK(g.lane == g.group_id % 2);
    const double speed = std::abs(g.velocity_mps);
    CHECK(speed >= 10.0);
    CHECK(speed <= 30.0);
    CHECK((g.lane == 0) == (g.velocity_mps > 0));
    CHECK(g.reference.y == hp.highway_y_m + g.lane * hp.lane_separation_m);
    CHECK(g.member_offsets.size() == 1);
  }
  CHECK(groups[1].reference.x == doctest::Approx(300.0));
}

TEST_CASE("reference point advances and wraps around") {
  HighwayParams hp;
  Rng rng(3);
  VueGroup g;
  g.reference = {2990.0, 600.0};
  g.velocity_mps = 20.0;
  g.member_offsets = {{0, 0}, {0, 0}};
  const auto n = rpgm_step(g, 60.0, hp, rng);
  CHECK(n.reference.x == doctest::Approx(1190.0));
  CHECK(n.reference.y == 600.0);
  CHECK(n.member_offsets.size() == 2);
  for (const auto& off : n.member_offsets) CHECK(std::hypot(off.x, off.y) <= hp.offset_radius_m);
  g.reference.x = 10.0;
  g.velocity_mps = -20.0;
  CHECK(rpgm_step(g, 60.0, hp, rng).reference.x == doctest::Approx(1810.0));
}

TEST_CASE("association picks the nearest station, ties to the lower id") {
  const Point bs[] = {{0, 0}, {100, 0}, {200, 0}};
  VueGroup a;
  a.reference = {50.0, 0.0};
  a.member_offsets = {{0, 0}, {140, 0}};
  VueGroup b;
  b.reference = {260.0, 0.0};
  b.member_offsets = {{0, 0}};
  const VueGroup groups[] = {a, b};
  const auto snap = association_set(groups, bs);
  CHECK(snap.per_vue == std::vector<int>{0, 2, 2});
  CHECK(snap.serving == std::vector<int>{0, 2});
  CHECK(association_set({}, bs).serving.empty());
}

TEST_CASE("mobility is reproducible for a fixed seed") {
  HighwayParams hp;
  Rng r1(77), r2(77);
  auto g1 = init_groups(hp, r1);
  auto g2 = init_groups(hp, r2);
  for (int t = 0; t < 50; ++t) {
    for (std::size_t i = 0; i < g1.size(); ++i) {
      g1[i] = rpgm_step(g1[i], 60, hp, r1);
      g2[i] = rpgm_step(g2[i], 60, hp, r2);
      REQUIRE(g1[i].member_position(0) == g2[i].member_position(0));
    }
  }
}

TEST_CASE("worked examples for movement and association") {
  HighwayParams hp;
  Rng rng(8);
  VueGroup g;
  g.reference = {100.0, 600.0};
  g.member_offsets = {{0, 0}};
  g.velocity_mps = 0.0;
  CHECK(rpgm_step(g, 60, hp, rng).reference == g.reference);
  g.velocity_mps = 10.0;
  CHECK(rpgm_step(g, 60, hp, rng).reference.x == doctest::Approx(700.0));

  std::vector<Point> bs;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 6; ++c) bs.push_back({c * 500.0, r * 500.0});
  VueGroup at;
  at.reference = bs[9];
  at.member_offsets = {{0, 0}};
  CHECK(association_set(std::vector<VueGroup>{at}, bs).per_vue == std::vector<int>{9});
  VueGroup mid;
  mid.reference = {2250.0, 0.0};  // halfway between BS 4 and BS 5
  mid.member_offsets = {{0, 0}};
  CHECK(association_set(std::vector<VueGroup>{mid}, bs).per_vue == std::vector<int>{4});
  std::vector<VueGroup> crowd(10, at);
  CHECK(association_set(crowd, bs).serving.size() == 1);
}
