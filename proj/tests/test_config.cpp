#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "ppgcoop/config.hpp"
#include "ppgcoop/errors.hpp"

using namespace ppgcoop;

namespace {

SimConfig from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const std::filesystem::path kConfigs = std::filesystem::path(PPGCOOP_SOURCE_DIR) / "configs";

}  // namespace

TEST_CASE("defaults describe the 4x6 reference deployment") {
  const SimConfig c;
  CHECK(c.bs_count() == 24);
  CHECK(c.on_grid_ids.size() == 5);
  CHECK(c.low_threshold_J() == doctest::Approx(147e3));
  CHECK(c.up_threshold_J() == doctest::Approx(343e3));
  CHECK(c.mini_slots_per_slot() == 12);
  CHECK(c.link_power_W() == 20e3);
  CHECK(c.slots_per_day() == 1440);
  CHECK(c.max_feasible_mini_slots() == 11);
  CHECK(c.harvest_multiplier(3) == 1.0);
  CHECK(c.initial_level_J(3) == doctest::Approx(245e3));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("shipped table config equals the built-in defaults") {
  const auto c = load_config(kConfigs / "table1.cfg");
  SimConfig d;
  d.base_dir = c.base_dir;
  CHECK(config_to_string(c) == config_to_string(d));
}

TEST_CASE("parsing sets fields, lists and comments") {
  const auto c = from_text(
    "# comment\n"
    "grid_rows = 3\n"
    "  on_grid_ids = 1, 2 ,4\n"
    "policy = radial\n"
    "theorem_target_J = 5000\n"
    "harvest_file = data/h.csv\n");
  CHECK(c.grid_rows == 3);
  CHECK(c.on_grid_ids == std::vector<int>{1, 2, 4});
  CHECK(c.policy == Policy::Radial);
  CHECK(c.theorem_target_J == 5000.0);
  CHECK(c.harvest_file == "data/h.csv");
  CHECK(from_text("on_grid_ids =\n").on_grid_ids.empty());
}

TEST_CASE("parse errors name the source line") {
  CHECK_THROWS_WITH_AS(from_text("\nbogus_key = 1\n"), doctest::Contains("<config>:2"), ConfigError);
  CHECK_THROWS_AS(from_text("grid_rows 3\n"), ConfigError);
  CHECK_THROWS_AS(from_text("grid_rows = three\n"), ConfigError);
  CHECK_THROWS_AS(from_text("policy = best\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent.cfg"), ConfigError);
}

TEST_CASE("validation rejects inconsistent settings") {
  const auto invalid = [](auto mutate) {
    SimConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  invalid([](SimConfig& c) { c.on_grid_ids = {24}; });
  invalid([](SimConfig& c) { c.on_grid_ids = {1, 1}; });
  invalid([](SimConfig& c) { c.mini_slot_duration_s = 7; });
  invalid([](SimConfig& c) { c.low_threshold_fraction = 0.8; });
  invalid([](SimConfig& c) { c.phi_max_J = 0; });
  invalid([](SimConfig& c) { c.lambda = -1; });
  invalid([](SimConfig& c) { c.harvest_multipliers = {1, 2}; });
  invalid([](SimConfig& c) { c.initial_fill_fractions = std::vector<double>(24, 1.5); });
  invalid([](SimConfig& c) { c.synthetic_sample_period_s = 7; });
  invalid([](SimConfig& c) { c.vue_speed_min_mps = 40; });
  invalid([](SimConfig& c) { c.dc_voltage_V = 40; });  // loss per hop above one
}

TEST_CASE("text form round-trips every field") {
  SimConfig c = load_config(kConfigs / "reference.cfg");
  c.theorem_target_J = 1234.5;
  c.initial_fill_fractions = std::vector<double>(24, 0.25);
  c.lambda = 0.1 + 0.2;  // not exactly representable
  c.clusters_file = "a/b.csv";
  std::istringstream in(config_to_string(c));
  const auto back = parse_config(in);
  CHECK(config_to_string(back) == config_to_string(c));
  CHECK(back.lambda == c.lambda);
  CHECK(back.harvest_multipliers == c.harvest_multipliers);
}

TEST_CASE("summary echo rebuilds the configuration") {
  SimConfig c;
  c.seed = 99;
  c.policy = Policy::Random;
  std::ostringstream summary;
  summary << "policy = random\ntotal_delivered_J = 1\n";
  write_config(summary, c, "config.");
  std::istringstream in(summary.str());
  CHECK(config_to_string(config_from_summary(in)) == config_to_string(c));
}

TEST_CASE("set_config_value rejects unknown keys") {
  SimConfig c;
  set_config_value(c, "seed", "11");
  CHECK(c.seed == 11);
  CHECK_THROWS_AS(set_config_value(c, "colour", "red"), ConfigError);
}
