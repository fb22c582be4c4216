#include "ppgcoop/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_scalar(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text));
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(fmt::format("{}: value must be finite", key));
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(parse_scalar<T>(key, text.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
std::string format_list(const std::vector<T>& v) {
  return fmt::format("{}", fmt::join(v, ","));
}

struct Field {
  std::string_view key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <typename T>
Field scalar(std::string_view key, T SimConfig::*member) {
  return {key,
          [key, member](SimConfig& c, std::string_view v) { c.*member = parse_scalar<T>(key, v); },
          [member](const SimConfig& c) { return fmt::format("{}", c.*member); }};
}

template <typename T>
Field list(std::string_view key, std::vector<T> SimConfig::*member) {
  return {key,
          [key, member](SimConfig& c, std::string_view v) { c.*member = parse_list<T>(key, v); },
          [member](const SimConfig& c) { return format_list(c.*member); }};
}

Field text(std::string_view key, std::string SimConfig::*member) {
  return {key, [member](SimConfig& c, std::string_view v) { c.*member = std::string(trim(v)); },
          [member](const SimConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
    scalar("grid_rows", &SimConfig::grid_rows),
    scalar("grid_cols", &SimConfig::grid_cols),
    list("on_grid_ids", &SimConfig::on_grid_ids),
    scalar("resistivity_ohm_mm2_per_m", &SimConfig::resistivity_ohm_mm2_per_m),
    scalar("link_length_m", &SimConfig::link_length_m),
    scalar("cross_section_mm2", &SimConfig::cross_section_mm2),
    scalar("dc_voltage_V", &SimConfig::dc_voltage_V),
    scalar("slot_duration_s", &SimConfig::slot_duration_s),
    scalar("mini_slot_duration_s", &SimConfig::mini_slot_duration_s),
    scalar("deadline_s", &SimConfig::deadline_s),
    scalar("processing_delay_s", &SimConfig::processing_delay_s),
    scalar("phi_max_J", &SimConfig::phi_max_J),
    scalar("capacity_J", &SimConfig::capacity_J),
    scalar("low_threshold_fraction", &SimConfig::low_threshold_fraction),
    scalar("up_threshold_fraction", &SimConfig::up_threshold_fraction),
    scalar("initial_fill_fraction", &SimConfig::initial_fill_fraction),
    list("initial_fill_fractions", &SimConfig::initial_fill_fractions),
    scalar("idle_energy_J", &SimConfig::idle_energy_J),
    scalar("max_load_energy_J", &SimConfig::max_load_energy_J),
    scalar("lambda", &SimConfig::lambda),
    {"policy", [](SimConfig& c, std::string_view v) { c.policy = parse_policy(trim(v)); },
     [](const SimConfig& c) { return std::string(to_string(c.policy)); }},
    scalar("horizon_slots", &SimConfig::horizon_slots),
    scalar("seed", &SimConfig::seed),
    {"theorem_target_J",
     [](SimConfig& c, std::string_view v) {
       v = trim(v);
       if (v.empty()) c.theorem_target_J.reset();
       else c.theorem_target_J = parse_scalar<double>("theorem_target_J", v);
     },
     [](const SimConfig& c) {
       return c.theorem_target_J ? fmt::format("{}", *c.theorem_target_J) : std::string();
     }},
    text("clusters_file", &SimConfig::clusters_file),
    text("harvest_file", &SimConfig::harvest_file),
    scalar("harvest_peak_fraction", &SimConfig::harvest_peak_fraction),
    scalar("offpeak_threshold_fraction", &SimConfig::offpeak_threshold_fraction),
    list("harvest_multipliers", &SimConfig::harvest_multipliers),
    scalar("synthetic_wind_level", &SimConfig::synthetic_wind_level),
    scalar("synthetic_wind_variability", &SimConfig::synthetic_wind_variability),
    scalar("synthetic_sample_period_s", &SimConfig::synthetic_sample_period_s),
    scalar("vue_groups", &SimConfig::vue_groups),
    scalar("vue_members_per_group", &SimConfig::vue_members_per_group),
    scalar("vue_speed_min_mps", &SimConfig::vue_speed_min_mps),
    scalar("vue_speed_max_mps", &SimConfig::vue_speed_max_mps),
    scalar("vue_offset_radius_m", &SimConfig::vue_offset_radius_m),
    scalar("lane_separation_m", &SimConfig::lane_separation_m),
    scalar("highway_y_m", &SimConfig::highway_y_m),
    scalar("bs_spacing_m", &SimConfig::bs_spacing_m),
  };
  return table;
}

void require(bool ok, std::string_view message) {
  if (!ok) throw ConfigError(std::string(message));
}

}  // namespace

bool SimConfig::is_on_grid(int id) const {
  return std::find(on_grid_ids.begin(), on_grid_ids.end(), id) != on_grid_ids.end();
}

double SimConfig::harvest_multiplier(int id) const {
  return harvest_multipliers.empty() ? 1.0 : harvest_multipliers.at(static_cast<std::size_t>(id));
}

double SimConfig::initial_level_J(int id) const {
  const double f = initial_fill_fractions.empty()
                     ? initial_fill_fraction
                     : initial_fill_fractions.at(static_cast<std::size_t>(id));
  return f * capacity_J;
}

CableParams SimConfig::cable() const {
  return {resistivity_ohm_mm2_per_m, link_length_m, cross_section_mm2, dc_voltage_V};
}

TransferTiming SimConfig::timing() const {
  return {phi_max_J, mini_slot_duration_s, mini_slots_per_slot(), processing_delay_s, deadline_s};
}

HighwayParams SimConfig::highway() const {
  return {vue_groups,        vue_members_per_group, vue_speed_min_mps,
          vue_speed_max_mps, vue_offset_radius_m,   lane_separation_m,
          highway_y_m,       grid_cols * bs_spacing_m};
}

SimClock SimConfig::clock() const { return {0, slot_duration_s, mini_slot_duration_s}; }

int SimConfig::max_feasible_mini_slots() const {
  int y = 0;
  while (y < mini_slots_per_slot() &&
         link_occupancy(y + 1, mini_slot_duration_s, processing_delay_s) <= deadline_s)
    ++y;
  return y;
}

void SimConfig::validate() const {
  require(grid_rows > 0 && grid_cols > 0, "grid dimensions must be positive");
  for (int id : on_grid_ids)
    require(id >= 0 && id < bs_count(), fmt::format("on_grid_ids: id {} outside grid", id));
  {
    auto sorted = on_grid_ids;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "on_grid_ids: duplicate id");
  }
  clock().validate();
  require(deadline_s > 0.0, "deadline_s must be positive");
  require(processing_delay_s >= 0.0, "processing_delay_s must be non-negative");
  require(phi_max_J > 0.0, "phi_max_J must be positive");
  require(capacity_J > 0.0, "capacity_J must be positive");
  require(0.0 < low_threshold_fraction && low_threshold_fraction < up_threshold_fraction &&
            up_threshold_fraction < 1.0,
          "thresholds must satisfy 0 < low < up < 1 (fractions of capacity)");
  require(initial_fill_fraction >= 0.0 && initial_fill_fraction <= 1.0,
          "initial_fill_fraction must be in [0, 1]");
  require(initial_fill_fractions.empty() ||
            initial_fill_fractions.size() == static_cast<std::size_t>(bs_count()),
          "initial_fill_fractions must list one value per BS");
  for (double f : initial_fill_fractions)
    require(f >= 0.0 && f <= 1.0, "initial_fill_fractions values must be in [0, 1]");
  require(idle_energy_J >= 0.0 && max_load_energy_J >= 0.0, "consumption parameters must be >= 0");
  require(lambda >= 0.0, "lambda must be non-negative");
  require(harvest_peak_fraction > 0.0, "harvest_peak_fraction must be positive");
  require(offpeak_threshold_fraction >= 0.0, "offpeak_threshold_fraction must be >= 0");
  require(harvest_multipliers.empty() ||
            harvest_multipliers.size() == static_cast<std::size_t>(bs_count()),
          "harvest_multipliers must list one value per BS");
  for (double m : harvest_multipliers) require(m >= 0.0, "harvest_multipliers must be >= 0");
  require(synthetic_wind_level >= 0.0, "synthetic_wind_level must be >= 0");
  require(synthetic_wind_variability >= 0.0, "synthetic_wind_variability must be >= 0");
  require(synthetic_sample_period_s > 0 && slot_duration_s % synthetic_sample_period_s == 0,
          "synthetic_sample_period_s must divide slot_duration_s");
  require(vue_groups >= 0 && vue_members_per_group >= 0, "VUE counts must be >= 0");
  require(0.0 <= vue_speed_min_mps && vue_speed_min_mps <= vue_speed_max_mps,
          "VUE speed range must satisfy 0 <= min <= max");
  require(vue_offset_radius_m >= 0.0, "vue_offset_radius_m must be >= 0");
  require(bs_spacing_m > 0.0, "bs_spacing_m must be positive");
  // Loss model sanity: throws when the per-hop loss reaches one.
  PpgGrid(grid_rows, grid_cols, cable()).delivered_fraction(1, link_power_W());
}

void set_config_value(SimConfig& config, std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Field& f) { return f.key == key; });
  if (it == table.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  it->set(config, value);
}

SimConfig parse_config(std::istream& in, const std::string& source) {
  SimConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    try {
      set_config_value(config, trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  auto config = parse_config(in, path.string());
  config.base_dir = path.parent_path();
  return config;
}

void write_config(std::ostream& out, const SimConfig& config, std::string_view key_prefix) {
  for (const auto& f : fields()) out << key_prefix << f.key << " = " << f.get(config) << '\n';
}

std::string config_to_string(const SimConfig& config, std::string_view key_prefix) {
  std::ostringstream os;
  write_config(os, config, key_prefix);
  return os.str();
}

SimConfig config_from_summary(std::istream& summary) {
  std::ostringstream filtered;
  std::string line;
  constexpr std::string_view prefix = "config.";
  while (std::getline(summary, line))
    if (std::string_view(line).substr(0, prefix.size()) == prefix)
      filtered << line.substr(prefix.size()) << '\n';
  std::istringstream in(filtered.str());
  return parse_config(in, "<summary>");
}

}  // namespace ppgcoop
