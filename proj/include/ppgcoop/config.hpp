#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppgcoop/allocation.hpp"
#include "ppgcoop/domain.hpp"
#include "ppgcoop/mobility.hpp"
#include "ppgcoop/topology.hpp"
#include "ppgcoop/transfer.hpp"

namespace ppgcoop {

/// Every tunable of a simulation run. Defaults reproduce the system
/// parameter table of the reference deployment (4x6 grid, 24 BSs, 5 on-grid).
///
/// Text form is one `key = value` per line, `#` comments, lists
/// comma-separated. Unknown keys are rejected.
struct SimConfig {
  // grid and cable
  int grid_rows = 4;
  int grid_cols = 6;
  std::vector<int> on_grid_ids{0, 5, 14, 18, 23};
  double resistivity_ohm_mm2_per_m = 0.023;
  double link_length_m = 100.0;
  double cross_section_mm2 = 10.0;
  double dc_voltage_V = 380.0;

  // timing
  int slot_duration_s = 60;
  int mini_slot_duration_s = 5;
  double deadline_s = 60.0;
  double processing_delay_s = 2.0;
  double phi_max_J = 100e3;

  // buffers and consumption
  double capacity_J = 490e3;
  double low_threshold_fraction = 0.3;
  double up_threshold_fraction = 0.7;
  double initial_fill_fraction = 0.5;
  std::vector<double> initial_fill_fractions;  // per BS, overrides the scalar
  double idle_energy_J = 6e3;
  double max_load_energy_J = 18e3;

  // control
  double lambda = 1.0;
  Policy policy = Policy::Lyapunov;
  std::uint64_t horizon_slots = 1440;
  std::uint64_t seed = 7;
  std::optional<double> theorem_target_J;  // unset: mean demand per slot

  // traces
  std::string clusters_file;  // empty: synthetic profiles
  std::string harvest_file;   // empty: synthetic harvest
  double harvest_peak_fraction = 0.2;
  double offpeak_threshold_fraction = 0.01;
  std::vector<double> harvest_multipliers;  // per BS, empty: all 1
  double synthetic_wind_level = 0.35;
  double synthetic_wind_variability = 0.5;
  int synthetic_sample_period_s = 30;

  // mobility
  int vue_groups = 10;
  int vue_members_per_group = 1;
  double vue_speed_min_mps = 10.0;
  double vue_speed_max_mps = 30.0;
  double vue_offset_radius_m = 20.0;
  double lane_separation_m = 4.0;
  double highway_y_m = 600.0;
  double bs_spacing_m = 500.0;

  // derived quantities
  int bs_count() const { return grid_rows * grid_cols; }
  double low_threshold_J() const { return low_threshold_fraction * capacity_J; }
  double up_threshold_J() const { return up_threshold_fraction * capacity_J; }
  int mini_slots_per_slot() const { return slot_duration_s / mini_slot_duration_s; }
  double link_power_W() const { return phi_max_J / mini_slot_duration_s; }
  std::size_t slots_per_day() const { return static_cast<std::size_t>(86400 / slot_duration_s); }
  double offpeak_threshold_J() const { return offpeak_threshold_fraction * capacity_J; }
  bool is_on_grid(int id) const;
  double harvest_multiplier(int id) const;
  double initial_level_J(int id) const;

  CableParams cable() const;
  TransferTiming timing() const;
  HighwayParams highway() const;
  SimClock clock() const;

  /// Largest mini-slot count whose link occupancy still meets the deadline.
  int max_feasible_mini_slots() const;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  /// Relative trace paths are resolved against this directory.
  std::filesystem::path base_dir;
};

/// Parses the text form. `source` names the input in error messages.
SimConfig parse_config(std::istream& in, const std::string& source = "<config>");
SimConfig load_config(const std::filesystem::path& path);

/// Writes the text form; parse_config(write_config(c)) == c for every field.
void write_config(std::ostream& out, const SimConfig& config, std::string_view key_prefix = "");
std::string config_to_string(const SimConfig& config, std::string_view key_prefix = "");

/// Rebuilds a configuration from the `config.`-prefixed echo in a run summary.
SimConfig config_from_summary(std::istream& summary);

/// Applies a single `key`/`value` pair; throws ConfigError for unknown keys.
void set_config_value(SimConfig& config, std::string_view key, std::string_view value);

}  // namespace ppgcoop
