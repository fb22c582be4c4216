#pragma once

#include <cstdint>
#include <string_view>

namespace ppgcoop {

/// Slot bookkeeping. All energy quantities in the library are joules per slot.
struct SimClock {
  std::uint64_t slot_index = 0;
  int slot_duration_s = 60;
  int mini_slot_duration_s = 5;

  /// Throws ConfigError unless slot duration is a positive multiple of the mini-slot.
  void validate() const;
  int mini_slots_per_slot() const { return slot_duration_s / mini_slot_duration_s; }
};

struct EnergyBuffer {
  double level_J = 0.0;
  double capacity_J = 490e3;
  double low_threshold_J = 147e3;
  double up_threshold_J = 343e3;

  /// Threshold ordering 0 < low < up < capacity and level in [0, capacity].
  bool valid() const;
  /// Same buffer with a new level; thresholds carried over.
  EnergyBuffer with_level(double level) const;
};

/// Buffer whose thresholds are fractions of capacity.
EnergyBuffer make_buffer(double capacity_J, double low_fraction, double up_fraction,
                         double level_J);

struct BaseStation {
  int id = 0;
  int row = 0;
  int col = 0;
  bool grid_connected = false;
  EnergyBuffer buffer;
  int load_profile_id = 0;
  double idle_energy_J = 6e3;
  double max_load_energy_J = 18e3;
};

struct HarvestSample {
  std::uint64_t slot_index = 0;
  double solar_J = 0.0;
  double wind_J = 0.0;
};

enum class RoleKind : std::uint8_t { Neutral, Source, Consumer };

std::string_view to_string(RoleKind kind);

/// Per-slot behaviour of a BS. `amount_J` is the tradeable surplus for a
/// Source, the demand for a Consumer and zero otherwise.
struct BsRole {
  RoleKind kind = RoleKind::Neutral;
  double amount_J = 0.0;

  static BsRole source(double surplus_J) { return {RoleKind::Source, surplus_J}; }
  static BsRole consumer(double demand_J) { return {RoleKind::Consumer, demand_J}; }
  static BsRole neutral() { return {}; }

  bool is_source() const { return kind == RoleKind::Source; }
  bool is_consumer() const { return kind == RoleKind::Consumer; }
  double surplus_J() const { return is_source() ? amount_J : 0.0; }
  double demand_J() const { return is_consumer() ? amount_J : 0.0; }

  friend bool operator==(const BsRole&, const BsRole&) = default;
};

/// Load-dependent part of the consumption, linear in the normalized load.
double load_energy(double load_fraction, const BaseStation& bs);

/// Idle plus load-dependent energy for one slot.
double bs_consumption(const BaseStation& bs, double load_fraction);

BsRole classify_role(const EnergyBuffer& buffer, bool grid_connected);

/// Result of clamping a raw end-of-slot level into [0, capacity].
struct SettledLevel {
  double level_J = 0.0;
  double spilled_J = 0.0;    // energy above capacity that could not be stored
  double shortfall_J = 0.0;  // consumption that the buffer could not cover
};

SettledLevel settle_level(double raw_level_J, double capacity_J);

EnergyBuffer eb_step_offgrid(const EnergyBuffer& buffer, double harvested_J, double consumed_J,
                             double transferred_J);

EnergyBuffer eb_step_ongrid(const EnergyBuffer& buffer, double harvested_J, double consumed_J,
                            double transferred_J, double purchased_J);

/// Energy an on-grid BS buys to bring its provisional level up to the upper threshold.
double grid_purchase(const EnergyBuffer& provisional);

}  // namespace ppgcoop
