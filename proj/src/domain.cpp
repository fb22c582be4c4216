#include "ppgcoop/domain.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

void SimClock::validate() const {
  if (mini_slot_duration_s <= 0 || slot_duration_s <= 0)
    throw ConfigError("slot and mini-slot durations must be positive");
  if (slot_duration_s % mini_slot_duration_s != 0)
    throw ConfigError(fmt::format("slot duration {} s is not a multiple of the mini-slot duration {} s",
                                  slot_duration_s, mini_slot_duration_s));
}

bool EnergyBuffer::valid() const {
  return 0.0 < low_threshold_J && low_threshold_J < up_threshold_J &&
         up_threshold_J < capacity_J && level_J >= 0.0 && level_J <= capacity_J;
}

EnergyBuffer EnergyBuffer::with_level(double level) const {
  EnergyBuffer b = *this;
  b.level_J = level;
  return b;
}

EnergyBuffer make_buffer(double capacity_J, double low_fraction, double up_fraction,
                         double level_J) {
  return EnergyBuffer{level_J, capacity_J, low_fraction * capacity_J, up_fraction * capacity_J};
}

std::string_view to_string(RoleKind kind) {
  switch (kind) {
    case RoleKind::Source: return "source";
    case RoleKind::Consumer: return "consumer";
    case RoleKind::Neutral: break;
  }
  return "neutral";
}

double load_energy(double load_fraction, const BaseStation& bs) {
  if (!(load_fraction >= 0.0 && load_fraction <= 1.0))
    throw DomainError(fmt::format("load fraction {} outside [0, 1]", load_fraction));
  return load_fraction * bs.max_load_energy_J;
}

double bs_consumption(const BaseStation& bs, double load_fraction) {
  return bs.idle_energy_J + load_energy(load_fraction, bs);
}

BsRole classify_role(const EnergyBuffer& buffer, bool grid_connected) {
  if (buffer.level_J > buffer.up_threshold_J)
    return BsRole::source(buffer.level_J - buffer.up_threshold_J);
  // On-grid stations cover their own deficit from the grid.
  if (!grid_connected && buffer.level_J < buffer.low_threshold_J)
    return BsRole::consumer(buffer.low_threshold_J - buffer.level_J);
  return BsRole::neutral();
}

SettledLevel settle_level(double raw_level_J, double capacity_J) {
  if (raw_level_J > capacity_J) return {capacity_J, raw_level_J - capacity_J, 0.0};
  if (raw_level_J < 0.0) return {0.0, 0.0, -raw_level_J};
  return {raw_level_J, 0.0, 0.0};
}

EnergyBuffer eb_step_offgrid(const EnergyBuffer& buffer, double harvested_J, double consumed_J,
                             double transferred_J) {
  const double raw = buffer.level_J + harvested_J - consumed_J + transferred_J;
  return buffer.with_level(settle_level(raw, buffer.capacity_J).level_J);
}

EnergyBuffer eb_step_ongrid(const EnergyBuffer& buffer, double harvested_J, double consumed_J,
                            double transferred_J, double purchased_J) {
  const double raw = buffer.level_J + harvested_J - consumed_J + transferred_J + purchased_J;
  return buffer.with_level(settle_level(raw, buffer.capacity_J).level_J);
}

double grid_purchase(const EnergyBuffer& provisional) {
  return std::max(provisional.up_threshold_J - provisional.level_J, 0.0);
}

}  // namespace ppgcoop
