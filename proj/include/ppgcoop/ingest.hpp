#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace ppgcoop {

/// Normalized daily load shapes plus the BS-to-cluster assignment.
///
/// File schema (comma-separated, `#` starts a comment line):
///
///     slot,cluster0,cluster1,cluster2,cluster3
///     0,0.12,0.30,0.05,0.41
///     ...
///
/// `slot` counts from 0 without gaps; there is one row per slot of a day.
struct LoadProfileSet {
  std::vector<std::vector<double>> clusters;  // [cluster][slot of day]
  std::vector<int> assignment;                // BS id -> cluster id
  double computation_share = 0.8;             // metadata only

  std::size_t slots_per_day() const { return clusters.empty() ? 0 : clusters.front().size(); }
  /// Normalized load of `bs` in absolute slot `slot` (profiles repeat daily).
  double load(int bs, std::uint64_t slot) const;
};

inline constexpr int kClusterCount = 4;

LoadProfileSet parse_load_profiles(std::istream& in, std::size_t slots_per_day);

/// Reads a clusters file and assigns every BS a cluster uniformly at random.
LoadProfileSet load_profiles(const std::filesystem::path& path, std::size_t slots_per_day,
                             int bs_count, std::uint64_t seed);

std::vector<int> assign_clusters(int bs_count, int cluster_count, std::uint64_t seed);

/// Raw harvest samples as read from a trace file.
///
/// File schema (comma-separated, `#` starts a comment line):
///
///     timestamp,solar,wind
///     0,0.0,0.31
///     30,0.0,0.29
///
/// Timestamps are integer seconds, strictly increasing with a constant
/// period that divides the slot duration. Energies are in arbitrary
/// non-negative units per sample.
struct RawHarvest {
  std::vector<std::int64_t> timestamp_s;
  std::vector<double> solar;
  std::vector<double> wind;
};

RawHarvest parse_harvest(std::istream& in);

/// Per-slot harvest series in joules.
struct HarvestTraceSet {
  std::vector<double> solar_J;
  std::vector<double> wind_J;
  double scale_J_per_unit = 1.0;

  std::size_t size() const { return solar_J.size(); }
};

/// Sums samples into slot windows. Throws ParseError naming every window that
/// does not hold the full number of samples.
HarvestTraceSet resample(const RawHarvest& raw, int slot_duration_s);

/// Joules per raw unit so that the largest solar window maps to
/// `peak_fraction * capacity_J`.
double peak_scale(double raw_peak, double capacity_J, double peak_fraction);

/// Resamples and scales both series by the solar peak factor.
HarvestTraceSet scale_harvest(HarvestTraceSet windows, double capacity_J, double peak_fraction);

HarvestTraceSet load_harvest(const std::filesystem::path& path, int slot_duration_s,
                             double capacity_J, double peak_fraction);

/// Solar while it is above the off-peak threshold, wind otherwise.
double harvest_select(double solar_J, double wind_J, double offpeak_threshold_J);

/// Synthetic bimodal daytime load shapes, one per cluster.
std::vector<std::vector<double>> synthetic_load_profiles(std::size_t slots_per_day,
                                                         std::uint64_t seed);

/// Synthetic solar bell plus noisy wind at `sample_period_s` resolution.
/// `wind_level` is the mean wind sample relative to the clear-sky solar peak;
/// `wind_variability` scales the slow fluctuation around that mean.
RawHarvest synthetic_harvest(int days, int sample_period_s, double wind_level,
                             std::uint64_t seed, double wind_variability = 0.5);

void write_load_profiles(std::ostream& out, const std::vector<std::vector<double>>& clusters);
void write_harvest(std::ostream& out, const RawHarvest& raw);

}  // namespace ppgcoop
