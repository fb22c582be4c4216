#include "ppgcoop/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "ppgcoop/errors.hpp"
#include "ppgcoop/random.hpp"

namespace ppgcoop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, std::string_view what) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end)
    throw ParseError(fmt::format("invalid {} '{}'", what, field), line_no);
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(fmt::format("non-finite {}", what), line_no);
  }
  return value;
}

bool is_skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

double LoadProfileSet::load(int bs, std::uint64_t slot) const {
  const auto& profile = clusters.at(static_cast<std::size_t>(assignment.at(static_cast<std::size_t>(bs))));
  return profile[slot % profile.size()];
}

LoadProfileSet parse_load_profiles(std::istream& in, std::size_t slots_per_day) {
  LoadProfileSet set;
  set.clusters.assign(kClusterCount, {});
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == kClusterCount + 1 && fields[0] == "slot") continue;
      throw ParseError("expected header 'slot,cluster0,cluster1,cluster2,cluster3'", line_no);
    }
    if (fields.size() != kClusterCount + 1)
      throw ParseError(fmt::format("expected {} fields, got {}", kClusterCount + 1, fields.size()),
                       line_no);
    const auto slot = parse_number<std::uint64_t>(fields[0], line_no, "slot index");
    if (slot != set.clusters[0].size())
      throw ParseError(fmt::format("slot {} out of sequence (expected {})", slot,
                                   set.clusters[0].size()),
                       line_no);
    for (int c = 0; c < kClusterCount; ++c) {
      const double v = parse_number<double>(fields[static_cast<std::size_t>(c) + 1], line_no, "load value");
      if (v < 0.0 || v > 1.0)
        throw ParseError(fmt::format("load value {} of cluster{} outside [0, 1]", v, c), line_no);
      set.clusters[static_cast<std::size_t>(c)].push_back(v);
    }
  }
  if (set.clusters[0].size() != slots_per_day)
    throw ParseError(fmt::format("expected {} slots per day, found {}", slots_per_day,
                                 set.clusters[0].size()),
                     line_no);
  return set;
}

std::vector<int> assign_clusters(int bs_count, int cluster_count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out(static_cast<std::size_t>(bs_count));
  for (auto& c : out) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(cluster_count)));
  return out;
}

LoadProfileSet load_profiles(const std::filesystem::path& path, std::size_t slots_per_day,
                             int bs_count, std::uint64_t seed) {
  auto in = open_or_throw(path);
  auto set = parse_load_profiles(in, slots_per_day);
  set.assignment = assign_clusters(bs_count, kClusterCount, seed);
  return set;
}

RawHarvest parse_harvest(std::istream& in) {
  RawHarvest raw;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 3 && fields[0] == "timestamp") continue;
      throw ParseError("expected header 'timestamp,solar,wind'", line_no);
    }
    if (fields.size() != 3)
      throw ParseError(fmt::format("expected 3 fields, got {}", fields.size()), line_no);
    const auto ts = parse_number<std::int64_t>(fields[0], line_no, "timestamp");
    const double solar = parse_number<double>(fields[1], line_no, "solar value");
    const double wind = parse_number<double>(fields[2], line_no, "wind value");
    if (solar < 0.0 || wind < 0.0) throw ParseError("negative harvest value", line_no);
    if (!raw.timestamp_s.empty() && ts <= raw.timestamp_s.back())
      throw ParseError(fmt::format("timestamp {} not increasing", ts), line_no);
    raw.timestamp_s.push_back(ts);
    raw.solar.push_back(solar);
    raw.wind.push_back(wind);
  }
  if (raw.timestamp_s.empty()) throw ParseError("harvest trace has no samples", line_no);
  return raw;
}

HarvestTraceSet resample(const RawHarvest& raw, int slot_duration_s) {
  if (slot_duration_s <= 0) throw ConfigError("slot duration must be positive");
  const auto n = raw.timestamp_s.size();
  if (n == 0) throw ParseError("harvest trace has no samples");
  std::int64_t period = slot_duration_s;
  if (n > 1) {
    period = raw.timestamp_s[1] - raw.timestamp_s[0];
    for (std::size_t i = 2; i < n; ++i)
      period = std::min(period, raw.timestamp_s[i] - raw.timestamp_s[i - 1]);
  }
  if (period <= 0 || slot_duration_s % period != 0)
    throw ParseError(fmt::format("sample period {} s does not divide the slot duration {} s",
                                 period, slot_duration_s));

  const std::int64_t tau = slot_duration_s;
  const auto window_of = [&](std::int64_t ts) {
    return ts >= 0 ? ts / tau : (ts - tau + 1) / tau;
  };
  const std::int64_t first = window_of(raw.timestamp_s.front());
  const std::int64_t last = window_of(raw.timestamp_s.back());
  const auto windows = static_cast<std::size_t>(last - first + 1);

  HarvestTraceSet out;
  out.solar_J.assign(windows, 0.0);
  out.wind_J.assign(windows, 0.0);
  std::vector<std::int64_t> count(windows, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = static_cast<std::size_t>(window_of(raw.timestamp_s[i]) - first);
    out.solar_J[w] += raw.solar[i];
    out.wind_J[w] += raw.wind[i];
    ++count[w];
  }
  const std::int64_t expected = tau / period;
  std::vector<std::string> missing;
  for (std::size_t w = 0; w < windows; ++w)
    if (count[w] != expected)
      missing.push_back(fmt::format("{} ({}/{} samples)", first + static_cast<std::int64_t>(w),
                                    count[w], expected));
  if (!missing.empty())
    throw ParseError(fmt::format("incomplete slot windows: {}", fmt::join(missing, ", ")));
  return out;
}

double peak_scale(double raw_peak, double capacity_J, double peak_fraction) {
  if (!(raw_peak > 0.0)) throw DomainError("solar trace has no positive sample to scale");
  return peak_fraction * capacity_J / raw_peak;
}

HarvestTraceSet scale_harvest(HarvestTraceSet windows, double capacity_J, double peak_fraction) {
  const double peak = *std::max_element(windows.solar_J.begin(), windows.solar_J.end());
  const double k = peak_scale(peak, capacity_J, peak_fraction);
  for (auto& v : windows.solar_J) v *= k;
  for (auto& v : windows.wind_J) v *= k;
  windows.scale_J_per_unit = k;
  return windows;
}

HarvestTraceSet load_harvest(const std::filesystem::path& path, int slot_duration_s,
                             double capacity_J, double peak_fraction) {
  auto in = open_or_throw(path);
  return scale_harvest(resample(parse_harvest(in), slot_duration_s), capacity_J, peak_fraction);
}

double harvest_select(double solar_J, double wind_J, double offpeak_threshold_J) {
  return solar_J >= offpeak_threshold_J ? solar_J : wind_J;
}

namespace {

double bump(double hour, double centre, double width) {
  const double z = (hour - centre) / width;
  return std::exp(-0.5 * z * z);
}

// Two daytime peaks per cluster: (centre, width, weight) pairs, plus a floor.
struct ClusterShape {
  double c1, w1, a1;
  double c2, w2, a2;
  double floor;
};

constexpr ClusterShape kShapes[kClusterCount] = {
  {11.0, 2.0, 1.0, 17.5, 2.0, 0.85, 0.10},  // office
  {13.0, 2.5, 0.7, 21.0, 2.0, 1.00, 0.15},  // residential
  {10.0, 1.5, 0.9, 15.0, 2.5, 1.00, 0.05},  // business district
  {8.5, 1.5, 0.6, 22.5, 1.5, 1.00, 0.20},   // transport and nightlife
};

}  // namespace

std::vector<std::vector<double>> synthetic_load_profiles(std::size_t slots_per_day,
                                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out(kClusterCount);
  for (int c = 0; c < kClusterCount; ++c) {
    const auto& s = kShapes[c];
    auto& profile = out[static_cast<std::size_t>(c)];
    profile.resize(slots_per_day);
    for (std::size_t t = 0; t < slots_per_day; ++t) {
      const double hour = 24.0 * static_cast<double>(t) / static_cast<double>(slots_per_day);
      // wrap-around so that late-evening peaks spill past midnight
      double v = s.floor;
      for (double h : {hour, hour + 24.0, hour - 24.0})
        v += s.a1 * bump(h, s.c1, s.w1) + s.a2 * bump(h, s.c2, s.w2);
      v = v / (1.0 + s.floor) + 0.03 * rng.normal();
      profile[t] = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

RawHarvest synthetic_harvest(int days, int sample_period_s, double wind_level,
                             std::uint64_t seed, double wind_variability) {
  if (days < 0 || sample_period_s <= 0) throw DomainError("synthetic_harvest: bad horizon");
  Rng rng(seed);
  RawHarvest raw;
  const std::int64_t per_day = 86400 / sample_period_s;
  double wind_state = 0.0;
  for (int d = 0; d < days; ++d) {
    const double clear_sky = 0.85 + 0.15 * rng.uniform01();
    double cloud = 1.0;
    for (std::int64_t i = 0; i < per_day; ++i) {
      const std::int64_t ts = d * 86400LL + i * sample_period_s;
      const double hour = static_cast<double>(i * sample_period_s) / 3600.0;
      double solar = 0.0;
      if (hour > 6.0 && hour < 18.0) {
        cloud = std::clamp(cloud + 0.02 * rng.normal(), 0.6, 1.0);
        solar = clear_sky * cloud * std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
      }
      wind_state = 0.995 * wind_state + 0.1 * rng.normal();
      const double wind = std::max(0.0, wind_level * (1.0 + wind_variability * wind_state));
      raw.timestamp_s.push_back(ts);
      raw.solar.push_back(solar);
      raw.wind.push_back(wind);
    }
  }
  return raw;
}

void write_load_profiles(std::ostream& out, const std::vector<std::vector<double>>& clusters) {
  out << "# normalized traffic load per slot, one column per cluster\n";
  out << "slot,cluster0,cluster1,cluster2,cluster3\n";
  const std::size_t n = clusters.empty() ? 0 : clusters.front().size();
  for (std::size_t t = 0; t < n; ++t) {
    out << t;
    for (const auto& c : clusters) out << ',' << fmt::format("{}", c[t]);
    out << '\n';
  }
}

void write_harvest(std::ostream& out, const RawHarvest& raw) {
  out << "# harvested energy per sample, arbitrary units\n";
  out << "timestamp,solar,wind\n";
  for (std::size_t i = 0; i < raw.timestamp_s.size(); ++i)
    out << raw.timestamp_s[i] << ',' << fmt::format("{},{}", raw.solar[i], raw.wind[i]) << '\n';
}

}  // namespace ppgcoop
