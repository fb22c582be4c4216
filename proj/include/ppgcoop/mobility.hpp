#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppgcoop/random.hpp"

namespace ppgcoop {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Reference point group mobility on a straight two-lane highway that runs
/// along the x axis and wraps around at the world length.
struct HighwayParams {
  int groups = 10;
  int members_per_group = 1;
  double speed_min_mps = 10.0;
  double speed_max_mps = 30.0;
  double offset_radius_m = 20.0;
  double lane_separation_m = 4.0;
  double highway_y_m = 600.0;
  double world_length_m = 3000.0;
};

struct VueGroup {
  int group_id = 0;
  int lane = 0;             // lane 0 drives towards +x, lane 1 towards -x
  Point reference;
  double velocity_mps = 0.0;  // signed, constant for the whole run
  std::vector<Point> member_offsets;

  Point member_position(std::size_t i) const {
    return {reference.x + member_offsets.at(i).x, reference.y + member_offsets.at(i).y};
  }
};

struct AssociationSnapshot {
  std::uint64_t slot_index = 0;
  std::vector<int> serving;  // I, ascending BS ids
  std::vector<int> per_vue;  // serving BS of each VUE, group-major
};

/// Offset drawn uniformly from the disc of radius `radius_m`.
Point draw_offset(double radius_m, Rng& rng);

/// Initial placement: groups alternate lanes and start evenly spaced.
std::vector<VueGroup> init_groups(const HighwayParams& params, Rng& rng);

/// Advances the reference point by velocity * dt along the highway (wrapping)
/// and redraws member offsets.
VueGroup rpgm_step(const VueGroup& group, double dt_s, const HighwayParams& params, Rng& rng);

/// Nearest-BS association of every VUE; ties go to the lower BS id.
AssociationSnapshot association_set(std::span<const VueGroup> groups,
                                    std::span<const Point> bs_positions);

}  // namespace ppgcoop
