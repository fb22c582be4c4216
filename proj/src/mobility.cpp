#include "ppgcoop/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ppgcoop {

Point draw_offset(double radius_m, Rng& rng) {
  const double r = radius_m * std::sqrt(rng.uniform01());
  const double a = 2.0 * std::numbers::pi * rng.uniform01();
  return {r * std::cos(a), r * std::sin(a)};
}

std::vector<VueGroup> init_groups(const HighwayParams& params, Rng& rng) {
  std::vector<VueGroup> groups;
  groups.reserve(static_cast<std::size_t>(params.groups));
  for (int g = 0; g < params.groups; ++g) {
    VueGroup group;
    group.group_id = g;
    group.lane = g % 2;
    group.reference = {params.world_length_m * g / std::max(params.groups, 1),
                       params.highway_y_m + group.lane * params.lane_separation_m};
    const double speed = rng.uniform(params.speed_min_mps, params.speed_max_mps);
    group.velocity_mps = group.lane == 0 ? speed : -speed;
    for (int m = 0; m < params.members_per_group; ++m)
      group.member_offsets.push_back(draw_offset(params.offset_radius_m, rng));
    groups.push_back(std::move(group));
  }
  return groups;
}

VueGroup rpgm_step(const VueGroup& group, double dt_s, const HighwayParams& params, Rng& rng) {
  VueGroup next = group;
  const double L = params.world_length_m;
  double x = std::fmod(group.reference.x + group.velocity_mps * dt_s, L);
  if (x < 0.0) x += L;
  next.reference.x = x;
  for (auto& off : next.member_offsets) off = draw_offset(params.offset_radius_m, rng);
  return next;
}

AssociationSnapshot association_set(std::span<const VueGroup> groups,
                                    std::span<const Point> bs_positions) {
  AssociationSnapshot snap;
  for (const auto& g : groups) {
    for (std::size_t m = 0; m < g.member_offsets.size(); ++m) {
      const Point p = g.member_position(m);
      int best = -1;
      double best_d2 = 0.0;
      for (std::size_t b = 0; b < bs_positions.size(); ++b) {
        const double dx = p.x - bs_positions[b].x;
        const double dy = p.y - bs_positions[b].y;
        const double d2 = dx * dx + dy * dy;
        if (best < 0 || d2 < best_d2) {
          best = static_cast<int>(b);
          best_d2 = d2;
        }
      }
      snap.per_vue.push_back(best);
      if (best >= 0) snap.serving.push_back(best);
    }
  }
  std::sort(snap.serving.begin(), snap.serving.end());
  snap.serving.erase(std::unique(snap.serving.begin(), snap.serving.end()), snap.serving.end());
  return snap;
}

}  // namespace ppgcoop
