#include "ppgcoop/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

double line_resistance(double resistivity_ohm_mm2_per_m, double length_m, double cross_section_mm2) {
  if (!(resistivity_ohm_mm2_per_m > 0.0) || !(length_m > 0.0) || !(cross_section_mm2 > 0.0))
    throw DomainError(fmt::format("cable parameters must be positive (rho={}, l={}, A={})",
                                  resistivity_ohm_mm2_per_m, length_m, cross_section_mm2));
  return resistivity_ohm_mm2_per_m * length_m / cross_section_mm2;
}

double per_hop_loss(double resistance_ohm, double link_power_W, double voltage_V) {
  if (!(voltage_V > 0.0)) throw DomainError("DC voltage must be positive");
  // I = P / U, dissipated I^2 R relative to P.
  return resistance_ohm * link_power_W / (voltage_V * voltage_V);
}

PpgGrid::PpgGrid(int rows, int cols, CableParams cable)
  : rows_(rows), cols_(cols), cable_(cable) {
  if (rows <= 0 || cols <= 0)
    throw ConfigError(fmt::format("grid dimensions must be positive, got {}x{}", rows, cols));
  right_link_.assign(node_count(), -1);
  down_link_.assign(node_count(), -1);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const int id = r * cols_ + c;
      if (c + 1 < cols_) {
        right_link_[id] = static_cast<int>(links_.size());
        links_.push_back({id, id + 1});
      }
      if (r + 1 < rows_) {
        down_link_[id] = static_cast<int>(links_.size());
        links_.push_back({id, id + cols_});
      }
    }
  }
}

bool PpgGrid::contains(GridNode n) const {
  return n.row >= 0 && n.row < rows_ && n.col >= 0 && n.col < cols_;
}

int PpgGrid::id_of(GridNode n) const {
  if (!contains(n))
    throw DomainError(fmt::format("node ({}, {}) outside {}x{} grid", n.row, n.col, rows_, cols_));
  return n.row * cols_ + n.col;
}

GridNode PpgGrid::node_of(int id) const {
  if (id < 0 || id >= node_count())
    throw DomainError(fmt::format("node id {} outside grid of {} nodes", id, node_count()));
  return {id / cols_, id % cols_};
}

std::size_t PpgGrid::link_index(int a, int b) const {
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  node_of(lo);
  node_of(hi);
  int idx = -1;
  if (hi == lo + 1 && lo % cols_ + 1 < cols_) idx = right_link_[lo];
  else if (hi == lo + cols_) idx = down_link_[lo];
  if (idx < 0) throw RouteError(fmt::format("nodes {} and {} are not adjacent", a, b));
  return static_cast<std::size_t>(idx);
}

int PpgGrid::hop_count(GridNode a, GridNode b) const {
  if (!contains(a) || !contains(b))
    throw DomainError("hop_count: node outside grid");
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

Route PpgGrid::static_route(GridNode a, GridNode b) const {
  if (!contains(a) || !contains(b)) throw DomainError("static_route: node outside grid");
  if (a == b) throw RouteError("static_route: source and destination coincide");
  Route route;
  route.hops.reserve(static_cast<std::size_t>(hop_count(a, b)) + 1);
  GridNode cur = a;
  route.hops.push_back(cur);
  while (cur.row != b.row) {
    cur.row += b.row > cur.row ? 1 : -1;
    route.hops.push_back(cur);
  }
  while (cur.col != b.col) {
    cur.col += b.col > cur.col ? 1 : -1;
    route.hops.push_back(cur);
  }
  return route;
}

std::vector<std::size_t> PpgGrid::route_links(const Route& route) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < route.hops.size(); ++i)
    out.push_back(link_index(id_of(route.hops[i - 1]), id_of(route.hops[i])));
  return out;
}

double PpgGrid::resistance() const {
  return line_resistance(cable_.resistivity_ohm_mm2_per_m, cable_.link_length_m,
                         cable_.cross_section_mm2);
}

double PpgGrid::delivered_fraction(int hops, double link_power_W) const {
  if (hops < 0) throw DomainError("delivered_fraction: negative hop count");
  const double loss = per_hop_loss(resistance(), link_power_W, cable_.dc_voltage_V);
  if (!(loss < 1.0) || loss < 0.0)
    throw ConfigError(fmt::format("per-hop loss {} is not in [0, 1); check cable and link power",
                                  loss));
  return std::pow(1.0 - loss, hops);
}

bool LinkSchedule::is_free(std::size_t link, MiniSlotRange range) const {
  return std::none_of(reservations_.at(link).begin(), reservations_.at(link).end(),
                      [&](const Reservation& r) { return r.range.overlaps(range); });
}

void LinkSchedule::reserve_link(std::size_t link, MiniSlotRange range, int job_id) {
  if (range.end <= range.begin)
    throw DomainError(fmt::format("empty mini-slot range [{}, {})", range.begin, range.end));
  if (!is_free(link, range))
    throw LinkBusyError(fmt::format("link {} busy in mini-slots [{}, {})", link, range.begin,
                                    range.end));
  reservations_.at(link).push_back({range, job_id});
}

bool LinkSchedule::release_link(std::size_t link, int job_id) {
  auto& v = reservations_.at(link);
  const auto it = std::find_if(v.begin(), v.end(),
                               [&](const Reservation& r) { return r.job_id == job_id; });
  if (it == v.end()) return false;
  v.erase(it);
  return true;
}

int LinkSchedule::earliest_common_start(const std::vector<std::size_t>& links, int length,
                                        int not_before) const {
  // Candidate starts are not_before and every reservation end; the earliest
  // feasible start is always one of them.
  std::vector<int> candidates{not_before};
  for (auto l : links)
    for (const auto& r : reservations_.at(l))
      if (r.range.end > not_before) candidates.push_back(r.range.end);
  std::sort(candidates.begin(), candidates.end());
  for (int start : candidates) {
    const MiniSlotRange want{start, start + length};
    if (std::all_of(links.begin(), links.end(), [&](std::size_t l) { return is_free(l, want); }))
      return start;
  }
  return candidates.back();  // unreachable: the last end is always free
}

void LinkSchedule::clear() {
  for (auto& v : reservations_) v.clear();
}

}  // namespace ppgcoop
