#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ppgcoop {

struct GridNode {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridNode&, const GridNode&) = default;
};

/// Undirected link between two 4-adjacent nodes. Endpoints are stored with
/// the lower node id first.
struct PowerLink {
  int a = 0;
  int b = 0;
  friend bool operator==(const PowerLink&, const PowerLink&) = default;
};

struct Route {
  std::vector<GridNode> hops;  // source first, consumer last
  int hop_count() const { return hops.empty() ? 0 : static_cast<int>(hops.size()) - 1; }
};

struct CableParams {
  double resistivity_ohm_mm2_per_m = 0.023;
  double link_length_m = 100.0;
  double cross_section_mm2 = 10.0;
  double dc_voltage_V = 380.0;
};

/// Resistance of a cable of given resistivity, length and cross-section.
double line_resistance(double resistivity_ohm_mm2_per_m, double length_m, double cross_section_mm2);

/// Fraction of the transmitted energy lost on one hop when a link carries
/// `link_power_W` on a DC bus at `voltage_V`.
double per_hop_loss(double resistance_ohm, double link_power_W, double voltage_V);

/// Rectangular Power Packet Grid with one node per base station. Node id is
/// row * cols + col. Routes go along rows first (vertical moves), then along
/// columns.
class PpgGrid {
public:
  PpgGrid(int rows, int cols, CableParams cable = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int node_count() const { return rows_ * cols_; }
  const CableParams& cable() const { return cable_; }

  bool contains(GridNode n) const;
  int id_of(GridNode n) const;
  GridNode node_of(int id) const;

  const std::vector<PowerLink>& links() const { return links_; }
  /// Index into links() of the link joining two adjacent nodes.
  std::size_t link_index(int a, int b) const;

  int hop_count(GridNode a, GridNode b) const;
  int hop_count(int a, int b) const { return hop_count(node_of(a), node_of(b)); }

  Route static_route(GridNode a, GridNode b) const;
  /// Link indices traversed by a route, in order.
  std::vector<std::size_t> route_links(const Route& route) const;

  double resistance() const;

  /// Per-hop delivered fraction raised to the hop count. Throws ConfigError
  /// when the per-hop loss is not below one.
  double delivered_fraction(int hops, double link_power_W) const;

private:
  int rows_;
  int cols_;
  CableParams cable_;
  std::vector<PowerLink> links_;
  std::vector<int> right_link_;  // per node: link to (r, c+1) or -1
  std::vector<int> down_link_;   // per node: link to (r+1, c) or -1
};

/// Half-open range of mini-slots [begin, end).
struct MiniSlotRange {
  int begin = 0;
  int end = 0;
  bool overlaps(const MiniSlotRange& o) const { return begin < o.end && o.begin < end; }
  friend bool operator==(const MiniSlotRange&, const MiniSlotRange&) = default;
};

/// TDM reservation state of every link for one slot. A link carries at most
/// one trading operation in any mini-slot.
class LinkSchedule {
public:
  explicit LinkSchedule(std::size_t link_count) : reservations_(link_count) {}

  bool is_free(std::size_t link, MiniSlotRange range) const;

  /// Throws LinkBusyError on overlap, DomainError on an empty range.
  void reserve_link(std::size_t link, MiniSlotRange range, int job_id);
  /// Removes the reservation held by `job_id` on `link`. Returns false when
  /// no such reservation exists.
  bool release_link(std::size_t link, int job_id);

  /// Earliest start at or after `not_before` such that all given links are
  /// free for `length` consecutive mini-slots.
  int earliest_common_start(const std::vector<std::size_t>& links, int length,
                            int not_before = 0) const;

  void clear();

  struct Reservation {
    MiniSlotRange range;
    int job_id = 0;
  };
  const std::vector<Reservation>& reservations(std::size_t link) const {
    return reservations_.at(link);
  }

private:
  std::vector<std::vector<Reservation>> reservations_;
};

}  // namespace ppgcoop
