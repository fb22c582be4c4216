#pragma once

#include <span>
#include <string>
#include <vector>

#include "ppgcoop/allocation.hpp"
#include "ppgcoop/topology.hpp"

namespace ppgcoop {

/// Number of mini-slots needed to move `delivered_J` at `phi_max_J` per
/// mini-slot. Throws ConfigError when phi_max_J is not positive.
int mini_slot_count(double delivered_J, double phi_max_J);

/// Link occupancy in seconds: mini-slot time plus processing/buffering delay.
double link_occupancy(int mini_slots, double mini_slot_duration_s, double processing_delay_s);

struct TransferTiming {
  double phi_max_J = 100e3;
  int mini_slot_duration_s = 5;
  int mini_slots_per_slot = 12;
  double processing_delay_s = 2.0;
  double deadline_s = 60.0;
};

enum class JobStatus { Pending, Active, Done, Overrun };

std::string_view to_string(JobStatus s);

struct TransferJob {
  int id = 0;
  AllocationDecision decision;
  Route route;
  int mini_slots = 0;
  int start_mini_slot = 0;
  double occupancy_s = 0.0;
  JobStatus status = JobStatus::Pending;

  MiniSlotRange range() const { return {start_mini_slot, start_mini_slot + mini_slots}; }
  /// True when the job had to wait for links held by an earlier job.
  bool delayed() const { return start_mini_slot > 0; }
};

/// One link reservation as recorded by the scheduler.
struct LinkUse {
  int job_id = 0;
  std::size_t link = 0;
  MiniSlotRange range;
};

struct TransferOutcome {
  std::vector<double> net_J;  // G_n per BS; positive for consumers
  std::vector<TransferJob> jobs;
  std::vector<LinkUse> audit;
  int overruns = 0;
};

/// Schedules every decision on its static route in decision order and applies
/// the resulting energy flows. Jobs that do not fit the slot's mini-slots or
/// exceed the deadline still deliver and are marked Overrun.
TransferOutcome execute_transfers(std::span<const AllocationDecision> decisions,
                                  const PpgGrid& grid, const TransferTiming& timing);

/// Mini-slot collisions in an audit log: pairs of uses sharing a link and
/// overlapping in time. Empty for a valid schedule.
std::vector<std::pair<LinkUse, LinkUse>> find_collisions(std::span<const LinkUse> audit);

}  // namespace ppgcoop
