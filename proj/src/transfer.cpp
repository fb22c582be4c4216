#include "ppgcoop/transfer.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

int mini_slot_count(double delivered_J, double phi_max_J) {
  if (!(phi_max_J > 0.0)) throw ConfigError(fmt::format("phi_max must be positive, got {}", phi_max_J));
  if (delivered_J < 0.0) throw DomainError("mini_slot_count: negative energy");
  return static_cast<int>(std::ceil(delivered_J / phi_max_J));
}

double link_occupancy(int mini_slots, double mini_slot_duration_s, double processing_delay_s) {
  if (mini_slots < 0) throw DomainError("link_occupancy: negative mini-slot count");
  return mini_slots * mini_slot_duration_s + processing_delay_s;
}

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Active: return "active";
    case JobStatus::Done: return "done";
    case JobStatus::Overrun: return "overrun";
  }
  return "unknown";
}

TransferOutcome execute_transfers(std::span<const AllocationDecision> decisions,
                                  const PpgGrid& grid, const TransferTiming& timing) {
  TransferOutcome out;
  out.net_J.assign(static_cast<std::size_t>(grid.node_count()), 0.0);
  LinkSchedule schedule(grid.links().size());

  int next_id = 0;
  for (const auto& d : decisions) {
    TransferJob job;
    job.id = next_id++;
    job.decision = d;
    job.route = grid.static_route(grid.node_of(d.source_id), grid.node_of(d.consumer_id));
    job.mini_slots = std::max(mini_slot_count(d.delivered_J, timing.phi_max_J), 1);
    job.occupancy_s = link_occupancy(job.mini_slots, timing.mini_slot_duration_s,
                                     timing.processing_delay_s);

    const auto links = grid.route_links(job.route);
    job.start_mini_slot = schedule.earliest_common_start(links, job.mini_slots);
    job.status = JobStatus::Active;
    for (auto l : links) {
      schedule.reserve_link(l, job.range(), job.id);
      out.audit.push_back({job.id, l, job.range()});
    }

    const bool fits = job.range().end <= timing.mini_slots_per_slot;
    job.status = fits && job.occupancy_s <= timing.deadline_s ? JobStatus::Done : JobStatus::Overrun;
    if (job.status == JobStatus::Overrun) ++out.overruns;

    out.net_J[static_cast<std::size_t>(d.source_id)] -= d.gross_J;
    out.net_J[static_cast<std::size_t>(d.consumer_id)] += d.delivered_J;
    out.jobs.push_back(std::move(job));
  }

  // Release in completion order; nothing is left reserved when the slot ends.
  std::vector<const TransferJob*> by_end;
  for (const auto& j : out.jobs) by_end.push_back(&j);
  std::stable_sort(by_end.begin(), by_end.end(), [](const TransferJob* a, const TransferJob* b) {
    return a->range().end < b->range().end;
  });
  for (const auto* j : by_end)
    for (auto l : grid.route_links(j->route)) schedule.release_link(l, j->id);
  return out;
}

std::vector<std::pair<LinkUse, LinkUse>> find_collisions(std::span<const LinkUse> audit) {
  std::vector<std::pair<LinkUse, LinkUse>> hits;
  for (std::size_t i = 0; i < audit.size(); ++i)
    for (std::size_t k = i + 1; k < audit.size(); ++k)
      if (audit[i].link == audit[k].link && audit[i].job_id != audit[k].job_id &&
          audit[i].range.overlaps(audit[k].range))
        hits.emplace_back(audit[i], audit[k]);
  return hits;
}

}  // namespace ppgcoop
