#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "ppgcoop/allocation.hpp"
#include "ppgcoop/config.hpp"
#include "ppgcoop/domain.hpp"
#include "ppgcoop/ingest.hpp"
#include "ppgcoop/mobility.hpp"
#include "ppgcoop/topology.hpp"
#include "ppgcoop/transfer.hpp"

namespace ppgcoop {

/// Raised when a per-slot accounting invariant fails. The message carries a
/// dump of the offending slot.
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Immutable trace inputs; shared between runs of a comparison.
struct TraceInputs {
  LoadProfileSet loads;
  HarvestTraceSet harvest;
};

/// Loads (or synthesizes) the traces a configuration refers to. Throws
/// ConfigError when the harvest trace is shorter than the horizon.
std::shared_ptr<const TraceInputs> load_inputs(const SimConfig& config);

struct StationRecord {
  int bs = 0;
  bool grid_connected = false;
  BsRole role;
  double level_start_J = 0.0;
  double queue_J = 0.0;  // virtual queue at the start of the slot
  double received_J = 0.0;
  double sent_J = 0.0;
  double net_transfer_J = 0.0;  // G_n(t)
  double purchased_J = 0.0;     // E_n(t)
  double harvest_J = 0.0;       // H_n(t)
  double consumption_J = 0.0;   // theta_BS,n(t)
  double level_end_J = 0.0;
  double spilled_J = 0.0;
  double shortfall_J = 0.0;

  /// Level once this slot's cooperation has been applied, before the slot's
  /// own harvest and consumption.
  double post_cooperation_J() const { return level_start_J + net_transfer_J; }
};

struct SlotMetrics {
  std::uint64_t slot = 0;
  std::vector<StationRecord> stations;
  std::vector<int> serving;  // association set I
  int consumers = 0;
  int sources = 0;
  double demand_J = 0.0;
  double delivered_J = 0.0;
  double gross_J = 0.0;
  double gross_times_fraction_J = 0.0;
  double net_transfer_J = 0.0;
  int outages = 0;  // consumers with no source at all
  int unmet = 0;    // consumers receiving less than their demand
  int overruns = 0;
  std::vector<TransferJob> jobs;
  std::vector<LinkUse> audit;
  double p2_score = 0.0;

  double min_offgrid_post_cooperation_J() const;
  double mean_level_end_J() const;
};

struct RunSummary {
  Policy policy = Policy::Lyapunov;
  double lambda = 1.0;
  std::uint64_t slots = 0;
  double total_demand_J = 0.0;
  double total_delivered_J = 0.0;
  double total_gross_J = 0.0;
  double total_purchased_J = 0.0;
  double total_harvest_J = 0.0;
  double total_consumption_J = 0.0;
  double total_spilled_J = 0.0;
  double total_shortfall_J = 0.0;
  double coverage = 1.0;  // delivered / demand, 1 when there was no demand
  int outages = 0;
  int unmet = 0;
  int unmet_slots = 0;
  int overruns = 0;
  int jobs = 0;
  double mean_eb_level_J = 0.0;
  double mean_eb_fraction = 0.0;
  double min_offgrid_post_cooperation_J = 0.0;
  int c2_violations = 0;
  Theorem1Report theorem1;
};

struct RunResult {
  SimConfig config;
  std::vector<SlotMetrics> slots;
  RunSummary summary;
};

/// One simulation run. Slot event order: read buffer levels, move VUEs and
/// form the association set, classify roles, allocate, execute transfers,
/// sample load and harvest, update buffers (with grid purchase for on-grid
/// stations), update virtual queues, emit metrics.
class Simulation {
public:
  explicit Simulation(SimConfig config);
  Simulation(SimConfig config, std::shared_ptr<const TraceInputs> inputs);

  SlotMetrics step();

  std::uint64_t slot() const { return slot_; }
  const std::vector<BaseStation>& stations() const { return stations_; }
  const VirtualQueues& queues() const { return queues_; }
  const PpgGrid& grid() const { return grid_; }
  const SimConfig& config() const { return config_; }
  const TraceInputs& inputs() const { return *inputs_; }

  /// Overrides a buffer level; used by tests to stage scenarios.
  void set_level(int bs, double level_J);
  /// Overrides the priority set for the following steps instead of deriving it
  /// from mobility. Pass nullopt to return to mobility.
  void set_priority_override(std::optional<PrioritySet> priority);

private:
  void check_invariants(const SlotMetrics& m) const;

  SimConfig config_;
  std::shared_ptr<const TraceInputs> inputs_;
  PpgGrid grid_;
  std::vector<BaseStation> stations_;
  std::vector<Point> bs_positions_;
  VirtualQueues queues_;
  std::vector<double> last_consumption_J_;
  std::vector<VueGroup> groups_;
  Rng mobility_rng_;
  Rng policy_rng_;
  std::optional<PrioritySet> priority_override_;
  std::uint64_t slot_ = 0;
};

RunSummary summarize(const SimConfig& config, std::span<const SlotMetrics> slots,
                     std::span<const double> mean_queue_per_bs);

RunResult run(const SimConfig& config);
RunResult run(const SimConfig& config, std::shared_ptr<const TraceInputs> inputs);

/// Runs every policy on the same seed and traces.
std::vector<RunResult> compare(const SimConfig& config, std::span<const Policy> policies);

/// Runs the configured policy once per lambda value on the same seed and traces.
std::vector<RunResult> sweep_lambda(const SimConfig& config, std::span<const double> lambdas);

// Output writers. All files are comma-separated with a header row.
void write_slots_csv(std::ostream& out, std::span<const SlotMetrics> slots);
void write_stations_csv(std::ostream& out, std::span<const SlotMetrics> slots);
void write_jobs_csv(std::ostream& out, std::span<const SlotMetrics> slots, const PpgGrid& grid);
void write_links_csv(std::ostream& out, std::span<const SlotMetrics> slots, const PpgGrid& grid);
/// Key-value summary followed by the effective configuration echoed with a
/// `config.` prefix.
void write_summary(std::ostream& out, const RunResult& result);

/// Writes slots.csv, stations.csv, jobs.csv, links.csv and summary.txt.
void write_run(const std::filesystem::path& dir, const RunResult& result);

}  // namespace ppgcoop
