#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ppgcoop/domain.hpp"
#include "ppgcoop/random.hpp"
#include "ppgcoop/topology.hpp"

namespace ppgcoop {

enum class Policy { Lyapunov, Radial, Random };

std::string_view to_string(Policy p);
/// Throws ConfigError for unknown names.
Policy parse_policy(std::string_view name);

/// Virtual energy queue per BS, driving the drift term of the allocation
/// objective. Distinct from the physical buffer level.
using VirtualQueues = std::vector<double>;

/// Set of BS ids serving MEC-associated users in the current slot, ascending.
using PrioritySet = std::vector<int>;

struct AllocationDecision {
  int source_id = 0;
  int consumer_id = 0;
  double gross_J = 0.0;      // energy leaving the source
  double fraction = 1.0;     // share of gross that arrives
  int hops = 0;
  bool shortfall = false;    // delivered < demand
  double delivered_J = 0.0;  // energy arriving at the consumer
  double demand_J = 0.0;
};

/// A source as seen from one consumer.
struct SourceCandidate {
  int id = 0;
  int hops = 0;
  double available_J = 0.0;    // remaining tradeable surplus
  double fraction = 1.0;       // delivered fraction over `hops`
  double deliverable_J = 0.0;  // available_J * fraction
};

struct CandidateSets {
  std::vector<SourceCandidate> covering;  // deliverable >= demand
  std::vector<SourceCandidate> partial;   // deliverable < demand
};

/// Everything an allocation policy reads in one slot.
struct AllocationContext {
  const PpgGrid* grid = nullptr;
  std::span<const BsRole> roles;
  std::span<const double> queues;               // beta_obj per BS
  std::span<const double> consumption_estimate_J;  // drift weight per BS
  PrioritySet priority;
  double lambda = 1.0;
  double link_power_W = 20e3;  // phi_max / mini-slot duration
};

struct AllocationResult {
  std::vector<AllocationDecision> decisions;
  std::vector<int> consumer_order;
  std::vector<int> outages;  // consumers that received nothing
  double score = 0.0;        // sum of P2 values of chosen assignments
};

/// Splits sources into those able to cover `demand_J` after losses and the
/// rest. Each set is ordered by hop count, then by id.
CandidateSets eligible_sources(const PpgGrid& grid, std::span<const double> available_J,
                               int consumer, double demand_J, double link_power_W);

/// Consumers in processing order: members of the priority set first, then the
/// remaining consumers, each group by ascending id.
std::vector<int> consumer_order(std::span<const BsRole> roles, const PrioritySet& priority);

double queue_update(double queue_J, double delivered_J, double capacity_J);

/// Drift-plus-penalty value: queue * consumption + lambda * delivered.
double p2_score(double queue_J, double consumption_J, double lambda, double delivered_J);

/// Closest-source allocation with drift-plus-penalty tie resolution.
AllocationResult lyapunov_allocate(const AllocationContext& ctx);

/// Two-ring neighbourhood search for one consumer against the remaining
/// surplus. Returns nothing when no source lies within two hops.
std::optional<AllocationDecision> radial_allocate(const PpgGrid& grid,
                                                  std::span<const double> available_J,
                                                  int consumer, double demand_J,
                                                  double link_power_W);

/// Uniform pick among all sources with remaining surplus.
std::optional<AllocationDecision> random_allocate(const PpgGrid& grid,
                                                  std::span<const double> available_J,
                                                  int consumer, double demand_J,
                                                  double link_power_W, Rng& rng);

/// Runs the benchmark policy over all consumers in priority order.
AllocationResult benchmark_allocate(Policy policy, const AllocationContext& ctx, Rng& rng);

/// Dispatch on policy. `rng` is only consumed by the random policy.
AllocationResult allocate(Policy policy, const AllocationContext& ctx, Rng& rng);

/// Time-average bound check on the delivered-energy process.
struct Theorem1Report {
  bool skipped = false;  // lambda == 0
  std::size_t slots = 0;
  double lhs = 0.0;      // mean delivered energy per slot
  double rhs = 0.0;      // target + (sum of mean queues - capacity)^2 / (2 lambda)
  double target = 0.0;
  bool violated = false;
};

Theorem1Report theorem1_report(std::span<const double> delivered_per_slot,
                               std::span<const double> mean_queue_per_bs, double lambda,
                               double capacity_J, double target_J);

}  // namespace ppgcoop
