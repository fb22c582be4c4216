#include "ppgcoop/allocation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::Lyapunov: return "lyapunov";
    case Policy::Radial: return "radial";
    case Policy::Random: return "random";
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  if (name == "lyapunov") return Policy::Lyapunov;
  if (name == "radial") return Policy::Radial;
  if (name == "random") return Policy::Random;
  throw ConfigError(fmt::format("unknown policy '{}' (expected lyapunov|radial|random)", name));
}

namespace {

bool by_hops_then_id(const SourceCandidate& a, const SourceCandidate& b) {
  return a.hops != b.hops ? a.hops < b.hops : a.id < b.id;
}

SourceCandidate make_candidate(const PpgGrid& grid, std::span<const double> available_J,
                               int source, int consumer, double link_power_W) {
  SourceCandidate c;
  c.id = source;
  c.hops = grid.hop_count(source, consumer);
  c.available_J = available_J[static_cast<std::size_t>(source)];
  c.fraction = grid.delivered_fraction(c.hops, link_power_W);
  c.deliverable_J = c.available_J * c.fraction;
  return c;
}

// Gross-up the demand for losses when the source can afford it, otherwise
// hand over the whole remaining surplus.
AllocationDecision assign(const SourceCandidate& src, int consumer, double demand_J) {
  AllocationDecision d;
  d.source_id = src.id;
  d.consumer_id = consumer;
  d.fraction = src.fraction;
  d.hops = src.hops;
  d.demand_J = demand_J;
  const double grossed = demand_J / src.fraction;
  if (src.deliverable_J >= demand_J && grossed <= src.available_J) {
    d.gross_J = grossed;
    d.delivered_J = demand_J;
  } else {
    d.gross_J = std::min(grossed, src.available_J);
    d.delivered_J = d.gross_J * src.fraction;
  }
  d.shortfall = d.delivered_J < demand_J;
  return d;
}

void debit(std::vector<double>& available, const AllocationDecision& d) {
  auto& a = available[static_cast<std::size_t>(d.source_id)];
  a = std::max(a - d.gross_J, 0.0);
}

std::vector<double> initial_surplus(std::span<const BsRole> roles) {
  std::vector<double> v(roles.size());
  std::transform(roles.begin(), roles.end(), v.begin(),
                 [](const BsRole& r) { return r.surplus_J(); });
  return v;
}

double value_at(std::span<const double> v, int n) {
  const auto i = static_cast<std::size_t>(n);
  return i < v.size() ? v[i] : 0.0;
}

}  // namespace

CandidateSets eligible_sources(const PpgGrid& grid, std::span<const double> available_J,
                               int consumer, double demand_J, double link_power_W) {
  CandidateSets sets;
  for (int s = 0; s < static_cast<int>(available_J.size()); ++s) {
    if (s == consumer || !(available_J[static_cast<std::size_t>(s)] > 0.0)) continue;
    auto c = make_candidate(grid, available_J, s, consumer, link_power_W);
    (c.deliverable_J >= demand_J ? sets.covering : sets.partial).push_back(c);
  }
  std::sort(sets.covering.begin(), sets.covering.end(), by_hops_then_id);
  std::sort(sets.partial.begin(), sets.partial.end(), by_hops_then_id);
  return sets;
}

std::vector<int> consumer_order(std::span<const BsRole> roles, const PrioritySet& priority) {
  std::vector<int> first;
  std::vector<int> rest;
  for (int n = 0; n < static_cast<int>(roles.size()); ++n) {
    if (!roles[static_cast<std::size_t>(n)].is_consumer()) continue;
    const bool prioritized = std::find(priority.begin(), priority.end(), n) != priority.end();
    (prioritized ? first : rest).push_back(n);
  }
  first.insert(first.end(), rest.begin(), rest.end());
  return first;
}

double queue_update(double queue_J, double delivered_J, double capacity_J) {
  return std::max(queue_J + delivered_J - capacity_J, 0.0);
}

double p2_score(double queue_J, double consumption_J, double lambda, double delivered_J) {
  return queue_J * consumption_J + lambda * delivered_J;
}

AllocationResult lyapunov_allocate(const AllocationContext& ctx) {
  AllocationResult result;
  result.consumer_order = consumer_order(ctx.roles, ctx.priority);
  auto available = initial_surplus(ctx.roles);

  for (int c : result.consumer_order) {
    const double demand = ctx.roles[static_cast<std::size_t>(c)].demand_J();
    const auto sets = eligible_sources(*ctx.grid, available, c, demand, ctx.link_power_W);
    const auto& pool = !sets.covering.empty() ? sets.covering : sets.partial;
    if (pool.empty()) {
      result.outages.push_back(c);
      continue;
    }
    // Only the closest tier is eligible; P2 decides within it, ties to lower id.
    const int min_hops = pool.front().hops;
    const double queue = value_at(ctx.queues, c);
    const double consumption = value_at(ctx.consumption_estimate_J, c);
    std::optional<AllocationDecision> best;
    double best_score = 0.0;
    for (const auto& cand : pool) {
      if (cand.hops != min_hops) break;
      auto d = assign(cand, c, demand);
      const double score = p2_score(queue, consumption, ctx.lambda, d.delivered_J);
      if (!best || score < best_score) {
        best = d;
        best_score = score;
      }
    }
    debit(available, *best);
    result.score += best_score;
    result.decisions.push_back(*best);
  }
  return result;
}

std::optional<AllocationDecision> radial_allocate(const PpgGrid& grid,
                                                  std::span<const double> available_J,
                                                  int consumer, double demand_J,
                                                  double link_power_W) {
  for (int ring = 1; ring <= 2; ++ring) {
    for (int s = 0; s < static_cast<int>(available_J.size()); ++s) {
      if (!(available_J[static_cast<std::size_t>(s)] > 0.0)) continue;
      if (grid.hop_count(s, consumer) != ring) continue;
      return assign(make_candidate(grid, available_J, s, consumer, link_power_W), consumer,
                    demand_J);
    }
  }
  return std::nullopt;
}

std::optional<AllocationDecision> random_allocate(const PpgGrid& grid,
                                                  std::span<const double> available_J,
                                                  int consumer, double demand_J,
                                                  double link_power_W, Rng& rng) {
  std::vector<int> sources;
  for (int s = 0; s < static_cast<int>(available_J.size()); ++s)
    if (s != consumer && available_J[static_cast<std::size_t>(s)] > 0.0) sources.push_back(s);
  if (sources.empty()) return std::nullopt;
  const int pick = sources[rng.below(sources.size())];
  return assign(make_candidate(grid, available_J, pick, consumer, link_power_W), consumer,
                demand_J);
}

AllocationResult benchmark_allocate(Policy policy, const AllocationContext& ctx, Rng& rng) {
  AllocationResult result;
  result.consumer_order = consumer_order(ctx.roles, ctx.priority);
  auto available = initial_surplus(ctx.roles);
  for (int c : result.consumer_order) {
    const double demand = ctx.roles[static_cast<std::size_t>(c)].demand_J();
    const auto d = policy == Policy::Radial
                     ? radial_allocate(*ctx.grid, available, c, demand, ctx.link_power_W)
                     : random_allocate(*ctx.grid, available, c, demand, ctx.link_power_W, rng);
    if (!d) {
      result.outages.push_back(c);
      continue;
    }
    debit(available, *d);
    result.decisions.push_back(*d);
  }
  return result;
}

AllocationResult allocate(Policy policy, const AllocationContext& ctx, Rng& rng) {
  if (policy == Policy::Lyapunov) return lyapunov_allocate(ctx);
  return benchmark_allocate(policy, ctx, rng);
}

Theorem1Report theorem1_report(std::span<const double> delivered_per_slot,
                               std::span<const double> mean_queue_per_bs, double lambda,
                               double capacity_J, double target_J) {
  Theorem1Report r;
  r.slots = delivered_per_slot.size();
  r.target = target_J;
  if (r.slots == 0) throw DomainError("theorem1_report needs at least one slot of history");
  double sum = 0.0;
  for (double v : delivered_per_slot) sum += v;
  r.lhs = sum / static_cast<double>(r.slots);
  if (lambda == 0.0) {
    r.skipped = true;
    return r;
  }
  double queues = 0.0;
  for (double q : mean_queue_per_bs) queues += q;
  const double gap = queues - capacity_J;
  r.rhs = target_J + gap * gap / (2.0 * lambda);
  r.violated = r.lhs > r.rhs;
  return r;
}

}  // namespace ppgcoop
