#include "ppgcoop/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

namespace {

// Slack for floating-point comparisons on joule-scale quantities.
constexpr double kEnergyTolerance_J = 1e-6;

std::filesystem::path resolve(const SimConfig& config, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_relative() && !config.base_dir.empty()) p = config.base_dir / p;
  return p;
}

SimConfig effective_config(SimConfig config) {
  if (!config.clusters_file.empty())
    config.clusters_file = std::filesystem::absolute(resolve(config, config.clusters_file)).string();
  if (!config.harvest_file.empty())
    config.harvest_file = std::filesystem::absolute(resolve(config, config.harvest_file)).string();
  config.base_dir.clear();
  return config;
}

}  // namespace

std::shared_ptr<const TraceInputs> load_inputs(const SimConfig& config) {
  config.validate();
  auto inputs = std::make_shared<TraceInputs>();
  const auto spd = config.slots_per_day();

  if (config.clusters_file.empty()) {
    inputs->loads.clusters =
      synthetic_load_profiles(spd, derive_seed(config.seed, SeedStream::SyntheticLoad));
    inputs->loads.assignment = assign_clusters(
      config.bs_count(), kClusterCount, derive_seed(config.seed, SeedStream::ClusterAssignment));
  } else {
    inputs->loads = load_profiles(resolve(config, config.clusters_file), spd, config.bs_count(),
                                  derive_seed(config.seed, SeedStream::ClusterAssignment));
  }

  if (config.harvest_file.empty()) {
    const auto days = std::max<std::uint64_t>(1, (config.horizon_slots + spd - 1) / spd);
    const auto raw = synthetic_harvest(static_cast<int>(days), config.synthetic_sample_period_s,
                                       config.synthetic_wind_level,
                                       derive_seed(config.seed, SeedStream::SyntheticHarvest),
                                       config.synthetic_wind_variability);
    inputs->harvest = scale_harvest(resample(raw, config.slot_duration_s), config.capacity_J,
                                    config.harvest_peak_fraction);
  } else {
    inputs->harvest = load_harvest(resolve(config, config.harvest_file), config.slot_duration_s,
                                   config.capacity_J, config.harvest_peak_fraction);
  }
  if (inputs->harvest.size() < config.horizon_slots)
    throw ConfigError(fmt::format("harvest trace covers {} slots, horizon needs {}",
                                  inputs->harvest.size(), config.horizon_slots));
  return inputs;
}

double SlotMetrics::min_offgrid_post_cooperation_J() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : stations)
    if (!s.grid_connected) m = std::min(m, s.post_cooperation_J());
  return m;
}

double SlotMetrics::mean_level_end_J() const {
  if (stations.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : stations) sum += s.level_end_J;
  return sum / static_cast<double>(stations.size());
}

Simulation::Simulation(SimConfig config) : Simulation(config, load_inputs(config)) {}

Simulation::Simulation(SimConfig config, std::shared_ptr<const TraceInputs> inputs)
  : config_(effective_config(std::move(config))),
    inputs_(std::move(inputs)),
    grid_(config_.grid_rows, config_.grid_cols, config_.cable()),
    mobility_rng_(derive_seed(config_.seed, SeedStream::Mobility)),
    policy_rng_(derive_seed(config_.seed, SeedStream::RandomPolicy)) {
  config_.validate();
  const int n = config_.bs_count();
  stations_.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    const auto node = grid_.node_of(id);
    BaseStation bs;
    bs.id = id;
    bs.row = node.row;
    bs.col = node.col;
    bs.grid_connected = config_.is_on_grid(id);
    bs.buffer = make_buffer(config_.capacity_J, config_.low_threshold_fraction,
                            config_.up_threshold_fraction, config_.initial_level_J(id));
    bs.load_profile_id = inputs_->loads.assignment.at(static_cast<std::size_t>(id));
    bs.idle_energy_J = config_.idle_energy_J;
    bs.max_load_energy_J = config_.max_load_energy_J;
    stations_.push_back(bs);
    bs_positions_.push_back({node.col * config_.bs_spacing_m, node.row * config_.bs_spacing_m});
  }
  queues_.assign(static_cast<std::size_t>(n), 0.0);
  last_consumption_J_.assign(static_cast<std::size_t>(n), 0.0);
  groups_ = init_groups(config_.highway(), mobility_rng_);
}

void Simulation::set_level(int bs, double level_J) {
  auto& b = stations_.at(static_cast<std::size_t>(bs)).buffer;
  if (level_J < 0.0 || level_J > b.capacity_J) throw DomainError("set_level: outside [0, capacity]");
  b.level_J = level_J;
}

void Simulation::set_priority_override(std::optional<PrioritySet> priority) {
  priority_override_ = std::move(priority);
}

SlotMetrics Simulation::step() {
  const auto n = stations_.size();
  SlotMetrics m;
  m.slot = slot_;
  m.stations.resize(n);

  // (1) buffer reports
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = m.stations[i];
    rec.bs = static_cast<int>(i);
    rec.grid_connected = stations_[i].grid_connected;
    rec.level_start_J = stations_[i].buffer.level_J;
    rec.queue_J = queues_[i];
  }

  // (2) mobility and association
  if (slot_ > 0)
    for (auto& g : groups_)
      g = rpgm_step(g, config_.slot_duration_s, config_.highway(), mobility_rng_);
  m.serving = priority_override_ ? *priority_override_
                                 : association_set(groups_, bs_positions_).serving;

  // (3) roles
  std::vector<BsRole> roles(n);
  for (std::size_t i = 0; i < n; ++i) {
    roles[i] = classify_role(stations_[i].buffer, stations_[i].grid_connected);
    m.stations[i].role = roles[i];
    if (roles[i].is_consumer()) {
      ++m.consumers;
      m.demand_J += roles[i].demand_J();
    } else if (roles[i].is_source()) {
      ++m.sources;
    }
  }

  // (4) allocation
  AllocationContext ctx;
  ctx.grid = &grid_;
  ctx.roles = roles;
  ctx.queues = queues_;
  ctx.consumption_estimate_J = last_consumption_J_;
  ctx.priority = m.serving;
  ctx.lambda = config_.lambda;
  ctx.link_power_W = config_.link_power_W();
  const auto alloc = allocate(config_.policy, ctx, policy_rng_);
  m.outages = static_cast<int>(alloc.outages.size());
  m.p2_score = alloc.score;

  // (5) transfers
  auto outcome = execute_transfers(alloc.decisions, grid_, config_.timing());
  m.overruns = outcome.overruns;
  for (const auto& d : alloc.decisions) {
    m.stations[static_cast<std::size_t>(d.consumer_id)].received_J += d.delivered_J;
    m.stations[static_cast<std::size_t>(d.source_id)].sent_J += d.gross_J;
    m.delivered_J += d.delivered_J;
    m.gross_J += d.gross_J;
    m.gross_times_fraction_J += d.gross_J * d.fraction;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = m.stations[i];
    rec.net_transfer_J = outcome.net_J[i];
    m.net_transfer_J += rec.net_transfer_J;
    if (rec.role.is_consumer() && rec.received_J < rec.role.demand_J()) ++m.unmet;
  }

  // (6) load and harvest, known at the end of the slot
  const auto& h = inputs_->harvest;
  const double shared_harvest =
    harvest_select(h.solar_J.at(slot_), h.wind_J.at(slot_), config_.offpeak_threshold_J());
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = m.stations[i];
    rec.consumption_J =
      bs_consumption(stations_[i], inputs_->loads.load(static_cast<int>(i), slot_));
    rec.harvest_J = shared_harvest * config_.harvest_multiplier(static_cast<int>(i));
  }

  // (7) buffer update, grid purchase after harvest, consumption and transfer
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = m.stations[i];
    auto& buffer = stations_[i].buffer;
    double raw = rec.level_start_J + rec.harvest_J - rec.consumption_J + rec.net_transfer_J;
    if (stations_[i].grid_connected) {
      rec.purchased_J = grid_purchase(buffer.with_level(raw));
      raw += rec.purchased_J;
    }
    const auto settled = settle_level(raw, buffer.capacity_J);
    buffer.level_J = settled.level_J;
    rec.level_end_J = settled.level_J;
    rec.spilled_J = settled.spilled_J;
    rec.shortfall_J = settled.shortfall_J;
  }

  // (8) virtual queues
  for (std::size_t i = 0; i < n; ++i) {
    queues_[i] = queue_update(queues_[i], m.stations[i].received_J, config_.capacity_J);
    last_consumption_J_[i] = m.stations[i].consumption_J;
  }

  m.jobs = std::move(outcome.jobs);
  m.audit = std::move(outcome.audit);
  check_invariants(m);
  ++slot_;
  return m;
}

void Simulation::check_invariants(const SlotMetrics& m) const {
  std::vector<std::string> problems;
  const double scale = std::max(1.0, m.delivered_J);
  if (std::abs(m.delivered_J - m.gross_times_fraction_J) > 1e-9 * scale)
    problems.push_back(fmt::format("delivered {} != gross*x {}", m.delivered_J,
                                   m.gross_times_fraction_J));
  if (m.net_transfer_J > 1e-9 * std::max(1.0, m.gross_J))
    problems.push_back(fmt::format("net transfer {} > 0", m.net_transfer_J));
  for (const auto& s : m.stations) {
    const double expected = s.level_start_J + s.harvest_J + s.net_transfer_J + s.purchased_J -
                            s.consumption_J - s.spilled_J + s.shortfall_J;
    if (std::abs(expected - s.level_end_J) > kEnergyTolerance_J)
      problems.push_back(fmt::format("bs {}: accounting gap {}", s.bs, s.level_end_J - expected));
    if (s.level_end_J < 0.0 || s.level_end_J > config_.capacity_J)
      problems.push_back(fmt::format("bs {}: level {} out of bounds", s.bs, s.level_end_J));
    if (s.sent_J > s.role.surplus_J() + kEnergyTolerance_J)
      problems.push_back(fmt::format("bs {}: sent {} exceeds surplus {}", s.bs, s.sent_J,
                                     s.role.surplus_J()));
  }
  if (problems.empty()) return;

  std::ostringstream dump;
  dump << fmt::format("invariant violation in slot {}:\n", m.slot);
  for (const auto& p : problems) dump << "  " << p << '\n';
  write_stations_csv(dump, std::span<const SlotMetrics>(&m, 1));
  throw InvariantViolation(dump.str());
}

RunSummary summarize(const SimConfig& config, std::span<const SlotMetrics> slots,
                     std::span<const double> mean_queue_per_bs) {
  RunSummary s;
  s.policy = config.policy;
  s.lambda = config.lambda;
  s.slots = slots.size();
  double level_sum = 0.0;
  std::size_t level_count = 0;
  s.min_offgrid_post_cooperation_J = slots.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  std::vector<double> delivered_series;
  delivered_series.reserve(slots.size());
  for (const auto& m : slots) {
    s.total_demand_J += m.demand_J;
    s.total_delivered_J += m.delivered_J;
    s.total_gross_J += m.gross_J;
    s.outages += m.outages;
    s.unmet += m.unmet;
    s.unmet_slots += m.unmet > 0 ? 1 : 0;
    s.overruns += m.overruns;
    s.jobs += static_cast<int>(m.jobs.size());
    delivered_series.push_back(m.delivered_J);
    for (const auto& st : m.stations) {
      s.total_purchased_J += st.purchased_J;
      s.total_harvest_J += st.harvest_J;
      s.total_consumption_J += st.consumption_J;
      s.total_spilled_J += st.spilled_J;
      s.total_shortfall_J += st.shortfall_J;
      level_sum += st.level_end_J;
      ++level_count;
      if (!st.grid_connected) {
        s.min_offgrid_post_cooperation_J =
          std::min(s.min_offgrid_post_cooperation_J, st.post_cooperation_J());
        if (st.post_cooperation_J() < config.low_threshold_J() - kEnergyTolerance_J)
          ++s.c2_violations;
      }
    }
  }
  s.coverage = s.total_demand_J > 0.0 ? s.total_delivered_J / s.total_demand_J : 1.0;
  s.mean_eb_level_J = level_count ? level_sum / static_cast<double>(level_count) : 0.0;
  s.mean_eb_fraction = s.mean_eb_level_J / config.capacity_J;
  if (!slots.empty()) {
    const double target = config.theorem_target_J.value_or(
      s.total_demand_J / static_cast<double>(slots.size()));
    s.theorem1 = theorem1_report(delivered_series, mean_queue_per_bs, config.lambda,
                                 config.capacity_J, target);
  } else {
    s.theorem1.skipped = true;
  }
  return s;
}

RunResult run(const SimConfig& config) { return run(config, load_inputs(config)); }

RunResult run(const SimConfig& config, std::shared_ptr<const TraceInputs> inputs) {
  Simulation sim(config, std::move(inputs));
  RunResult result;
  result.config = sim.config();
  result.slots.reserve(config.horizon_slots);
  std::vector<double> queue_sum(static_cast<std::size_t>(config.bs_count()), 0.0);
  for (std::uint64_t t = 0; t < config.horizon_slots; ++t) {
    result.slots.push_back(sim.step());
    for (std::size_t i = 0; i < queue_sum.size(); ++i) queue_sum[i] += sim.queues()[i];
  }
  if (config.horizon_slots > 0)
    for (auto& q : queue_sum) q /= static_cast<double>(config.horizon_slots);
  result.summary = summarize(result.config, result.slots, queue_sum);
  return result;
}

namespace {

std::vector<RunResult> run_variants(std::vector<SimConfig> variants,
                                    std::shared_ptr<const TraceInputs> inputs) {
  std::vector<std::future<RunResult>> futures;
  futures.reserve(variants.size());
  for (const auto& v : variants)
    futures.push_back(std::async(std::launch::async, [v, inputs] { return run(v, inputs); }));
  std::vector<RunResult> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace

std::vector<RunResult> compare(const SimConfig& config, std::span<const Policy> policies) {
  auto inputs = load_inputs(config);
  std::vector<SimConfig> variants;
  for (Policy p : policies) {
    auto c = config;
    c.policy = p;
    variants.push_back(c);
  }
  return run_variants(std::move(variants), inputs);
}

std::vector<RunResult> sweep_lambda(const SimConfig& config, std::span<const double> lambdas) {
  auto inputs = load_inputs(config);
  std::vector<SimConfig> variants;
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError(fmt::format("lambda {} must be non-negative", l));
    auto c = config;
    c.lambda = l;
    variants.push_back(c);
  }
  return run_variants(std::move(variants), inputs);
}

void write_slots_csv(std::ostream& out, std::span<const SlotMetrics> slots) {
  out << "slot,assoc_size,consumers,sources,demand_J,delivered_J,gross_J,loss_J,purchased_J,"
         "harvest_J,consumption_J,net_transfer_J,outages,unmet,overruns,jobs,mean_level_J,"
         "min_offgrid_post_cooperation_J,p2_score\n";
  for (const auto& m : slots) {
    double purchased = 0.0, harvest = 0.0, consumption = 0.0;
    for (const auto& s : m.stations) {
      purchased += s.purchased_J;
      harvest += s.harvest_J;
      consumption += s.consumption_J;
    }
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", m.slot,
               m.serving.size(), m.consumers, m.sources, m.demand_J, m.delivered_J, m.gross_J,
               m.gross_J - m.delivered_J, purchased, harvest, consumption, m.net_transfer_J,
               m.outages, m.unmet, m.overruns, m.jobs.size(), m.mean_level_end_J(),
               m.min_offgrid_post_cooperation_J(), m.p2_score);
  }
}

void write_stations_csv(std::ostream& out, std::span<const SlotMetrics> slots) {
  out << "slot,bs,grid_connected,role,level_start_J,queue_J,demand_J,received_J,sent_J,"
         "net_transfer_J,purchased_J,harvest_J,consumption_J,level_end_J,spilled_J,shortfall_J\n";
  for (const auto& m : slots)
    for (const auto& s : m.stations)
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", m.slot, s.bs,
                 s.grid_connected ? 1 : 0, to_string(s.role.kind), s.level_start_J, s.queue_J,
                 s.role.demand_J(), s.received_J, s.sent_J, s.net_transfer_J, s.purchased_J,
                 s.harvest_J, s.consumption_J, s.level_end_J, s.spilled_J, s.shortfall_J);
}

void write_jobs_csv(std::ostream& out, std::span<const SlotMetrics> slots, const PpgGrid& grid) {
  out << "slot,job,source,consumer,route,hops,fraction,gross_J,delivered_J,demand_J,mini_slots,"
         "start_mini_slot,occupancy_s,status,shortfall\n";
  for (const auto& m : slots)
    for (const auto& j : m.jobs) {
      std::vector<int> ids;
      for (const auto& node : j.route.hops) ids.push_back(grid.id_of(node));
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", m.slot, j.id,
                 j.decision.source_id, j.decision.consumer_id, fmt::join(ids, "-"),
                 j.decision.hops, j.decision.fraction, j.decision.gross_J, j.decision.delivered_J,
                 j.decision.demand_J, j.mini_slots, j.start_mini_slot, j.occupancy_s,
                 to_string(j.status), j.decision.shortfall ? 1 : 0);
    }
}

void write_links_csv(std::ostream& out, std::span<const SlotMetrics> slots, const PpgGrid& grid) {
  out << "slot,job,link,node_a,node_b,begin_mini_slot,end_mini_slot\n";
  for (const auto& m : slots)
    for (const auto& u : m.audit) {
      const auto& link = grid.links().at(u.link);
      fmt::print(out, "{},{},{},{},{},{},{}\n", m.slot, u.job_id, u.link, link.a, link.b,
                 u.range.begin, u.range.end);
    }
}

void write_summary(std::ostream& out, const RunResult& result) {
  const auto& s = result.summary;
  fmt::print(out, "policy = {}\n", to_string(s.policy));
  fmt::print(out, "lambda = {}\n", s.lambda);
  fmt::print(out, "slots = {}\n", s.slots);
  fmt::print(out, "total_demand_J = {}\n", s.total_demand_J);
  fmt::print(out, "total_delivered_J = {}\n", s.total_delivered_J);
  fmt::print(out, "total_gross_J = {}\n", s.total_gross_J);
  fmt::print(out, "total_loss_J = {}\n", s.total_gross_J - s.total_delivered_J);
  fmt::print(out, "demand_coverage_percent = {}\n", 100.0 * s.coverage);
  fmt::print(out, "outages = {}\n", s.outages);
  fmt::print(out, "unmet_consumer_slots = {}\n", s.unmet);
  fmt::print(out, "slots_with_unmet_demand = {}\n", s.unmet_slots);
  fmt::print(out, "overruns = {}\n", s.overruns);
  fmt::print(out, "jobs = {}\n", s.jobs);
  fmt::print(out, "total_purchased_J = {}\n", s.total_purchased_J);
  fmt::print(out, "total_harvest_J = {}\n", s.total_harvest_J);
  fmt::print(out, "total_consumption_J = {}\n", s.total_consumption_J);
  fmt::print(out, "total_spilled_J = {}\n", s.total_spilled_J);
  fmt::print(out, "total_shortfall_J = {}\n", s.total_shortfall_J);
  fmt::print(out, "mean_eb_level_J = {}\n", s.mean_eb_level_J);
  fmt::print(out, "mean_eb_level_percent = {}\n", 100.0 * s.mean_eb_fraction);
  fmt::print(out, "min_offgrid_post_cooperation_J = {}\n", s.min_offgrid_post_cooperation_J);
  fmt::print(out, "c2_violations = {}\n", s.c2_violations);
  const auto& t = s.theorem1;
  if (t.skipped) {
    fmt::print(out, "theorem1 = skipped (lambda = 0)\n");
  } else {
    fmt::print(out, "theorem1_lhs_J = {}\n", t.lhs);
    fmt::print(out, "theorem1_rhs = {}\n", t.rhs);
    fmt::print(out, "theorem1_target_J = {}\n", t.target);
    fmt::print(out, "theorem1_bound_holds = {}\n", t.violated ? "false" : "true");
  }
  write_config(out, result.config, "config.");
}

void write_run(const std::filesystem::path& dir, const RunResult& result) {
  std::filesystem::create_directories(dir);
  const PpgGrid grid(result.config.grid_rows, result.config.grid_cols, result.config.cable());
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", (dir / name).string()));
    return f;
  };
  {
    auto f = open("slots.csv");
    write_slots_csv(f, result.slots);
  }
  {
    auto f = open("stations.csv");
    write_stations_csv(f, result.slots);
  }
  {
    auto f = open("jobs.csv");
    write_jobs_csv(f, result.slots, grid);
  }
  {
    auto f = open("links.csv");
    write_links_csv(f, result.slots, grid);
  }
  {
    auto f = open("summary.txt");
    write_summary(f, result);
  }
}

}  // namespace ppgcoop
