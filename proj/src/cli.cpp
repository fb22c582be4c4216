#include "ppgcoop/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ppgcoop/errors.hpp"

namespace ppgcoop {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<double> lambda;
  std::optional<std::uint64_t> horizon;
  std::string out_dir = "out";
  bool hourly = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Scenario config file (key = value lines)");
  cmd->add_option("--seed", o.seed, "Override the master seed");
  cmd->add_option("--policy", o.policy, "Override the policy: lyapunov, radial or random");
  cmd->add_option("--lambda", o.lambda, "Override the drift-plus-penalty weight");
  cmd->add_option("--horizon", o.horizon, "Override the number of simulated slots");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
}

SimConfig build_config(const CommonOptions& o) {
  SimConfig config = o.config_path.empty() ? SimConfig{} : load_config(o.config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.policy) config.policy = parse_policy(*o.policy);
  if (o.lambda) config.lambda = *o.lambda;
  if (o.horizon) config.horizon_slots = *o.horizon;
  config.validate();
  return config;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return f;
}

void print_summary_line(std::ostream& out, const RunResult& r) {
  const auto& s = r.summary;
  fmt::print(out,
             "{:<9} lambda={:<4} delivered={:.1f} kJ demand={:.1f} kJ coverage={:.2f}% "
             "unmet_slots={} overruns={} mean_eb={:.2f}%\n",
             to_string(s.policy), s.lambda, s.total_delivered_J / 1e3, s.total_demand_J / 1e3,
             100.0 * s.coverage, s.unmet_slots, s.overruns, 100.0 * s.mean_eb_fraction);
}

void write_comparison(const std::filesystem::path& path, std::span<const RunResult> runs) {
  auto f = open_out(path);
  f << "policy,lambda,delivered_J,demand_J,gross_J,coverage_percent,outages,unmet,unmet_slots,"
       "overruns,mean_eb_level_J,mean_eb_level_percent,min_offgrid_post_cooperation_J,"
       "c2_violations,theorem1_lhs_J,theorem1_rhs\n";
  for (const auto& r : runs) {
    const auto& s = r.summary;
    fmt::print(f, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(s.policy),
               s.lambda, s.total_delivered_J, s.total_demand_J, s.total_gross_J,
               100.0 * s.coverage, s.outages, s.unmet, s.unmet_slots, s.overruns,
               s.mean_eb_level_J, 100.0 * s.mean_eb_fraction, s.min_offgrid_post_cooperation_J,
               s.c2_violations, s.theorem1.lhs, s.theorem1.rhs);
  }
}

int cmd_run(const CommonOptions& o, std::ostream& out) {
  const auto config = build_config(o);
  const auto result = run(config);
  write_run(o.out_dir, result);
  emit_plot_data(o.out_dir, std::span<const RunResult>(&result, 1), o.hourly);
  print_summary_line(out, result);
  fmt::print(out, "metrics written to {}\n", o.out_dir);
  return kExitOk;
}

int cmd_compare(const CommonOptions& o, const std::vector<std::string>& names, std::ostream& out) {
  const auto config = build_config(o);
  std::vector<Policy> policies;
  for (const auto& n : names) policies.push_back(parse_policy(n));
  const auto runs = compare(config, policies);
  const std::filesystem::path dir(o.out_dir);
  for (const auto& r : runs) write_run(dir / std::string(to_string(r.summary.policy)), r);
  write_comparison(dir / "compare.csv", runs);
  emit_plot_data(dir, runs, o.hourly);
  for (const auto& r : runs) print_summary_line(out, r);
  return kExitOk;
}

int cmd_sweep(const CommonOptions& o, const std::vector<double>& values, std::ostream& out) {
  const auto config = build_config(o);
  const auto runs = sweep_lambda(config, values);
  const std::filesystem::path dir(o.out_dir);
  write_comparison(dir / "lambda_sweep.csv", runs);
  emit_lambda_plot(dir, runs);
  for (const auto& r : runs) print_summary_line(out, r);
  return kExitOk;
}

int cmd_validate(const std::string& config_path, const std::string& harvest,
                 const std::string& clusters, std::ostream& out) {
  const SimConfig config = config_path.empty() ? SimConfig{} : load_config(config_path);
  if (harvest.empty() && clusters.empty())
    throw ConfigError("validate-traces needs --harvest and/or --clusters");
  if (!harvest.empty()) {
    const auto h = load_harvest(harvest, config.slot_duration_s, config.capacity_J,
                                config.harvest_peak_fraction);
    fmt::print(out, "{}: ok, {} slots, scale {} J/unit\n", harvest, h.size(), h.scale_J_per_unit);
  }
  if (!clusters.empty()) {
    const auto p = load_profiles(clusters, config.slots_per_day(), config.bs_count(), config.seed);
    fmt::print(out, "{}: ok, {} clusters x {} slots\n", clusters, p.clusters.size(),
               p.slots_per_day());
  }
  return kExitOk;
}

struct GenOptions {
  std::string out_dir = "traces";
  int days = 1;
  std::uint64_t seed = 7;
  double wind_level = 0.35;
  double wind_variability = 0.5;
  int sample_period_s = 30;
  int slot_duration_s = 60;
};

int cmd_gen(const GenOptions& g, std::ostream& out) {
  if (g.days < 1) throw ConfigError("--days must be at least 1");
  if (g.sample_period_s <= 0 || g.slot_duration_s <= 0 || 86400 % g.slot_duration_s != 0)
    throw ConfigError("slot duration must divide one day and sample period must be positive");
  const std::filesystem::path dir(g.out_dir);
  {
    auto f = open_out(dir / "clusters.csv");
    write_load_profiles(f, synthetic_load_profiles(
                             static_cast<std::size_t>(86400 / g.slot_duration_s),
                             derive_seed(g.seed, SeedStream::SyntheticLoad)));
  }
  {
    auto f = open_out(dir / "harvest.csv");
    write_harvest(f, synthetic_harvest(g.days, g.sample_period_s, g.wind_level,
                                       derive_seed(g.seed, SeedStream::SyntheticHarvest),
                                       g.wind_variability));
  }
  fmt::print(out, "wrote {} and {}\n", (dir / "clusters.csv").string(),
             (dir / "harvest.csv").string());
  return kExitOk;
}

}  // namespace

void emit_plot_data(const std::filesystem::path& dir, std::span<const RunResult> runs,
                    bool hourly) {
  std::size_t n = 0;
  std::size_t per_row = 1;
  if (!runs.empty()) {
    n = runs.front().slots.size();
    if (hourly) per_row = static_cast<std::size_t>(3600 / runs.front().config.slot_duration_s);
  }
  per_row = std::max<std::size_t>(per_row, 1);
  const std::size_t rows = (n + per_row - 1) / per_row;
  const char* index = hourly ? "hour" : "slot";

  // mean of `value(slot)` over row r
  const auto mean_of = [&](const RunResult& r, std::size_t row, auto value) {
    const std::size_t begin = row * per_row;
    const std::size_t end = std::min(begin + per_row, r.slots.size());
    double sum = 0.0;
    for (std::size_t t = begin; t < end; ++t) sum += value(r.slots[t]);
    return end > begin ? sum / static_cast<double>(end - begin) : 0.0;
  };

  auto delivered = open_out(dir / "plot_delivered.csv");
  delivered << index;
  for (const auto& r : runs) delivered << ",delivered_" << to_string(r.summary.policy) << "_J";
  delivered << '\n';
  for (std::size_t row = 0; row < rows; ++row) {
    delivered << row;
    for (const auto& r : runs)
      fmt::print(delivered, ",{}", mean_of(r, row, [](const SlotMetrics& m) { return m.delivered_J; }));
    delivered << '\n';
  }

  auto demand = open_out(dir / "plot_demand.csv");
  demand << index << ",demand_J\n";
  for (std::size_t row = 0; row < rows; ++row)
    fmt::print(demand, "{},{}\n", row,
               mean_of(runs.front(), row, [](const SlotMetrics& m) { return m.demand_J; }));
}

void emit_lambda_plot(const std::filesystem::path& dir, std::span<const RunResult> runs) {
  auto f = open_out(dir / "plot_eb_lambda.csv");
  f << "lambda,mean_eb_level_percent\n";
  for (const auto& r : runs)
    fmt::print(f, "{},{}\n", r.summary.lambda, 100.0 * r.summary.mean_eb_fraction);
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy cooperation simulator for energy-harvesting base stations on a power "
               "packet grid"};
  app.require_subcommand(1, 1);

  CommonOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Simulate one policy and write per-slot metrics");
  add_common(run_cmd, run_opts);
  run_cmd->add_flag("--hourly", run_opts.hourly, "Aggregate plot series per hour");

  CommonOptions cmp_opts;
  std::vector<std::string> policies{"lyapunov", "radial", "random"};
  auto* cmp_cmd = app.add_subcommand("compare", "Run several policies on identical inputs");
  add_common(cmp_cmd, cmp_opts);
  cmp_cmd->add_option("--policies", policies, "Policies to compare")
    ->delimiter(',')
    ->capture_default_str();
  cmp_cmd->add_flag("--hourly", cmp_opts.hourly, "Aggregate plot series per hour");

  CommonOptions sweep_opts;
  std::vector<double> values{0.2, 0.4, 0.6, 0.8, 1.0};
  auto* sweep_cmd = app.add_subcommand("sweep-lambda", "Run the configured policy for each lambda");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--values", values, "Comma-separated lambda values")
    ->delimiter(',')
    ->capture_default_str();

  std::string val_config, val_harvest, val_clusters;
  auto* val_cmd = app.add_subcommand("validate-traces", "Check trace files against their schema");
  val_cmd->add_option("--config", val_config, "Config providing slot duration and capacity");
  val_cmd->add_option("--harvest", val_harvest, "Harvest trace (timestamp,solar,wind)");
  val_cmd->add_option("--clusters", val_clusters, "Load clusters (slot,cluster0..cluster3)");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-traces", "Write synthetic load and harvest traces");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->capture_default_str();
  gen_cmd->add_option("--days", gen.days, "Days of harvest samples")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--wind-level", gen.wind_level, "Mean wind relative to solar peak")
    ->capture_default_str();
  gen_cmd->add_option("--wind-variability", gen.wind_variability,
                      "Scale of the slow wind fluctuation")
    ->capture_default_str();
  gen_cmd->add_option("--sample-period", gen.sample_period_s, "Harvest sample period in seconds")
    ->capture_default_str();
  gen_cmd->add_option("--slot", gen.slot_duration_s, "Slot duration for the load profiles")
    ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, out);
    if (*cmp_cmd) return cmd_compare(cmp_opts, policies, out);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, values, out);
    if (*val_cmd) return cmd_validate(val_config, val_harvest, val_clusters, out);
    if (*gen_cmd) return cmd_gen(gen, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitValidation;
  } catch (const ParseError& e) {
    fmt::print(err, "trace error: {}\n", e.what());
    return kExitValidation;
  } catch (const DomainError& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(err, "runtime failure: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace ppgcoop
