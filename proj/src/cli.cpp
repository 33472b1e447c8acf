#include "mfrmab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfrmab/errors.hpp"
#include "mfrmab/io.hpp"
#include "mfrmab/parallel.hpp"
#include "mfrmab/sim.hpp"

namespace mfrmab {
namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string domain;
  std::string algo;
  std::optional<int> arms, budget, episodes, horizon;
  std::optional<double> c, delta, epsilon;
  std::optional<int> seed_count;
  std::uint64_t seed_base = 1;
  std::vector<std::uint64_t> seed_list;
  std::optional<std::uint64_t> instance_seed;
  bool carry_over = false;
  bool paper_scale = false;
  bool serial = false;
  bool print_config = false;
  std::string out_dir;
};

void add_common(CLI::App& app, CommonArgs& a) {
  app.add_option("--config", a.config_path, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  app.add_option("--domain", a.domain, "synthetic | synthetic-alternate | cpap");
  app.add_option("--algo", a.algo, "mf-rmab | optimal");
  app.add_option("--arms,-n", a.arms, "number of arms N");
  app.add_option("--budget,-k", a.budget, "pulls per step K");
  app.add_option("--episodes,-T", a.episodes, "number of episodes T");
  app.add_option("--horizon,-H", a.horizon, "steps per episode H");
  app.add_option("--c", a.c, "merit exponent c in g(mu) = exp(c mu)");
  app.add_option("--delta", a.delta, "confidence parameter");
  app.add_option("--epsilon", a.epsilon, "non-degeneracy clip");
  app.add_option("--seeds", a.seed_count, "number of seeds, starting at --seed-base");
  app.add_option("--seed-base", a.seed_base, "first seed when --seeds is given");
  app.add_option("--seed-list", a.seed_list, "explicit seeds")->delimiter(',');
  app.add_option("--instance-seed", a.instance_seed, "share one arm population across seeds");
  app.add_flag("--carry-over", a.carry_over, "keep arm states across episodes");
  app.add_flag("--paper-scale", a.paper_scale, "T = 10000, H = 200");
  app.add_flag("--serial", a.serial, "run seeds on one thread");
  app.add_flag("--print-config", a.print_config, "print the resolved config and exit");
  app.add_option("--out", a.out_dir, "output directory (default $MFRMAB_OUT_DIR or ./out)");
}

ExperimentConfig resolve(const CommonArgs& a) {
  ExperimentConfig c;
  if (!a.config_path.empty()) c = io::load_config(a.config_path, c);
  if (a.paper_scale) io::apply_paper_scale(c);
  try {
    if (!a.domain.empty()) c.domain.variant = parse_domain(a.domain);
    if (!a.algo.empty()) c.algorithm = parse_algorithm(a.algo);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (a.arms) c.num_arms = *a.arms;
  if (a.budget) c.budget = *a.budget;
  if (a.episodes) c.episodes = *a.episodes;
  if (a.horizon) c.horizon = *a.horizon;
  if (a.c) c.merit_c = *a.c;
  if (a.delta) c.delta = *a.delta;
  if (a.epsilon) c.epsilon = *a.epsilon;
  if (a.instance_seed) c.instance_seed = *a.instance_seed;
  if (a.carry_over) c.carry_over_state = true;
  if (!a.seed_list.empty()) {
    c.seeds = a.seed_list;
  } else if (a.seed_count) {
    if (*a.seed_count < 1) throw ConfigError("--seeds must be at least 1");
    c.seeds.clear();
    for (int i = 0; i < *a.seed_count; ++i) c.seeds.push_back(a.seed_base + static_cast<std::uint64_t>(i));
  }
  return c;
}

fs::path out_dir(const CommonArgs& a) {
  if (!a.out_dir.empty()) return a.out_dir;
  if (const char* env = std::getenv("MFRMAB_OUT_DIR"); env && *env) return env;
  return "out";
}

std::string joined_command(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

template <typename Writer>
std::string write_file(const fs::path& dir, const std::string& name, Writer&& w) {
  const fs::path p = dir / name;
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  w(os);
  return p.string();
}

void progress(const RunRecord& r) {
  std::cerr << "seed " << r.seed << " done: FR_T = " << io::format_number(r.fr_cum.empty() ? 0.0 : r.fr_cum.back())
            << " (" << io::format_number(r.wall_seconds) << " s)\n";
}

int do_run(const CommonArgs& a, bool diagnostics, const std::vector<double>& sweep, const std::string& command) {
  ExperimentConfig c = resolve(a);
  c.record_snapshots = diagnostics && sweep.empty();
  c.validate();
  if (a.print_config) {
    std::cout << io::config_to_json(c) << '\n';
    return kExitOk;
  }
  const auto exec = a.serial ? Execution::Serial : Execution::Parallel;
  const fs::path dir = out_dir(a);
  fs::create_directories(dir);
  const std::string hash = config_hash(c);

  io::RunManifest m{hash, c.seeds, io::code_version(), command, {}, io::design_flags(c)};
  if (!sweep.empty()) {
    for (double r : sweep)
      if (!(r > 0.0 && r <= 1.0)) throw ConfigError("--sweep-kn ratios must lie in (0, 1]");
    const auto points = kn_sweep(c, sweep);
    m.outputs.push_back(write_file(dir, "sweep.csv", [&](std::ostream& os) { io::write_sweep_csv(os, hash, points); }));
  } else {
    const auto records = run_seeds(c, exec, progress);
    m.outputs.push_back(write_file(dir, "regret.csv", [&](std::ostream& os) { io::write_regret_csv(os, records); }));
    m.outputs.push_back(
        write_file(dir, "exposure.csv", [&](std::ostream& os) { io::write_exposure_csv(os, records); }));
    if (c.record_snapshots)
      m.outputs.push_back(
          write_file(dir, "diagnostics.csv", [&](std::ostream& os) { io::write_diagnostics_csv(os, records); }));
    m.outputs.push_back(
        write_file(dir, "summary.json", [&](std::ostream& os) { os << io::summary_json(c, records) << '\n'; }));
    const auto agg = aggregate_runs(records);
    std::cout << "config " << hash << ": FR_T mean " << io::format_number(agg.final_mean) << " std "
              << io::format_number(agg.final_std) << " over " << agg.runs << " seed(s)\n";
  }
  io::append_manifest(dir / "manifest.jsonl", m);
  return kExitOk;
}

std::vector<std::pair<int, int>> parse_grid(const std::string& text) {
  std::vector<std::pair<int, int>> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("grid entries look like N:K, got '" + item + "'");
    try {
      grid.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("bad grid entry '" + item + "'");
    }
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

int do_table1(const CommonArgs& a, const std::string& grid_text, const std::vector<std::string>& domains,
              const std::string& command) {
  ExperimentConfig base = resolve(a);
  const auto grid = parse_grid(grid_text);
  std::vector<Domain> ds;
  try {
    for (const auto& d : domains) ds.push_back(parse_domain(d));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [n, k] : grid) {
    ExperimentConfig c = base;
    c.num_arms = n;
    c.budget = k;
    c.validate();
  }
  if (a.print_config) {
    std::cout << io::config_to_json(base) << '\n';
    return kExitOk;
  }
  const auto exec = a.serial ? Execution::Serial : Execution::Parallel;
  const fs::path dir = out_dir(a);
  fs::create_directories(dir);

  std::vector<io::Table1Row> rows;
  for (Domain d : ds) {
    for (const auto& [n, k] : grid) {
      ExperimentConfig c = base;
      c.domain.variant = d;
      c.num_arms = n;
      c.budget = k;
      const auto records = run_seeds(c, exec);
      rows.push_back(io::summarize_diagnostics(records, d));
      std::cerr << to_string(d) << " N=" << n << " K=" << k << ": G " << io::format_number(rows.back().g_mean)
                << ", t0 " << io::format_number(rows.back().t0_mean) << '\n';
    }
  }
  io::RunManifest m{config_hash(base), base.seeds, io::code_version(), command, {}, io::design_flags(base)};
  m.outputs.push_back(write_file(dir, "table1.csv", [&](std::ostream& os) { io::write_table1_csv(os, rows); }));
  io::append_manifest(dir / "manifest.jsonl", m);
  return kExitOk;
}

int do_kernels(const CommonArgs& a, const std::string& command) {
  ExperimentConfig c = resolve(a);
  c.validate();
  if (a.print_config) {
    std::cout << io::config_to_json(c) << '\n';
    return kExitOk;
  }
  const fs::path dir = out_dir(a);
  fs::create_directories(dir);
  const std::string hash = config_hash(c);
  io::RunManifest m{hash, c.seeds, io::code_version(), command, {}, io::design_flags(c)};
  m.outputs.push_back(write_file(dir, "kernels.csv", [&](std::ostream& os) {
    os << io::kKernelHeader << '\n';
    for (auto seed : c.seeds) {
      std::ostringstream one;
      const auto pop = population_for(c, seed);
      io::write_kernel_csv(one, hash, seed, pop);
      const std::string body = one.str();
      os << body.substr(body.find('\n') + 1);
    }
  }));
  io::append_manifest(dir / "manifest.jsonl", m);
  return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Merit-based fair restless bandit experiments"};
  app.set_version_flag("--version", io::code_version());
  app.require_subcommand(1);

  CommonArgs run_args, table_args, kernel_args;
  bool no_diagnostics = false;
  std::vector<double> sweep;
  auto* run = app.add_subcommand("run", "run one configuration over its seeds");
  add_common(*run, run_args);
  run->add_flag("--no-diagnostics", no_diagnostics, "skip per-episode diagnostics.csv");
  run->add_option("--sweep-kn", sweep, "K/N ratios; writes sweep.csv instead")->delimiter(',');

  std::string grid = "5:1,10:2,20:4,40:8,100:20";
  std::vector<std::string> domains{"synthetic", "synthetic-alternate", "cpap"};
  auto* table = app.add_subcommand("table1", "G and t0 diagnostics over an (N, K) grid");
  add_common(*table, table_args);
  table->add_option("--grid", grid, "comma-separated N:K pairs");
  table->add_option("--domains", domains, "domains to include")->delimiter(',');

  auto* kernels = app.add_subcommand("kernels", "dump the generated arm populations");
  add_common(*kernels, kernel_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const std::string command = joined_command(argc, argv);
  try {
    if (*run) return do_run(run_args, !no_diagnostics, sweep, command);
    if (*table) return do_table1(table_args, grid, domains, command);
    return do_kernels(kernel_args, command);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariantViolation;
  }
}

}  // namespace mfrmab
