#include "mfrmab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#ifndef MFRMAB_VERSION
#define MFRMAB_VERSION "dev"
#endif

namespace mfrmab::io {

using nlohmann::json;

std::string code_version() { return MFRMAB_VERSION; }

namespace {

std::array<double, 4> kernel_to_array(const TransitionKernel& k) {
  return {k.to_good(kBad, kPassive), k.to_good(kBad, kPull), k.to_good(kGood, kPassive),
          k.to_good(kGood, kPull)};
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

TransitionKernel kernel_from(const json& j, const std::string& key) {
  const auto v = get_as<std::vector<double>>(j, key);
  if (v.size() != 4)
    throw ConfigError("config key '" + key + "' needs four probabilities [p00, p01, p10, p11]");
  try {
    return TransitionKernel::from_good_probs(v[0], v[1], v[2], v[3]);
  } catch (const InvalidKernelError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig c) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  for (const auto& [key, value] : root.items()) {
    if (key == "num_arms") c.num_arms = get_as<int>(value, key);
    else if (key == "budget") c.budget = get_as<int>(value, key);
    else if (key == "episodes") c.episodes = get_as<int>(value, key);
    else if (key == "horizon") c.horizon = get_as<int>(value, key);
    else if (key == "delta") c.delta = get_as<double>(value, key);
    else if (key == "merit_c") c.merit_c = get_as<double>(value, key);
    else if (key == "epsilon") c.epsilon = get_as<double>(value, key);
    else if (key == "tail_fraction") c.tail_fraction = get_as<double>(value, key);
    else if (key == "carry_over_state") c.carry_over_state = get_as<bool>(value, key);
    else if (key == "seeds") c.seeds = get_as<std::vector<std::uint64_t>>(value, key);
    else if (key == "instance_seed") {
      if (value.is_null()) c.instance_seed.reset();
      else c.instance_seed = get_as<std::uint64_t>(value, key);
    } else if (key == "domain") {
      try {
        c.domain.variant = parse_domain(get_as<std::string>(value, key));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "algorithm") {
      try {
        c.algorithm = parse_algorithm(get_as<std::string>(value, key));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "cpap_alpha_h") c.domain.cpap.alpha_h = get_as<double>(value, key);
    else if (key == "cpap_non_adherer_fraction") c.domain.cpap.non_adherer_fraction = get_as<double>(value, key);
    else if (key == "cpap_noise_std") c.domain.cpap.noise_std = get_as<double>(value, key);
    else if (key == "cpap_noise_is_variance") c.domain.cpap.noise_is_variance = get_as<bool>(value, key);
    else if (key == "cpap_exact_non_adherer_count")
      c.domain.cpap.exact_non_adherer_count = get_as<bool>(value, key);
    else if (key == "cpap_adherent") c.domain.cpap.adherent = kernel_from(value, key);
    else if (key == "cpap_non_adherent") c.domain.cpap.non_adherent = kernel_from(value, key);
    else if (key == "version" || key == "comment") continue;
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["num_arms"] = c.num_arms;
  j["budget"] = c.budget;
  j["episodes"] = c.episodes;
  j["horizon"] = c.horizon;
  j["delta"] = c.delta;
  j["merit_c"] = c.merit_c;
  j["epsilon"] = c.epsilon;
  j["domain"] = to_string(c.domain.variant);
  j["algorithm"] = to_string(c.algorithm);
  j["seeds"] = c.seeds;
  j["carry_over_state"] = c.carry_over_state;
  j["instance_seed"] = c.instance_seed ? json(*c.instance_seed) : json(nullptr);
  j["tail_fraction"] = c.tail_fraction;
  const auto& p = c.domain.cpap;
  j["cpap_alpha_h"] = p.alpha_h;
  j["cpap_non_adherer_fraction"] = p.non_adherer_fraction;
  j["cpap_noise_std"] = p.noise_std;
  j["cpap_noise_is_variance"] = p.noise_is_variance;
  j["cpap_exact_non_adherer_count"] = p.exact_non_adherer_count;
  j["cpap_adherent"] = kernel_to_array(p.adherent);
  j["cpap_non_adherent"] = kernel_to_array(p.non_adherent);
  return j.dump(2);
}

void apply_paper_scale(ExperimentConfig& config) {
  config.episodes = 10'000;
  config.horizon = 200;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_regret_csv(std::ostream& os, std::span<const RunRecord> records) {
  os << kRegretHeader << '\n';
  for (const auto& r : records)
    for (std::size_t t = 0; t < r.fr.size(); ++t)
      os << r.config_hash << ',' << r.seed << ',' << t + 1 << ',' << format_number(r.fr[t]) << ','
         << format_number(r.fr_cum[t]) << '\n';
}

void write_exposure_csv(std::ostream& os, std::span<const RunRecord> records) {
  os << kExposureHeader << '\n';
  for (const auto& r : records)
    for (std::size_t i = 0; i < r.pulls.size(); ++i)
      os << r.config_hash << ',' << r.seed << ',' << i << ',' << r.pulls[i] << ','
         << format_number(r.mu_star[i]) << ',' << format_number(r.pi_star[i]) << '\n';
}

void write_diagnostics_csv(std::ostream& os, std::span<const RunRecord> records) {
  os << kDiagnosticsHeader << '\n';
  for (const auto& r : records) {
    if (r.snapshots.size() != static_cast<std::size_t>(r.episodes) * r.num_arms)
      throw std::invalid_argument("diagnostics CSV needs per-episode snapshots");
    for (int t = 1; t <= r.episodes; ++t) {
      for (int i = 0; i < r.num_arms; ++i) {
        const auto& s = r.snapshot(t, i);
        os << r.config_hash << ',' << r.seed << ',' << t << ',' << i;
        for (int st = 0; st < 2; ++st)
          for (int a = 0; a < 2; ++a) os << ',' << format_number(s.radius[st][a]);
        os << ',' << format_number(s.gaps.eta1) << ',' << format_number(s.gaps.eta2) << ','
           << format_number(s.gaps.omega1) << ',' << format_number(s.gaps.omega2) << ','
           << (s.contains_truth ? 1 : 0) << '\n';
      }
    }
  }
}

void write_sweep_csv(std::ostream& os, std::string_view config_hash, std::span<const SweepPoint> points) {
  os << kSweepHeader << '\n';
  for (const auto& p : points)
    os << config_hash << ',' << format_number(p.ratio) << ',' << p.k << ',' << p.n << ','
       << format_number(p.fr_final_mean) << ',' << format_number(p.fr_final_std) << '\n';
}

void write_kernel_csv(std::ostream& os, std::string_view config_hash, std::uint64_t seed,
                      std::span<const TransitionKernel> kernels) {
  os << kKernelHeader << '\n';
  for (std::size_t i = 0; i < kernels.size(); ++i)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        os << config_hash << ',' << seed << ',' << i << ',' << s << ',' << a << ','
           << format_number(kernels[i].to_good(s, a)) << '\n';
}

void write_table1_csv(std::ostream& os, std::span<const Table1Row> rows) {
  os << kTable1Header << '\n';
  for (const auto& r : rows)
    os << r.config_hash << ',' << to_string(r.domain) << ',' << r.n << ',' << r.k << ',' << r.seeds << ','
       << format_number(r.g_mean) << ',' << format_number(r.g_std) << ',' << format_number(r.t0_mean) << ','
       << format_number(r.t0_std) << ',' << format_number(r.assumption_verified) << '\n';
}

namespace {

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Table1Row summarize_diagnostics(std::span<const RunRecord> records, Domain domain) {
  if (records.empty()) throw std::invalid_argument("no records to summarize");
  Table1Row row;
  row.config_hash = records.front().config_hash;
  row.domain = domain;
  row.n = records.front().num_arms;
  row.k = records.front().budget;
  row.seeds = records.size();
  std::vector<double> g, t0;
  double verified = 0.0;
  for (const auto& r : records) {
    g.push_back(r.diagnostics.g_max);
    t0.push_back(static_cast<double>(r.diagnostics.t0_candidate));
    verified += r.diagnostics.assumption_verified ? 1.0 : 0.0;
  }
  mean_sd(g, row.g_mean, row.g_std);
  mean_sd(t0, row.t0_mean, row.t0_std);
  row.assumption_verified = verified / static_cast<double>(records.size());
  return row;
}

std::string summary_json(const ExperimentConfig& config, std::span<const RunRecord> records) {
  json j;
  j["config_hash"] = config_hash(config);
  j["code_version"] = code_version();
  j["algorithm"] = to_string(config.algorithm);
  j["domain"] = to_string(config.domain.variant);
  j["num_arms"] = config.num_arms;
  j["budget"] = config.budget;
  j["episodes"] = config.episodes;
  j["horizon"] = config.horizon;
  if (!records.empty()) {
    const auto agg = aggregate_runs(records);
    j["fr_final_mean"] = agg.final_mean;
    j["fr_final_std"] = agg.final_std;
    json runs = json::array();
    for (const auto& r : records) {
      const auto& d = r.diagnostics;
      runs.push_back({{"seed", r.seed},
                      {"fr_final", r.fr_cum.empty() ? 0.0 : r.fr_cum.back()},
                      {"t0", d.t0_candidate},
                      {"assumption_verified", d.assumption_verified},
                      {"G", number_or_null(d.g_max)},
                      {"eta", number_or_null(d.eta)},
                      {"omega", number_or_null(d.omega)}});
    }
    j["runs"] = std::move(runs);
  }
  j["flags"] = design_flags(config);
  return j.dump(2);
}

std::map<std::string, std::string> design_flags(const ExperimentConfig& config) {
  return {
      {"optimal_pi_normalization", "chosen-set indicator / K"},
      {"sampling_scheme", "successive proportional without replacement"},
      {"unvisited_pair_prior", "0.5"},
      {"cpap_noise_semantics", config.domain.cpap.noise_is_variance ? "variance" : "std"},
      {"cpap_non_adherer_count", config.domain.cpap.exact_non_adherer_count ? "exact-floor" : "bernoulli"},
      {"synthetic_alternate_assignment", "rank-based"},
      {"initial_state", config.carry_over_state ? "carry-over" : "uniform-per-episode"},
  };
}

void append_manifest(const std::filesystem::path& path, const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["seeds"] = m.seeds;
  j["code_version"] = m.code_version;
  j["command"] = m.command;
  j["outputs"] = m.outputs;
  j["flags"] = m.flags;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to manifest " + path.string());
  out << j.dump() << '\n';
}

}  // namespace mfrmab::io
