#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfrmab/sim.hpp"

namespace mfrmab::io {

inline constexpr std::string_view kRegretHeader = "config_hash,seed,episode,fr_t,fr_cum";
inline constexpr std::string_view kExposureHeader = "config_hash,seed,arm,pulls,mu_star,pi_star";
inline constexpr std::string_view kDiagnosticsHeader =
    "config_hash,seed,episode,arm,d00,d01,d10,d11,eta1,eta2,omega1,omega2,contains_truth";
inline constexpr std::string_view kSweepHeader = "config_hash,ratio,k,n,fr_final_mean,fr_final_std";
inline constexpr std::string_view kTable1Header =
    "config_hash,domain,n,k,seeds,g_mean,g_std,t0_mean,t0_std,assumption_verified";
inline constexpr std::string_view kKernelHeader = "config_hash,seed,arm,s,a,p_to_good";

std::string code_version();

/// Flat JSON object whose keys mirror ExperimentConfig fields. Unknown keys
/// and ill-typed values raise ConfigError. Missing keys keep `base` values.
ExperimentConfig parse_config(std::string_view json_text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);

/// T = 10^4 episodes of H = 200 steps.
void apply_paper_scale(ExperimentConfig& config);

/// Compact number formatting shared by every CSV ("%.12g", "nan", "inf").
std::string format_number(double v);

void write_regret_csv(std::ostream& os, std::span<const RunRecord> records);
void write_exposure_csv(std::ostream& os, std::span<const RunRecord> records);
/// Needs records produced with record_snapshots.
void write_diagnostics_csv(std::ostream& os, std::span<const RunRecord> records);
void write_sweep_csv(std::ostream& os, std::string_view config_hash, std::span<const SweepPoint> points);
void write_kernel_csv(std::ostream& os, std::string_view config_hash, std::uint64_t seed,
                      std::span<const TransitionKernel> kernels);

struct Table1Row {
  std::string config_hash;
  Domain domain = Domain::Synthetic;
  int n = 0;
  int k = 0;
  std::size_t seeds = 0;
  double g_mean = 0.0;
  double g_std = 0.0;
  double t0_mean = 0.0;
  double t0_std = 0.0;
  /// Share of seeds whose Assumption-1 diagnostic was verified.
  double assumption_verified = 0.0;
};
void write_table1_csv(std::ostream& os, std::span<const Table1Row> rows);

/// Mean and sample std of G (max over arms) and t0 across records.
Table1Row summarize_diagnostics(std::span<const RunRecord> records, Domain domain);

/// JSON summary: final FR mean/std plus per-seed t0, G, eta, omega.
std::string summary_json(const ExperimentConfig& config, std::span<const RunRecord> records);

struct RunManifest {
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::string code_version;
  std::string command;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> flags;
};

/// Design-choice flags recorded with every run.
std::map<std::string, std::string> design_flags(const ExperimentConfig& config);

/// Appends one JSON line to `path`; existing lines are never rewritten.
void append_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace mfrmab::io
