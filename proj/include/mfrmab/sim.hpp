#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfrmab/datasets.hpp"
#include "mfrmab/diagnostics.hpp"
#include "mfrmab/estimation.hpp"
#include "mfrmab/policy.hpp"
#include "mfrmab/rng.hpp"

namespace mfrmab {

enum class Algorithm { MfRmab, Optimal };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  int num_arms = 5;
  int budget = 1;
  int episodes = 2000;
  int horizon = 100;
  double delta = 0.01;
  double merit_c = 3.0;
  double epsilon = 0.01;
  DomainSpec domain;
  std::vector<std::uint64_t> seeds{1};
  Algorithm algorithm = Algorithm::MfRmab;

  /// Keep each arm's state across episode boundaries instead of
  /// redrawing it uniformly. Off by default.
  bool carry_over_state = false;
  /// Fixes the arm population across seeds; by default each seed draws
  /// its own population.
  std::optional<std::uint64_t> instance_seed;
  /// Store per-arm per-episode confidence snapshots in the RunRecord.
  bool record_snapshots = false;
  /// Trailing share of episodes whose pulls are reported separately.
  double tail_fraction = 0.1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Stable 16-hex-digit fingerprint of every field except the seed list.
std::string config_hash(const ExperimentConfig& config);

/// Ground-truth arms and their current states. The kernels stay private:
/// only observed transitions leave this class.
class Environment {
 public:
  Environment(std::vector<TransitionKernel> truth, int budget, Rng rng);

  int num_arms() const { return static_cast<int>(states_.size()); }
  int budget() const { return budget_; }
  std::span<const std::uint8_t> states() const { return states_; }

  /// Draws every arm's state uniformly from {bad, good}.
  void reset_uniform();
  void set_state(int arm, int state);

  /// Advances every arm one step; arm i is pulled iff i is in `pulled`.
  /// Throws InvariantViolation unless `pulled` holds exactly K distinct
  /// valid indices. Writes one transition per arm into `out`.
  void step(std::span<const int> pulled, std::span<Transition> out);
  std::vector<Transition> step(std::span<const int> pulled);

 private:
  std::vector<TransitionKernel> truth_;
  std::vector<std::uint8_t> states_;
  std::vector<std::uint8_t> pulled_mask_;
  int budget_;
  Rng rng_;
};

/// One episode of H steps under a frozen distribution.
struct EpisodeTrace {
  int num_arms = 0;
  int horizon = 0;
  int budget = 0;
  /// horizon * budget arm indices, step-major.
  std::vector<int> pulled;
  /// horizon * num_arms transitions, arm-major.
  std::vector<Transition> triples;
  /// Per-arm mask of visited (s, a) pairs.
  std::vector<PairMask> visited;

  std::span<const int> pulled_at(int step) const {
    return std::span<const int>(pulled).subspan(static_cast<std::size_t>(step) * budget,
                                                static_cast<std::size_t>(budget));
  }
  std::span<const Transition> arm_triples(int arm) const {
    return std::span<const Transition>(triples).subspan(static_cast<std::size_t>(arm) * horizon,
                                                        static_cast<std::size_t>(horizon));
  }
};

/// Samples K arms afresh at every step from `policy`, pulls them and
/// records all N transitions.
EpisodeTrace run_episode(const PullDistribution& policy, Environment& env, int horizon, Rng& sampler_rng);

/// Per-arm view of the learner's confidence state at the start of one episode.
struct ArmSnapshot {
  PairArray radius{};
  GapBounds gaps{};
  bool contains_truth = false;
  /// Merits computed from the optimistic, pessimistic and empirical
  /// kernels. NaN when that kernel's chain is degenerate.
  double mu_optimistic = 0.0;
  double mu_pessimistic = 0.0;
  double mu_empirical = 0.0;

  friend bool operator==(const ArmSnapshot&, const ArmSnapshot&) = default;
};

inline constexpr std::size_t kExactInclusionArms = 12;

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  int num_arms = 0;
  int budget = 0;
  int episodes = 0;
  int horizon = 0;

  std::vector<double> fr;
  std::vector<double> fr_cum;
  /// K * fr per episode; empty when pi* is infeasible for scaling.
  std::vector<double> scaled_fr;

  std::vector<std::int64_t> pulls;
  std::vector<std::int64_t> tail_pulls;
  int tail_episodes = 0;

  std::vector<double> mu_star;
  std::vector<double> pi_star;

  /// Per episode: was every arm's true kernel inside its ball.
  std::vector<std::uint8_t> truth_in_ball;
  /// Per episode: max over arms of the per-step pull probability Pr_i(K).
  /// Exact up to kExactInclusionArms arms, an upper bound beyond.
  std::vector<double> max_inclusion;
  Diagnostics diagnostics;
  /// episodes * num_arms entries, episode-major; empty unless requested.
  std::vector<ArmSnapshot> snapshots;

  double wall_seconds = 0.0;

  const ArmSnapshot& snapshot(int episode, int arm) const {
    return snapshots[static_cast<std::size_t>(episode - 1) * num_arms + static_cast<std::size_t>(arm)];
  }
  /// Everything except wall time.
  bool same_result(const RunRecord& other) const;
};

/// Algorithm loop for one seed.
RunRecord run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Ground-truth population for (config, seed); the same one run_experiment uses.
std::vector<TransitionKernel> population_for(const ExperimentConfig& config, std::uint64_t seed);

struct Theorem1Check {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double worst_ratio = 0.0;  // max |mu - mu*| / bound
};

/// Checks |mu^t - mu*| <= reward_error_bound for every arm, every
/// episode t > t0 with the truth inside the ball, and each of the
/// optimistic, pessimistic and empirical kernels. Needs snapshots.
Theorem1Check check_reward_envelope(const RunRecord& record);

struct AggregateCurves {
  std::vector<double> fr_cum_mean;
  std::vector<double> fr_cum_std;
  std::vector<double> pulls_mean;
  std::vector<double> pulls_std;
  double final_mean = 0.0;
  double final_std = 0.0;
  std::size_t runs = 0;
};

/// Pointwise mean and sample standard deviation (0 for a single run).
/// Throws std::invalid_argument on mismatched configs or an empty set.
AggregateCurves aggregate_runs(std::span<const RunRecord> records);

struct SweepPoint {
  double ratio = 0.0;
  int k = 0;
  int n = 0;
  double fr_final_mean = 0.0;
  double fr_final_std = 0.0;
};

/// One experiment per K/N ratio at fixed T and H, over config.seeds.
SweepPoint sweep_point(const ExperimentConfig& config, double ratio);
std::vector<SweepPoint> kn_sweep(const ExperimentConfig& config, std::span<const double> ratios);

/// Sample Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace mfrmab
