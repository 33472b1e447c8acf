#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mfrmab/kernel.hpp"
#include "mfrmab/rng.hpp"

namespace mfrmab {

/// Nondecreasing, strictly positive map from merit to weight, with its
/// floor gamma and Lipschitz constant over [-1, 1].
class MeritFunction {
 public:
  /// g(mu) = exp(c mu), gamma = exp(-c), L = c exp(c). Requires c >= 0.
  static MeritFunction exponential(double c);

  /// Any other g satisfying the same contract.
  MeritFunction(std::function<double(double)> g, double gamma, double lipschitz);

  double operator()(double mu) const { return g_(mu); }
  double gamma() const { return gamma_; }
  double lipschitz() const { return lipschitz_; }
  /// g(-1) and g(1).
  double min_weight() const { return g_(-1.0); }
  double max_weight() const { return g_(1.0); }

 private:
  std::function<double(double)> g_;
  double gamma_;
  double lipschitz_;
};

/// Probability vector over arms for one episode, together with the pull
/// budget K it is sampled with.
class PullDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Throws std::invalid_argument on negative entries, a sum away from 1,
  /// or a budget outside [1, N].
  PullDistribution(std::vector<double> pi, int budget = 1);

  std::size_t size() const { return pi_.size(); }
  int budget() const { return budget_; }
  double operator[](std::size_t i) const { return pi_[i]; }
  std::span<const double> probabilities() const { return pi_; }

  friend bool operator==(const PullDistribution&, const PullDistribution&) = default;

 private:
  std::vector<double> pi_;
  int budget_;
};

/// pi_i = g(mu_i) / sum_j g(mu_j).
PullDistribution fair_distribution(std::span<const double> merits, const MeritFunction& g,
                                   int budget = 1);

/// The regret benchmark pi*: fair_distribution over the true merits.
PullDistribution optimal_fair_oracle(std::span<const TransitionKernel> true_kernels,
                                     const MeritFunction& g, int budget = 1);

/// Successive proportional sampling without replacement: draw one arm
/// from the remaining mass, remove it, renormalise, repeat k times.
/// When the remaining mass is zero the draw is uniform over the rest.
class SuccessiveSampler {
 public:
  /// Fills `out` with k distinct indices. Throws InvalidBudgetError
  /// unless 1 <= k <= N.
  void sample(const PullDistribution& dist, int k, Rng& rng, std::vector<int>& out);

 private:
  std::vector<double> weights_;
};

std::vector<int> sample_k_without_replacement(const PullDistribution& dist, int k, Rng& rng);

/// Exact inclusion probabilities Pr_i(k) of the successive scheme, by
/// dynamic programming over subsets. Requires N <= kMaxExactArms.
inline constexpr std::size_t kMaxExactArms = 20;
std::vector<double> inclusion_probabilities(const PullDistribution& dist, int k);

/// Upper bound on max_i Pr_i(k) that needs no enumeration: arm i escapes
/// each draw with probability at least 1 - pi_i / (1 - S_i), where S_i is
/// the mass of the k-1 heaviest other arms. Returns 1 when that is vacuous.
double max_inclusion_upper_bound(const PullDistribution& dist, int k);

struct BaselineChoice {
  std::vector<int> chosen;
  /// Chosen-set indicator divided by K.
  PullDistribution dist;
};

/// Top-k arms by estimated merit, ties to the lowest index.
BaselineChoice optimal_baseline(std::span<const double> merit_estimates, int k);

/// fr = sum_i |pi*_i - pi_i|. Throws LengthMismatchError.
double fairness_regret_increment(const PullDistribution& pi_star, const PullDistribution& pi_t);

/// k * fairness_regret_increment; throws InfeasibleScalingError when some
/// pi*_i > 1/k.
double scaled_fairness_regret_increment(const PullDistribution& pi_star,
                                        const PullDistribution& pi_t, int k);

/// Per-episode and cumulative fairness regret.
class RegretLedger {
 public:
  void add(double increment);
  void add_scaled(double increment) { scaled_.push_back(increment); }

  const std::vector<double>& per_episode() const { return per_episode_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  const std::vector<double>& scaled() const { return scaled_; }
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

 private:
  std::vector<double> per_episode_;
  std::vector<double> cumulative_;
  std::vector<double> scaled_;
};

}  // namespace mfrmab
