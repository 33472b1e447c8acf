#include "mfrmab/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace mfrmab {

namespace {
// Remaining mass at or below this is treated as exhausted.
constexpr double kZeroMass = 1e-15;
}  // namespace

MeritFunction MeritFunction::exponential(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("merit exponent c must be nonnegative");
  return MeritFunction([c](double mu) { return std::exp(c * mu); }, std::exp(-c), c * std::exp(c));
}

MeritFunction::MeritFunction(std::function<double(double)> g, double gamma, double lipschitz)
    : g_(std::move(g)), gamma_(gamma), lipschitz_(lipschitz) {
  if (!(gamma_ > 0.0)) throw std::invalid_argument("merit floor gamma must be positive");
}

PullDistribution::PullDistribution(std::vector<double> pi, int budget)
    : pi_(std::move(pi)), budget_(budget) {
  if (pi_.empty()) throw std::invalid_argument("distribution over zero arms");
  if (budget_ < 1 || static_cast<std::size_t>(budget_) > pi_.size())
    throw InvalidBudgetError("budget must lie in [1, N]");
  double sum = 0.0;
  for (double v : pi_) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative or NaN probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("probabilities do not sum to 1");
}

PullDistribution fair_distribution(std::span<const double> merits, const MeritFunction& g,
                                   int budget) {
  std::vector<double> w(merits.size());
  std::transform(merits.begin(), merits.end(), w.begin(), [&](double mu) { return g(mu); });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  return PullDistribution(std::move(w), budget);
}

PullDistribution optimal_fair_oracle(std::span<const TransitionKernel> true_kernels,
                                     const MeritFunction& g, int budget) {
  std::vector<double> mu;
  mu.reserve(true_kernels.size());
  for (const auto& k : true_kernels) mu.push_back(arm_reward(k));
  return fair_distribution(mu, g, budget);
}

void SuccessiveSampler::sample(const PullDistribution& dist, int k, Rng& rng,
                               std::vector<int>& out) {
  const auto n = dist.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidBudgetError("cannot sample k arms: need 1 <= k <= N");
  const auto pi = dist.probabilities();
  weights_.assign(pi.begin(), pi.end());
  out.clear();

  std::size_t left = n;
  for (int draw = 0; draw < k; ++draw) {
    double remaining = 0.0;
    for (double w : weights_)
      if (w > 0.0) remaining += w;

    std::size_t pick = n;
    if (remaining > kZeroMass) {
      const double u = uniform01(rng) * remaining;
      double acc = 0.0;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (weights_[i] <= 0.0) continue;
        last_positive = i;
        acc += weights_[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      // Rounding can leave u just above the running sum.
      if (pick == n) pick = last_positive;
    } else {
      // No mass left: uniform over the arms not yet chosen.
      auto r = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(left));
      r = std::min(r, left - 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (weights_[i] < 0.0) continue;
        if (r-- == 0) {
          pick = i;
          break;
        }
      }
    }
    out.push_back(static_cast<int>(pick));
    weights_[pick] = -1.0;  // taken
    --left;
  }
}

std::vector<int> sample_k_without_replacement(const PullDistribution& dist, int k, Rng& rng) {
  SuccessiveSampler sampler;
  std::vector<int> out;
  sampler.sample(dist, k, rng, out);
  return out;
}

std::vector<double> inclusion_probabilities(const PullDistribution& dist, int k) {
  const auto n = dist.size();
  if (n > kMaxExactArms) throw std::invalid_argument("too many arms for exact enumeration");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidBudgetError("cannot sample k arms: need 1 <= k <= N");
  const auto pi = dist.probabilities();

  // reach[S] = probability that the first |S| draws are exactly the set S.
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> reach(subsets, 0.0);
  std::vector<double> mass(subsets, 0.0);
  reach[0] = 1.0;
  for (std::size_t s = 1; s < subsets; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    mass[s] = mass[s & (s - 1)] + pi[low];
  }
  std::vector<double> incl(n, 0.0);
  for (std::size_t s = 0; s < subsets; ++s) {
    if (reach[s] == 0.0) continue;
    const int size = std::popcount(s);
    if (size == k) {
      for (std::size_t i = 0; i < n; ++i)
        if (s & (std::size_t{1} << i)) incl[i] += reach[s];
      continue;
    }
    // Summed over the untaken arms directly; 1 - mass[s] cancels badly.
    const double rest = mass[(subsets - 1) & ~s];
    const auto free = n - static_cast<std::size_t>(size);
    for (std::size_t i = 0; i < n; ++i) {
      const auto bit = std::size_t{1} << i;
      if (s & bit) continue;
      const double step = rest > kZeroMass ? pi[i] / rest : 1.0 / static_cast<double>(free);
      reach[s | bit] += reach[s] * step;
    }
  }
  return incl;
}

double max_inclusion_upper_bound(const PullDistribution& dist, int k) {
  const auto n = dist.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidBudgetError("cannot sample k arms: need 1 <= k <= N");
  const auto pi = dist.probabilities();
  if (k == 1) return *std::max_element(pi.begin(), pi.end());
  std::vector<double> sorted(pi.begin(), pi.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double top_km1 = std::accumulate(sorted.begin(), sorted.begin() + (k - 1), 0.0);
  const double top_k = top_km1 + sorted[static_cast<std::size_t>(k - 1)];
  const double kth = sorted[static_cast<std::size_t>(k - 2)];
  double worst = 0.0;
  for (double p : pi) {
    // Heaviest k-1 others: drop p from the top k if it is among the top k-1.
    const double others = p >= kth ? top_k - p : top_km1;
    const double rest = 1.0 - others;
    if (rest <= p) return 1.0;
    worst = std::max(worst, 1.0 - std::pow(1.0 - p / rest, k));
  }
  return std::min(1.0, worst);
}

BaselineChoice optimal_baseline(std::span<const double> merit_estimates, int k) {
  const auto n = merit_estimates.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw InvalidBudgetError("need 1 <= k <= N");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return merit_estimates[static_cast<std::size_t>(a)] > merit_estimates[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  std::vector<double> pi(n, 0.0);
  for (int i : order) pi[static_cast<std::size_t>(i)] = 1.0 / k;
  return BaselineChoice{std::move(order), PullDistribution(std::move(pi), k)};
}

double fairness_regret_increment(const PullDistribution& pi_star, const PullDistribution& pi_t) {
  if (pi_star.size() != pi_t.size())
    throw LengthMismatchError("distributions cover different numbers of arms");
  double fr = 0.0;
  for (std::size_t i = 0; i < pi_star.size(); ++i) fr += std::abs(pi_star[i] - pi_t[i]);
  return fr;
}

double scaled_fairness_regret_increment(const PullDistribution& pi_star,
                                        const PullDistribution& pi_t, int k) {
  if (k < 1) throw InvalidBudgetError("k must be positive");
  for (std::size_t i = 0; i < pi_star.size(); ++i)
    if (pi_star[i] > 1.0 / k)
      throw InfeasibleScalingError("pi*_" + std::to_string(i) + " exceeds 1/K");
  return k * fairness_regret_increment(pi_star, pi_t);
}

void RegretLedger::add(double increment) {
  if (!(increment >= 0.0)) throw InvariantViolation("fairness regret increment is negative");
  per_episode_.push_back(increment);
  cumulative_.push_back(total() + increment);
}

}  // namespace mfrmab
