#include "mfrmab/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfrmab {

std::uint64_t TransitionCounts::total() const {
  std::uint64_t sum = 0;
  for (auto v : n_) sum += v;
  return sum;
}

TransitionCounts update_counts(TransitionCounts counts, std::span<const Transition> observed) {
  for (const auto& t : observed) counts.add(t);
  return counts;
}

ConfidenceParams::ConfidenceParams(double delta_, int num_arms_)
    : delta(delta_), num_arms(num_arms_) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (num_arms < 1) throw std::invalid_argument("num_arms must be positive");
}

PairArray confidence_radius(const TransitionCounts& counts, const ConfidenceParams& params,
                            std::int64_t episode) {
  if (episode < 1) throw std::invalid_argument("episode index starts at 1");
  constexpr double s = ConfidenceParams::kStateCount;
  constexpr double a = ConfidenceParams::kActionCount;
  const double t = static_cast<double>(episode);
  // ln(2|S||A| N t^4 / delta), with t^4 taken in log space.
  const double log_term = std::log(2.0 * s * a * params.num_arms / params.delta) + 4.0 * std::log(t);
  const double numerator = 2.0 * s * log_term;
  PairArray d{};
  for (int st = 0; st < kNumStates; ++st) {
    for (int ac = 0; ac < kNumActions; ++ac) {
      const double n = std::max<double>(1.0, static_cast<double>(counts.visits(st, ac)));
      d[st][ac] = std::sqrt(numerator / n);
    }
  }
  return d;
}

TransitionKernel empirical_kernel(const TransitionCounts& counts) {
  PairArray good{};
  for (int s = 0; s < kNumStates; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      const auto n = counts.visits(s, a);
      good[s][a] = n == 0 ? 0.5 : static_cast<double>(counts(s, a, kGood)) / static_cast<double>(n);
    }
  }
  return TransitionKernel::from_good_probs(good);
}

TransitionKernel optimistic_kernel(const TransitionKernel& empirical, const PairArray& radius) {
  PairArray good{};
  for (int s = 0; s < kNumStates; ++s)
    for (int a = 0; a < kNumActions; ++a)
      good[s][a] = std::min(1.0, empirical.to_good(s, a) + radius[s][a] / 2.0);
  return TransitionKernel::from_good_probs(good);
}

TransitionKernel pessimistic_kernel(const TransitionKernel& empirical, const PairArray& radius) {
  PairArray good{};
  for (int s = 0; s < kNumStates; ++s)
    for (int a = 0; a < kNumActions; ++a)
      good[s][a] = std::max(0.0, empirical.to_good(s, a) - radius[s][a] / 2.0);
  return TransitionKernel::from_good_probs(good);
}

ConfidenceModel ConfidenceModel::build(const TransitionCounts& counts,
                                       const ConfidenceParams& params, std::int64_t episode) {
  ConfidenceModel m;
  m.empirical = empirical_kernel(counts);
  m.radius = confidence_radius(counts, params, episode);
  m.optimistic = optimistic_kernel(m.empirical, m.radius);
  m.pessimistic = pessimistic_kernel(m.empirical, m.radius);
  m.delta = params.delta;
  m.episode = episode;
  return m;
}

GapBounds gap_bounds(const ConfidenceModel& model) {
  const auto& hi = model.optimistic;
  const auto& lo = model.pessimistic;
  return GapBounds{
      .omega1 = lo.to_good(kGood, kPull) - hi.to_good(kBad, kPull),
      .omega2 = lo.to_good(kGood, kPassive) - hi.to_good(kBad, kPassive),
      .eta1 = hi.to_good(kGood, kPull) - lo.to_good(kBad, kPull),
      .eta2 = hi.to_good(kGood, kPassive) - lo.to_good(kBad, kPassive),
  };
}

bool contains_truth(const ConfidenceModel& model, const TransitionKernel& truth) {
  for (int s = 0; s < kNumStates; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      double l1 = 0.0;
      for (int next = 0; next < kNumStates; ++next)
        l1 += std::abs(truth(s, a, next) - model.empirical(s, a, next));
      if (l1 > model.radius[s][a] + kBallSlack) return false;
    }
  }
  return true;
}

double reward_error_bound(const PairArray& d, double eta, double omega) {
  if (!(eta < 1.0) || !(omega < 1.0))
    throw AssumptionViolatedError("reward error bound needs eta < 1 and omega < 1");
  const double numerator = d[kGood][kPull] + 2.0 * d[kBad][kPull] + d[kGood][kPassive] +
                           2.0 * d[kBad][kPassive];
  return numerator / ((1.0 - eta) * (1.0 - omega));
}

double reward_error_bound(const ConfidenceModel& model, double eta, double omega) {
  return reward_error_bound(model.radius, eta, omega);
}

double g_upper_bound(double epsilon, int horizon, int num_arms, double merit_min,
                     double merit_max, double lambda) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5]");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (num_arms < 1) throw std::invalid_argument("num_arms must be positive");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in [0, 1)");
  if (!(merit_min > 0.0 && merit_max >= merit_min))
    throw std::invalid_argument("merits must satisfy 0 < merit_min <= merit_max");

  const double h = static_cast<double>(horizon);
  const double floor_prob = merit_min / (static_cast<double>(num_arms) * merit_max);
  const double one_action = std::pow(lambda, h) + std::pow(1.0 - floor_prob, h);
  const double one_state = std::pow(1.0 - epsilon, h);
  const double psi = 1.0 - (2.0 * one_state + one_action - 2.0 * one_action * one_state);
  // psi = (1 - B0)(1 - 2(1-eps)^H): both factors negative is no guarantee either.
  if (!(psi > 0.0) || one_action >= 1.0) throw VacuousBoundError("visitation bound is vacuous (psi <= 0)");
  return 1.0 / psi;
}

}  // namespace mfrmab
