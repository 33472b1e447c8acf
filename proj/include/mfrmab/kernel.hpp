#pragma once

#include <array>
#include <cstdint>

#include "mfrmab/errors.hpp"

namespace mfrmab {

inline constexpr int kNumStates = 2;
inline constexpr int kNumActions = 2;

inline constexpr int kBad = 0;
inline constexpr int kGood = 1;
inline constexpr int kPassive = 0;
inline constexpr int kPull = 1;

/// Per-(s, a) array indexed [state][action].
using PairArray = std::array<std::array<double, kNumActions>, kNumStates>;

/// Transition tensor P(s, a, s') of one two-state, two-action arm.
///
/// Both s' entries of every row are stored and validated to sum to one.
/// A kernel can additionally carry a non-degeneracy level epsilon, in which
/// case every entry is known to lie in [epsilon, 1 - epsilon].
class TransitionKernel {
 public:
  static constexpr double kRowTolerance = 1e-12;

  /// Uniform kernel, every entry 0.5.
  TransitionKernel();

  /// Builds a kernel from the four probabilities of moving to the good
  /// state, indexed [s][a]. The s' = 0 entries are the complements.
  static TransitionKernel from_good_probs(const PairArray& to_good);

  /// Convenience form of from_good_probs: P(0,0,1), P(0,1,1), P(1,0,1), P(1,1,1).
  static TransitionKernel from_good_probs(double p00, double p01, double p10, double p11);

  /// Builds from a full tensor laid out as index s*4 + a*2 + s'.
  /// Throws InvalidKernelError if any row is not stochastic.
  static TransitionKernel from_tensor(const std::array<double, 8>& tensor);

  double operator()(int s, int a, int next) const { return p_[index(s, a, next)]; }

  /// P(s, a, good).
  double to_good(int s, int a) const { return p_[index(s, a, kGood)]; }

  PairArray good_probs() const;

  const std::array<double, 8>& tensor() const { return p_; }

  /// Recorded non-degeneracy level; 0 when the kernel is not flagged.
  double epsilon() const { return epsilon_; }

  bool is_nondegenerate(double epsilon) const;

  /// Returns a copy flagged with `epsilon`. Throws InvalidKernelError if
  /// some entry lies outside [epsilon, 1 - epsilon].
  TransitionKernel require_nondegenerate(double epsilon) const;

  /// True when the pull and no-pull slices coincide.
  bool action_independent() const;

  friend bool operator==(const TransitionKernel& a, const TransitionKernel& b) {
    return a.p_ == b.p_;
  }

  static constexpr int index(int s, int a, int next) { return s * 4 + a * 2 + next; }

 private:
  explicit TransitionKernel(const std::array<double, 8>& p) : p_(p) {}

  std::array<double, 8> p_;
  double epsilon_ = 0.0;
};

/// Probability that an arm is pulled at each timestep.
class PullProbability {
 public:
  /// Throws std::invalid_argument outside [0, 1].
  explicit PullProbability(double value);

  double value() const { return value_; }

 private:
  double value_;
};

/// Denominator magnitude below which steady_state reports a degenerate chain.
inline constexpr double kSteadyStateDenominatorTolerance = 1e-9;

/// Long-run probability of the good state when the arm is pulled
/// independently with probability p at every step (closed form).
double steady_state(const TransitionKernel& kernel, PullProbability p);

/// Same quantity as steady_state, computed by power iteration on the
/// policy-averaged two-state chain. Used as an independent check.
/// Throws ConvergenceError after max_iterations.
double steady_state_oracle(const TransitionKernel& kernel, PullProbability p,
                           double tolerance = 1e-12, std::int64_t max_iterations = 1'000'000);

/// Steady-state benefit of always pulling over never pulling,
/// f(P, 1) - f(P, 0), evaluated through the reduced two-term expression.
double arm_reward(const TransitionKernel& kernel);

/// Policy-averaged chain M[s][s'] = (1 - p) P(s,0,s') + p P(s,1,s').
std::array<std::array<double, 2>, 2> policy_averaged_chain(const TransitionKernel& kernel,
                                                           PullProbability p);

}  // namespace mfrmab
