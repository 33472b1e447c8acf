#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mfrmab/kernel.hpp"

namespace mfrmab {

/// One observed transition (s, a, s') of a single arm.
struct Transition {
  std::uint8_t state;
  std::uint8_t action;
  std::uint8_t next;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Cumulative visit counts N(s, a, s') for one arm.
class TransitionCounts {
 public:
  std::uint64_t operator()(int s, int a, int next) const {
    return n_[TransitionKernel::index(s, a, next)];
  }
  /// N(s, a) = N(s, a, 0) + N(s, a, 1).
  std::uint64_t visits(int s, int a) const { return (*this)(s, a, 0) + (*this)(s, a, 1); }
  std::uint64_t total() const;

  void add(const Transition& t) { ++n_[TransitionKernel::index(t.state, t.action, t.next)]; }
  void add(int s, int a, int next, std::uint64_t count) {
    n_[TransitionKernel::index(s, a, next)] += count;
  }

  friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;

 private:
  std::array<std::uint64_t, 8> n_{};
};

/// Returns `counts` with every triple in `observed` tallied.
TransitionCounts update_counts(TransitionCounts counts, std::span<const Transition> observed);

struct ConfidenceParams {
  static constexpr int kStateCount = kNumStates;
  static constexpr int kActionCount = kNumActions;

  /// Throws std::invalid_argument unless 0 < delta < 1 and num_arms >= 1.
  ConfidenceParams(double delta, int num_arms);

  double delta;
  int num_arms;
};

/// Radius d(s, a) = sqrt(2|S| ln(2|S||A| N t^4 / delta) / max(1, N(s, a)))
/// for episode t >= 1.
PairArray confidence_radius(const TransitionCounts& counts, const ConfidenceParams& params,
                            std::int64_t episode);

/// Empirical mean kernel N(s,a,s')/N(s,a); unvisited pairs get 0.5.
TransitionKernel empirical_kernel(const TransitionCounts& counts);

/// P+(s,a,1) = min(1, P^(s,a,1) + d/2), complement on s' = 0.
TransitionKernel optimistic_kernel(const TransitionKernel& empirical, const PairArray& radius);
/// P-(s,a,1) = max(0, P^(s,a,1) - d/2), complement on s' = 0.
TransitionKernel pessimistic_kernel(const TransitionKernel& empirical, const PairArray& radius);

/// Empirical kernel, radii and the two extreme kernels of the L1 ball for
/// one arm at one episode.
struct ConfidenceModel {
  TransitionKernel empirical;
  PairArray radius{};
  TransitionKernel optimistic;
  TransitionKernel pessimistic;
  double delta = 0.0;
  std::int64_t episode = 1;

  static ConfidenceModel build(const TransitionCounts& counts, const ConfidenceParams& params,
                               std::int64_t episode);
};

/// Bounds on the gap P(1,a,1) - P(0,a,1) over the ball.
/// Index 1 is the pull action, index 2 the no-pull action.
struct GapBounds {
  double omega1;
  double omega2;
  double eta1;
  double eta2;

  double eta_max() const { return eta1 > eta2 ? eta1 : eta2; }
  double omega_max() const { return omega1 > omega2 ? omega1 : omega2; }
};

GapBounds gap_bounds(const ConfidenceModel& model);

inline constexpr double kBallSlack = 1e-12;

/// True iff every row of `truth` lies within L1 distance d(s, a) of the
/// empirical row.
bool contains_truth(const ConfidenceModel& model, const TransitionKernel& truth);

/// Envelope on |mu^t - mu*| for a kernel in the ball:
/// (d(1,1) + 2 d(0,1) + d(1,0) + 2 d(0,0)) / ((1 - eta)(1 - omega)).
/// Throws AssumptionViolatedError when eta >= 1 or omega >= 1.
double reward_error_bound(const PairArray& radius, double eta, double omega);
double reward_error_bound(const ConfidenceModel& model, double eta, double omega);

/// Analytic upper limit 1/psi on the episodes needed to visit all four
/// (s, a) pairs of an arm. `lambda` bounds the per-step pull probability
/// from above; merit_min/(N merit_max) bounds it from below.
/// Throws VacuousBoundError when psi <= 0.
double g_upper_bound(double epsilon, int horizon, int num_arms, double merit_min,
                     double merit_max, double lambda);

/// Bit (2*s + a) set when the pair (s, a) was visited.
using PairMask = std::uint8_t;
inline constexpr PairMask kAllPairs = 0x0f;

inline PairMask pair_bit(int s, int a) { return static_cast<PairMask>(1u << (2 * s + a)); }

}  // namespace mfrmab
