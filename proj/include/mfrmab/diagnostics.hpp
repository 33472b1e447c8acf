#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mfrmab/estimation.hpp"

namespace mfrmab {

/// Empirical constants of a run: t0 (last episode with some eta >= 1),
/// the eta/omega maxima over episodes after t0, and the visitation
/// interval G per arm.
struct Diagnostics {
  static constexpr double kUndefined = std::numeric_limits<double>::infinity();

  std::int64_t episodes = 0;
  /// Smallest t0 >= 1 such that eta1, eta2 < 1 for every arm at every
  /// recorded episode t > t0.
  std::int64_t t0_candidate = 1;
  /// False when t0 reaches the second half of the run (or the end).
  bool assumption_verified = false;
  /// max over arms and episodes t > t0; NaN when no such episode exists.
  double eta = std::numeric_limits<double>::quiet_NaN();
  double omega = std::numeric_limits<double>::quiet_NaN();
  /// +inf for an arm that never had all four pairs visited.
  std::vector<double> g_per_arm;
  double g_max = kUndefined;
};

/// Streaming tracker fed once per episode, in order.
///
/// G_i is the smallest window length such that every run of G_i
/// consecutive episodes visits all four (s, a) pairs of arm i. Windows
/// still open at the end of the run count with their current length.
class DiagnosticsTracker {
 public:
  explicit DiagnosticsTracker(int num_arms);

  void record_episode(std::span<const PairMask> visited, std::span<const GapBounds> gaps);

  std::int64_t episodes() const { return episode_; }
  std::int64_t t0_candidate() const;
  double g(int arm) const;
  Diagnostics snapshot() const;

  /// Per-episode maxima over arms, index 0 is episode 1.
  const std::vector<double>& eta_by_episode() const { return eta_by_episode_; }
  const std::vector<double>& omega_by_episode() const { return omega_by_episode_; }

 private:
  struct ArmState {
    std::array<std::int64_t, 4> last_seen{};  // 0 = never
    std::int64_t covered_until = 0;           // latest start whose window is complete
    std::int64_t longest = 0;
  };

  std::vector<ArmState> arms_;
  std::vector<double> eta_by_episode_;
  std::vector<double> omega_by_episode_;
  std::int64_t episode_ = 0;
  std::int64_t last_violation_ = 0;
};

}  // namespace mfrmab
