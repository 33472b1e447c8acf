#include "mfrmab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfrmab {

DiagnosticsTracker::DiagnosticsTracker(int num_arms) : arms_(static_cast<std::size_t>(num_arms)) {
  if (num_arms < 1) throw std::invalid_argument("tracker needs at least one arm");
}

void DiagnosticsTracker::record_episode(std::span<const PairMask> visited,
                                        std::span<const GapBounds> gaps) {
  if (visited.size() != arms_.size() || gaps.size() != arms_.size())
    throw LengthMismatchError("per-arm inputs do not match the tracker's arm count");
  ++episode_;

  double eta = -1.0;
  double omega = -1.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    auto& arm = arms_[i];
    for (int pair = 0; pair < 4; ++pair)
      if (visited[i] & (1u << pair)) arm.last_seen[static_cast<std::size_t>(pair)] = episode_;

    // Latest start t such that [t, episode] covers every pair. Starts in
    // (covered_until, latest] complete exactly now.
    const auto latest = *std::min_element(arm.last_seen.begin(), arm.last_seen.end());
    if (latest > arm.covered_until) {
      arm.longest = std::max(arm.longest, episode_ - arm.covered_until);
      arm.covered_until = latest;
    }

    eta = std::max(eta, gaps[i].eta_max());
    omega = std::max(omega, gaps[i].omega_max());
  }
  eta_by_episode_.push_back(eta);
  omega_by_episode_.push_back(omega);
  if (eta >= 1.0) last_violation_ = episode_;
}

std::int64_t DiagnosticsTracker::t0_candidate() const { return std::max<std::int64_t>(1, last_violation_); }

double DiagnosticsTracker::g(int arm) const {
  const auto& a = arms_.at(static_cast<std::size_t>(arm));
  if (a.covered_until == 0) return Diagnostics::kUndefined;
  return static_cast<double>(std::max(a.longest, episode_ - a.covered_until));
}

Diagnostics DiagnosticsTracker::snapshot() const {
  Diagnostics d;
  d.episodes = episode_;
  d.t0_candidate = t0_candidate();
  d.assumption_verified = d.t0_candidate < episode_ && 2 * d.t0_candidate <= episode_;
  for (auto t = d.t0_candidate; t < episode_; ++t) {
    const auto idx = static_cast<std::size_t>(t);  // episode t + 1
    if (std::isnan(d.eta) || eta_by_episode_[idx] > d.eta) d.eta = eta_by_episode_[idx];
    if (std::isnan(d.omega) || omega_by_episode_[idx] > d.omega) d.omega = omega_by_episode_[idx];
  }
  d.g_per_arm.reserve(arms_.size());
  d.g_max = 0.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    d.g_per_arm.push_back(g(static_cast<int>(i)));
    d.g_max = std::max(d.g_max, d.g_per_arm.back());
  }
  return d;
}

}  // namespace mfrmab
