#include "mfrmab/kernel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mfrmab {

TransitionKernel::TransitionKernel() { p_.fill(0.5); }

TransitionKernel TransitionKernel::from_good_probs(const PairArray& to_good) {
  std::array<double, 8> p{};
  for (int s = 0; s < kNumStates; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      p[index(s, a, kGood)] = to_good[s][a];
      p[index(s, a, kBad)] = 1.0 - to_good[s][a];
    }
  }
  return from_tensor(p);
}

TransitionKernel TransitionKernel::from_good_probs(double p00, double p01, double p10,
                                                   double p11) {
  return from_good_probs(PairArray{{{p00, p01}, {p10, p11}}});
}

TransitionKernel TransitionKernel::from_tensor(const std::array<double, 8>& tensor) {
  for (int s = 0; s < kNumStates; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      const double lo = tensor[index(s, a, kBad)];
      const double hi = tensor[index(s, a, kGood)];
      if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0) ||
          std::abs(lo + hi - 1.0) > kRowTolerance) {
        std::ostringstream msg;
        msg << "transition row (s=" << s << ", a=" << a << ") is not stochastic: [" << lo
            << ", " << hi << "]";
        throw InvalidKernelError(msg.str());
      }
    }
  }
  return TransitionKernel(tensor);
}

PairArray TransitionKernel::good_probs() const {
  PairArray out{};
  for (int s = 0; s < kNumStates; ++s)
    for (int a = 0; a < kNumActions; ++a) out[s][a] = to_good(s, a);
  return out;
}

bool TransitionKernel::is_nondegenerate(double epsilon) const {
  if (!(epsilon > 0.0)) return false;
  for (double v : p_)
    if (v < epsilon || v > 1.0 - epsilon) return false;
  return true;
}

TransitionKernel TransitionKernel::require_nondegenerate(double epsilon) const {
  if (!is_nondegenerate(epsilon)) {
    std::ostringstream msg;
    msg << "kernel has an entry outside [" << epsilon << ", " << 1.0 - epsilon << "]";
    throw InvalidKernelError(msg.str());
  }
  TransitionKernel out = *this;
  out.epsilon_ = epsilon;
  return out;
}

bool TransitionKernel::action_independent() const {
  for (int s = 0; s < kNumStates; ++s)
    if (to_good(s, kPassive) != to_good(s, kPull)) return false;
  return true;
}

PullProbability::PullProbability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("pull probability must lie in [0, 1]");
}

std::array<std::array<double, 2>, 2> policy_averaged_chain(const TransitionKernel& kernel,
                                                           PullProbability p) {
  const double q = p.value();
  std::array<std::array<double, 2>, 2> m{};
  for (int s = 0; s < kNumStates; ++s)
    for (int next = 0; next < kNumStates; ++next)
      m[s][next] = (1.0 - q) * kernel(s, kPassive, next) + q * kernel(s, kPull, next);
  return m;
}

namespace {

// Stationary good-state mass of a chain with up-rate `up_from_bad` and
// stay-rate `stay_good`: up / (1 - stay + up).
double two_state_occupancy(double up_from_bad, double stay_good) {
  const double denominator = 1.0 - stay_good + up_from_bad;
  if (std::abs(denominator) < kSteadyStateDenominatorTolerance)
    throw DegenerateKernelError("steady-state denominator vanishes (chain is not ergodic)");
  return up_from_bad / denominator;
}

}  // namespace

double steady_state(const TransitionKernel& kernel, PullProbability p) {
  const double q = p.value();
  const double up = (1.0 - q) * kernel.to_good(kBad, kPassive) + q * kernel.to_good(kBad, kPull);
  const double stay =
      (1.0 - q) * kernel.to_good(kGood, kPassive) + q * kernel.to_good(kGood, kPull);
  return two_state_occupancy(up, stay);
}

double steady_state_oracle(const TransitionKernel& kernel, PullProbability p, double tolerance,
                           std::int64_t max_iterations) {
  const auto m = policy_averaged_chain(kernel, p);
  double good = 0.5;
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    const double next = (1.0 - good) * m[kBad][kGood] + good * m[kGood][kGood];
    if (std::abs(next - good) < tolerance) return next;
    good = next;
  }
  throw ConvergenceError("power iteration did not converge");
}

double arm_reward(const TransitionKernel& kernel) {
  return two_state_occupancy(kernel.to_good(kBad, kPull), kernel.to_good(kGood, kPull)) -
         two_state_occupancy(kernel.to_good(kBad, kPassive), kernel.to_good(kGood, kPassive));
}

}  // namespace mfrmab
