#include "mfrmab/datasets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mfrmab {

std::string to_string(Domain d) {
  switch (d) {
    case Domain::Synthetic:
      return "synthetic";
    case Domain::SyntheticAlternate:
      return "synthetic-alternate";
    case Domain::Cpap:
      return "cpap";
  }
  return "unknown";
}

Domain parse_domain(std::string_view name) {
  if (name == "synthetic") return Domain::Synthetic;
  if (name == "synthetic-alternate" || name == "synthetic_alternate") return Domain::SyntheticAlternate;
  if (name == "cpap") return Domain::Cpap;
  throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

// Two-state reduction of a three-state adherence chain: the intermediate
// and acceptable states are merged into "good". Values are configuration.
TransitionKernel CpapParams::default_adherent() {
  return TransitionKernel::from_good_probs(0.30, 0.30, 0.85, 0.85);
}

TransitionKernel CpapParams::default_non_adherent() {
  return TransitionKernel::from_good_probs(0.10, 0.10, 0.55, 0.55);
}

double CpapParams::noise_sigma() const {
  return noise_is_variance ? std::sqrt(noise_std) : noise_std;
}

void CpapParams::validate() const {
  if (!(alpha_h >= 1.0)) throw std::invalid_argument("alpha_h must be >= 1");
  if (!(non_adherer_fraction >= 0.0 && non_adherer_fraction <= 1.0))
    throw std::invalid_argument("non_adherer_fraction must lie in [0, 1]");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise_std must be nonnegative");
}

TransitionKernel clip_nondegenerate(const TransitionKernel& kernel, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  PairArray good = kernel.good_probs();
  for (auto& row : good)
    for (auto& v : row) v = std::clamp(v, epsilon, 1.0 - epsilon);
  return TransitionKernel::from_good_probs(good).require_nondegenerate(epsilon);
}

namespace {

void require_arms(int n) {
  if (n < 2) throw std::invalid_argument("a population needs at least two arms");
}

}  // namespace

std::vector<TransitionKernel> gen_synthetic(int n, double epsilon, Rng& rng) {
  require_arms(n);
  std::vector<TransitionKernel> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    PairArray good{};
    for (auto& row : good)
      for (auto& v : row) v = uniform01(rng);
    out.push_back(clip_nondegenerate(TransitionKernel::from_good_probs(good), epsilon));
  }
  return out;
}

std::vector<TransitionKernel> gen_synthetic_alternate(int n, double epsilon, Rng& rng) {
  require_arms(n);
  std::vector<TransitionKernel> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::array<double, 4> draws{};
    for (auto& v : draws) v = uniform01(rng);
    std::array<int, 4> rank{0, 1, 2, 3};
    std::sort(rank.begin(), rank.end(), [&](int a, int b) { return draws[a] < draws[b]; });
    // Smallest to (bad, no-pull), largest to (good, pull). The middle two
    // keep their draw order: the earlier draw goes to (bad, pull).
    const int mid_first = std::min(rank[1], rank[2]);
    const int mid_second = std::max(rank[1], rank[2]);
    PairArray good{};
    good[kBad][kPassive] = draws[rank[0]];
    good[kBad][kPull] = draws[mid_first];
    good[kGood][kPassive] = draws[mid_second];
    good[kGood][kPull] = draws[rank[3]];
    out.push_back(clip_nondegenerate(TransitionKernel::from_good_probs(good), epsilon));
  }
  return out;
}

std::vector<TransitionKernel> gen_cpap(int n, const CpapParams& params, double epsilon, Rng& rng) {
  require_arms(n);
  params.validate();

  std::vector<bool> non_adherer(static_cast<std::size_t>(n), false);
  if (params.exact_non_adherer_count) {
    const auto count = static_cast<std::size_t>(std::floor(params.non_adherer_fraction * n));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < count; ++i) non_adherer[static_cast<std::size_t>(order[i])] = true;
  } else {
    for (std::size_t i = 0; i < non_adherer.size(); ++i)
      non_adherer[i] = uniform01(rng) < params.non_adherer_fraction;
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigma = params.noise_sigma();
  std::vector<TransitionKernel> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& base = non_adherer[static_cast<std::size_t>(i)] ? params.non_adherent : params.adherent;
    PairArray good{};
    for (int s = 0; s < kNumStates; ++s) {
      good[s][kPassive] = base.to_good(s, kPassive);
      good[s][kPull] = std::min(1.0, params.alpha_h * base.to_good(s, kPassive));
    }
    if (sigma > 0.0) {
      for (auto& row : good)
        for (auto& v : row) v += sigma * noise(rng);
    }
    // Noise can push entries outside [0, 1]; clamp before building the row.
    for (auto& row : good)
      for (auto& v : row) v = std::clamp(v, 0.0, 1.0);
    out.push_back(clip_nondegenerate(TransitionKernel::from_good_probs(good), epsilon));
  }
  return out;
}

std::vector<TransitionKernel> generate_domain(const DomainSpec& spec, int n, double epsilon, Rng& rng) {
  switch (spec.variant) {
    case Domain::Synthetic:
      return gen_synthetic(n, epsilon, rng);
    case Domain::SyntheticAlternate:
      return gen_synthetic_alternate(n, epsilon, rng);
    case Domain::Cpap:
      return gen_cpap(n, spec.cpap, epsilon, rng);
  }
  throw std::invalid_argument("unknown domain");
}

}  // namespace mfrmab
