// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Desk scale: T = 2000, H = 100.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfrmab/errors.hpp"
#include "mfrmab/io.hpp"
#include "mfrmab/parallel.hpp"
#include "mfrmab/sim.hpp"
#include "oracles.hpp"

using namespace mfrmab;

namespace {

// Pinned tolerances and thresholds.
constexpr double kSteadyStateTol = 1e-10;
constexpr double kSteadyStateSeconds = 5.0;
constexpr double kRewardTol = 1e-12;
constexpr double kProportionalityTol = 1e-10;
constexpr double kDominanceSlack = 1e-12;
constexpr double kFrequencySigmas = 3.0;
constexpr double kMaxOutsideBall = 0.02;
constexpr double kSublinearMax = 1.8;
constexpr double kLinearLo = 1.9;
constexpr double kLinearHi = 2.1;
constexpr double kSpearmanMin = 0.9;
constexpr double kTopKShareMin = 0.95;
constexpr double kT0Max = 40.0;
constexpr double kGBoundShareMin = 0.95;
constexpr double kArgminWindow = 0.15;
constexpr double kDeskSeconds = 600.0;

constexpr int kDeskSeeds = 30;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s | %s | %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[4096];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::vector<std::uint64_t> seed_range(int n) {
  std::vector<std::uint64_t> s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), std::uint64_t{1});
  return s;
}

ExperimentConfig desk(Algorithm algo = Algorithm::MfRmab) {
  ExperimentConfig c;
  c.num_arms = 5;
  c.budget = 1;
  c.episodes = 2000;
  c.horizon = 100;
  c.merit_c = 3.0;
  c.delta = 0.01;
  c.domain.variant = Domain::Synthetic;
  c.algorithm = algo;
  c.seeds = seed_range(kDeskSeeds);
  return c;
}

std::vector<TransitionKernel> kernel_corpus(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TransitionKernel> ks;
  ks.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ks.push_back(oracle::random_kernel(rng, 0.01));
  return ks;
}

void steady_state_equivalence() {
  const auto ks = kernel_corpus(10'000, 2024);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::vector<double> closed(ks.size()), iter(ks.size());
  for (double p : {0.0, 0.37, 1.0}) {
    batch_steady_state(ks, PullProbability(p), closed, Execution::Serial);
    batch_steady_state_oracle(ks, PullProbability(p), iter, Execution::Serial);
    for (std::size_t i = 0; i < ks.size(); ++i) worst = std::max(worst, std::abs(closed[i] - iter[i]));
  }
  const double secs = seconds_since(start);
  report("steady-state oracle equivalence", worst <= kSteadyStateTol && secs < kSteadyStateSeconds,
         fmt("10^4 kernels x p in {0, 0.37, 1}: max |err| = %.3g (tol %.0e), %.3f s (limit %.0f s)", worst,
             kSteadyStateTol, secs, kSteadyStateSeconds));
}

void reward_algebra() {
  const auto ks = kernel_corpus(10'000, 2024);
  double worst = 0.0, lo = 1.0, hi = -1.0;
  for (const auto& k : ks) {
    const double mu = arm_reward(k);
    const double diff = steady_state(k, PullProbability(1.0)) - steady_state(k, PullProbability(0.0));
    worst = std::max(worst, std::abs(mu - diff));
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
  }
  // corner kernels at the clip boundary
  for (double a : {0.01, 0.99})
    for (double b : {0.01, 0.99})
      for (double c : {0.01, 0.99})
        for (double d : {0.01, 0.99}) {
          const double mu = arm_reward(TransitionKernel::from_good_probs(a, b, c, d));
          lo = std::min(lo, mu);
          hi = std::max(hi, mu);
        }
  report("reward algebra", worst <= kRewardTol && lo >= -1.0 && hi <= 1.0,
         fmt("max |mu - (f(P,1) - f(P,0))| = %.3g (tol %.0e); mu range [%.4f, %.4f]", worst, kRewardTol, lo, hi));
}

void proportionality() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> size(2, 50);
  double worst = 0.0;
  int vectors = 0;
  for (double c : {1.0, 3.0, 10.0}) {
    const auto g = MeritFunction::exponential(c);
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<double> mu(static_cast<std::size_t>(size(rng)));
      for (auto& m : mu) m = u(rng);
      const auto pi = fair_distribution(mu, g);
      for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < mu.size(); ++j)
          worst = std::max(worst, std::abs(pi[i] * g(mu[j]) - pi[j] * g(mu[i])));
      ++vectors;
    }
  }
  report("proportionality", worst <= kProportionalityTol,
         fmt("%d merit vectors, c in {1, 3, 10}: max |pi_i g(mu_j) - pi_j g(mu_i)| = %.3g (tol %.0e)", vectors,
             worst, kProportionalityTol));
}

void sampling_dominance() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_dp = 0.0;
  int cases = 0;
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> mu(static_cast<std::size_t>(n));
      for (auto& m : mu) m = u(rng);
      const auto pi = fair_distribution(mu, MeritFunction::exponential(rep % 2 ? 10.0 : 3.0));
      const std::vector<double> w(pi.probabilities().begin(), pi.probabilities().end());
      for (int k = 1; k <= n; ++k) {
        const auto enumerated = oracle::inclusion_by_enumeration(w, k);
        const auto dp = inclusion_probabilities(pi, k);
        for (int i = 0; i < n; ++i) {
          const auto ui = static_cast<std::size_t>(i);
          worst_gap = std::min(worst_gap, enumerated[ui] - w[ui]);
          worst_dp = std::max(worst_dp, std::abs(enumerated[ui] - dp[ui]));
        }
        ++cases;
      }
    }
  }

  // Monte Carlo agreement.
  constexpr int kDraws = 100'000;
  int checks = 0, outside = 0;
  double worst_z = 0.0;
  Rng sampler = make_stream(5, Stream::Sampler);
  SuccessiveSampler s;
  std::vector<int> out;
  const std::vector<std::pair<std::vector<double>, int>> mc{
      {{0.05, 0.1, 0.15, 0.2, 0.2, 0.3}, 1}, {{0.05, 0.1, 0.15, 0.2, 0.2, 0.3}, 2},
      {{0.05, 0.1, 0.15, 0.2, 0.2, 0.3}, 3}, {{0.01, 0.02, 0.07, 0.1, 0.3, 0.5}, 4},
      {{0.6, 0.25, 0.1, 0.05}, 2}};
  for (const auto& [w, k] : mc) {
    const PullDistribution pi(w);
    const auto exact = inclusion_probabilities(pi, k);
    std::vector<int> hits(w.size(), 0);
    for (int r = 0; r < kDraws; ++r) {
      s.sample(pi, k, sampler, out);
      for (int i : out) ++hits[static_cast<std::size_t>(i)];
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double p = exact[i];
      const double sd = std::sqrt(p * (1.0 - p) / kDraws);
      const double dev = std::abs(hits[i] / static_cast<double>(kDraws) - p);
      const double z = sd > 0 ? dev / sd : (dev > 0 ? std::numeric_limits<double>::infinity() : 0.0);
      worst_z = std::max(worst_z, z);
      ++checks;
      if (z > kFrequencySigmas) ++outside;
    }
  }
  report("sampling dominance",
         worst_gap >= -kDominanceSlack && worst_dp <= 1e-12 && outside == 0,
         fmt("%d (pi, K) cases with N <= 6: min(Pr_i(K) - pi_i) = %.3g, DP vs enumeration %.2g; "
             "10^5 draws: %d/%d arm frequencies beyond %.0f sigma (max %.2f sigma)",
             cases, worst_gap, worst_dp, outside, checks, kFrequencySigmas, worst_z));
}

struct DeskRuns {
  std::vector<RunRecord> mf;
  std::vector<RunRecord> opt;
  double seconds = 0.0;
};

DeskRuns run_desk() {
  const auto start = std::chrono::steady_clock::now();
  DeskRuns d;
  auto c = desk();
  c.record_snapshots = true;
  d.mf = run_seeds(c, Execution::Parallel);
  d.opt = run_seeds(desk(Algorithm::Optimal), Execution::Parallel);
  d.seconds = seconds_since(start);
  return d;
}

void coverage(const DeskRuns& d) {
  std::int64_t pairs = 0, outside = 0;
  for (const auto& r : d.mf) {
    pairs += static_cast<std::int64_t>(r.truth_in_ball.size());
    for (auto in : r.truth_in_ball) outside += in ? 0 : 1;
  }
  const double share = static_cast<double>(outside) / static_cast<double>(pairs);
  report("confidence coverage", share < kMaxOutsideBall,
         fmt("%lld of %lld (run, episode) pairs have P* outside the ball: %.4f%% (limit %.0f%%)",
             static_cast<long long>(outside), static_cast<long long>(pairs), 100 * share, 100 * kMaxOutsideBall));
}

void reward_envelope(const DeskRuns& d) {
  std::int64_t checked = 0, violations = 0;
  double worst = 0.0;
  int skipped = 0;
  for (const auto& r : d.mf) {
    if (std::isnan(r.diagnostics.eta)) {
      ++skipped;
      continue;
    }
    const auto c = check_reward_envelope(r);
    checked += c.checked;
    violations += c.violations;
    worst = std::max(worst, c.worst_ratio);
  }
  report("reward error envelope", violations == 0 && checked > 0,
         fmt("%lld (run, episode > t0, arm, kernel) checks, %lld violations, worst |mu - mu*| / bound = %.3f; "
             "%d runs without episodes past t0",
             static_cast<long long>(checked), static_cast<long long>(violations), worst, skipped));
}

double regret_ratio(const std::vector<RunRecord>& rs) {
  double at_half = 0.0, at_end = 0.0;
  for (const auto& r : rs) {
    at_half += r.fr_cum[r.fr_cum.size() / 2 - 1];
    at_end += r.fr_cum.back();
  }
  return at_end / at_half;
}

void sublinearity(const DeskRuns& d) {
  const double mf = regret_ratio(d.mf);
  const double opt = regret_ratio(d.opt);
  report("sublinear fairness regret",
         mf < kSublinearMax && opt >= kLinearLo && opt <= kLinearHi && d.seconds < kDeskSeconds,
         fmt("mean FR^2000 / mean FR^1000: MF-RMAB %.4f (< %.1f), Optimal %.4f (in [%.1f, %.1f]); "
             "60 desk runs in %.1f s",
             mf, kSublinearMax, opt, kLinearLo, kLinearHi, d.seconds));
}

void exposure(const DeskRuns& d) {
  const auto g = MeritFunction::exponential(3.0);
  double rho_sum = 0.0;
  double rho_min = 1.0;
  for (const auto& r : d.mf) {
    std::vector<double> pulls(r.tail_pulls.begin(), r.tail_pulls.end());
    std::vector<double> weight;
    for (double mu : r.mu_star) weight.push_back(g(mu));
    const double rho = spearman(pulls, weight);
    rho_sum += rho;
    rho_min = std::min(rho_min, rho);
  }
  const double rho_mean = rho_sum / static_cast<double>(d.mf.size());

  double share_sum = 0.0, share_min = 1.0;
  for (const auto& r : d.opt) {
    const auto top = optimal_baseline(r.mu_star, r.budget).chosen;
    double to_top = 0.0, total = 0.0;
    for (std::size_t i = 0; i < r.tail_pulls.size(); ++i) {
      total += static_cast<double>(r.tail_pulls[i]);
      if (std::find(top.begin(), top.end(), static_cast<int>(i)) != top.end())
        to_top += static_cast<double>(r.tail_pulls[i]);
    }
    share_sum += to_top / total;
    share_min = std::min(share_min, to_top / total);
  }
  const double share_mean = share_sum / static_cast<double>(d.opt.size());
  report("exposure ordering", rho_mean >= kSpearmanMin && share_mean >= kTopKShareMin,
         fmt("MF-RMAB tail pulls vs g(mu*): mean Spearman %.4f (>= %.1f, min %.3f); Optimal tail share to true "
             "top-K: mean %.4f (>= %.2f, min %.3f)",
             rho_mean, kSpearmanMin, rho_min, share_mean, kTopKShareMin, share_min));
}

struct SweepResult {
  std::vector<SweepPoint> points;  // interior ratios, then K = N last
  double argmin_ratio = 0.0;
};

SweepResult sweep(Domain domain, int seeds) {
  ExperimentConfig c = desk();
  c.domain.variant = domain;
  c.num_arms = 10;
  c.seeds = seed_range(seeds);
  const std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0};
  SweepResult out;
  out.points = kn_sweep(c, ratios);
  const auto best = std::min_element(out.points.begin(), out.points.end() - 1, [](const auto& a, const auto& b) {
    return a.fr_final_mean < b.fr_final_mean;
  });
  out.argmin_ratio = best->ratio;
  return out;
}

std::string sweep_curve(const SweepResult& s) {
  std::ostringstream os;
  for (const auto& p : s.points) os << (os.tellp() ? " " : "") << p.k << ":" << io::format_number(std::round(p.fr_final_mean * 10) / 10);
  return os.str();
}

void kn_sweep_shape() {
  const auto syn = sweep(Domain::Synthetic, kDeskSeeds);
  const auto& pts = syn.points;
  const bool interior = syn.argmin_ratio > 0.1 && syn.argmin_ratio < 0.8;
  const bool full_largest = std::all_of(pts.begin(), pts.end() - 1, [&](const auto& p) {
    return p.fr_final_mean < pts.back().fr_final_mean;
  });

  // Other domains: argmin position reported against the published figure.
  const auto alt = sweep(Domain::SyntheticAlternate, kDeskSeeds);
  const auto cpap = sweep(Domain::Cpap, kDeskSeeds);
  const bool alt_near = std::abs(alt.argmin_ratio - 0.3) <= kArgminWindow + 1e-9;
  const bool cpap_near = std::abs(cpap.argmin_ratio - 0.5) <= kArgminWindow + 1e-9;

  report("K/N sweep shape", interior && full_largest,
         fmt("Synthetic N=10, FR^T by K [%s]: argmin K/N = %.1f (interior: %s), K=N largest: %s; "
             "qualitative: Synthetic-alternate argmin %.1f (%s 0.3 +- 0.15) [%s], CPAP argmin %.1f (%s 0.5 +- 0.15) "
             "[%s]",
             sweep_curve(syn).c_str(), syn.argmin_ratio, interior ? "yes" : "no", full_largest ? "yes" : "no",
             alt.argmin_ratio, alt_near ? "within" : "outside", sweep_curve(alt).c_str(), cpap.argmin_ratio,
             cpap_near ? "within" : "outside", sweep_curve(cpap).c_str()));
}

void diagnostics_sanity() {
  const std::vector<std::pair<int, int>> grid{{5, 1}, {10, 2}, {20, 4}, {40, 8}, {100, 20}};
  int configs = 0, t0_ok = 0;
  int runs = 0, finite_runs = 0, evaluable = 0, within = 0;
  std::string worst_cells;
  for (Domain d : {Domain::Synthetic, Domain::SyntheticAlternate, Domain::Cpap}) {
    for (const auto& [n, k] : grid) {
      ExperimentConfig c = desk();
      c.domain.variant = d;
      c.num_arms = n;
      c.budget = k;
      c.seeds = seed_range(kDeskSeeds);
      const auto recs = run_seeds(c, Execution::Parallel);
      const auto row = io::summarize_diagnostics(recs, d);
      std::vector<double> t0s;
      for (const auto& r : recs) t0s.push_back(static_cast<double>(r.diagnostics.t0_candidate));
      std::sort(t0s.begin(), t0s.end());
      ++configs;
      if (row.t0_mean < kT0Max) ++t0_ok;
      worst_cells += fmt("%s%s %d:%d t0 %.1f (median %.0f) G %.1f", configs > 1 ? "; " : "",
                         to_string(d).c_str(), n, k, row.t0_mean, t0s[t0s.size() / 2], row.g_mean);

      const auto merit = MeritFunction::exponential(c.merit_c);
      for (const auto& r : recs) {
        ++runs;
        const auto& g = r.diagnostics.g_per_arm;
        if (std::all_of(g.begin(), g.end(), [](double x) { return std::isfinite(x); })) ++finite_runs;
        const double lambda = *std::max_element(r.max_inclusion.begin(), r.max_inclusion.end());
        try {
          const double bound =
              g_upper_bound(c.epsilon, c.horizon, n, merit.min_weight(), merit.max_weight(), lambda);
          ++evaluable;
          if (r.diagnostics.g_max <= bound) ++within;
        } catch (const VacuousBoundError&) {
        } catch (const std::invalid_argument&) {  // lambda = 1: no bound
        }
      }
    }
  }
  const double share = evaluable ? static_cast<double>(within) / evaluable : 1.0;
  report("diagnostics sanity", t0_ok == configs && finite_runs == runs && share >= kGBoundShareMin,
         fmt("mean t0 < %.0f in %d/%d configs; G finite in %d/%d runs; G <= bound in %d/%d non-vacuous runs "
             "(%.1f%%, need %.0f%%) [%s]",
             kT0Max, t0_ok, configs, finite_runs, runs, within, evaluable, 100 * share, 100 * kGBoundShareMin,
             worst_cells.c_str()));
}

std::string csv_bytes(const std::vector<RunRecord>& recs) {
  std::ostringstream os;
  io::write_regret_csv(os, recs);
  io::write_exposure_csv(os, recs);
  io::write_diagnostics_csv(os, recs);
  return os.str();
}

void determinism() {
  bool same = true;
  std::size_t bytes = 0;
  for (Domain d : {Domain::Synthetic, Domain::SyntheticAlternate, Domain::Cpap}) {
    ExperimentConfig c = desk();
    c.domain.variant = d;
    c.episodes = 300;
    c.seeds = {1, 2, 3};
    c.record_snapshots = true;
    const auto a = run_seeds(c, Execution::Parallel);
    const auto b = run_seeds(c, Execution::Serial);
    const auto again = run_seeds(c, Execution::Parallel);
    const auto sa = csv_bytes(a), sb = csv_bytes(b), sc = csv_bytes(again);
    same = same && sa == sb && sa == sc;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i].same_result(b[i]) && a[i].same_result(again[i]);
    bytes += sa.size();
  }
  report("determinism", same,
         fmt("3 domains x 3 seeds replayed three times (parallel, serial, parallel): %zu CSV bytes each, %s", bytes,
             same ? "identical" : "DIFFERENT"));
}

}  // namespace

int main() {
  std::printf("OpenMP %s, %d thread(s)\n", openmp_enabled() ? "on" : "off", max_threads());
  const auto start = std::chrono::steady_clock::now();
  steady_state_equivalence();
  reward_algebra();
  proportionality();
  sampling_dominance();
  const auto desk_runs = run_desk();
  coverage(desk_runs);
  reward_envelope(desk_runs);
  sublinearity(desk_runs);
  exposure(desk_runs);
  kn_sweep_shape();
  diagnostics_sanity();
  determinism();
  std::printf("%d criteria failed, %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
