#include "mfrmab/sim.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mfrmab/parallel.hpp"

namespace mfrmab {

std::string to_string(Algorithm a) { return a == Algorithm::MfRmab ? "mf-rmab" : "optimal"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "mf-rmab" || name == "mfrmab") return Algorithm::MfRmab;
  if (name == "optimal") return Algorithm::Optimal;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (num_arms < 2) fail("num_arms must be >= 2");
  if (budget < 1 || budget > num_arms) fail("budget must satisfy 1 <= K <= N");
  if (episodes < 1) fail("episodes must be >= 1");
  if (horizon < 1) fail("horizon must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 0.5)) fail("epsilon must lie in (0, 0.5)");
  if (!(merit_c >= 0.0)) fail("merit_c must be >= 0");
  if (seeds.empty()) fail("seed list is empty");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) fail("tail_fraction must lie in (0, 1]");
  if (domain.variant == Domain::Cpap) {
    try {
      domain.cpap.validate();
    } catch (const std::invalid_argument& e) {
      fail(std::string("cpap: ") + e.what());
    }
  }
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void put(std::ostringstream& os, const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << key << '=' << buf << '\n';
}

void put_kernel(std::ostringstream& os, const char* key, const TransitionKernel& k) {
  os << key << '=';
  char buf[64];
  for (double v : k.tensor()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << ',';
  }
  os << '\n';
}

bool bits_equal(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool bits_equal(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](double x, double y) { return bits_equal(x, y); });
}

bool bits_equal(const ArmSnapshot& a, const ArmSnapshot& b) {
  for (int s = 0; s < 2; ++s)
    for (int ac = 0; ac < 2; ++ac)
      if (!bits_equal(a.radius[s][ac], b.radius[s][ac])) return false;
  return bits_equal(a.gaps.eta1, b.gaps.eta1) && bits_equal(a.gaps.eta2, b.gaps.eta2) &&
         bits_equal(a.gaps.omega1, b.gaps.omega1) && bits_equal(a.gaps.omega2, b.gaps.omega2) &&
         a.contains_truth == b.contains_truth && bits_equal(a.mu_optimistic, b.mu_optimistic) &&
         bits_equal(a.mu_pessimistic, b.mu_pessimistic) && bits_equal(a.mu_empirical, b.mu_empirical);
}

double merit_or_nan(const TransitionKernel& k) {
  try {
    return arm_reward(k);
  } catch (const DegenerateKernelError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "num_arms=" << c.num_arms << '\n'
     << "budget=" << c.budget << '\n'
     << "episodes=" << c.episodes << '\n'
     << "horizon=" << c.horizon << '\n';
  put(os, "delta", c.delta);
  put(os, "merit_c", c.merit_c);
  put(os, "epsilon", c.epsilon);
  os << "domain=" << to_string(c.domain.variant) << '\n';
  if (c.domain.variant == Domain::Cpap) {
    const auto& p = c.domain.cpap;
    put(os, "cpap_alpha_h", p.alpha_h);
    put(os, "cpap_non_adherer_fraction", p.non_adherer_fraction);
    put(os, "cpap_noise_std", p.noise_std);
    os << "cpap_noise_is_variance=" << p.noise_is_variance << '\n'
       << "cpap_exact_non_adherer_count=" << p.exact_non_adherer_count << '\n';
    put_kernel(os, "cpap_adherent", p.adherent);
    put_kernel(os, "cpap_non_adherent", p.non_adherent);
  }
  os << "algorithm=" << to_string(c.algorithm) << '\n'
     << "carry_over_state=" << c.carry_over_state << '\n'
     << "instance_seed=" << (c.instance_seed ? std::to_string(*c.instance_seed) : "none") << '\n';
  put(os, "tail_fraction", c.tail_fraction);

  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

Environment::Environment(std::vector<TransitionKernel> truth, int budget, Rng rng)
    : truth_(std::move(truth)),
      states_(truth_.size(), kBad),
      pulled_mask_(truth_.size(), 0),
      budget_(budget),
      rng_(std::move(rng)) {
  if (budget_ < 1 || static_cast<std::size_t>(budget_) > truth_.size())
    throw InvalidBudgetError("environment budget must satisfy 1 <= K <= N");
}

void Environment::reset_uniform() {
  for (auto& s : states_) s = uniform01(rng_) < 0.5 ? kBad : kGood;
}

void Environment::set_state(int arm, int state) {
  if (state != kBad && state != kGood) throw std::invalid_argument("state must be 0 or 1");
  states_.at(static_cast<std::size_t>(arm)) = static_cast<std::uint8_t>(state);
}

void Environment::step(std::span<const int> pulled, std::span<Transition> out) {
  if (pulled.size() != static_cast<std::size_t>(budget_))
    throw InvariantViolation("budget: exactly K arms must be pulled per step");
  if (out.size() != states_.size()) throw LengthMismatchError("output span must hold one transition per arm");
  for (int i : pulled) {
    if (i < 0 || static_cast<std::size_t>(i) >= states_.size())
      throw InvariantViolation("budget: pulled arm index out of range");
    auto& m = pulled_mask_[static_cast<std::size_t>(i)];
    if (m) {
      std::fill(pulled_mask_.begin(), pulled_mask_.end(), 0);
      throw InvariantViolation("budget: an arm was pulled twice in one step");
    }
    m = 1;
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const int s = states_[i];
    const int a = pulled_mask_[i];
    // One draw per arm per step regardless of the action taken.
    const int next = uniform01(rng_) < truth_[i].to_good(s, a) ? kGood : kBad;
    out[i] = Transition{static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(a),
                        static_cast<std::uint8_t>(next)};
    states_[i] = static_cast<std::uint8_t>(next);
    pulled_mask_[i] = 0;
  }
}

std::vector<Transition> Environment::step(std::span<const int> pulled) {
  std::vector<Transition> out(states_.size());
  step(pulled, out);
  return out;
}

EpisodeTrace run_episode(const PullDistribution& policy, Environment& env, int horizon, Rng& sampler_rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int n = env.num_arms();
  const int k = env.budget();
  if (policy.size() != static_cast<std::size_t>(n))
    throw LengthMismatchError("policy does not cover the environment's arms");

  EpisodeTrace tr;
  tr.num_arms = n;
  tr.horizon = horizon;
  tr.budget = k;
  tr.pulled.reserve(static_cast<std::size_t>(horizon) * k);
  tr.triples.resize(static_cast<std::size_t>(horizon) * n);
  tr.visited.assign(static_cast<std::size_t>(n), 0);

  SuccessiveSampler sampler;
  std::vector<int> chosen;
  std::vector<Transition> step_out(static_cast<std::size_t>(n));
  for (int h = 0; h < horizon; ++h) {
    sampler.sample(policy, k, sampler_rng, chosen);
    tr.pulled.insert(tr.pulled.end(), chosen.begin(), chosen.end());
    env.step(chosen, step_out);
    for (int i = 0; i < n; ++i) {
      const auto& t = step_out[static_cast<std::size_t>(i)];
      tr.triples[static_cast<std::size_t>(i) * horizon + h] = t;
      tr.visited[static_cast<std::size_t>(i)] |= pair_bit(t.state, t.action);
    }
  }
  return tr;
}

std::vector<TransitionKernel> population_for(const ExperimentConfig& config, std::uint64_t seed) {
  Rng rng = make_stream(config.instance_seed.value_or(seed), Stream::Dataset);
  return generate_domain(config.domain, config.num_arms, config.epsilon, rng);
}

RunRecord run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  const int n = config.num_arms;
  const int k = config.budget;
  const int horizon = config.horizon;
  const auto arms = static_cast<std::size_t>(n);

  RunRecord rec;
  rec.config_hash = config_hash(config);
  rec.seed = seed;
  rec.num_arms = n;
  rec.budget = k;
  rec.episodes = config.episodes;
  rec.horizon = horizon;

  // Ground truth: used by the environment, the pi* benchmark and the
  // diagnostics only. The learner below reads counts, never `truth`.
  const auto truth = population_for(config, seed);
  const auto merit = MeritFunction::exponential(config.merit_c);
  for (const auto& kern : truth) rec.mu_star.push_back(arm_reward(kern));
  const auto pi_star = fair_distribution(rec.mu_star, merit, k);
  rec.pi_star.assign(pi_star.probabilities().begin(), pi_star.probabilities().end());
  const bool scaled_feasible =
      std::all_of(rec.pi_star.begin(), rec.pi_star.end(), [k](double p) { return p <= 1.0 / k; });

  Environment env(truth, k, make_stream(seed, Stream::Environment));
  Rng sampler_rng = make_stream(seed, Stream::Sampler);
  const ConfidenceParams params(config.delta, n);

  std::vector<TransitionCounts> counts(arms);
  DiagnosticsTracker tracker(n);
  RegretLedger ledger;
  std::vector<double> mu_t(arms);
  std::vector<GapBounds> gaps(arms);
  std::vector<ConfidenceModel> models(arms);

  rec.pulls.assign(arms, 0);
  rec.tail_pulls.assign(arms, 0);
  rec.tail_episodes = std::max(1, static_cast<int>(std::ceil(config.tail_fraction * config.episodes)));
  rec.tail_episodes = std::min(rec.tail_episodes, config.episodes);
  const int tail_start = config.episodes - rec.tail_episodes + 1;
  rec.truth_in_ball.reserve(static_cast<std::size_t>(config.episodes));
  rec.max_inclusion.reserve(static_cast<std::size_t>(config.episodes));
  if (config.record_snapshots) rec.snapshots.reserve(static_cast<std::size_t>(config.episodes) * arms);

  for (int t = 1; t <= config.episodes; ++t) {
    // Estimates from counts gathered in episodes 1..t-1.
    bool in_ball = true;
    for (std::size_t i = 0; i < arms; ++i) {
      models[i] = ConfidenceModel::build(counts[i], params, t);
      mu_t[i] = arm_reward(models[i].optimistic);
      gaps[i] = gap_bounds(models[i]);
      const bool inside = contains_truth(models[i], truth[i]);  // diagnostics only
      in_ball = in_ball && inside;
      if (config.record_snapshots) {
        rec.snapshots.push_back(ArmSnapshot{
            .radius = models[i].radius,
            .gaps = gaps[i],
            .contains_truth = inside,
            .mu_optimistic = mu_t[i],
            .mu_pessimistic = merit_or_nan(models[i].pessimistic),
            .mu_empirical = merit_or_nan(models[i].empirical),
        });
      }
    }
    rec.truth_in_ball.push_back(in_ball ? 1 : 0);

    const PullDistribution pi_t = config.algorithm == Algorithm::MfRmab
                                      ? fair_distribution(mu_t, merit, k)
                                      : optimal_baseline(mu_t, k).dist;

    double lambda;
    if (k > 1 && arms <= kExactInclusionArms) {
      const auto incl = inclusion_probabilities(pi_t, k);
      lambda = *std::max_element(incl.begin(), incl.end());
    } else {
      lambda = max_inclusion_upper_bound(pi_t, k);  // exact for k = 1
    }
    rec.max_inclusion.push_back(lambda);

    if (!config.carry_over_state || t == 1) env.reset_uniform();
    const auto trace = run_episode(pi_t, env, horizon, sampler_rng);

    for (int arm : trace.pulled) {
      ++rec.pulls[static_cast<std::size_t>(arm)];
      if (t >= tail_start) ++rec.tail_pulls[static_cast<std::size_t>(arm)];
    }
    for (std::size_t i = 0; i < arms; ++i) {
      counts[i] = update_counts(counts[i], trace.arm_triples(static_cast<int>(i)));
      if (counts[i].total() != static_cast<std::uint64_t>(horizon) * static_cast<std::uint64_t>(t))
        throw InvariantViolation("restlessness: every arm must log H transitions per episode");
    }
    tracker.record_episode(trace.visited, gaps);

    const double fr = fairness_regret_increment(pi_star, pi_t);
    if (fr > 2.0 + 1e-12) throw InvariantViolation("fairness regret increment exceeds 2");
    ledger.add(fr);
    if (scaled_feasible) rec.scaled_fr.push_back(k * fr);
  }

  const auto total_pulls = std::accumulate(rec.pulls.begin(), rec.pulls.end(), std::int64_t{0});
  if (total_pulls != static_cast<std::int64_t>(k) * horizon * config.episodes)
    throw InvariantViolation("exposure conservation: pulls must total K*H*T");

  rec.fr = ledger.per_episode();
  rec.fr_cum = ledger.cumulative();
  rec.diagnostics = tracker.snapshot();
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

bool RunRecord::same_result(const RunRecord& o) const {
  const auto& a = diagnostics;
  const auto& b = o.diagnostics;
  const bool diag_equal = a.episodes == b.episodes && a.t0_candidate == b.t0_candidate &&
                          a.assumption_verified == b.assumption_verified && bits_equal(a.eta, b.eta) &&
                          bits_equal(a.omega, b.omega) && bits_equal(a.g_per_arm, b.g_per_arm) &&
                          bits_equal(a.g_max, b.g_max);
  const bool snaps_equal =
      std::equal(snapshots.begin(), snapshots.end(), o.snapshots.begin(), o.snapshots.end(),
                 [](const ArmSnapshot& x, const ArmSnapshot& y) { return bits_equal(x, y); });
  return config_hash == o.config_hash && seed == o.seed && num_arms == o.num_arms && budget == o.budget &&
         episodes == o.episodes && horizon == o.horizon && bits_equal(fr, o.fr) &&
         bits_equal(fr_cum, o.fr_cum) && bits_equal(scaled_fr, o.scaled_fr) && pulls == o.pulls &&
         tail_pulls == o.tail_pulls && tail_episodes == o.tail_episodes && bits_equal(mu_star, o.mu_star) &&
         bits_equal(pi_star, o.pi_star) && truth_in_ball == o.truth_in_ball &&
         bits_equal(max_inclusion, o.max_inclusion) && diag_equal && snaps_equal;
}

Theorem1Check check_reward_envelope(const RunRecord& record) {
  if (record.snapshots.size() != static_cast<std::size_t>(record.episodes) * record.num_arms)
    throw std::invalid_argument("reward envelope check needs per-episode snapshots");
  Theorem1Check out;
  const auto& d = record.diagnostics;
  if (std::isnan(d.eta) || std::isnan(d.omega)) return out;
  for (auto t = d.t0_candidate + 1; t <= record.episodes; ++t) {
    for (int i = 0; i < record.num_arms; ++i) {
      const auto& snap = record.snapshot(static_cast<int>(t), i);
      if (!snap.contains_truth) continue;
      const double bound = reward_error_bound(snap.radius, d.eta, d.omega);
      const double mu_star = record.mu_star[static_cast<std::size_t>(i)];
      for (double mu : {snap.mu_optimistic, snap.mu_pessimistic, snap.mu_empirical}) {
        if (std::isnan(mu)) continue;
        ++out.checked;
        const double err = std::abs(mu - mu_star);
        if (err > bound) ++out.violations;
        if (bound > 0.0) out.worst_ratio = std::max(out.worst_ratio, err / bound);
      }
    }
  }
  return out;
}

namespace {

void mean_std(std::span<const double> values, double& mean, double& sd) {
  const double n = static_cast<double>(values.size());
  mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

}  // namespace

AggregateCurves aggregate_runs(std::span<const RunRecord> records) {
  if (records.empty()) throw std::invalid_argument("no records to aggregate");
  const auto& first = records.front();
  for (const auto& r : records) {
    if (r.config_hash != first.config_hash || r.episodes != first.episodes || r.num_arms != first.num_arms ||
        r.fr_cum.size() != first.fr_cum.size())
      throw std::invalid_argument("records come from different configurations");
  }
  AggregateCurves out;
  out.runs = records.size();
  const auto episodes = first.fr_cum.size();
  const auto arms = static_cast<std::size_t>(first.num_arms);
  std::vector<double> column(records.size());
  out.fr_cum_mean.resize(episodes);
  out.fr_cum_std.resize(episodes);
  for (std::size_t t = 0; t < episodes; ++t) {
    for (std::size_t r = 0; r < records.size(); ++r) column[r] = records[r].fr_cum[t];
    mean_std(column, out.fr_cum_mean[t], out.fr_cum_std[t]);
  }
  out.pulls_mean.resize(arms);
  out.pulls_std.resize(arms);
  for (std::size_t i = 0; i < arms; ++i) {
    for (std::size_t r = 0; r < records.size(); ++r) column[r] = static_cast<double>(records[r].pulls[i]);
    mean_std(column, out.pulls_mean[i], out.pulls_std[i]);
  }
  if (episodes > 0) {
    out.final_mean = out.fr_cum_mean.back();
    out.final_std = out.fr_cum_std.back();
  }
  return out;
}

SweepPoint sweep_point(const ExperimentConfig& config, double ratio) {
  ExperimentConfig c = config;
  c.budget = static_cast<int>(std::lround(ratio * config.num_arms));
  if (c.budget < 1) throw ConfigError("K/N ratio yields K < 1");
  c.validate();
  const auto records = run_seeds(c, Execution::Parallel);
  const auto agg = aggregate_runs(records);
  return SweepPoint{ratio, c.budget, c.num_arms, agg.final_mean, agg.final_std};
}

std::vector<SweepPoint> kn_sweep(const ExperimentConfig& config, std::span<const double> ratios) {
  std::vector<SweepPoint> out;
  out.reserve(ratios.size());
  for (double r : ratios) out.push_back(sweep_point(config, r));
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) rank[order[m]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatchError("spearman inputs differ in length");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(rx.size());
  my /= static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace mfrmab
