// Serial vs OpenMP timings for the data-parallel kernels.
//   mfrmab_bench [kernels] [seeds]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <vector>

#include "mfrmab/parallel.hpp"

using namespace mfrmab;

namespace {

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int n_kernels = argc > 1 ? std::atoi(argv[1]) : 1'000'000;
  const int n_seeds = argc > 2 ? std::atoi(argv[2]) : 8;
  std::printf("OpenMP %s, %d thread(s); %d kernels, %d seeds\n", openmp_enabled() ? "on" : "off",
              max_threads(), n_kernels, n_seeds);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<TransitionKernel> ks;
  ks.reserve(static_cast<std::size_t>(n_kernels));
  for (int i = 0; i < n_kernels; ++i) ks.push_back(TransitionKernel::from_good_probs(u(rng), u(rng), u(rng), u(rng)));
  std::vector<double> a(ks.size()), b(ks.size());

  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");
  const PullProbability p(0.37);
  row("steady_state", best_of(3, [&] { batch_steady_state(ks, p, a, Execution::Serial); }),
      best_of(3, [&] { batch_steady_state(ks, p, b, Execution::Parallel); }));
  if (a != b) return 1;
  row("arm_reward", best_of(3, [&] { batch_arm_reward(ks, a, Execution::Serial); }),
      best_of(3, [&] { batch_arm_reward(ks, b, Execution::Parallel); }));
  if (a != b) return 1;
  const std::span<const TransitionKernel> few(ks.data(), std::min<std::size_t>(ks.size(), 100'000));
  const std::span<double> fa(a.data(), few.size()), fb(b.data(), few.size());
  row("steady_state_oracle", best_of(1, [&] { batch_steady_state_oracle(few, p, fa, Execution::Serial); }),
      best_of(1, [&] { batch_steady_state_oracle(few, p, fb, Execution::Parallel); }));

  ExperimentConfig c;
  c.seeds.resize(static_cast<std::size_t>(n_seeds));
  std::iota(c.seeds.begin(), c.seeds.end(), std::uint64_t{1});
  std::vector<RunRecord> rs, rp;
  row("run_seeds (desk scale)", best_of(1, [&] { rs = run_seeds(c, Execution::Serial); }),
      best_of(1, [&] { rp = run_seeds(c, Execution::Parallel); }));
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (!rs[i].same_result(rp[i])) return 1;
  return 0;
}
