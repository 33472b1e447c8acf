#include "mfrmab/parallel.hpp"

#include <exception>
#include <stdexcept>

#ifdef MFRMAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace mfrmab {

bool openmp_enabled() {
#ifdef MFRMAB_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef MFRMAB_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

void check_sizes(std::span<const TransitionKernel> in, std::span<double> out) {
  if (in.size() != out.size()) throw LengthMismatchError("batch input and output differ in length");
}

// Cheap uniform items (kernels) get static blocks; expensive, uneven
// items (whole runs) are handed out one at a time.
enum class Grain { Fine, Coarse };

// Applies fn to every index; exceptions are captured per index and the
// first one (by index) is rethrown after the loop.
template <typename Fn>
void for_each_index(std::size_t count, Execution exec, Grain grain, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
  if (exec == Execution::Parallel && openmp_enabled()) {
#ifdef MFRMAB_HAVE_OPENMP
    if (grain == Grain::Coarse)
      omp_set_schedule(omp_sched_dynamic, 1);
    else
      omp_set_schedule(omp_sched_static, 0);
#else
    (void)grain;
#endif
#pragma omp parallel for schedule(runtime)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<RunRecord> run_seeds(const ExperimentConfig& config, Execution exec,
                                 const std::function<void(const RunRecord&)>& on_done) {
  config.validate();
  std::vector<RunRecord> out(config.seeds.size());
  for_each_index(config.seeds.size(), exec, Grain::Coarse, [&](std::size_t i) {
    out[i] = run_experiment(config, config.seeds[i]);
    if (on_done) {
#pragma omp critical(mfrmab_run_seeds_callback)
      on_done(out[i]);
    }
  });
  return out;
}

void batch_steady_state(std::span<const TransitionKernel> kernels, PullProbability p,
                        std::span<double> out, Execution exec) {
  check_sizes(kernels, out);
  for_each_index(kernels.size(), exec, Grain::Fine, [&](std::size_t i) { out[i] = steady_state(kernels[i], p); });
}

void batch_arm_reward(std::span<const TransitionKernel> kernels, std::span<double> out, Execution exec) {
  check_sizes(kernels, out);
  for_each_index(kernels.size(), exec, Grain::Fine, [&](std::size_t i) { out[i] = arm_reward(kernels[i]); });
}

void batch_steady_state_oracle(std::span<const TransitionKernel> kernels, PullProbability p,
                               std::span<double> out, Execution exec) {
  check_sizes(kernels, out);
  for_each_index(kernels.size(), exec, Grain::Fine,
                 [&](std::size_t i) { out[i] = steady_state_oracle(kernels[i], p); });
}

}  // namespace mfrmab
