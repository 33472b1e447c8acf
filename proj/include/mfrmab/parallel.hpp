#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mfrmab/kernel.hpp"
#include "mfrmab/sim.hpp"

namespace mfrmab {

/// Serial is the reference path; Parallel uses OpenMP when the library was
/// built with it and otherwise falls back to the serial code.
enum class Execution { Serial, Parallel };

bool openmp_enabled();
int max_threads();

/// Runs config.seeds independently and returns records in seed order.
/// Both paths yield identical records (up to wall time). `on_done` is
/// called once per finished run, never concurrently.
std::vector<RunRecord> run_seeds(const ExperimentConfig& config, Execution exec = Execution::Parallel,
                                 const std::function<void(const RunRecord&)>& on_done = {});

/// out[i] = steady_state(kernels[i], p).
void batch_steady_state(std::span<const TransitionKernel> kernels, PullProbability p,
                        std::span<double> out, Execution exec);

/// out[i] = arm_reward(kernels[i]).
void batch_arm_reward(std::span<const TransitionKernel> kernels, std::span<double> out, Execution exec);

/// out[i] = steady_state_oracle(kernels[i], p).
void batch_steady_state_oracle(std::span<const TransitionKernel> kernels, PullProbability p,
                               std::span<double> out, Execution exec);

}  // namespace mfrmab
