#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mfrmab/kernel.hpp"
#include "mfrmab/rng.hpp"

namespace mfrmab {

enum class Domain { Synthetic, SyntheticAlternate, Cpap };

std::string to_string(Domain d);
/// Accepts "synthetic", "synthetic-alternate", "cpap". Throws std::invalid_argument.
Domain parse_domain(std::string_view name);

/// Two-archetype CPAP population. Only the no-pull slice of each base
/// kernel is used; the pull slice is derived with alpha_h.
struct CpapParams {
  double alpha_h = 1.1;
  double non_adherer_fraction = 0.3;
  /// Spread of the per-entry Gaussian perturbation; read as a variance
  /// instead when noise_is_variance is set.
  double noise_std = 0.1;
  bool noise_is_variance = false;
  /// floor(fraction * n) non-adherers when set, independent coin flips otherwise.
  bool exact_non_adherer_count = true;
  TransitionKernel adherent = default_adherent();
  TransitionKernel non_adherent = default_non_adherent();

  double noise_sigma() const;
  /// Throws std::invalid_argument.
  void validate() const;

  /// Implementer-chosen two-state reductions (no published numbers).
  static TransitionKernel default_adherent();
  static TransitionKernel default_non_adherent();
};

struct DomainSpec {
  Domain variant = Domain::Synthetic;
  CpapParams cpap;
};

/// Clamp every P(s,a,1) into [epsilon, 1 - epsilon] and recompute the
/// complements. The result is flagged non-degenerate at epsilon.
TransitionKernel clip_nondegenerate(const TransitionKernel& kernel, double epsilon);

/// P(s,a,1) ~ U[0,1] independently, then clipped.
std::vector<TransitionKernel> gen_synthetic(int n, double epsilon, Rng& rng);

/// Four uniforms per arm assigned by rank so that pulling never hurts
/// (P(s,1,1) >= P(s,0,1)) and the good state never hurts
/// (P(1,a,1) >= P(0,a,1)), then clipped.
std::vector<TransitionKernel> gen_synthetic_alternate(int n, double epsilon, Rng& rng);

/// Adherent / non-adherent archetypes, pull rows scaled by alpha_h,
/// Gaussian heterogeneity on every P(s,a,1), then clipped.
std::vector<TransitionKernel> gen_cpap(int n, const CpapParams& params, double epsilon, Rng& rng);

/// Dispatch on spec.variant.
std::vector<TransitionKernel> generate_domain(const DomainSpec& spec, int n, double epsilon, Rng& rng);

}  // namespace mfrmab
