#pragma once

#include <cstdint>
#include <vector>

#include "sentinel/types.hpp"

namespace sentinel {

// Log-domain densities. Every stored density in this project is a natural
// log; the raw likelihood underflows double precision long before the
// dataset sizes of interest.

/// Log marginal density of n background-only records: -n * log(4*pi).
double log_likelihood_m1(std::int64_t n);

/// log f(data | p, r, u, source model) − log f(data | no-source model)
///   = (n − J) log(1 − p) + J log(p/d + 1 − p).
/// The (4*pi)^-n factor cancels exactly; this is the quantity the sampler
/// tempers and the Bayes factor estimator consumes. Throws
/// std::invalid_argument on contract violations (p outside (0,1), J outside
/// [0, n], d <= 0).
double log_likelihood_ratio(std::int64_t n, std::int64_t j, double p, double d);

/// Full source-model log likelihood; equals
/// log_likelihood_m1(n) + log_likelihood_ratio(n, j, p, d) exactly.
double log_likelihood_m2(std::int64_t n, std::int64_t j, double p, double d);

/// Unnormalized log posterior of the source model at a parameter state:
/// log r + (n − J) log(1 − p) + J log(p/d + 1 − p), with J the hit count of
/// the observation set at (r, u). The additive constant convention is fixed
/// project-wide: the (4*pi)^-n likelihood factor and the h^-1 pi^-1 prior
/// normalizer are dropped, nothing else. r = 0 yields -infinity.
double log_posterior_unnorm(const ParameterState& state, const ObservationSet& obs, double d);

/// Same, with the hit count already known.
double log_posterior_unnorm_with_j(double p, double r, std::int64_t n, std::int64_t j, double d);

/// Per-grid-point coefficients of the likelihood ratio, precomputed once per
/// run: ratio(n, J, grid[j]) = (n - J) * log1m_p[j] + J * log_mix[j].
struct LikelihoodTables {
  std::vector<double> log1m_p;   // log(1 - p_j)
  std::vector<double> log_mix;   // log(p_j / d + 1 - p_j)
  std::vector<double> grid;      // copy of the prior grid
  std::int64_t n = 0;
  double d = 0.0;

  LikelihoodTables(const PriorSpec& prior, std::int64_t n_obs, double d_radius);

  double ratio(std::int64_t j_hits, std::size_t grid_index) const {
    return static_cast<double>(n - j_hits) * log1m_p[grid_index] +
           static_cast<double>(j_hits) * log_mix[grid_index];
  }
};

}  // namespace sentinel
