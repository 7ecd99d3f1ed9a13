#include "sentinel/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sentinel/geometry.hpp"

namespace sentinel {

namespace {
const double kLog4Pi = std::log(4.0 * 3.14159265358979323846264338327950288);
}

double log_likelihood_m1(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("log_likelihood_m1: n < 0");
  return -static_cast<double>(n) * kLog4Pi;
}

double log_likelihood_ratio(std::int64_t n, std::int64_t j, double p, double d) {
  if (j < 0 || j > n) {
    throw std::invalid_argument("log_likelihood_ratio: J=" + std::to_string(j) +
                                " outside [0, n=" + std::to_string(n) + "]");
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("log_likelihood_ratio: p outside (0, 1)");
  }
  if (!(d > 0.0)) throw std::invalid_argument("log_likelihood_ratio: d <= 0");
  return static_cast<double>(n - j) * std::log1p(-p) +
         static_cast<double>(j) * std::log(p / d + 1.0 - p);
}

double log_likelihood_m2(std::int64_t n, std::int64_t j, double p, double d) {
  return log_likelihood_m1(n) + log_likelihood_ratio(n, j, p, d);
}

double log_posterior_unnorm_with_j(double p, double r, std::int64_t n, std::int64_t j,
                                   double d) {
  return std::log(r) + log_likelihood_ratio(n, j, p, d);
}

double log_posterior_unnorm(const ParameterState& state, const ObservationSet& obs,
                            double d) {
  const std::int64_t j = hit_count(obs, state.r, state.u, d);
  return log_posterior_unnorm_with_j(state.p, state.r,
                                     static_cast<std::int64_t>(obs.size()), j, d);
}

LikelihoodTables::LikelihoodTables(const PriorSpec& prior, std::int64_t n_obs,
                                   double d_radius)
    : grid(prior.grid), n(n_obs), d(d_radius) {
  log1m_p.reserve(grid.size());
  log_mix.reserve(grid.size());
  for (const double p : grid) {
    log1m_p.push_back(std::log1p(-p));
    log_mix.push_back(std::log(p / d + 1.0 - p));
  }
}

}  // namespace sentinel
