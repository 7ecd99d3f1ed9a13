#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/likelihood.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

/// Decreasing temperature sequence ending exactly at 1 (the cold chain).
struct TemperatureLadder {
  std::vector<double> temps;

  /// T_i = t_max^((N-i)/(N-1)), i = 1..N: geometric descent from t_max to 1.
  static TemperatureLadder geometric(int n_chains, double t_max = 5.0);

  std::size_t size() const { return temps.size(); }
  void validate() const;  // throws InputError
};

struct ProposalConfig {
  double sigma_r = 0.02;  // truncated-normal step for r, unit-disk radii
  double sigma_u = 0.1;   // wrapped-normal step for u, radians
};

struct SamplerConfig {
  std::int64_t iterations = 50000;
  double burn_in_fraction = 0.2;
  std::int64_t thinning = 10;
  TemperatureLadder ladder = TemperatureLadder::geometric(6);
  ProposalConfig proposals;
  std::uint64_t seed = 0;

  void validate() const;

  std::int64_t burn_in_iterations() const {
    return static_cast<std::int64_t>(burn_in_fraction * static_cast<double>(iterations));
  }
};

/// Swappable part of a chain: the parameter point plus cached quantities.
/// p is tracked as a grid index so retained samples never drift off the
/// prior grid.
struct ChainPoint {
  std::size_t p_index = 0;
  double r = 0.0;
  double u = 0.0;
  std::int64_t j = 0;     // hit count at (r, u)
  double lambda = 0.0;    // log likelihood ratio at (j, p_index)
  double log_r = 0.0;

  double log_post() const { return log_r + lambda; }
};

struct ChainState {
  ChainPoint x;
  SplitMix64 rng;
};

struct AcceptanceCounter {
  std::int64_t tries = 0;
  std::int64_t accepts = 0;

  void tally(bool accepted) {
    ++tries;
    accepts += accepted ? 1 : 0;
  }
  double rate() const {
    return tries == 0 ? 0.0 : static_cast<double>(accepts) / static_cast<double>(tries);
  }
};

struct ChainDiagnostics {
  AcceptanceCounter r_total, u_total;
  AcceptanceCounter r_post_burn_in, u_post_burn_in;
};

struct SamplerDiagnostics {
  std::vector<ChainDiagnostics> chains;
  std::vector<AcceptanceCounter> pair_exchanges;  // neighbor pair (i, i+1)
  std::vector<std::string> flags;                 // pathological acceptance rates
};

struct SamplerResult {
  PosteriorSamples samples;  // cold chain, post burn-in, thinned
  SamplerDiagnostics diagnostics;
};

/// Periodic progress record; the CLI serializes these as run-log lines.
struct RunLogRecord {
  std::int64_t iteration = 0;
  std::vector<double> accept_r;        // per chain, since previous record
  std::vector<double> accept_u;
  std::vector<double> exchange_rate;   // per neighbor pair, since previous record
  ParameterState cold_state;
  std::int64_t cold_j = 0;
};
using RunLogSink = std::function<void(const RunLogRecord&)>;

// --- single-chain updates (also the unit-test surface) ---------------------

/// Tempered log weights of the discrete p full conditional at hit count j:
/// out[k] = ratio(j, grid k) / temperature.
void tempered_grid_log_weights(const LikelihoodTables& tables, std::int64_t j,
                               double temperature, std::span<double> out);

/// Exact draw from the tempered discrete full conditional of p
/// (log weights shifted by their max before exponentiation).
std::size_t gibbs_draw_p_index(const LikelihoodTables& tables, std::int64_t j,
                               double temperature, SplitMix64& rng);

void gibbs_update_p(ChainState& chain, const LikelihoodTables& tables, double temperature);

/// log of the truncation normalizer Phi((1-c)/sigma) - Phi(-c/sigma) of a
/// normal proposal centered at c restricted to [0, 1]; the Hastings
/// correction for the r update is the difference of two of these.
double truncnorm_log_normalizer(double center, double sigma);

/// Draws the truncated-normal r proposal from the chain's stream.
double propose_r(ChainState& chain, double sigma_r);

/// Draws the wrapped-normal u proposal (reduced mod 2*pi).
double propose_u(ChainState& chain, double sigma_u);

/// Accept/reject given the proposal and its hit count; always consumes one
/// uniform from the chain stream. Returns whether the move was accepted.
bool mh_apply_r(ChainState& chain, const LikelihoodTables& tables, double temperature,
                double sigma_r, double r_prop, std::int64_t j_prop);
bool mh_apply_u(ChainState& chain, const LikelihoodTables& tables, double temperature,
                double u_prop, std::int64_t j_prop);

/// Full single-chain updates (propose, count hits, accept/reject).
bool mh_update_r(ChainState& chain, const ObservationSet& obs,
                 const LikelihoodTables& tables, double temperature, double sigma_r);
bool mh_update_u(ChainState& chain, const ObservationSet& obs,
                 const LikelihoodTables& tables, double temperature, double sigma_u);

/// Log acceptance exponent for swapping states between temperatures t_i and
/// t_j: (log f(x_j) - log f(x_i)) * (1/t_i - 1/t_j), log f untempered.
double exchange_log_accept(double log_post_i, double log_post_j, double t_i, double t_j);

/// One exchange sweep: chains 1..N propose in order, endpoints with their
/// only neighbor, interior chains with either neighbor at equal probability.
/// Accepted swaps exchange the ChainPoint only; chain streams stay put.
void exchange_step(std::span<ChainState> chains, const TemperatureLadder& ladder,
                   SplitMix64& exchange_rng,
                   std::span<AcceptanceCounter> pair_exchanges);

// --- full run ---------------------------------------------------------------

/// Parallel-tempered Gibbs/MH run. Each chain owns a substream of
/// config.seed; exchange randomness has its own substream; the result is a
/// pure function of (obs, prior, d, config). Retention convention: iteration
/// t (1-based) is kept iff t > burn_in and (t - burn_in) is a multiple of
/// the thinning stride.
SamplerResult run_sampler(const ObservationSet& obs, const PriorSpec& prior, double d,
                          const SamplerConfig& config,
                          const RunLogSink& runlog = nullptr);

}  // namespace sentinel
