#include "sentinel/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"

namespace sentinel {

namespace {

constexpr std::uint64_t kChainStreamBase = 0x100;
constexpr std::uint64_t kExchangeStreamKey = 0xEC;
constexpr std::int64_t kDiagnosticWindow = 1000;

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

/// Accept rule shared by every MH decision: always consumes one uniform.
bool metropolis_accept(double log_alpha, SplitMix64& rng) {
  const double au = rng.next_double();
  return std::log(au) < log_alpha;
}

}  // namespace

TemperatureLadder TemperatureLadder::geometric(int n_chains, double t_max) {
  if (n_chains < 2) throw InputError("temperature ladder needs at least 2 chains");
  if (!(t_max > 1.0)) throw InputError("temperature ladder needs t_max > 1");
  TemperatureLadder ladder;
  ladder.temps.resize(static_cast<std::size_t>(n_chains));
  for (int i = 0; i < n_chains; ++i) {
    ladder.temps[static_cast<std::size_t>(i)] =
        std::pow(t_max, static_cast<double>(n_chains - 1 - i) /
                            static_cast<double>(n_chains - 1));
  }
  ladder.temps.front() = t_max;
  ladder.temps.back() = 1.0;
  return ladder;
}

void TemperatureLadder::validate() const {
  if (temps.empty()) throw InputError("temperature ladder is empty");
  if (temps.back() != 1.0) throw InputError("temperature ladder must end at exactly 1");
  for (std::size_t i = 1; i < temps.size(); ++i) {
    if (!(temps[i - 1] > temps[i])) {
      throw InputError("temperature ladder must be strictly decreasing");
    }
  }
}

void SamplerConfig::validate() const {
  if (iterations < 10) throw InputError("sampler: iterations must be >= 10");
  if (!(burn_in_fraction >= 0.0) || !(burn_in_fraction < 1.0)) {
    throw InputError("sampler: burn_in_fraction must lie in [0, 1)");
  }
  if (thinning < 1) throw InputError("sampler: thinning must be >= 1");
  if (!(proposals.sigma_r > 0.0) || !(proposals.sigma_u > 0.0)) {
    throw InputError("sampler: proposal scales must be positive");
  }
  ladder.validate();
}

void tempered_grid_log_weights(const LikelihoodTables& tables, std::int64_t j,
                               double temperature, std::span<double> out) {
  assert(out.size() == tables.grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = tables.ratio(j, k) / temperature;
  }
}

std::size_t gibbs_draw_p_index(const LikelihoodTables& tables, std::int64_t j,
                               double temperature, SplitMix64& rng) {
  const std::size_t h = tables.grid.size();
  std::vector<double> logw(h);
  tempered_grid_log_weights(tables, j, temperature, logw);
  const double m = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - m);
    total += w;
  }
  double x = rng.next_double() * total;
  for (std::size_t k = 0; k < h; ++k) {
    x -= logw[k];
    if (x < 0.0) return k;
  }
  return h - 1;
}

void gibbs_update_p(ChainState& chain, const LikelihoodTables& tables,
                    double temperature) {
  chain.x.p_index = gibbs_draw_p_index(tables, chain.x.j, temperature, chain.rng);
  chain.x.lambda = tables.ratio(chain.x.j, chain.x.p_index);
}

double truncnorm_log_normalizer(double center, double sigma) {
  return std::log(normal_cdf((1.0 - center) / sigma) - normal_cdf(-center / sigma));
}

double propose_r(ChainState& chain, double sigma_r) {
  return chain.rng.truncated_normal(chain.x.r, sigma_r, 0.0, 1.0);
}

double propose_u(ChainState& chain, double sigma_u) {
  return wrap_angle(chain.x.u + chain.rng.normal(0.0, sigma_u));
}

bool mh_apply_r(ChainState& chain, const LikelihoodTables& tables, double temperature,
                double sigma_r, double r_prop, std::int64_t j_prop) {
  const double lambda_prop = tables.ratio(j_prop, chain.x.p_index);
  const double log_r_prop = std::log(r_prop);
  const double log_alpha =
      (log_r_prop + lambda_prop - chain.x.log_post()) / temperature +
      truncnorm_log_normalizer(chain.x.r, sigma_r) -
      truncnorm_log_normalizer(r_prop, sigma_r);
  if (!metropolis_accept(log_alpha, chain.rng)) return false;
  chain.x.r = r_prop;
  chain.x.log_r = log_r_prop;
  chain.x.j = j_prop;
  chain.x.lambda = lambda_prop;
  return true;
}

bool mh_apply_u(ChainState& chain, const LikelihoodTables& tables, double temperature,
                double u_prop, std::int64_t j_prop) {
  const double lambda_prop = tables.ratio(j_prop, chain.x.p_index);
  const double log_alpha = (lambda_prop - chain.x.lambda) / temperature;
  if (!metropolis_accept(log_alpha, chain.rng)) return false;
  chain.x.u = u_prop;
  chain.x.j = j_prop;
  chain.x.lambda = lambda_prop;
  return true;
}

bool mh_update_r(ChainState& chain, const ObservationSet& obs,
                 const LikelihoodTables& tables, double temperature, double sigma_r) {
  const double r_prop = propose_r(chain, sigma_r);
  const std::int64_t j_prop = hit_count(obs, r_prop, chain.x.u, tables.d);
  return mh_apply_r(chain, tables, temperature, sigma_r, r_prop, j_prop);
}

bool mh_update_u(ChainState& chain, const ObservationSet& obs,
                 const LikelihoodTables& tables, double temperature, double sigma_u) {
  const double u_prop = propose_u(chain, sigma_u);
  const std::int64_t j_prop = hit_count(obs, chain.x.r, u_prop, tables.d);
  return mh_apply_u(chain, tables, temperature, u_prop, j_prop);
}

double exchange_log_accept(double log_post_i, double log_post_j, double t_i, double t_j) {
  return (log_post_j - log_post_i) * (1.0 / t_i - 1.0 / t_j);
}

void exchange_step(std::span<ChainState> chains, const TemperatureLadder& ladder,
                   SplitMix64& exchange_rng,
                   std::span<AcceptanceCounter> pair_exchanges) {
  const std::size_t n = chains.size();
  if (n < 2) return;
  assert(pair_exchanges.size() == n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j;
    if (i == 0) {
      j = 1;
    } else if (i == n - 1) {
      j = n - 2;
    } else {
      j = exchange_rng.next_double() < 0.5 ? i - 1 : i + 1;
    }
    const double log_alpha = exchange_log_accept(
        chains[i].x.log_post(), chains[j].x.log_post(), ladder.temps[i], ladder.temps[j]);
    const bool accepted = metropolis_accept(log_alpha, exchange_rng);
    if (accepted) std::swap(chains[i].x, chains[j].x);
    pair_exchanges[std::min(i, j)].tally(accepted);
  }
}

SamplerResult run_sampler(const ObservationSet& obs, const PriorSpec& prior, double d,
                          const SamplerConfig& config, const RunLogSink& runlog) {
  config.validate();
  if (prior.grid.empty()) throw InputError("sampler: empty prior grid");
  if (!(d > 0.0)) throw InputError("sampler: d must be positive");

  const std::size_t n_chains = config.ladder.size();
  const std::int64_t n = static_cast<std::int64_t>(obs.size());
  const LikelihoodTables tables(prior, n, d);

  // Prior-distributed initial states, one substream per chain.
  std::vector<ChainState> chains(n_chains);
  for (std::size_t i = 0; i < n_chains; ++i) {
    ChainState& chain = chains[i];
    chain.rng = SplitMix64(substream(config.seed, kChainStreamBase + i));
    const double pu = chain.rng.next_double();
    chain.x.p_index = std::min(prior.grid.size() - 1,
                               static_cast<std::size_t>(pu * static_cast<double>(
                                                            prior.grid.size())));
    chain.x.r = std::sqrt(chain.rng.next_double_open_low());  // radial prior density 2r
    chain.x.u = wrap_angle(chain.rng.next_double() * kTwoPi);
    chain.x.j = hit_count(obs, chain.x.r, chain.x.u, d);
    chain.x.lambda = tables.ratio(chain.x.j, chain.x.p_index);
    chain.x.log_r = std::log(chain.x.r);
  }
  SplitMix64 exchange_rng(substream(config.seed, kExchangeStreamKey));

  SamplerDiagnostics diag;
  diag.chains.resize(n_chains);
  diag.pair_exchanges.resize(n_chains >= 2 ? n_chains - 1 : 0);

  // Window rates are cumulative counters diffed against the last run-log
  // emission.
  std::vector<AcceptanceCounter> snap_r(n_chains), snap_u(n_chains);
  std::vector<AcceptanceCounter> snap_ex(diag.pair_exchanges.size());
  const auto window_rate = [](const AcceptanceCounter& now, const AcceptanceCounter& snap) {
    const std::int64_t tries = now.tries - snap.tries;
    return tries == 0 ? 0.0
                      : static_cast<double>(now.accepts - snap.accepts) /
                            static_cast<double>(tries);
  };

  const std::int64_t burn_in = config.burn_in_iterations();
  const std::int64_t total = config.iterations;

  SamplerResult result;
  result.samples.n = n;
  result.samples.d = d;
  const std::int64_t kept =
      config.thinning > 0 ? (total - burn_in) / config.thinning : 0;
  result.samples.states.reserve(static_cast<std::size_t>(std::max<std::int64_t>(kept, 0)));
  result.samples.j_values.reserve(result.samples.states.capacity());

  std::vector<double> r_props(n_chains), u_props(n_chains);
  std::vector<Location> points(n_chains);
  std::vector<std::int64_t> j_props(n_chains);

  for (std::int64_t t = 1; t <= total; ++t) {
    const bool post_burn_in = t > burn_in;

    for (std::size_t i = 0; i < n_chains; ++i) {
      gibbs_update_p(chains[i], tables, config.ladder.temps[i]);
    }

    // r phase: propose for every chain, then count hits in one fused pass.
    for (std::size_t i = 0; i < n_chains; ++i) {
      r_props[i] = propose_r(chains[i], config.proposals.sigma_r);
      points[i] = polar_to_cartesian(r_props[i], chains[i].x.u);
    }
    hit_count_multi(obs, points, d, j_props);
    for (std::size_t i = 0; i < n_chains; ++i) {
      const bool accepted = mh_apply_r(chains[i], tables, config.ladder.temps[i],
                                       config.proposals.sigma_r, r_props[i], j_props[i]);
      diag.chains[i].r_total.tally(accepted);
      if (post_burn_in) diag.chains[i].r_post_burn_in.tally(accepted);
    }

    // u phase.
    for (std::size_t i = 0; i < n_chains; ++i) {
      u_props[i] = propose_u(chains[i], config.proposals.sigma_u);
      points[i] = polar_to_cartesian(chains[i].x.r, u_props[i]);
    }
    hit_count_multi(obs, points, d, j_props);
    for (std::size_t i = 0; i < n_chains; ++i) {
      const bool accepted = mh_apply_u(chains[i], tables, config.ladder.temps[i],
                                       u_props[i], j_props[i]);
      diag.chains[i].u_total.tally(accepted);
      if (post_burn_in) diag.chains[i].u_post_burn_in.tally(accepted);
    }

    if (n_chains >= 2) {
      exchange_step(chains, config.ladder, exchange_rng, diag.pair_exchanges);
    }

    const ChainPoint& cold = chains[n_chains - 1].x;
    if (post_burn_in && (t - burn_in) % config.thinning == 0) {
      result.samples.states.push_back(
          {tables.grid[cold.p_index], cold.r, cold.u});
      result.samples.j_values.push_back(cold.j);
    }

    if (runlog && (t % kDiagnosticWindow == 0 || t == total)) {
      RunLogRecord record;
      record.iteration = t;
      for (std::size_t i = 0; i < n_chains; ++i) {
        record.accept_r.push_back(window_rate(diag.chains[i].r_total, snap_r[i]));
        record.accept_u.push_back(window_rate(diag.chains[i].u_total, snap_u[i]));
        snap_r[i] = diag.chains[i].r_total;
        snap_u[i] = diag.chains[i].u_total;
      }
      for (std::size_t k = 0; k < diag.pair_exchanges.size(); ++k) {
        record.exchange_rate.push_back(window_rate(diag.pair_exchanges[k], snap_ex[k]));
        snap_ex[k] = diag.pair_exchanges[k];
      }
      record.cold_state = {tables.grid[cold.p_index], cold.r, cold.u};
      record.cold_j = cold.j;
      runlog(record);
    }
  }

  for (std::size_t i = 0; i < n_chains; ++i) {
    for (const auto* kind : {"r", "u"}) {
      const AcceptanceCounter& counter = kind[0] == 'r'
                                             ? diag.chains[i].r_post_burn_in
                                             : diag.chains[i].u_post_burn_in;
      if (counter.tries == 0) continue;
      const double rate = counter.rate();
      if (rate < 0.05 || rate > 0.95) {
        diag.flags.push_back("chain " + std::to_string(i) + " " + kind +
                             " acceptance " + std::to_string(rate) +
                             " outside [0.05, 0.95] post burn-in");
      }
    }
  }

  result.diagnostics = std::move(diag);
  return result;
}

}  // namespace sentinel
