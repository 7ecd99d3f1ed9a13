#include "sentinel/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/likelihood.hpp"

namespace sentinel {

namespace {

constexpr double kLogThree = 1.0986122886681098;      // log 3
constexpr double kLogTwenty = 2.995732273553991;      // log 20
constexpr double kLogOneFifty = 5.0106352940962555;   // log 150

// Largest log BF whose exp still fits a double; beyond it we print "Inf".
constexpr double kLogMaxDouble = 709.782712893384;

int clamp_cell(double coord, int resolution) {
  // coord in [-1, 1] -> cell index; the closed upper edge folds into the
  // last cell so boundary samples are never dropped.
  const int raw = static_cast<int>((coord + 1.0) * 0.5 * resolution);
  return std::clamp(raw, 0, resolution - 1);
}

}  // namespace

const char* to_string(EvidenceCategory category) {
  switch (category) {
    case EvidenceCategory::kNone: return "none";
    case EvidenceCategory::kPositive: return "positive";
    case EvidenceCategory::kStrong: return "strong";
    case EvidenceCategory::kOverwhelming: return "overwhelming";
  }
  return "none";
}

EvidenceCategory classify_evidence(double log_bf) {
  if (log_bf > kLogOneFifty) return EvidenceCategory::kOverwhelming;
  if (log_bf > kLogTwenty) return EvidenceCategory::kStrong;
  if (log_bf > kLogThree) return EvidenceCategory::kPositive;
  return EvidenceCategory::kNone;
}

BayesFactorEstimate estimate_log_bayes_factor(const PosteriorSamples& samples) {
  const std::size_t k = samples.size();
  if (k == 0) throw InputError("Bayes factor requested on an empty sample set");

  std::vector<double> lambda(k);
  for (std::size_t i = 0; i < k; ++i) {
    lambda[i] = log_likelihood_ratio(samples.n, samples.j_values[i],
                                     samples.states[i].p, samples.d);
  }

  // logsumexp of -lambda_k, anchored at the max for stability.
  double m = -lambda[0];
  for (std::size_t i = 1; i < k; ++i) m = std::max(m, -lambda[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::exp(-lambda[i] - m);

  BayesFactorEstimate out;
  out.log_bf = std::log(static_cast<double>(k)) - (m + std::log(acc));

  double mean = std::accumulate(lambda.begin(), lambda.end(), 0.0) /
                static_cast<double>(k);
  double ss = 0.0;
  for (double v : lambda) ss += (v - mean) * (v - mean);
  out.lambda_variance = k > 1 ? ss / static_cast<double>(k - 1) : 0.0;
  return out;
}

double posterior_prob_no_source(double log_bf) {
  if (log_bf >= 0.0) {
    const double e = std::exp(-log_bf);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(log_bf));
}

PointEstimates point_estimates(const PosteriorSamples& samples,
                               bool arithmetic_u_mean) {
  const std::size_t k = samples.size();
  if (k == 0) throw InputError("point estimates requested on an empty sample set");

  double sp = 0.0, sr = 0.0, su = 0.0, sc = 0.0, ss = 0.0;
  for (const ParameterState& x : samples.states) {
    sp += x.p;
    sr += x.r;
    su += x.u;
    sc += std::cos(x.u);
    ss += std::sin(x.u);
  }
  const double inv_k = 1.0 / static_cast<double>(k);

  PointEstimates est;
  est.p_hat = sp * inv_k;
  est.r_hat = sr * inv_k;
  est.u_hat = arithmetic_u_mean ? su * inv_k : wrap_angle(std::atan2(ss, sc));
  est.location_hat = polar_to_cartesian(est.r_hat, est.u_hat);
  return est;
}

HpdRegion hpd_region_2d(const PosteriorSamples& samples, double level, int resolution) {
  if (!(level > 0.0 && level < 1.0))
    throw InputError("HPD level must lie in (0, 1)");
  if (resolution < 16) throw InputError("HPD grid resolution must be >= 16");
  const std::size_t k = samples.size();
  if (k == 0) throw InputError("HPD region requested on an empty sample set");

  std::vector<std::int64_t> counts(
      static_cast<std::size_t>(resolution) * resolution, 0);
  for (const ParameterState& x : samples.states) {
    const Location loc = polar_to_cartesian(x.r, x.u);
    const int ix = clamp_cell(loc.l1, resolution);
    const int iy = clamp_cell(loc.l2, resolution);
    ++counts[static_cast<std::size_t>(iy) * resolution + ix];
  }

  std::vector<std::size_t> order;
  order.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });

  HpdRegion region;
  region.level = level;
  region.resolution = resolution;
  region.total_samples = static_cast<std::int64_t>(k);

  const double target = level * static_cast<double>(k);
  std::int64_t cum = 0;
  for (std::size_t idx : order) {
    const int iy = static_cast<int>(idx) / resolution;
    const int ix = static_cast<int>(idx) % resolution;
    region.cells.push_back({ix, iy, counts[idx]});
    cum += counts[idx];
    if (static_cast<double>(cum) >= target) break;
  }
  region.covered_fraction = static_cast<double>(cum) / static_cast<double>(k);
  // Boundary placement is noisy when the included cells average fewer than
  // ~10 samples each (diffuse posteriors at coarse sample counts).
  region.unreliable =
      region.cells.size() * 10 > static_cast<std::size_t>(region.total_samples);
  return region;
}

bool hpd_contains(const HpdRegion& region, double l1, double l2) {
  const int ix = clamp_cell(l1, region.resolution);
  const int iy = clamp_cell(l2, region.resolution);
  for (const HpdCell& c : region.cells)
    if (c.ix == ix && c.iy == iy) return true;
  return false;
}

DensitySurface conditional_location_map(const ObservationSet& obs, double p, double d,
                                        int resolution) {
  if (!(p > 0.0 && p < 1.0))
    throw InputError("conditional map requires p in (0, 1)");
  if (resolution < 16) throw InputError("map resolution must be >= 16");

  DensitySurface surf;
  surf.resolution = resolution;
  const double step = 2.0 / resolution;

  std::vector<Location> points;
  std::vector<double> radii;
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = -1.0 + (iy + 0.5) * step;
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -1.0 + (ix + 0.5) * step;
      const double r = std::hypot(x, y);
      if (r <= 1.0) {
        points.push_back({x, y});
        radii.push_back(r);
      }
    }
  }

  std::vector<std::int64_t> hits(points.size());
  hit_count_multi(obs, points, d, hits);

  const auto n = static_cast<std::int64_t>(obs.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    surf.l1.push_back(points[i].l1);
    surf.l2.push_back(points[i].l2);
    surf.log_density.push_back(std::log(radii[i]) +
                               log_likelihood_ratio(n, hits[i], p, d));
  }
  return surf;
}

std::string bf_display(double log_bf) {
  if (log_bf > kLogMaxDouble) return "Inf";
  const double bf = std::exp(log_bf);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", bf);
  return buf;
}

DetectionReport make_detection_report(const SamplerResult& run, double hpd_level,
                                      int hpd_resolution, bool arithmetic_u_mean) {
  DetectionReport rep;
  const BayesFactorEstimate bf = estimate_log_bayes_factor(run.samples);
  rep.log_bf = bf.log_bf;
  rep.lambda_variance = bf.lambda_variance;
  rep.bf_text = bf_display(bf.log_bf);
  rep.pr_no_source = posterior_prob_no_source(bf.log_bf);
  rep.evidence = classify_evidence(bf.log_bf);
  rep.detected = bf.log_bf > kLogThree;
  rep.estimates = point_estimates(run.samples, arithmetic_u_mean);
  rep.hpd = hpd_region_2d(run.samples, hpd_level, hpd_resolution);
  rep.n = run.samples.n;
  rep.d = run.samples.d;
  rep.sample_count = run.samples.size();

  for (const ChainDiagnostics& cd : run.diagnostics.chains) {
    rep.accept_r.push_back(cd.r_total.rate());
    rep.accept_u.push_back(cd.u_total.rate());
  }
  for (const AcceptanceCounter& pc : run.diagnostics.pair_exchanges)
    rep.exchange_rates.push_back(pc.rate());
  rep.warnings = run.diagnostics.flags;
  if (rep.hpd.unreliable)
    rep.warnings.push_back("hpd: fewer retained samples than grid cells");
  return rep;
}

}  // namespace sentinel
