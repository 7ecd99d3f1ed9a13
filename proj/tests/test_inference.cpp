#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracle_data.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/inference.hpp"
#include "sentinel/rng.hpp"

using namespace sentinel;

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

PosteriorSamples samples_from_polar(const std::vector<PolarPoint>& pts) {
  PosteriorSamples s;
  s.n = 100;
  s.d = 0.01;
  for (const PolarPoint& pt : pts) {
    s.states.push_back({0.001, pt.r, pt.u});
    s.j_values.push_back(0);
  }
  return s;
}

}  // namespace

TEST_CASE("harmonic-mean Bayes factor matches 100 high-precision cases") {
  for (const oracle::BfCase& c : oracle::kBfCases) {
    PosteriorSamples s;
    s.n = c.n;
    s.d = c.d;
    for (std::size_t k = 0; k < c.count; ++k) {
      const oracle::BfSample& draw = oracle::kBfSamples[c.offset + k];
      s.states.push_back({draw.p, 0.5, 0.0});
      s.j_values.push_back(draw.j);
    }
    const BayesFactorEstimate got = estimate_log_bayes_factor(s);
    CHECK_MESSAGE(close_rel(got.log_bf, c.expected_log_bf, 1e-10), "case n=", c.n,
                  " K=", c.count, " got=", got.log_bf,
                  " want=", c.expected_log_bf);
  }
}

TEST_CASE("Bayes factor of an empty sample set is rejected") {
  PosteriorSamples empty;
  empty.n = 10;
  empty.d = 0.01;
  CHECK_THROWS_AS(estimate_log_bayes_factor(empty), InputError);
  CHECK_THROWS_AS(point_estimates(empty), InputError);
  CHECK_THROWS_AS(hpd_region_2d(empty, 0.95, 64), InputError);
}

TEST_CASE("lambda variance diagnostic") {
  // Two draws with equal lambda -> zero variance; construction below gives
  // lambda = 0 vs a known value.
  PosteriorSamples s;
  s.n = 50;
  s.d = 0.5;  // p/d + 1 - p = 1 at p = 0 impossible; use j = 0 for lambda = n*log(1-p)
  s.states.push_back({0.2, 0.5, 0.0});
  s.j_values.push_back(0);
  s.states.push_back({0.2, 0.5, 0.0});
  s.j_values.push_back(0);
  CHECK(estimate_log_bayes_factor(s).lambda_variance == 0.0);

  s.states.push_back({0.4, 0.5, 0.0});
  s.j_values.push_back(0);
  const double l1 = 50.0 * std::log1p(-0.2);
  const double l2 = 50.0 * std::log1p(-0.4);
  const double mean = (2.0 * l1 + l2) / 3.0;
  const double var =
      (2.0 * (l1 - mean) * (l1 - mean) + (l2 - mean) * (l2 - mean)) / 2.0;
  CHECK(estimate_log_bayes_factor(s).lambda_variance ==
        doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("posterior probability of no source is a stable logistic") {
  CHECK(posterior_prob_no_source(0.0) == 0.5);
  CHECK(posterior_prob_no_source(std::log(3.0)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(posterior_prob_no_source(700.0) < 1e-300);
  CHECK(posterior_prob_no_source(700.0) > 0.0);
  CHECK(posterior_prob_no_source(-700.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Symmetry: pr(x) + pr(-x) = 1.
  for (double x : {0.3, 2.0, 40.0})
    CHECK(posterior_prob_no_source(x) + posterior_prob_no_source(-x) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evidence categories use strict half-open thresholds") {
  const double e = 1e-12;
  CHECK(classify_evidence(std::log(3.0)) == EvidenceCategory::kNone);
  CHECK(classify_evidence(std::log(3.0) + e) == EvidenceCategory::kPositive);
  CHECK(classify_evidence(std::log(20.0)) == EvidenceCategory::kPositive);
  CHECK(classify_evidence(std::log(20.0) + e) == EvidenceCategory::kStrong);
  CHECK(classify_evidence(std::log(150.0)) == EvidenceCategory::kStrong);
  CHECK(classify_evidence(std::log(150.0) + e) == EvidenceCategory::kOverwhelming);
  CHECK(classify_evidence(-5.0) == EvidenceCategory::kNone);
  CHECK(std::string(to_string(EvidenceCategory::kOverwhelming)) == "overwhelming");
}

TEST_CASE("bf_display renders decimals and saturates") {
  CHECK(bf_display(0.0) == "1");
  CHECK(bf_display(std::log(2.5)) == "2.5");
  // Magnitudes this large arise in strong-source runs; must render, not overflow.
  const std::string big = bf_display(std::log(2.8) + 75.0 * std::log(10.0));
  CHECK(big.find("e+75") != std::string::npos);
  CHECK(bf_display(800.0) == "Inf");
  CHECK(bf_display(-800.0) == "0");
}

TEST_CASE("point estimates use the circular mean by default") {
  const std::vector<PolarPoint> pts = {{0.5, 0.1}, {0.5, kTwoPi - 0.1}};
  const PosteriorSamples s = samples_from_polar(pts);

  const PointEstimates circular = point_estimates(s);
  const double dist = std::min(circular.u_hat, kTwoPi - circular.u_hat);
  CHECK(dist < 1e-9);  // mean direction is 0, not pi
  CHECK(circular.r_hat == doctest::Approx(0.5).epsilon(1e-12));

  const PointEstimates arithmetic = point_estimates(s, true);
  CHECK(arithmetic.u_hat == doctest::Approx(M_PI).epsilon(1e-12));

  // location_hat is the polar reassembly of (r_hat, u_hat).
  const Location loc = polar_to_cartesian(circular.r_hat, circular.u_hat);
  CHECK(circular.location_hat.l1 == loc.l1);
  CHECK(circular.location_hat.l2 == loc.l2);
}

TEST_CASE("HPD region concentrates on the heavy cell") {
  std::vector<PolarPoint> pts;
  for (int i = 0; i < 95; ++i) pts.push_back({0.5, 1.0});  // one fixed point
  SplitMix64 rng(6);
  for (int i = 0; i < 5; ++i)
    pts.push_back({rng.next_double(), rng.uniform(0.0, kTwoPi)});
  const PosteriorSamples s = samples_from_polar(pts);

  const HpdRegion region = hpd_region_2d(s, 0.9, 32);
  REQUIRE(!region.cells.empty());
  CHECK(region.covered_fraction >= 0.9);
  CHECK(region.total_samples == 100);
  const Location heavy = polar_to_cartesian(0.5, 1.0);
  CHECK(hpd_contains(region, heavy.l1, heavy.l2));
  // 95 of 100 samples sit in one cell: that cell alone reaches 90%.
  CHECK(region.cells.size() == 1);
  CHECK(region.cells.front().count == 95);
  CHECK_FALSE(region.unreliable);
  CHECK_FALSE(hpd_contains(region, -0.9, -0.9));

  CHECK_THROWS_AS(hpd_region_2d(s, 0.0, 32), InputError);
  CHECK_THROWS_AS(hpd_region_2d(s, 1.0, 32), InputError);
  CHECK_THROWS_AS(hpd_region_2d(s, 0.9, 15), InputError);
}

TEST_CASE("HPD ties break by linear cell index") {
  // Two cells with equal counts; include only one at 50%.
  std::vector<PolarPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.5, 0.0});          // right of center
  for (int i = 0; i < 10; ++i) pts.push_back({0.5, M_PI});         // left of center
  const PosteriorSamples s = samples_from_polar(pts);
  const HpdRegion region = hpd_region_2d(s, 0.5, 16);
  REQUIRE(region.cells.size() == 1);
  // (r=0.5, u=pi) -> l1 = -0.5 -> smaller ix -> smaller linear index wins.
  const Location left = polar_to_cartesian(0.5, M_PI);
  CHECK(hpd_contains(region, left.l1, left.l2));
}

TEST_CASE("conditional location map on empty data is radially symmetric") {
  const ObservationSet obs;
  const DensitySurface surf = conditional_location_map(obs, 0.001, 0.01, 32);
  REQUIRE(!surf.l1.empty());
  // J = 0 everywhere, so only log r varies; mirror pairs (x, y) vs (y, x)
  // share a radius bit-for-bit and must carry identical density.
  for (std::size_t i = 0; i < surf.l1.size(); ++i) {
    const double x = surf.l1[i], y = surf.l2[i];
    for (std::size_t k = i + 1; k < surf.l1.size(); ++k) {
      if (surf.l1[k] == y && surf.l2[k] == x) {
        CHECK(surf.log_density[i] == surf.log_density[k]);
        break;
      }
    }
  }

  CHECK_THROWS_AS(conditional_location_map(obs, 0.0, 0.01, 32), InputError);
  CHECK_THROWS_AS(conditional_location_map(obs, 1.0, 0.01, 32), InputError);
  CHECK_THROWS_AS(conditional_location_map(obs, 0.5, 0.01, 8), InputError);
}

TEST_CASE("detection report assembles decision fields coherently") {
  // Synthesize a sample set with a known strong lambda so detected = true.
  PosteriorSamples s;
  s.n = 1000;
  s.d = 0.01;
  for (int i = 0; i < 50; ++i) {
    s.states.push_back({0.01, 0.5, 1.0});
    s.j_values.push_back(30);
  }
  SamplerResult run;
  run.samples = s;
  run.diagnostics.chains.resize(2);
  run.diagnostics.pair_exchanges.resize(1);
  run.diagnostics.chains[0].r_total.tally(true);
  run.diagnostics.chains[0].u_total.tally(false);
  run.diagnostics.flags.push_back("synthetic flag");

  const DetectionReport rep = make_detection_report(run, 0.95, 64, false);
  CHECK(rep.log_bf == doctest::Approx(estimate_log_bayes_factor(s).log_bf));
  CHECK(rep.detected == (rep.log_bf > std::log(3.0)));
  CHECK(rep.pr_no_source == posterior_prob_no_source(rep.log_bf));
  CHECK(rep.evidence == classify_evidence(rep.log_bf));
  CHECK(rep.sample_count == 50);
  CHECK(rep.accept_r.size() == 2);
  CHECK(rep.exchange_rates.size() == 1);
  REQUIRE(!rep.warnings.empty());
  CHECK(rep.warnings.front() == "synthetic flag");
}
