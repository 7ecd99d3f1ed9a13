#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sentinel/sampler.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

enum class EvidenceCategory { kNone, kPositive, kStrong, kOverwhelming };

const char* to_string(EvidenceCategory category);

/// Conventional evidence bands on the Bayes factor: none (BF <= 3),
/// positive (3 < BF <= 20), strong (20 < BF <= 150), overwhelming (BF > 150).
EvidenceCategory classify_evidence(double log_bf);

struct BayesFactorEstimate {
  double log_bf = 0.0;
  /// Sample variance of the per-draw log likelihood ratios. The harmonic
  /// mean estimator is dominated by its smallest ratio, so a large spread
  /// here flags an unstable estimate.
  double lambda_variance = 0.0;
};

/// Harmonic-mean Bayes factor of the source model over the background model,
/// computed entirely in the log domain:
///   log BF = log K - logsumexp_k(-lambda_k),
/// lambda_k the log likelihood ratio at retained draw k. Throws InputError
/// on an empty sample set.
BayesFactorEstimate estimate_log_bayes_factor(const PosteriorSamples& samples);

/// pr(no source | data) = 1 / (1 + BF), evaluated as a logistic of -log BF
/// so extreme Bayes factors neither overflow nor lose precision.
double posterior_prob_no_source(double log_bf);

struct PointEstimates {
  double p_hat = 0.0;
  double r_hat = 0.0;
  double u_hat = 0.0;
  Location location_hat;
};

/// Posterior sample means. u_hat is the circular mean by default (the plain
/// mean is wrap-biased when the posterior straddles 0/2*pi);
/// arithmetic_u_mean = true reproduces the plain-mean convention instead.
PointEstimates point_estimates(const PosteriorSamples& samples,
                               bool arithmetic_u_mean = false);

struct HpdCell {
  int ix = 0;  // column over l1 in [-1, 1]
  int iy = 0;  // row over l2 in [-1, 1]
  std::int64_t count = 0;
};

struct HpdRegion {
  std::vector<HpdCell> cells;     // count-descending, ties by linear index
  double level = 0.0;
  int resolution = 0;
  std::int64_t total_samples = 0;
  double covered_fraction = 0.0;  // >= level
  bool unreliable = false;        // included cells average < 10 samples
};

/// Smallest set of lattice cells over [-1,1]^2 containing at least `level`
/// of the sample mass, at cell granularity. Cells are ranked by sample
/// count, ties broken by linear cell index (iy * resolution + ix).
HpdRegion hpd_region_2d(const PosteriorSamples& samples, double level, int resolution);

/// True iff the cartesian point falls in one of the region's cells.
bool hpd_contains(const HpdRegion& region, double l1, double l2);

struct DensitySurface {
  int resolution = 0;
  std::vector<double> l1;           // lattice centers inside the unit disk
  std::vector<double> l2;
  std::vector<double> log_density;  // unnormalized, fixed-constant convention
};

/// Conditional posterior surface of the source location at fixed emission
/// fraction p, evaluated on a resolution x resolution lattice of cell
/// centers; points outside the unit disk are omitted. Reproduces the
/// multimodality diagnostic plots.
DensitySurface conditional_location_map(const ObservationSet& obs, double p, double d,
                                        int resolution);

/// Decimal rendering of exp(log_bf) with saturation: values beyond double
/// range print as "Inf" (matching how huge factors are usually reported)
/// or "0".
std::string bf_display(double log_bf);

struct DetectionReport {
  double log_bf = 0.0;
  std::string bf_text;
  double pr_no_source = 0.0;
  EvidenceCategory evidence = EvidenceCategory::kNone;
  bool detected = false;  // BF > 3
  PointEstimates estimates;
  HpdRegion hpd;
  double lambda_variance = 0.0;
  std::int64_t n = 0;
  double d = 0.0;
  std::size_t sample_count = 0;
  std::vector<double> accept_r;         // per chain, whole run
  std::vector<double> accept_u;
  std::vector<double> exchange_rates;   // per neighbor pair, whole run
  std::vector<std::string> warnings;
};

DetectionReport make_detection_report(const SamplerResult& run, double hpd_level,
                                      int hpd_resolution, bool arithmetic_u_mean);

}  // namespace sentinel
