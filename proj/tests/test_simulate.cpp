#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "sentinel/errors.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/simulate.hpp"

using namespace sentinel;

namespace {

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, std::abs(xs[i] - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - xs[i]));
  }
  return d;
}

}  // namespace

TEST_CASE("scenario validation") {
  ScenarioConfig ok{0.01, {0.6, 0.3}, 0.01, 100, 1};
  CHECK_NOTHROW(ok.validate());

  ScenarioConfig bad = ok;
  bad.p_true = 1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = ok;
  bad.d = 0.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = ok;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = ok;
  bad.location = {0.9, 0.9};  // outside the disk
  CHECK_THROWS_AS(bad.validate(), InputError);
  // Location is irrelevant without a source.
  bad.p_true = 0.0;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("generation is deterministic in the seed") {
  const ScenarioConfig scenario{0.02, {0.3, -0.4}, 0.01, 5000, 77};
  const DatasetResult a = generate_dataset(scenario);
  const DatasetResult b = generate_dataset(scenario);
  REQUIRE(a.observations.size() == b.observations.size());
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    CHECK(a.observations[i].theta == b.observations[i].theta);
    CHECK(a.observations[i].s == b.observations[i].s);
  }
  CHECK(a.source_events == b.source_events);

  ScenarioConfig other = scenario;
  other.seed = 78;
  const DatasetResult c = generate_dataset(other);
  bool any_diff = false;
  for (std::size_t i = 0; i < c.observations.size() && !any_diff; ++i)
    any_diff = c.observations[i].theta != a.observations[i].theta;
  CHECK(any_diff);
}

TEST_CASE("background-only data has no source events and canonical ranges") {
  const ScenarioConfig scenario{0.0, {0.0, 0.0}, 0.01, 20000, 5};
  const DatasetResult data = generate_dataset(scenario);
  REQUIRE(data.observations.size() == 20000);
  CHECK(data.source_events == 0);
  for (const GeneratedEvent& ev : data.events) CHECK(ev.delta == 0);
  for (std::size_t i = 0; i < data.observations.size(); ++i) {
    const Observation o = data.observations[i];
    CHECK(o.theta >= 0.0);
    CHECK(o.theta < kTwoPi);
    CHECK(std::abs(o.s) <= 1.0);
  }
}

TEST_CASE("source event count near the binomial mean at p=0.01, n=1e5") {
  const ScenarioConfig scenario{0.01, {0.6, 0.3}, 0.01, 100000, 13};
  const DatasetResult data = generate_dataset(scenario);
  // np = 1000, sd ~ 31.5; ±3 sigma band.
  CHECK(data.source_events >= 900);
  CHECK(data.source_events <= 1100);
}

TEST_CASE("every source event hits the true source tube") {
  const ScenarioConfig scenario{0.05, {0.7, -0.2}, 0.02, 20000, 99};
  const DatasetResult data = generate_dataset(scenario);
  REQUIRE(data.source_events > 0);
  std::int64_t flagged = 0;
  for (const GeneratedEvent& ev : data.events) {
    if (!ev.delta) continue;
    ++flagged;
    CHECK(ballistic_indicator(ev.obs.theta, ev.obs.s, 0.7, -0.2, 0.02));
  }
  CHECK(flagged == data.source_events);
}

TEST_CASE("boundary source keeps s inside the disk by resampling") {
  // Source near the rim: l*theta can exceed 1 - d, forcing resamples.
  const ScenarioConfig scenario{0.2, {0.98, 0.0}, 0.05, 20000, 3};
  const DatasetResult data = generate_dataset(scenario);
  CHECK(data.s_rejections > 0);
  for (std::size_t i = 0; i < data.observations.size(); ++i)
    CHECK(std::abs(data.observations[i].s) <= 1.0);
  for (const GeneratedEvent& ev : data.events)
    if (ev.delta) CHECK(ballistic_indicator(ev.obs.theta, ev.obs.s, 0.98, 0.0, 0.05));
}

TEST_CASE("background marginals are uniform (KS at alpha=0.001, 3 seeds)") {
  for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
    const ScenarioConfig scenario{0.0, {0.0, 0.0}, 0.01, 50000, seed};
    const DatasetResult data = generate_dataset(scenario);
    std::vector<double> t, s;
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
      t.push_back(data.observations[i].theta / kTwoPi);
      s.push_back((data.observations[i].s + 1.0) / 2.0);
    }
    const double crit = 1.94947 / std::sqrt(50000.0);
    CHECK(ks_uniform(t) < crit);
    CHECK(ks_uniform(s) < crit);
  }
}
