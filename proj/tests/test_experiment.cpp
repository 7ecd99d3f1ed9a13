#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "sentinel/errors.hpp"
#include "sentinel/experiment.hpp"
#include "sentinel/inference.hpp"
#include "sentinel/io.hpp"

using namespace sentinel;
namespace fs = std::filesystem;

namespace {

const char* kTinyPlan =
    "replicates = 3\n"
    "seed = historically_overridden\n"
    "d_radius = 0.02\n"
    "iterations = 600\n"
    "chains = 3\n"
    "prior_grid_size = 4\n"
    "cell = 0.05, 0.5, 0.1, 400\n"
    "cell = 0, 0, 0, 400, 0.001, 0.01\n";

ExperimentPlan tiny_plan(std::uint64_t seed) {
  std::string text = kTinyPlan;
  text.replace(text.find("historically_overridden"), 23, std::to_string(seed));
  return parse_experiment_plan(parse_key_value_text(text, "plan"));
}

}  // namespace

TEST_CASE("plan parsing applies the prior grid rule per cell") {
  const ExperimentPlan plan = tiny_plan(12);
  REQUIRE(plan.cells.size() == 2);
  CHECK(plan.replicates == 3);
  CHECK(plan.base_seed == 12);
  CHECK(plan.d == 0.02);
  CHECK(plan.sampler.iterations == 600);
  CHECK(plan.sampler.ladder.size() == 3);

  // Source cell: [p/5, 2p] around the truth.
  const PriorSpec source_prior = plan.prior_for(plan.cells[0]);
  CHECK(source_prior.a_p() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(source_prior.b_p() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(source_prior.size() == 4);

  // Background cell carries an explicit override.
  const PriorSpec null_prior = plan.prior_for(plan.cells[1]);
  CHECK(null_prior.a_p() == 0.001);
  CHECK(null_prior.b_p() == 0.01);

  // Without the override the fallback range applies.
  CellSpec fallback = plan.cells[1];
  fallback.prior_override.reset();
  const PriorSpec fb = plan.prior_for(fallback);
  CHECK(fb.a_p() == plan.null_prior_min);
  CHECK(fb.b_p() == plan.null_prior_max);
}

TEST_CASE("plan validation rejects malformed cells") {
  CHECK_THROWS_AS(
      parse_experiment_plan(parse_key_value_text("replicates = 1\n", "p")),
      InputError);  // no cells
  CHECK_THROWS_WITH_AS(
      parse_experiment_plan(parse_key_value_text("cell = 0.1, 0, 0\n", "p")),
      doctest::Contains("p:1"), InputError);  // wrong arity
  CHECK_THROWS_AS(parse_experiment_plan(parse_key_value_text(
                      "cell = 0.6, 0, 0, 100\n", "p")),
                  InputError);  // p >= 0.5 without override
  CHECK_THROWS_AS(parse_experiment_plan(parse_key_value_text(
                      "cell = 0.01, 2, 0, 100\n", "p")),
                  InputError);  // location outside disk
  CHECK_THROWS_WITH_AS(parse_experiment_plan(parse_key_value_text(
                           "cell = 0.01, 0, 0, 100\nbogus = 1\n", "p")),
                       doctest::Contains("unknown key"), InputError);
}

TEST_CASE("replicate seed derivation is stable and collision-free") {
  const ReplicateSeeds a = replicate_seeds(7, 0, 0);
  CHECK(a.scenario == replicate_seeds(7, 0, 0).scenario);
  CHECK(a.sampler == replicate_seeds(7, 0, 0).sampler);

  std::set<std::uint64_t> seen;
  for (int ci = 0; ci < 8; ++ci)
    for (int ri = 0; ri < 8; ++ri) {
      const ReplicateSeeds s = replicate_seeds(7, ci, ri);
      seen.insert(s.scenario);
      seen.insert(s.sampler);
    }
  CHECK(seen.size() == 2 * 8 * 8);
}

TEST_CASE("experiment artifacts are complete and summary is recomputable") {
  const fs::path dir = fs::temp_directory_path() / "sentinel_exp_test";
  fs::remove_all(dir);
  const ExperimentPlan plan = tiny_plan(2026);
  const ExperimentSummary summary = run_experiment(plan, dir, 1);

  REQUIRE(summary.cells.size() == 2);
  REQUIRE(summary.replicates.size() == 6);
  for (const ReplicateOutcome& out : summary.replicates) {
    CHECK_FALSE(out.failed);
    const fs::path rep_dir =
        dir / ("cell0" + std::to_string(out.cell_index) + "_rep0" +
               std::to_string(out.replicate_index));
    CHECK(fs::exists(rep_dir / "report.txt"));
    CHECK(fs::exists(rep_dir / "samples.csv"));
    CHECK(fs::exists(rep_dir / "truth.txt"));

    // The persisted report carries exactly the in-memory outcome.
    const KeyValueFile report = read_detection_report(rep_dir / "report.txt");
    CHECK(report.get_double("log_bf") == out.log_bf);
    CHECK(report.get_uint("sampler_seed") == out.seeds.sampler);

    // The persisted samples regenerate the same Bayes factor.
    const PosteriorSamples samples = read_samples_csv(rep_dir / "samples.csv");
    CHECK(estimate_log_bayes_factor(samples).log_bf == out.log_bf);

    const KeyValueFile truth = parse_key_value_file(rep_dir / "truth.txt");
    CHECK(truth.get_uint("scenario_seed") == out.seeds.scenario);
  }

  // Cell statistics recompute from the replicate outcomes.
  for (std::size_t ci = 0; ci < summary.cells.size(); ++ci) {
    std::vector<double> bfs;
    int gt3 = 0;
    for (const ReplicateOutcome& out : summary.replicates)
      if (out.cell_index == static_cast<int>(ci)) {
        bfs.push_back(out.log_bf);
        gt3 += out.log_bf > std::log(3.0) ? 1 : 0;
      }
    std::sort(bfs.begin(), bfs.end());
    const CellSummary& cs = summary.cells[ci];
    CHECK(cs.completed == 3);
    CHECK(cs.failed == 0);
    CHECK(cs.min_log_bf == bfs.front());
    CHECK(cs.med_log_bf == bfs[1]);
    CHECK(cs.max_log_bf == bfs.back());
    CHECK(cs.prop_gt3 == doctest::Approx(gt3 / 3.0));
    CHECK(cs.min_log_bf <= cs.med_log_bf);
    CHECK(cs.med_log_bf <= cs.max_log_bf);
  }

  write_summary_csv(dir / "summary.csv", summary);
  write_summary_text(dir / "summary.txt", summary);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "summary.txt"));
  fs::remove_all(dir);
}

TEST_CASE("single replicate collapses min, median and max") {
  const fs::path dir = fs::temp_directory_path() / "sentinel_exp_single";
  fs::remove_all(dir);
  ExperimentPlan plan = tiny_plan(5);
  plan.replicates = 1;
  plan.cells.resize(1);
  const ExperimentSummary summary = run_experiment(plan, dir, 1);
  REQUIRE(summary.cells.size() == 1);
  CHECK(summary.cells[0].min_log_bf == summary.cells[0].med_log_bf);
  CHECK(summary.cells[0].med_log_bf == summary.cells[0].max_log_bf);
  fs::remove_all(dir);
}

TEST_CASE("outputs are byte-identical across jobs settings") {
  const fs::path dir1 = fs::temp_directory_path() / "sentinel_exp_j1";
  const fs::path dir2 = fs::temp_directory_path() / "sentinel_exp_j2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  const ExperimentPlan plan = tiny_plan(99);
  run_experiment(plan, dir1, 1);
  run_experiment(plan, dir2, 3);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir1)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir1);
    CHECK(fs::exists(dir2 / rel));
    CHECK_MESSAGE(slurp(entry.path()) == slurp(dir2 / rel), "mismatch: ",
                  rel.string());
    ++compared;
  }
  CHECK(compared == 18);  // 6 replicates x 3 files
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}
