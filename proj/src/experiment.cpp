#include "sentinel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "sentinel/errors.hpp"
#include "sentinel/inference.hpp"
#include "sentinel/simulate.hpp"

namespace sentinel {

namespace {

constexpr double kLogThree = 1.0986122886681098;

// Seed-derivation keys for the two stages of a replicate.
constexpr std::uint64_t kScenarioStage = 1;
constexpr std::uint64_t kSamplerStage = 2;

double median_of_sorted(const std::vector<double>& v) {
  const std::size_t k = v.size();
  if (k % 2 == 1) return v[k / 2];
  return 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::string cell_dir_name(int cell_index, int replicate_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cell%02d_rep%02d", cell_index, replicate_index);
  return buf;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (cells.empty()) throw InputError("experiment plan has no cells");
  if (replicates < 1) throw InputError("replicates must be >= 1");
  if (!(d > 0.0 && d < 1.0)) throw InputError("d_radius must lie in (0, 1)");
  if (prior_grid_size < 2) throw InputError("prior_grid_size must be >= 2");
  if (!(null_prior_min > 0.0 && null_prior_min < null_prior_max &&
        null_prior_max < 1.0))
    throw InputError("fallback prior range must satisfy 0 < min < max < 1");
  if (!(hpd_level > 0.0 && hpd_level < 1.0))
    throw InputError("hpd_level must lie in (0, 1)");
  if (hpd_resolution < 16) throw InputError("hpd_resolution must be >= 16");
  sampler.validate();

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellSpec& c = cells[i];
    const std::string where = "cell " + std::to_string(i);
    if (!(c.p_true >= 0.0 && c.p_true < 1.0))
      throw InputError(where + ": p_true must lie in [0, 1)");
    if (c.n < 1) throw InputError(where + ": n_events must be >= 1");
    if (c.p_true > 0.0 &&
        c.location.l1 * c.location.l1 + c.location.l2 * c.location.l2 > 1.0)
      throw InputError(where + ": source location outside the unit disk");
    if (c.prior_override) {
      const auto [a, b] = *c.prior_override;
      if (!(a > 0.0 && a < b && b < 1.0))
        throw InputError(where + ": prior override must satisfy 0 < min < max < 1");
    } else if (c.p_true > 0.0 && 2.0 * c.p_true >= 1.0) {
      throw InputError(where + ": default prior rule needs p_true < 0.5");
    }
  }
}

PriorSpec ExperimentPlan::prior_for(const CellSpec& cell) const {
  if (cell.prior_override)
    return PriorSpec::equally_spaced(cell.prior_override->first,
                                     cell.prior_override->second, prior_grid_size);
  if (cell.p_true > 0.0)
    return PriorSpec::equally_spaced(cell.p_true / 5.0, 2.0 * cell.p_true,
                                     prior_grid_size);
  return PriorSpec::equally_spaced(null_prior_min, null_prior_max, prior_grid_size);
}

ExperimentPlan parse_experiment_plan(const KeyValueFile& kv) {
  kv.require_known({"cell", "replicates", "seed", "d_radius", "prior_p_min",
                    "prior_p_max", "prior_grid_size", "chains", "temperature_max",
                    "iterations", "burn_in_fraction", "thinning", "sigma_r_radii",
                    "sigma_u_radians", "hpd_level", "hpd_resolution"});

  ExperimentPlan plan;
  plan.replicates = static_cast<int>(kv.get_int_or("replicates", 5));
  plan.base_seed = kv.get_uint_or("seed", 0);
  plan.d = kv.get_double_or("d_radius", 0.01);
  plan.null_prior_min = kv.get_double_or("prior_p_min", 0.0002);
  plan.null_prior_max = kv.get_double_or("prior_p_max", 0.002);
  plan.prior_grid_size = static_cast<int>(kv.get_int_or("prior_grid_size", 10));

  plan.sampler.iterations = kv.get_int_or("iterations", 50000);
  plan.sampler.burn_in_fraction = kv.get_double_or("burn_in_fraction", 0.2);
  plan.sampler.thinning = kv.get_int_or("thinning", 10);
  plan.sampler.ladder = TemperatureLadder::geometric(
      static_cast<int>(kv.get_int_or("chains", 6)),
      kv.get_double_or("temperature_max", 5.0));
  plan.sampler.proposals.sigma_r = kv.get_double_or("sigma_r_radii", 0.02);
  plan.sampler.proposals.sigma_u = kv.get_double_or("sigma_u_radians", 0.1);

  plan.hpd_level = kv.get_double_or("hpd_level", 0.95);
  plan.hpd_resolution = static_cast<int>(kv.get_int_or("hpd_resolution", 64));

  for (const KeyValueEntry& e : kv.all("cell")) {
    const std::string where =
        kv.label() + ":" + std::to_string(e.line) + ": cell";
    std::vector<std::string> tokens;
    {
      std::string cur;
      for (char ch : e.value) {
        if (ch == ',') {
          tokens.push_back(cur);
          cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
          cur.push_back(ch);
        }
      }
      tokens.push_back(cur);
    }
    if (tokens.size() != 4 && tokens.size() != 6)
      throw InputError(where +
                       ": expected 'p_true,l1,l2,n[,prior_min,prior_max]', got '" +
                       e.value + "'");
    CellSpec cell;
    cell.p_true = parse_double_token(tokens[0], where + " p_true");
    cell.location.l1 = parse_double_token(tokens[1], where + " l1");
    cell.location.l2 = parse_double_token(tokens[2], where + " l2");
    cell.n = parse_int_token(tokens[3], where + " n");
    if (tokens.size() == 6)
      cell.prior_override = {parse_double_token(tokens[4], where + " prior_min"),
                             parse_double_token(tokens[5], where + " prior_max")};
    plan.cells.push_back(cell);
  }

  plan.validate();
  return plan;
}

ReplicateSeeds replicate_seeds(std::uint64_t base_seed, int cell_index,
                               int replicate_index) {
  const std::uint64_t rep_base = substream(
      substream(base_seed, static_cast<std::uint64_t>(cell_index)),
      static_cast<std::uint64_t>(replicate_index));
  return {substream(rep_base, kScenarioStage), substream(rep_base, kSamplerStage)};
}

ExperimentSummary run_experiment(const ExperimentPlan& plan,
                                 const std::filesystem::path& out_dir, int jobs,
                                 const ExperimentLogger& log) {
  plan.validate();
  std::filesystem::create_directories(out_dir);

  const int n_cells = static_cast<int>(plan.cells.size());
  const int total = n_cells * plan.replicates;
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(total));

  std::mutex log_mutex;
  auto emit = [&](const std::string& message) {
    if (!log) return;
    std::lock_guard<std::mutex> hold(log_mutex);
    log(message);
  };

  auto run_one = [&](int task) {
    const int ci = task / plan.replicates;
    const int ri = task % plan.replicates;
    ReplicateOutcome& out = outcomes[static_cast<std::size_t>(task)];
    out.cell_index = ci;
    out.replicate_index = ri;
    out.seeds = replicate_seeds(plan.base_seed, ci, ri);

    const CellSpec& cell = plan.cells[static_cast<std::size_t>(ci)];
    try {
      ScenarioConfig scenario{cell.p_true, cell.location, plan.d, cell.n,
                              out.seeds.scenario};
      const DatasetResult data = generate_dataset(scenario);
      out.source_events = data.source_events;

      const PriorSpec prior = plan.prior_for(cell);
      SamplerConfig config = plan.sampler;
      config.seed = out.seeds.sampler;

      const SamplerResult run =
          run_sampler(data.observations, prior, plan.d, config);
      const DetectionReport report = make_detection_report(
          run, plan.hpd_level, plan.hpd_resolution, plan.arithmetic_u_mean);
      out.log_bf = report.log_bf;
      out.pr_no_source = report.pr_no_source;

      const std::filesystem::path dir = out_dir / cell_dir_name(ci, ri);
      std::filesystem::create_directories(dir);
      write_detection_report(dir / "report.txt", report,
                             detection_context(prior, config,
                                               plan.arithmetic_u_mean));
      write_samples_csv(dir / "samples.csv", run.samples);

      std::ofstream truth(dir / "truth.txt", std::ios::binary);
      if (!truth)
        throw IoError("cannot open " + (dir / "truth.txt").string() +
                      " for writing");
      truth << "p_true = " << format_double(cell.p_true) << '\n'
            << "l1 = " << format_double(cell.location.l1) << '\n'
            << "l2 = " << format_double(cell.location.l2) << '\n'
            << "d_radius = " << format_double(plan.d) << '\n'
            << "n_events = " << cell.n << '\n'
            << "scenario_seed = " << out.seeds.scenario << '\n'
            << "sampler_seed = " << out.seeds.sampler << '\n'
            << "source_events = " << data.source_events << '\n'
            << "boundary_rejections = " << data.s_rejections << '\n';
      truth.flush();
      if (!truth)
        throw IoError("error while writing " + (dir / "truth.txt").string());

      emit("cell " + std::to_string(ci) + " rep " + std::to_string(ri) +
           ": log BF = " + format_double(out.log_bf));
    } catch (const std::exception& err) {
      out.failed = true;
      out.error = err.what();
      emit("cell " + std::to_string(ci) + " rep " + std::to_string(ri) +
           " FAILED: " + out.error);
    }
  };

  int workers = jobs > 0 ? jobs
                         : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, total);
  if (workers == 1) {
    for (int task = 0; task < total; ++task) run_one(task);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          const int task = next.fetch_add(1);
          if (task >= total) return;
          run_one(task);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  ExperimentSummary summary;
  summary.replicates = outcomes;
  for (int ci = 0; ci < n_cells; ++ci) {
    CellSummary cs;
    cs.cell = plan.cells[static_cast<std::size_t>(ci)];
    std::vector<double> log_bfs;
    std::vector<double> prs;
    for (int ri = 0; ri < plan.replicates; ++ri) {
      const ReplicateOutcome& out =
          outcomes[static_cast<std::size_t>(ci * plan.replicates + ri)];
      if (out.failed) {
        ++cs.failed;
        continue;
      }
      ++cs.completed;
      log_bfs.push_back(out.log_bf);
      prs.push_back(out.pr_no_source);
    }
    if (!log_bfs.empty()) {
      std::sort(log_bfs.begin(), log_bfs.end());
      std::sort(prs.begin(), prs.end());
      cs.min_log_bf = log_bfs.front();
      cs.max_log_bf = log_bfs.back();
      cs.med_log_bf = median_of_sorted(log_bfs);
      cs.median_pr_no_source = median_of_sorted(prs);
      std::int64_t gt3 = 0;
      for (double v : log_bfs) gt3 += v > kLogThree ? 1 : 0;
      cs.prop_gt3 = static_cast<double>(gt3) / static_cast<double>(log_bfs.size());
    }
    summary.cells.push_back(cs);
  }
  return summary;
}

void write_summary_csv(const std::filesystem::path& path,
                       const ExperimentSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "p_true,l1,l2,min_bf,median_bf,max_bf,prop_bf_gt_3,median_pr_no_source,"
         "n_events,replicates,completed,failed,log_min_bf,log_median_bf,"
         "log_max_bf\n";
  for (const CellSummary& cs : summary.cells) {
    out << format_double(cs.cell.p_true) << ',' << format_double(cs.cell.location.l1)
        << ',' << format_double(cs.cell.location.l2) << ','
        << bf_display(cs.min_log_bf) << ',' << bf_display(cs.med_log_bf) << ','
        << bf_display(cs.max_log_bf) << ',' << format_double(cs.prop_gt3) << ','
        << format_double(cs.median_pr_no_source) << ',' << cs.cell.n << ','
        << cs.completed + cs.failed << ',' << cs.completed << ',' << cs.failed
        << ',' << format_double(cs.min_log_bf) << ','
        << format_double(cs.med_log_bf) << ',' << format_double(cs.max_log_bf)
        << '\n';
  }
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

void write_summary_text(const std::filesystem::path& path,
                        const ExperimentSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  char line[256];
  std::snprintf(line, sizeof(line), "%10s  %18s  %12s  %12s  %12s  %9s  %14s\n",
                "p_true", "location", "min BF", "med BF", "max BF", "Prop>3",
                "med pr(bg)");
  out << line;
  for (const CellSummary& cs : summary.cells) {
    char loc[40];
    std::snprintf(loc, sizeof(loc), "(%.3g, %.3g)", cs.cell.location.l1,
                  cs.cell.location.l2);
    std::snprintf(line, sizeof(line),
                  "%10.4g  %18s  %12s  %12s  %12s  %9.2f  %14.3g\n",
                  cs.cell.p_true, loc, bf_display(cs.min_log_bf).c_str(),
                  bf_display(cs.med_log_bf).c_str(),
                  bf_display(cs.max_log_bf).c_str(), cs.prop_gt3,
                  cs.median_pr_no_source);
    out << line;
    if (cs.failed > 0) {
      std::snprintf(line, sizeof(line), "%10s  %d replicate(s) failed\n", "",
                    cs.failed);
      out << line;
    }
  }
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace sentinel
