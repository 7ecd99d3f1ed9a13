// emission-sentinel command line: simulate datasets, run source detection,
// drive simulation campaigns, and render posterior diagnostics.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sentinel/errors.hpp"
#include "sentinel/experiment.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/inference.hpp"
#include "sentinel/io.hpp"
#include "sentinel/sampler.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/svg.hpp"

namespace {

using namespace sentinel;

enum ExitCode : int { kOk = 0, kBadInput = 1, kIoFailure = 2, kInternal = 3 };

// EMISSION_SENTINEL_LOG: quiet | info (default) | debug
int log_level() {
  static const int level = [] {
    const char* env = std::getenv("EMISSION_SENTINEL_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
  }();
  return level;
}

void info(const std::string& message) {
  if (log_level() >= 1) std::cerr << message << '\n';
}

void debug(const std::string& message) {
  if (log_level() >= 2) std::cerr << message << '\n';
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;
  bool strict_paper_mode = false;
};

std::filesystem::path ensure_out_dir(const std::string& dir) {
  std::filesystem::path out(dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string());
  return out;
}

ScenarioConfig parse_scenario_config(const KeyValueFile& kv) {
  kv.require_known({"p_true", "l1", "l2", "d_radius", "n_events", "seed"});
  ScenarioConfig sc;
  sc.p_true = kv.get_double("p_true");
  sc.location = {kv.get_double_or("l1", 0.0), kv.get_double_or("l2", 0.0)};
  sc.d = kv.get_double_or("d_radius", 0.01);
  sc.n = kv.get_int("n_events");
  sc.seed = kv.get_uint_or("seed", 0);
  return sc;
}

struct DetectSettings {
  PriorSpec prior;
  double d = 0.01;
  SamplerConfig config;
  double hpd_level = 0.95;
  int hpd_resolution = 64;
};

DetectSettings parse_detect_config(const KeyValueFile& kv) {
  kv.require_known({"d_radius", "prior_p_min", "prior_p_max", "prior_grid_size",
                    "chains", "temperature_max", "iterations", "burn_in_fraction",
                    "thinning", "sigma_r_radii", "sigma_u_radians", "seed",
                    "hpd_level", "hpd_resolution"});
  DetectSettings out;
  out.d = kv.get_double_or("d_radius", 0.01);
  out.prior = PriorSpec::equally_spaced(
      kv.get_double_or("prior_p_min", 0.0002), kv.get_double_or("prior_p_max", 0.002),
      static_cast<int>(kv.get_int_or("prior_grid_size", 10)));
  out.config.iterations = kv.get_int_or("iterations", 50000);
  out.config.burn_in_fraction = kv.get_double_or("burn_in_fraction", 0.2);
  out.config.thinning = kv.get_int_or("thinning", 10);
  out.config.ladder =
      TemperatureLadder::geometric(static_cast<int>(kv.get_int_or("chains", 6)),
                                   kv.get_double_or("temperature_max", 5.0));
  out.config.proposals.sigma_r = kv.get_double_or("sigma_r_radii", 0.02);
  out.config.proposals.sigma_u = kv.get_double_or("sigma_u_radians", 0.1);
  out.config.seed = kv.get_uint_or("seed", 0);
  out.hpd_level = kv.get_double_or("hpd_level", 0.95);
  out.hpd_resolution = static_cast<int>(kv.get_int_or("hpd_resolution", 64));
  return out;
}

int cmd_simulate(const CommonFlags& flags) {
  if (flags.config_path.empty())
    throw InputError("simulate requires --config <scenario file>");
  ScenarioConfig scenario =
      parse_scenario_config(parse_key_value_file(flags.config_path));
  if (flags.seed_override) scenario.seed = *flags.seed_override;
  scenario.validate();

  const std::filesystem::path out = ensure_out_dir(flags.out_dir);
  info("simulating n=" + std::to_string(scenario.n) + " events");
  const DatasetResult data = generate_dataset(scenario);
  write_observations_csv(out / "observations.csv", data.observations);
  write_truth_csv(out / "truth.csv", scenario, data);

  std::cout << "n_events = " << scenario.n << '\n'
            << "source_events = " << data.source_events << '\n'
            << "observations = " << (out / "observations.csv").string() << '\n'
            << "truth = " << (out / "truth.csv").string() << '\n';
  return kOk;
}

int cmd_detect(const std::string& obs_path, const CommonFlags& flags) {
  DetectSettings settings =
      flags.config_path.empty()
          ? DetectSettings{PriorSpec::equally_spaced(0.0002, 0.002, 10), 0.01, {},
                           0.95, 64}
          : parse_detect_config(parse_key_value_file(flags.config_path));
  if (flags.seed_override) settings.config.seed = *flags.seed_override;
  settings.config.validate();
  if (flags.strict_paper_mode)
    info("strict-paper-mode: arithmetic u mean; the truncated-normal proposal "
         "correction stays enabled");

  const ObservationSet obs = read_observations_csv(obs_path);
  if (obs.empty())
    throw InputError(obs_path + ": contains no observations");

  const std::filesystem::path out = ensure_out_dir(flags.out_dir);
  RunLogWriter runlog(out / "runlog.ndjson");
  RunLogSink sink = [&runlog](const RunLogRecord& rec) {
    runlog.write(rec);
    if (log_level() >= 2)
      debug("iteration " + std::to_string(rec.iteration) +
            " cold j=" + std::to_string(rec.cold_j));
  };

  info("running sampler: " + std::to_string(settings.config.iterations) +
       " iterations x " + std::to_string(settings.config.ladder.size()) +
       " chains on n=" + std::to_string(obs.size()));
  const SamplerResult run =
      run_sampler(obs, settings.prior, settings.d, settings.config, sink);

  const DetectionReport report =
      make_detection_report(run, settings.hpd_level, settings.hpd_resolution,
                            flags.strict_paper_mode);
  write_detection_report(out / "report.txt", report,
                         detection_context(settings.prior, settings.config,
                                           flags.strict_paper_mode));
  write_samples_csv(out / "samples.csv", run.samples);

  std::cout << "log_bf = " << format_double(report.log_bf) << '\n'
            << "bf = " << report.bf_text << '\n'
            << "pr_no_source = " << format_double(report.pr_no_source) << '\n'
            << "evidence = " << to_string(report.evidence) << '\n'
            << "detected = " << (report.detected ? "true" : "false") << '\n'
            << "report = " << (out / "report.txt").string() << '\n';
  for (const std::string& w : report.warnings) info("warning: " + w);
  return kOk;
}

int cmd_experiment(const CommonFlags& flags) {
  if (flags.config_path.empty())
    throw InputError("experiment requires --config <plan file>");
  ExperimentPlan plan =
      parse_experiment_plan(parse_key_value_file(flags.config_path));
  if (flags.seed_override) plan.base_seed = *flags.seed_override;
  plan.arithmetic_u_mean = flags.strict_paper_mode;

  const std::filesystem::path out = ensure_out_dir(flags.out_dir);
  const ExperimentSummary summary = run_experiment(
      plan, out, flags.jobs, [](const std::string& message) { info(message); });

  write_summary_csv(out / "summary.csv", summary);
  write_summary_text(out / "summary.txt", summary);

  std::ifstream table(out / "summary.txt");
  std::cout << table.rdbuf();
  int failed = 0;
  for (const ReplicateOutcome& r : summary.replicates) failed += r.failed ? 1 : 0;
  if (failed > 0) info(std::to_string(failed) + " replicate(s) failed");
  return kOk;
}

int cmd_posterior_map(const std::string& obs_path, double p, int resolution,
                      const std::string& truth_path, const CommonFlags& flags) {
  const ObservationSet obs = read_observations_csv(obs_path);
  std::optional<Location> truth;
  if (!truth_path.empty()) truth = read_truth_csv(truth_path).scenario.location;

  // d comes from the detect config if given, else the truth sidecar, else the
  // shipped default.
  double d = 0.01;
  if (!flags.config_path.empty()) {
    const KeyValueFile kv = parse_key_value_file(flags.config_path);
    d = kv.get_double_or("d_radius", 0.01);
  } else if (!truth_path.empty()) {
    d = read_truth_csv(truth_path).scenario.d;
  }

  info("evaluating conditional map at p=" + format_double(p) + ", resolution " +
       std::to_string(resolution));
  const DensitySurface surf = conditional_location_map(obs, p, d, resolution);

  const std::filesystem::path out = ensure_out_dir(flags.out_dir);
  write_density_csv(out / "density.csv", surf);
  write_density_svg(out / "density.svg", surf, truth);
  std::cout << "density = " << (out / "density.csv").string() << '\n'
            << "figure = " << (out / "density.svg").string() << '\n';
  return kOk;
}

int cmd_figure3(const std::string& samples_path, const std::string& truth_path,
                double hpd_level, int resolution, const CommonFlags& flags) {
  const PosteriorSamples samples = read_samples_csv(samples_path);
  if (samples.size() == 0)
    throw InputError(samples_path + ": contains no posterior draws");

  std::optional<Location> truth;
  if (!truth_path.empty()) {
    // Accept either a simulator truth sidecar or a flat key=value file with
    // l1/l2 (the experiment harness writes the latter).
    try {
      truth = read_truth_csv(truth_path).scenario.location;
    } catch (const InputError&) {
      const KeyValueFile kv = parse_key_value_file(truth_path);
      truth = Location{kv.get_double("l1"), kv.get_double("l2")};
    }
  }

  const HpdRegion hpd = hpd_region_2d(samples, hpd_level, resolution);

  const std::filesystem::path out = ensure_out_dir(flags.out_dir);
  {
    std::ofstream cloud(out / "locations.csv", std::ios::binary);
    if (!cloud)
      throw IoError("cannot open " + (out / "locations.csv").string() +
                    " for writing");
    cloud << "l1,l2\n";
    for (const ParameterState& x : samples.states) {
      const Location loc = polar_to_cartesian(x.r, x.u);
      cloud << format_double(loc.l1) << ',' << format_double(loc.l2) << '\n';
    }
    cloud.flush();
    if (!cloud)
      throw IoError("error while writing " + (out / "locations.csv").string());
  }
  {
    std::ofstream cells(out / "hpd.csv", std::ios::binary);
    if (!cells)
      throw IoError("cannot open " + (out / "hpd.csv").string() + " for writing");
    cells << "ix,iy,count,l1_center,l2_center\n";
    const double w = 2.0 / hpd.resolution;
    for (const HpdCell& c : hpd.cells)
      cells << c.ix << ',' << c.iy << ',' << c.count << ','
            << format_double(-1.0 + (c.ix + 0.5) * w) << ','
            << format_double(-1.0 + (c.iy + 0.5) * w) << '\n';
    cells.flush();
    if (!cells)
      throw IoError("error while writing " + (out / "hpd.csv").string());
  }
  write_scatter_svg(out / "figure.svg", samples, hpd, truth);

  std::cout << "locations = " << (out / "locations.csv").string() << '\n'
            << "hpd_cells = " << hpd.cells.size() << '\n'
            << "figure = " << (out / "figure.svg").string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emission-sentinel: weak-source detection in direction-sensitive "
               "detector data"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string obs_path, samples_path, truth_path;
  double map_p = 0.0;
  int map_resolution = 64;
  double fig_hpd_level = 0.95;
  int fig_resolution = 64;

  auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "key=value configuration file");
    cmd->add_option("--seed", flags.seed_override, "override the config seed");
    cmd->add_option("--jobs", flags.jobs, "worker threads for experiment cells");
    cmd->add_option("--out", flags.out_dir, "output directory (default .)");
    cmd->add_flag("--strict-paper-mode", flags.strict_paper_mode,
                  "arithmetic angular mean instead of the circular mean");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(simulate);

  CLI::App* detect =
      app.add_subcommand("detect", "run the detection pipeline on observations");
  detect->add_option("observations", obs_path, "observation CSV (theta,s)")
      ->required();
  add_common(detect);

  CLI::App* experiment =
      app.add_subcommand("experiment", "run a cells x replicates campaign");
  add_common(experiment);

  CLI::App* pmap = app.add_subcommand(
      "posterior-map", "conditional location density at fixed emission fraction");
  pmap->add_option("observations", obs_path, "observation CSV (theta,s)")
      ->required();
  pmap->add_option("--p", map_p, "emission fraction to condition on")->required();
  pmap->add_option("--resolution", map_resolution, "lattice cells per axis");
  pmap->add_option("--truth", truth_path, "truth sidecar for the crosshair");
  add_common(pmap);

  CLI::App* figure3 = app.add_subcommand(
      "figure3", "posterior location cloud with HPD region");
  figure3->add_option("samples", samples_path, "posterior samples CSV")->required();
  figure3->add_option("--truth", truth_path, "truth file for the crosshair");
  figure3->add_option("--hpd-level", fig_hpd_level, "HPD mass level");
  figure3->add_option("--resolution", fig_resolution, "HPD lattice cells per axis");
  add_common(figure3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags);
    if (detect->parsed()) return cmd_detect(obs_path, flags);
    if (experiment->parsed()) return cmd_experiment(flags);
    if (pmap->parsed())
      return cmd_posterior_map(obs_path, map_p, map_resolution, truth_path, flags);
    if (figure3->parsed())
      return cmd_figure3(samples_path, truth_path, fig_hpd_level, fig_resolution,
                         flags);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kBadInput;
}
