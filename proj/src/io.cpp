#include "sentinel/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "sentinel/errors.hpp"

namespace sentinel {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return buf.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

/// Splits a text into lines, tolerating trailing CR (files edited on other
/// platforms) and a missing final newline.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = pos + 1;
  }
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

// --- key=value ---------------------------------------------------------------

bool KeyValueFile::has(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const KeyValueEntry& e) { return e.key == key; });
}

std::vector<KeyValueEntry> KeyValueFile::all(std::string_view key) const {
  std::vector<KeyValueEntry> out;
  for (const KeyValueEntry& e : entries_)
    if (e.key == key) out.push_back(e);
  return out;
}

void KeyValueFile::fail(int line, const std::string& message) const {
  if (line > 0)
    throw InputError(label_ + ":" + std::to_string(line) + ": " + message);
  throw InputError(label_ + ": " + message);
}

const KeyValueEntry& KeyValueFile::find_unique(std::string_view key) const {
  const KeyValueEntry* found = nullptr;
  for (const KeyValueEntry& e : entries_) {
    if (e.key != key) continue;
    if (found) fail(e.line, "duplicate key '" + std::string(key) + "'");
    found = &e;
  }
  if (!found) fail(0, "missing required key '" + std::string(key) + "'");
  return *found;
}

std::string KeyValueFile::get_string(std::string_view key) const {
  return find_unique(key).value;
}

double KeyValueFile::get_double(std::string_view key) const {
  const KeyValueEntry& e = find_unique(key);
  return parse_double_token(e.value, label_ + ":" + std::to_string(e.line) +
                                         ": key '" + e.key + "'");
}

std::int64_t KeyValueFile::get_int(std::string_view key) const {
  const KeyValueEntry& e = find_unique(key);
  return parse_int_token(e.value, label_ + ":" + std::to_string(e.line) +
                                      ": key '" + e.key + "'");
}

std::uint64_t KeyValueFile::get_uint(std::string_view key) const {
  const KeyValueEntry& e = find_unique(key);
  const std::string_view token = e.value;
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    fail(e.line, "key '" + e.key + "': expected unsigned integer, got '" +
                     e.value + "'");
  return out;
}

bool KeyValueFile::get_bool(std::string_view key) const {
  const KeyValueEntry& e = find_unique(key);
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, "key '" + e.key + "': expected true or false, got '" + e.value + "'");
}

std::string KeyValueFile::get_string_or(std::string_view key,
                                        std::string_view fallback) const {
  return has(key) ? get_string(key) : std::string(fallback);
}

double KeyValueFile::get_double_or(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueFile::get_int_or(std::string_view key,
                                      std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueFile::get_uint_or(std::string_view key,
                                        std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

bool KeyValueFile::get_bool_or(std::string_view key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

void KeyValueFile::require_known(
    std::initializer_list<std::string_view> allowed) const {
  for (const KeyValueEntry& e : entries_) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
      fail(e.line, "unknown key '" + e.key + "'");
  }
}

KeyValueFile parse_key_value_text(std::string_view text, std::string label) {
  std::vector<KeyValueEntry> entries;
  const std::vector<std::string_view> lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InputError(label + ":" + std::to_string(line_no) +
                       ": expected 'key = value', got '" + std::string(line) + "'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty())
      throw InputError(label + ":" + std::to_string(line_no) + ": empty key");
    if (value.empty())
      throw InputError(label + ":" + std::to_string(line_no) + ": key '" +
                       std::string(key) + "' has an empty value");
    entries.push_back({std::string(key), std::string(value), line_no});
  }
  return KeyValueFile(std::move(label), std::move(entries));
}

KeyValueFile parse_key_value_file(const std::filesystem::path& path) {
  return parse_key_value_text(read_text_file(path), path.string());
}

std::string format_double(double value) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    double back = 0.0;
    const auto ec = std::from_chars(buf, buf + std::strlen(buf), back).ec;
    if (ec == std::errc{} && back == value) return buf;
  }
  return buf;  // %.17g always round-trips finite doubles
}

double parse_double_token(std::string_view token, const std::string& context) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw InputError(context + ": expected number, got '" + std::string(token) + "'");
  return out;
}

std::int64_t parse_int_token(std::string_view token, const std::string& context) {
  std::int64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw InputError(context + ": expected integer, got '" + std::string(token) + "'");
  return out;
}

// --- observation files -------------------------------------------------------

void write_observations_csv(const std::filesystem::path& path,
                            const ObservationSet& obs) {
  std::ofstream out = open_output(path);
  out << "theta,s\n";
  const auto theta = obs.theta();
  const auto s = obs.s();
  for (std::size_t i = 0; i < obs.size(); ++i)
    out << format_double(theta[i]) << ',' << format_double(s[i]) << '\n';
  finish_output(out, path);
}

namespace {

Observation parse_observation_row(std::string_view line, const std::string& where) {
  const std::vector<std::string_view> fields = split(line, ',');
  if (fields.size() != 2)
    throw InputError(where + ": expected 2 fields, got " +
                     std::to_string(fields.size()));
  Observation obs;
  obs.theta = parse_double_token(trim(fields[0]), where + ": theta");
  obs.s = parse_double_token(trim(fields[1]), where + ": s");
  if (!std::isfinite(obs.theta) || !std::isfinite(obs.s))
    throw InputError(where + ": non-finite coordinate");
  if (std::abs(obs.s) > 1.0)
    throw InputError(where + ": |s| = " + format_double(std::abs(obs.s)) +
                     " exceeds the unit disk");
  return obs;
}

}  // namespace

ObservationSet read_observations_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::vector<std::string_view> lines = lines_of(text);
  const std::string label = path.string();
  if (lines.empty() || trim(lines[0]) != "theta,s")
    throw InputError(label + ":1: expected header 'theta,s'");

  ObservationSet obs;
  obs.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const Observation rec = parse_observation_row(
        lines[i], label + ":" + std::to_string(i + 1));
    obs.push_back_canonical(wrap_angle(rec.theta), rec.s);
  }
  return obs;
}

void write_truth_csv(const std::filesystem::path& path, const ScenarioConfig& scenario,
                     const DatasetResult& data) {
  std::ofstream out = open_output(path);
  out << "# p_true=" << format_double(scenario.p_true) << '\n'
      << "# l1=" << format_double(scenario.location.l1) << '\n'
      << "# l2=" << format_double(scenario.location.l2) << '\n'
      << "# d_radius=" << format_double(scenario.d) << '\n'
      << "# n_events=" << scenario.n << '\n'
      << "# seed=" << scenario.seed << '\n'
      << "# source_events=" << data.source_events << '\n'
      << "theta,s,delta\n";
  for (const GeneratedEvent& ev : data.events)
    out << format_double(ev.obs.theta) << ',' << format_double(ev.obs.s) << ','
        << static_cast<int>(ev.delta) << '\n';
  finish_output(out, path);
}

TruthFile read_truth_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::vector<std::string_view> lines = lines_of(text);
  const std::string label = path.string();

  std::string preamble;
  std::size_t row = 0;
  while (row < lines.size() && !lines[row].empty() && lines[row].front() == '#') {
    preamble.append(lines[row].substr(1));
    preamble.push_back('\n');
    ++row;
  }
  const KeyValueFile kv = parse_key_value_text(preamble, label + " preamble");

  TruthFile truth;
  truth.scenario.p_true = kv.get_double("p_true");
  truth.scenario.location = {kv.get_double("l1"), kv.get_double("l2")};
  truth.scenario.d = kv.get_double("d_radius");
  truth.scenario.n = kv.get_int("n_events");
  truth.scenario.seed = kv.get_uint("seed");
  truth.source_events = kv.get_int("source_events");

  if (row >= lines.size() || trim(lines[row]) != "theta,s,delta")
    throw InputError(label + ":" + std::to_string(row + 1) +
                     ": expected header 'theta,s,delta'");
  for (std::size_t i = row + 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = label + ":" + std::to_string(i + 1);
    const std::vector<std::string_view> fields = split(lines[i], ',');
    if (fields.size() != 3)
      throw InputError(where + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    GeneratedEvent ev;
    ev.obs.theta = parse_double_token(trim(fields[0]), where + ": theta");
    ev.obs.s = parse_double_token(trim(fields[1]), where + ": s");
    const std::int64_t delta = parse_int_token(trim(fields[2]), where + ": delta");
    if (delta != 0 && delta != 1)
      throw InputError(where + ": delta must be 0 or 1");
    ev.delta = static_cast<std::uint8_t>(delta);
    truth.events.push_back(ev);
  }
  return truth;
}

// --- posterior samples -------------------------------------------------------

void write_samples_csv(const std::filesystem::path& path,
                       const PosteriorSamples& samples) {
  std::ofstream out = open_output(path);
  out << "# n_events=" << samples.n << '\n'
      << "# d_radius=" << format_double(samples.d) << '\n'
      << "p,r,u,j\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const ParameterState& x = samples.states[k];
    out << format_double(x.p) << ',' << format_double(x.r) << ','
        << format_double(x.u) << ',' << samples.j_values[k] << '\n';
  }
  finish_output(out, path);
}

PosteriorSamples read_samples_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::vector<std::string_view> lines = lines_of(text);
  const std::string label = path.string();

  std::string preamble;
  std::size_t row = 0;
  while (row < lines.size() && !lines[row].empty() && lines[row].front() == '#') {
    preamble.append(lines[row].substr(1));
    preamble.push_back('\n');
    ++row;
  }
  const KeyValueFile kv = parse_key_value_text(preamble, label + " preamble");

  PosteriorSamples samples;
  samples.n = kv.get_int("n_events");
  samples.d = kv.get_double("d_radius");

  if (row >= lines.size() || trim(lines[row]) != "p,r,u,j")
    throw InputError(label + ":" + std::to_string(row + 1) +
                     ": expected header 'p,r,u,j'");
  for (std::size_t i = row + 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = label + ":" + std::to_string(i + 1);
    const std::vector<std::string_view> fields = split(lines[i], ',');
    if (fields.size() != 4)
      throw InputError(where + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    ParameterState x;
    x.p = parse_double_token(trim(fields[0]), where + ": p");
    x.r = parse_double_token(trim(fields[1]), where + ": r");
    x.u = parse_double_token(trim(fields[2]), where + ": u");
    samples.states.push_back(x);
    samples.j_values.push_back(parse_int_token(trim(fields[3]), where + ": j"));
  }
  return samples;
}

// --- detection report --------------------------------------------------------

void write_detection_report(const std::filesystem::path& path,
                            const DetectionReport& report,
                            const std::vector<KeyValueEntry>& context) {
  std::ofstream out = open_output(path);
  out << "# detection report\n";
  if (!context.empty()) {
    for (const KeyValueEntry& e : context) out << e.key << " = " << e.value << '\n';
  }
  out << "log_bf = " << format_double(report.log_bf) << '\n'
      << "bf = " << report.bf_text << '\n'
      << "pr_no_source = " << format_double(report.pr_no_source) << '\n'
      << "evidence = " << to_string(report.evidence) << '\n'
      << "detected = " << (report.detected ? "true" : "false") << '\n'
      << "lambda_variance = " << format_double(report.lambda_variance) << '\n'
      << "p_hat = " << format_double(report.estimates.p_hat) << '\n'
      << "r_hat = " << format_double(report.estimates.r_hat) << '\n'
      << "u_hat = " << format_double(report.estimates.u_hat) << '\n'
      << "l1_hat = " << format_double(report.estimates.location_hat.l1) << '\n'
      << "l2_hat = " << format_double(report.estimates.location_hat.l2) << '\n'
      << "n_events = " << report.n << '\n'
      << "d_radius = " << format_double(report.d) << '\n'
      << "retained_samples = " << report.sample_count << '\n'
      << "hpd_level = " << format_double(report.hpd.level) << '\n'
      << "hpd_resolution = " << report.hpd.resolution << '\n'
      << "hpd_cell_count = " << report.hpd.cells.size() << '\n'
      << "hpd_covered_fraction = " << format_double(report.hpd.covered_fraction)
      << '\n';

  out << "hpd_cells = ";
  for (std::size_t i = 0; i < report.hpd.cells.size(); ++i) {
    const HpdCell& c = report.hpd.cells[i];
    if (i) out << ';';
    out << c.ix << ':' << c.iy << ':' << c.count;
  }
  out << '\n';

  out << "accept_r = " << join_doubles(report.accept_r) << '\n'
      << "accept_u = " << join_doubles(report.accept_u) << '\n'
      << "exchange_rates = " << join_doubles(report.exchange_rates) << '\n';

  if (!report.warnings.empty()) {
    std::string joined;
    for (std::size_t i = 0; i < report.warnings.size(); ++i) {
      if (i) joined += ';';
      joined += report.warnings[i];
    }
    out << "warnings = " << joined << '\n';
  }
  finish_output(out, path);
}

KeyValueFile read_detection_report(const std::filesystem::path& path) {
  return parse_key_value_file(path);
}

std::vector<KeyValueEntry> detection_context(const PriorSpec& prior,
                                             const SamplerConfig& config,
                                             bool arithmetic_u_mean) {
  std::vector<KeyValueEntry> ctx;
  auto put = [&ctx](std::string key, std::string value) {
    ctx.push_back({std::move(key), std::move(value), 0});
  };
  put("prior_p_min", format_double(prior.a_p()));
  put("prior_p_max", format_double(prior.b_p()));
  put("prior_grid_size", std::to_string(prior.size()));
  put("chains", std::to_string(config.ladder.size()));
  put("temperature_max", format_double(config.ladder.temps.front()));
  put("iterations", std::to_string(config.iterations));
  put("burn_in_fraction", format_double(config.burn_in_fraction));
  put("thinning", std::to_string(config.thinning));
  put("sigma_r_radii", format_double(config.proposals.sigma_r));
  put("sigma_u_radians", format_double(config.proposals.sigma_u));
  put("sampler_seed", std::to_string(config.seed));
  put("u_mean", arithmetic_u_mean ? "arithmetic" : "circular");
  return ctx;
}

// --- run log -----------------------------------------------------------------

RunLogWriter::RunLogWriter(const std::filesystem::path& path)
    : out_(open_output(path)), path_(path) {}

void RunLogWriter::write(const RunLogRecord& record) {
  nlohmann::json rec{
      {"iteration", record.iteration},
      {"accept_r", record.accept_r},
      {"accept_u", record.accept_u},
      {"exchange_rate", record.exchange_rate},
      {"cold",
       {{"p", record.cold_state.p},
        {"r", record.cold_state.r},
        {"u", record.cold_state.u},
        {"j", record.cold_j}}},
  };
  out_ << rec.dump() << '\n';
  if (!out_) throw IoError("error while writing " + path_.string());
}

RunLogSink RunLogWriter::sink() {
  return [this](const RunLogRecord& record) { write(record); };
}

// --- density surfaces --------------------------------------------------------

void write_density_csv(const std::filesystem::path& path, const DensitySurface& surf) {
  std::ofstream out = open_output(path);
  out << "l1,l2,log_density\n";
  for (std::size_t i = 0; i < surf.l1.size(); ++i)
    out << format_double(surf.l1[i]) << ',' << format_double(surf.l2[i]) << ','
        << format_double(surf.log_density[i]) << '\n';
  finish_output(out, path);
}

}  // namespace sentinel
