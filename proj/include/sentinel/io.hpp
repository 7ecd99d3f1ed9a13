#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/inference.hpp"
#include "sentinel/sampler.hpp"
#include "sentinel/simulate.hpp"
#include "sentinel/types.hpp"

namespace sentinel {

// --- flat key=value configuration -------------------------------------------
//
// One `key = value` pair per line; blank lines and lines starting with '#'
// are ignored. Keys carry their units (d_radius, sigma_u_radians) so a file
// reads unambiguously on its own. Errors cite file:line.

struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

class KeyValueFile {
 public:
  KeyValueFile(std::string label, std::vector<KeyValueEntry> entries)
      : label_(std::move(label)), entries_(std::move(entries)) {}

  const std::string& label() const { return label_; }
  const std::vector<KeyValueEntry>& entries() const { return entries_; }

  bool has(std::string_view key) const;
  /// All values for a repeatable key (e.g. experiment `cell` lines), in
  /// file order.
  std::vector<KeyValueEntry> all(std::string_view key) const;

  // Unique lookups; duplicate or missing keys raise InputError with the
  // offending line.
  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;
  bool get_bool(std::string_view key) const;  // true/false
  std::string get_string_or(std::string_view key, std::string_view fallback) const;
  double get_double_or(std::string_view key, double fallback) const;
  std::int64_t get_int_or(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_uint_or(std::string_view key, std::uint64_t fallback) const;
  bool get_bool_or(std::string_view key, bool fallback) const;

  /// Rejects any key outside the schema, naming the first stray key and its
  /// line (misspelled keys fail loudly instead of silently using defaults).
  void require_known(std::initializer_list<std::string_view> allowed) const;

 private:
  const KeyValueEntry& find_unique(std::string_view key) const;
  [[noreturn]] void fail(int line, const std::string& message) const;

  std::string label_;
  std::vector<KeyValueEntry> entries_;
};

KeyValueFile parse_key_value_text(std::string_view text, std::string label);
KeyValueFile parse_key_value_file(const std::filesystem::path& path);

/// Shortest decimal digits that round-trip the exact double (%.17g with a
/// precision walk-down), so written files re-parse bit-for-bit.
std::string format_double(double value);
/// Parses a full token as double via strtod; throws InputError otherwise.
double parse_double_token(std::string_view token, const std::string& context);
std::int64_t parse_int_token(std::string_view token, const std::string& context);

// --- observation files -------------------------------------------------------
//
// CSV with header `theta,s`, one event per row, doubles serialized
// round-trip exactly.

void write_observations_csv(const std::filesystem::path& path,
                            const ObservationSet& obs);
ObservationSet read_observations_csv(const std::filesystem::path& path);

/// Ground-truth sidecar: `# key=value` preamble (scenario parameters and
/// realized counts) followed by `theta,s,delta` rows, delta = 1 for source
/// events.
void write_truth_csv(const std::filesystem::path& path, const ScenarioConfig& scenario,
                     const DatasetResult& data);

struct TruthFile {
  ScenarioConfig scenario;
  std::int64_t source_events = 0;
  std::vector<GeneratedEvent> events;
};
TruthFile read_truth_csv(const std::filesystem::path& path);

// --- posterior samples -------------------------------------------------------
//
// CSV with `# n_events=` and `# d_radius=` preamble then header `p,r,u,j`,
// one retained draw per row. The preamble makes the file self-sufficient
// for recomputing the Bayes factor.

void write_samples_csv(const std::filesystem::path& path,
                       const PosteriorSamples& samples);
PosteriorSamples read_samples_csv(const std::filesystem::path& path);

// --- detection report --------------------------------------------------------
//
// Flat key=value document (same grammar as the config files) carrying the
// decision quantities, point estimates, HPD cells and diagnostics.

void write_detection_report(const std::filesystem::path& path,
                            const DetectionReport& report,
                            const std::vector<KeyValueEntry>& context);
KeyValueFile read_detection_report(const std::filesystem::path& path);

/// Canonical context block echoing the sampler setup into a report. Used by
/// both the detect command and the experiment harness so a replicate rerun
/// standalone reproduces its report byte-for-byte.
std::vector<KeyValueEntry> detection_context(const PriorSpec& prior,
                                             const SamplerConfig& config,
                                             bool arithmetic_u_mean);

// --- run log -----------------------------------------------------------------

/// Newline-delimited JSON progress log; one record per diagnostic window.
class RunLogWriter {
 public:
  explicit RunLogWriter(const std::filesystem::path& path);
  void write(const RunLogRecord& record);
  RunLogSink sink();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

// --- density surfaces --------------------------------------------------------

/// CSV with header `l1,l2,log_density` (lattice points inside the disk).
void write_density_csv(const std::filesystem::path& path, const DensitySurface& surf);

}  // namespace sentinel
