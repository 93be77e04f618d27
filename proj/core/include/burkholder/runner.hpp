#pragma once

// Seeded batch experiments over every module, with JSON or CSV records that
// can be replayed.
//
// Record layout (JSON, schema "burklab.run", version 1):
//   {
//     "schema": "burklab.run", "schema_version": 1,
//     "artifact_version": "0.1.0", "timestamp": "2026-01-01T00:00:00Z",
//     "config": { ...every ExperimentConfig field... },
//     "passed": true,
//     "suites": [ { "name": "minimize", "passed": true, "aborted": false,
//                   "worst_margin": 1e-7, "items": [ { "kind": ..., ...,
//                   "margin": ..., "passed": true }, ... ] }, ... ]
//   }
// The CSV form starts with two comment lines,
// "# burklab.run 1 <artifact_version> <timestamp>" and "# config <json>",
// followed by a header and one row per item.
//
// Each item carries a margin: the slack of its worst check, in the units of
// that check. An item passes iff its margin is nonnegative.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "burkholder/optimizer.hpp"

namespace burkholder {

enum class Suite { minimize, ray, stretch, identities, rankone, families, all };
enum class OutputFormat { json, csv };

std::string_view to_string(Suite s);
Suite suite_from_string(std::string_view s);
std::string_view to_string(OutputFormat f);
OutputFormat format_from_string(std::string_view s);

/// Suites run by `s`, in execution order.
std::vector<Suite> expand_suite(Suite s);

/// Invalid configuration; field() names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Suite suite = Suite::all;
  std::vector<int> N_list{6, 8, 12, 16};
  int starts = 20;
  std::uint64_t master_seed = 1;
  double amplitude = 5.0;
  std::vector<double> p_list{1.2, 1.5, 3.0, 5.0};
  /// Nonpositive max_iterations and restart_interval mean 20 n and n for an
  /// n-dimensional problem.
  CgOptions tolerances{0, 1e-10, 1e-12, 1e-8, 0};
  std::filesystem::path output_path = "burklab-run.json";
  OutputFormat format = OutputFormat::json;
  int threads = 1;
  /// Ray suite: a fixed direction, stored inside the record. When set, the
  /// suite produces its (t, h) table instead of random directions.
  std::optional<GridFunction> direction;

  int ray_directions = 50;
  int ray_points = 401;
  double ray_t_max = 10.0;
  int stretch_profiles = 200;
  int rankone_trials = 10000;
  int gap_samples = 100000;
  int theorem3_trials = 500;
  int harmonic_trials = 100;
  int composite_trials = 50;

  /// Throws ConfigError.
  void validate() const;
  /// CG options for an n-dimensional problem.
  CgOptions cg_options(std::size_t n) const;
};

std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(std::string_view text);

using FieldValue = std::variant<bool, std::int64_t, double, std::string>;

struct Item {
  std::vector<std::pair<std::string, FieldValue>> fields;
  double margin = 0.0;
  bool passed() const { return margin >= 0.0; }

  const FieldValue* find(std::string_view name) const;
};

struct SuiteResult {
  Suite suite;
  std::vector<Item> items;
  /// A numerical error stopped an item; its item holds the error and seed.
  bool aborted = false;

  bool passed() const;
  double worst_margin() const;
};

struct RunRecord {
  ExperimentConfig config;
  std::string artifact_version;
  std::string timestamp;
  std::vector<SuiteResult> suites;

  bool passed() const;
  bool aborted() const;
};

/// Runs the selected suites. Results do not depend on config.threads.
RunRecord run_experiments(const ExperimentConfig& config);

/// "<suite> worst_margin=<m> PASS|FAIL", one per suite.
std::vector<std::string> summary_lines(const RunRecord& record);

std::string record_to_json(const RunRecord& record);
std::string record_to_csv(const RunRecord& record);
/// Parses either format.
RunRecord record_from_text(std::string_view text);

void write_record(const RunRecord& record, const std::filesystem::path& path, OutputFormat format);
RunRecord read_record(const std::filesystem::path& path);

/// Validates, runs, writes the record, and prints summary lines to stdout.
/// Returns 0 when every suite passes, 1 on a failed invariant and 3 on a
/// numerical abort.
int run(const ExperimentConfig& config);

struct Drift {
  std::string suite;
  std::size_t item;
  std::string field;
  std::string recorded;
  std::string replayed;
};

struct ReplayReport {
  RunRecord replayed;
  std::vector<Drift> drifts;
};

/// Numbers agree when |a - b| <= rel_tol max(|a|, |b|); wall_time and the
/// timestamp are not compared.
std::vector<Drift> compare_records(const RunRecord& recorded, const RunRecord& replayed,
                                   double rel_tol = 1e-12);

/// Re-executes the embedded config; `threads` > 0 overrides its thread count.
ReplayReport replay(const std::filesystem::path& record_path, int threads = 0);

}  // namespace burkholder
