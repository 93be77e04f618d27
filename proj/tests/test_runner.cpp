#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "burkholder/runner.hpp"

using namespace burkholder;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const char* dir = std::getenv("BURKLAB_TEST_TMP");
  return std::filesystem::path(dir ? dir : std::filesystem::temp_directory_path().string()) / name;
}

ExperimentConfig small(Suite s) {
  ExperimentConfig c;
  c.suite = s;
  c.N_list = {3, 5};
  c.starts = 3;
  c.master_seed = 42;
  c.ray_directions = 3;
  c.ray_points = 41;
  c.stretch_profiles = 5;
  c.rankone_trials = 20;
  c.gap_samples = 500;
  c.theorem3_trials = 5;
  c.harmonic_trials = 2;
  c.composite_trials = 2;
  return c;
}

double number(const Item& item, std::string_view name) {
  const auto* v = item.find(name);
  if (!v) throw std::runtime_error("missing field " + std::string(name));
  if (const auto* d = std::get_if<double>(v)) return *d;
  return static_cast<double>(std::get<std::int64_t>(*v));
}

}  // namespace

TEST(Suites, NamesRoundTrip) {
  for (auto s : {Suite::minimize, Suite::ray, Suite::stretch, Suite::identities, Suite::rankone,
                 Suite::families, Suite::all}) {
    EXPECT_EQ(suite_from_string(to_string(s)), s);
  }
  EXPECT_EQ(expand_suite(Suite::all).size(), 6u);
  EXPECT_EQ(expand_suite(Suite::ray), std::vector<Suite>{Suite::ray});
  EXPECT_THROW(suite_from_string("everything"), ConfigError);
  EXPECT_EQ(format_from_string("csv"), OutputFormat::csv);
}

TEST(Config, ValidationNamesField) {
  auto expect_field = [](ExperimentConfig c, const std::string& field) {
    try {
      c.validate();
      ADD_FAILURE() << "expected ConfigError for " << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
  auto c = ExperimentConfig{};
  c.p_list = {1.0};
  expect_field(c, "p_list");
  c = {};
  c.N_list = {1};
  expect_field(c, "N_list");
  c = {};
  c.starts = 0;
  expect_field(c, "starts");
  c = {};
  c.amplitude = -1;
  expect_field(c, "amplitude");
  c = {};
  c.threads = 0;
  expect_field(c, "threads");
  c = {};
  c.tolerances.gradient_tolerance = 0;
  expect_field(c, "tolerances.gradient_tolerance");
  c = {};
  c.rankone_trials = 0;
  expect_field(c, "rankone_trials");
}

TEST(Config, JsonRoundTrip) {
  auto c = small(Suite::families);
  c.p_list = {1.25, 7.5};
  c.threads = 3;
  c.format = OutputFormat::csv;
  c.master_seed = 18446744073709551557ull;
  const TorusGrid grid(3);
  c.direction = GridFunction::from_coefficients(grid, random_start(grid, 1, 1.0));
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.suite, c.suite);
  EXPECT_EQ(back.N_list, c.N_list);
  EXPECT_EQ(back.p_list, c.p_list);
  EXPECT_EQ(back.master_seed, c.master_seed);
  EXPECT_EQ(back.threads, 3);
  EXPECT_EQ(back.format, OutputFormat::csv);
  ASSERT_TRUE(back.direction.has_value());
  EXPECT_EQ(back.direction->coefficients(), c.direction->coefficients());
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_THROW(config_from_json("{\"starts\": \"many\"}"), ConfigError);
}

TEST(Run, MinimizeIsDeterministicAndThreadInvariant) {
  auto c = small(Suite::minimize);
  const auto a = run_experiments(c);
  c.threads = 3;
  const auto b = run_experiments(c);
  ASSERT_EQ(a.suites.size(), 1u);
  EXPECT_EQ(a.suites[0].items.size(), 6u);
  EXPECT_TRUE(a.passed());
  EXPECT_TRUE(compare_records(a, b).empty());
  for (std::size_t i = 0; i < a.suites[0].items.size(); ++i) {
    EXPECT_EQ(number(a.suites[0].items[i], "final_value"), number(b.suites[0].items[i], "final_value"));
  }
}

TEST(Run, DriftDetectedForDifferentSeed) {
  auto c = small(Suite::minimize);
  const auto a = run_experiments(c);
  c.master_seed = 43;
  const auto b = run_experiments(c);
  EXPECT_FALSE(compare_records(a, b).empty());
}

TEST(Run, EverySuitePassesOnSmallConfig) {
  const auto rec = run_experiments(small(Suite::all));
  ASSERT_EQ(rec.suites.size(), 6u);
  for (const auto& s : rec.suites) {
    EXPECT_TRUE(s.passed()) << to_string(s.suite) << " " << s.worst_margin();
    EXPECT_FALSE(s.aborted);
    EXPECT_FALSE(s.items.empty());
  }
  EXPECT_EQ(summary_lines(rec).size(), 6u);
  EXPECT_NE(summary_lines(rec)[0].find("PASS"), std::string::npos);
}

TEST(Records, JsonAndCsvCarryTheSameNumbers) {
  const auto rec = run_experiments(small(Suite::identities));
  const auto from_json = record_from_text(record_to_json(rec));
  const auto from_csv = record_from_text(record_to_csv(rec));
  EXPECT_TRUE(compare_records(rec, from_json, 0.0).empty());
  EXPECT_TRUE(compare_records(rec, from_csv, 0.0).empty());
  ASSERT_EQ(from_csv.suites.size(), 1u);
  ASSERT_EQ(from_csv.suites[0].items.size(), rec.suites[0].items.size());
  for (std::size_t i = 0; i < rec.suites[0].items.size(); ++i) {
    EXPECT_EQ(from_csv.suites[0].items[i].margin, rec.suites[0].items[i].margin);
    EXPECT_EQ(from_json.suites[0].items[i].margin, rec.suites[0].items[i].margin);
  }
  EXPECT_EQ(from_csv.timestamp, rec.timestamp);
  EXPECT_EQ(from_csv.config.master_seed, rec.config.master_seed);
  EXPECT_THROW(record_from_text("{\"schema\": \"other\"}"), std::runtime_error);
}

TEST(Records, ReplayReproducesRecord) {
  for (auto format : {OutputFormat::json, OutputFormat::csv}) {
    auto c = small(Suite::rankone);
    c.format = format;
    const auto path = scratch(format == OutputFormat::json ? "replay.json" : "replay.csv");
    c.output_path = path;
    const auto rec = run_experiments(c);
    write_record(rec, path, format);
    const auto rep = replay(path, 2);
    EXPECT_TRUE(rep.drifts.empty());
    EXPECT_EQ(rep.replayed.config.threads, 2);

    // A tampered record is reported as drift.
    auto tampered = read_record(path);
    tampered.suites[0].items[0].margin += 1.0;
    EXPECT_FALSE(compare_records(tampered, rep.replayed).empty());
  }
}

TEST(Ray, FixedDirectionProducesTable) {
  auto c = small(Suite::ray);
  const TorusGrid grid(4);
  const auto dir = GridFunction::from_coefficients(grid, random_start(grid, 9, 1.0));
  c.direction = dir;
  c.ray_points = 21;
  c.ray_t_max = 2.0;
  const auto rec = run_experiments(c);
  const auto& items = rec.suites[0].items;
  ASSERT_EQ(items.size(), 22u);
  for (std::size_t i = 0; i < 21; ++i) {
    const double t = number(items[i], "t");
    EXPECT_NEAR(t, -2.0 + 0.2 * static_cast<double>(i), 1e-15);
    auto x = dir.coefficients();
    for (auto& v : x) v *= t;
    EXPECT_NEAR(number(items[i], "h"), energy_F(grid, x), 1e-12);
  }
  EXPECT_EQ(number(items[10], "h"), 0.0);
  EXPECT_TRUE(items.back().passed());
}

TEST(Run, WritesRecordAndReturnsZero) {
  auto c = small(Suite::stretch);
  c.output_path = scratch("stretch.csv");
  c.format = OutputFormat::csv;
  EXPECT_EQ(run(c), 0);
  std::ifstream in(c.output_path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("# burklab.run 1 ", 0), 0u);
  const auto rec = read_record(c.output_path);
  EXPECT_TRUE(rec.passed());
}
