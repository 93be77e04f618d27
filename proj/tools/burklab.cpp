// burklab: run and replay the seeded experiment suites.
//
//   burklab run --suite minimize --n 6,8 --starts 3 --seed 7 --out run.json
//   burklab replay run.json
//
// Every run flag can also be set through an environment variable named
// BLAB_<FLAG>, e.g. BLAB_SUITE=ray or BLAB_N=6,12. Flags win over variables.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "burkholder/grid_io.hpp"
#include "burkholder/runner.hpp"

namespace {

enum Exit { ok = 0, failed = 1, usage = 2, aborted = 3, io = 4 };

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace burkholder;
  CLI::App app{"Burkholder function numerical lab"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run experiment suites and write a record");
  std::string config_path, suite, out, format, direction;
  std::vector<int> n_list;
  std::vector<double> p_list;
  int starts = 0, threads = 0;
  std::uint64_t seed = 0;
  double amplitude = 0.0, tol_grad = 0.0;

  auto* o_config = run_cmd->add_option("--config", config_path, "base config (JSON)")
                       ->envname("BLAB_CONFIG")->check(CLI::ExistingFile);
  auto* o_suite = run_cmd->add_option("--suite", suite,
                                      "minimize|ray|stretch|identities|rankone|families|all")
                      ->envname("BLAB_SUITE");
  auto* o_n = run_cmd->add_option("--n", n_list, "mesh sizes, comma separated")
                  ->delimiter(',')->envname("BLAB_N");
  auto* o_starts = run_cmd->add_option("--starts", starts, "random starts per N")->envname("BLAB_STARTS");
  auto* o_seed = run_cmd->add_option("--seed", seed, "master seed")->envname("BLAB_SEED");
  auto* o_amp = run_cmd->add_option("--amplitude", amplitude, "start amplitude")->envname("BLAB_AMPLITUDE");
  auto* o_p = run_cmd->add_option("--p", p_list, "exponents, comma separated")
                  ->delimiter(',')->envname("BLAB_P");
  auto* o_tol = run_cmd->add_option("--tol-grad", tol_grad, "CG gradient tolerance")
                    ->envname("BLAB_TOL_GRAD");
  auto* o_out = run_cmd->add_option("--out", out, "record path")->envname("BLAB_OUT");
  auto* o_format = run_cmd->add_option("--format", format, "json|csv")->envname("BLAB_FORMAT");
  auto* o_threads = run_cmd->add_option("--threads", threads, "worker threads")->envname("BLAB_THREADS");
  auto* o_dir = run_cmd->add_option("--direction", direction, "ray direction grid file")
                    ->envname("BLAB_DIRECTION")->check(CLI::ExistingFile);

  auto* replay_cmd = app.add_subcommand("replay", "re-run a record and report drift");
  std::string record_path;
  int replay_threads = 0;
  replay_cmd->add_option("record", record_path, "record file")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--threads", replay_threads, "override the recorded thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::usage;
  }

  if (*replay_cmd) {
    try {
      const auto report = replay(record_path, replay_threads);
      for (const auto& line : summary_lines(report.replayed)) std::cout << line << '\n';
      for (const auto& d : report.drifts) {
        std::cout << "drift " << d.suite << " item " << d.item << " " << d.field << ": recorded "
                  << d.recorded << " replayed " << d.replayed << '\n';
      }
      std::cout << (report.drifts.empty() ? "replay: no drift" : "replay: drift detected") << '\n';
      return report.drifts.empty() ? Exit::ok : Exit::failed;
    } catch (const std::exception& e) {
      std::cerr << "replay: " << e.what() << '\n';
      return Exit::io;
    }
  }

  ExperimentConfig config;
  try {
    if (o_config->count()) config = config_from_json(slurp(config_path));
    if (o_suite->count()) config.suite = suite_from_string(suite);
    if (o_n->count()) config.N_list = n_list;
    if (o_starts->count()) config.starts = starts;
    if (o_seed->count()) config.master_seed = seed;
    if (o_amp->count()) config.amplitude = amplitude;
    if (o_p->count()) config.p_list = p_list;
    if (o_tol->count()) config.tolerances.gradient_tolerance = tol_grad;
    if (o_out->count()) config.output_path = out;
    if (o_format->count()) config.format = format_from_string(format);
    if (o_threads->count()) config.threads = threads;
    if (o_dir->count()) config.direction = load_grid(direction);
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return Exit::usage;
  }

  try {
    const int status = run(config);
    if (status == 3) return Exit::aborted;
    return status == 0 ? Exit::ok : Exit::failed;
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << '\n';
    return Exit::io;
  }
}
