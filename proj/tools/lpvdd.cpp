// Command-line front end: collect, check, synth, simulate, report, run.
#include <CLI11.hpp>
#include <iostream>

#include "lpvdd/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace lpvdd;

int main(int argc, char** argv) {
  CLI::App app{"Direct data-driven LPV state-feedback design for the unbalanced disc"};
  app.require_subcommand(1);

  std::string config_path, window, kind, scenario = "", out;
  std::uint64_t seed = 0;
  bool sweep = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out, "output path");
  };

  auto* collect = app.add_subcommand("collect", "simulate the open-loop disc and extract a dictionary");
  add_common(collect);
  collect->add_option("--seed", seed, "excitation seed");
  collect->add_option("--window", window, "OFFSET:ND, auto or auto:ND");
  collect->add_flag("--window-sweep", sweep, "report rank and cond(G) for every window");

  std::string dict_path;
  auto* check = app.add_subcommand("check", "persistency-of-excitation report for a dictionary");
  check->add_option("dictionary", dict_path, "dictionary CSV")->required();
  check->add_option("--out", out, "JSON report path (default: pe_report.json next to the dictionary)");

  auto* synth = app.add_subcommand("synth", "solve the synthesis program for a dictionary");
  add_common(synth);
  synth->add_option("dictionary", dict_path, "dictionary CSV")->required();
  synth->add_option("--kind", kind, "qp or l2")->check(CLI::IsMember({"qp", "l2"}));

  std::string result_path;
  auto* simulate = app.add_subcommand("simulate", "closed-loop simulation of a synthesized controller");
  add_common(simulate);
  simulate->add_option("result", result_path, "result JSON")->required();
  simulate->add_option("--scenario", scenario, "tracking, disturbance or regulation")
      ->check(CLI::IsMember({"tracking", "disturbance", "regulation"}));

  std::string run_dir;
  auto* report = app.add_subcommand("report", "summarize a run directory");
  report->add_option("run_dir", run_dir, "directory with dictionary.csv and result.json")->required();

  auto* run = app.add_subcommand("run", "collect, synth, simulate every scenario and report");
  add_common(run);
  run->add_option("--seed", seed, "excitation seed");
  run->add_option("--window", window, "OFFSET:ND, auto or auto:ND");
  run->add_option("--kind", kind, "qp or l2")->check(CLI::IsMember({"qp", "l2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
    if (seed != 0) cfg.excitation.seed = seed;
    if (!window.empty()) cli::apply_window_flag(cfg, window);
    if (!kind.empty()) cfg.kind = synthesis::kind_from_string(kind);
    if (!scenario.empty()) cfg.scenario = scenario;

    if (*collect || *run) {
      if (!out.empty()) cfg.output = out;
      if (*collect)
        cli::cmd_collect(cfg, sweep, std::cout);
      else
        cli::cmd_run(cfg, std::cout);
    } else if (*check) {
      const bool pe = cli::cmd_check(dict_path, out.empty() ? std::nullopt : std::optional<fs::path>(out),
                                     std::cout);
      return pe ? 0 : 2;
    } else if (*synth) {
      const fs::path dict(dict_path);
      cli::cmd_synth(dict, cfg, out.empty() ? dict.parent_path() / "result.json" : fs::path(out),
                     std::cout);
    } else if (*simulate) {
      const fs::path res(result_path);
      cli::cmd_simulate(res, cfg, cfg.scenario, out.empty() ? res.parent_path() : fs::path(out),
                        std::cout);
    } else if (*report) {
      cli::cmd_report(run_dir, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return cli::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return 1;
  }
  return 0;
}
