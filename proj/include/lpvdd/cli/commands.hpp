#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "lpvdd/cli/config.hpp"
#include "lpvdd/core/error.hpp"

namespace lpvdd::cli {

// 0 success, 1 I/O or config, 2 infeasible or ill-posed, 3 numerical failure.
int exit_code(ErrorKind k);

// Writes log.csv, dictionary.csv (+ .json sidecar), config.json and, when
// sweeping, window_sweep.csv into c.output.
void cmd_collect(const RunConfig& c, bool sweep, std::ostream& out);

// Returns false (exit code 2) when the dictionary is not PE.
bool cmd_check(const std::filesystem::path& dictionary, const std::optional<std::filesystem::path>& json_out,
               std::ostream& out);

// Fails with NumericalFailure if the solved certificate does not re-verify.
void cmd_synth(const std::filesystem::path& dictionary, const RunConfig& c,
               const std::filesystem::path& result_out, std::ostream& out);

// Writes trajectory_<scenario>.csv and summary_<scenario>.json into out_dir.
void cmd_simulate(const std::filesystem::path& result, const RunConfig& c,
                  const std::string& scenario, const std::filesystem::path& out_dir,
                  std::ostream& out);

// Reads a run directory and writes report/report.txt plus CSV tables.
void cmd_report(const std::filesystem::path& run_dir, std::ostream& out);

// collect, synth, simulate (all scenarios) and report into c.output.
void cmd_run(const RunConfig& c, std::ostream& out);

}  // namespace lpvdd::cli
