#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpvdd/plant/collect.hpp"
#include "lpvdd/plant/scenario.hpp"
#include "lpvdd/synthesis/synthesis.hpp"

namespace lpvdd::cli {

// Additive band-limited disturbances used for the empirical L2 ratio.
struct L2TestSpec {
  int signals = 10;
  std::uint64_t seed = 1000;
  double duration_s = 5.0;
  double cutoff_hz = 5.0;
  Eigen::Vector2d amplitude{0.02, 0.2};
};

struct RunConfig {
  plant::DiscParams plant;
  plant::ExcitationSpec excitation;
  std::optional<int> window_offset;  // empty: best-conditioned PE window
  int nd = 7;
  synthesis::ProgramKind kind = synthesis::ProgramKind::QuadraticPerformance;
  synthesis::Weights weights = synthesis::Weights::disc_defaults();
  synthesis::SynthesisOptions synth;
  std::string scenario = "tracking";  // tracking | disturbance | regulation
  plant::DiscState regulation_start{M_PI, 0.0};
  double regulation_duration = 10.0;
  plant::MeasurementOptions measurement;
  L2TestSpec l2_test;
  std::filesystem::path output = "run";

  // Hard errors for unusable values; returns warnings for usable but dubious ones.
  std::vector<std::string> validate() const;
  nlohmann::json to_json() const;
};

// Relative paths inside the file (output, "plant" given as a file name)
// resolve against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});

// "auto", "auto:ND", "OFFSET:ND", or "OFFSET" (keeps N_d).
void apply_window_flag(RunConfig& c, const std::string& flag);

plant::Scenario make_scenario(const RunConfig& c, const std::string& name);

}  // namespace lpvdd::cli
