#include "lpvdd/cli/config.hpp"

#include <charconv>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/synthesis/result_io.hpp"

namespace lpvdd::cli {

using nlohmann::json;

std::vector<std::string> RunConfig::validate() const {
  plant.validate();
  require(nd >= 1, ErrorKind::Config, "window N_d must be at least 1");
  require(!window_offset || *window_offset >= 0, ErrorKind::Config,
          "window offset must be non-negative");
  require(excitation.horizon_s > 0.0 && excitation.amplitude > 0.0, ErrorKind::Config,
          "excitation horizon and amplitude must be positive");
  const int available = excitation.samples(plant.ts);
  const int needed = (window_offset ? *window_offset : 0) + nd + 1;
  require(needed <= available, ErrorKind::Config,
          "window needs " + std::to_string(needed) + " samples but the horizon holds only " +
              std::to_string(available));
  require(scenario == "tracking" || scenario == "disturbance" || scenario == "regulation",
          ErrorKind::Config, "unknown scenario '" + scenario + "'");
  require(regulation_duration > 0.0, ErrorKind::Config, "regulation duration must be positive");
  require(l2_test.signals >= 1 && l2_test.duration_s > 0.0, ErrorKind::Config,
          "L2 test needs at least one signal and a positive duration");
  require(synth.margin > 0.0, ErrorKind::Config, "margin must be positive");
  std::vector<std::string> warnings;
  const int required = Dims{1, 1, 2, nd}.required_rank();
  if (nd < required)
    warnings.push_back("N_d = " + std::to_string(nd) + " is below the PE threshold " +
                       std::to_string(required) + "; the dictionary cannot be PE");
  return warnings;
}

json RunConfig::to_json() const {
  json j;
  j["plant"] = {{"mgl_over_j", plant.mgl_over_j}, {"tau", plant.tau}, {"km", plant.km},
                {"saturation", plant.saturation}, {"ts", plant.ts}};
  j["excitation"] = {{"seed", excitation.seed}, {"amplitude", excitation.amplitude},
                     {"cutoff_hz", excitation.cutoff_hz}, {"horizon_s", excitation.horizon_s}};
  j["window"] = {{"offset", window_offset ? json(*window_offset) : json("auto")}, {"nd", nd}};
  j["synthesis"] = {{"kind", synthesis::to_string(kind)},
                    {"margin", synth.margin},
                    {"rescale", synth.rescale},
                    {"project_successor", synth.project_successor},
                    {"weights", synthesis::weights_to_json(weights)}};
  j["scenario"] = {{"name", scenario},
                   {"regulation_start", {regulation_start.theta, regulation_start.omega}},
                   {"regulation_duration", regulation_duration},
                   {"measurement",
                    {{"quantization", measurement.quantization},
                     {"velocity_noise", measurement.velocity_noise},
                     {"finite_difference_velocity", measurement.finite_difference_velocity},
                     {"seed", measurement.seed}}}};
  j["l2_test"] = {{"signals", l2_test.signals},
                  {"seed", l2_test.seed},
                  {"duration_s", l2_test.duration_s},
                  {"cutoff_hz", l2_test.cutoff_hz},
                  {"amplitude", {l2_test.amplitude(0), l2_test.amplitude(1)}}};
  j["output"] = output.string();
  return j;
}

template <class T>
static void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

static std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

RunConfig config_from_json(const json& root, const std::filesystem::path& base) {
  RunConfig c;
  try {
    if (root.contains("plant")) {
      json p = root.at("plant");
      if (p.is_string()) {
        const auto file = resolve(base, p.get<std::string>());
        require(std::filesystem::exists(file), ErrorKind::Config,
                "plant parameter file '" + file.string() + "' does not exist");
        p = json::parse(read_text(file));
      }
      get(p, "mgl_over_j", c.plant.mgl_over_j);
      get(p, "tau", c.plant.tau);
      get(p, "km", c.plant.km);
      get(p, "saturation", c.plant.saturation);
      get(p, "ts", c.plant.ts);
    }
    if (root.contains("excitation")) {
      const json& e = root.at("excitation");
      get(e, "seed", c.excitation.seed);
      get(e, "amplitude", c.excitation.amplitude);
      get(e, "cutoff_hz", c.excitation.cutoff_hz);
      get(e, "horizon_s", c.excitation.horizon_s);
    }
    if (root.contains("window")) {
      const json& w = root.at("window");
      get(w, "nd", c.nd);
      if (w.contains("offset")) {
        const json& off = w.at("offset");
        if (off.is_string()) {
          require(off.get<std::string>() == "auto", ErrorKind::Config,
                  "window offset must be an integer or \"auto\"");
          c.window_offset.reset();
        } else {
          c.window_offset = off.get<int>();
        }
      }
    }
    if (root.contains("synthesis")) {
      const json& s = root.at("synthesis");
      if (s.contains("kind")) c.kind = synthesis::kind_from_string(s.at("kind").get<std::string>());
      get(s, "margin", c.synth.margin);
      get(s, "rescale", c.synth.rescale);
      get(s, "project_successor", c.synth.project_successor);
      if (s.contains("weights")) c.weights = synthesis::weights_from_json(s.at("weights"), c.weights);
    }
    if (root.contains("scenario")) {
      const json& s = root.at("scenario");
      get(s, "name", c.scenario);
      if (s.contains("regulation_start")) {
        const auto x0 = s.at("regulation_start").get<std::vector<double>>();
        require(x0.size() == 2, ErrorKind::Config, "regulation_start must be [theta, omega]");
        c.regulation_start = {x0[0], x0[1]};
      }
      get(s, "regulation_duration", c.regulation_duration);
      if (s.contains("measurement")) {
        const json& m = s.at("measurement");
        get(m, "quantization", c.measurement.quantization);
        get(m, "velocity_noise", c.measurement.velocity_noise);
        get(m, "finite_difference_velocity", c.measurement.finite_difference_velocity);
        get(m, "seed", c.measurement.seed);
      }
    }
    if (root.contains("l2_test")) {
      const json& l = root.at("l2_test");
      get(l, "signals", c.l2_test.signals);
      get(l, "seed", c.l2_test.seed);
      get(l, "duration_s", c.l2_test.duration_s);
      get(l, "cutoff_hz", c.l2_test.cutoff_hz);
      if (l.contains("amplitude")) {
        const auto a = l.at("amplitude").get<std::vector<double>>();
        require(a.size() == 2, ErrorKind::Config, "l2_test amplitude needs two entries");
        c.l2_test.amplitude = {a[0], a[1]};
      }
    }
    if (root.contains("output")) c.output = resolve(base, root.at("output").get<std::string>());
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("bad config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) fail(ErrorKind::Config, e.what());
    throw;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  require(std::filesystem::exists(path), ErrorKind::Config,
          "config file '" + path.string() + "' does not exist");
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

static int parse_int(const std::string& s, const std::string& flag) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorKind::Config,
          "bad --window value '" + flag + "'");
  return v;
}

void apply_window_flag(RunConfig& c, const std::string& flag) {
  const auto colon = flag.find(':');
  const std::string head = flag.substr(0, colon);
  if (head == "auto")
    c.window_offset.reset();
  else
    c.window_offset = parse_int(head, flag);
  if (colon != std::string::npos) c.nd = parse_int(flag.substr(colon + 1), flag);
}

plant::Scenario make_scenario(const RunConfig& c, const std::string& name) {
  plant::Scenario s;
  if (name == "tracking")
    s = plant::Scenario::tracking();
  else if (name == "disturbance")
    s = plant::Scenario::disturbance();
  else if (name == "regulation")
    s = plant::Scenario::regulation(c.regulation_start, c.regulation_duration);
  else
    fail(ErrorKind::Config, "unknown scenario '" + name + "'");
  s.measurement = c.measurement;
  return s;
}

}  // namespace lpvdd::cli
