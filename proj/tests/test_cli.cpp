#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <sys/wait.h>

#include "lpvdd/cli/commands.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/plant/collect.hpp"
#include "lpvdd/synthesis/result_io.hpp"

using namespace lpvdd;
using namespace lpvdd::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures = LPVDD_FIXTURES;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an lpvdd::Error");
  return ErrorKind::Io;
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("lpvdd_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

int run_cli(const std::string& args, const fs::path& log = "/dev/null") {
  const std::string cmd = std::string(LPVDD_CLI_BINARY) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

json read_json(const fs::path& p) { return json::parse(read_text(p)); }

}  // namespace

TEST_CASE("exit code contract") {
  CHECK(exit_code(ErrorKind::Io) == 1);
  CHECK(exit_code(ErrorKind::Config) == 1);
  CHECK(exit_code(ErrorKind::Infeasible) == 2);
  CHECK(exit_code(ErrorKind::IllPosed) == 2);
  CHECK(exit_code(ErrorKind::NumericalFailure) == 3);
}

TEST_CASE("run configuration") {
  const RunConfig def;
  CHECK(def.nd == 7);
  CHECK(def.excitation.horizon_s == 1.0);
  CHECK(def.excitation.amplitude == 10.0);
  CHECK_FALSE(def.window_offset.has_value());
  CHECK(def.validate().empty());

  SUBCASE("overrides and relative paths") {
    const RunConfig c = load_config(kFixtures / "configs" / "regulation.json");
    CHECK(c.excitation.seed == 7);
    CHECK(c.kind == synthesis::ProgramKind::L2Gain);
    CHECK(c.scenario == "regulation");
    CHECK(c.regulation_start.theta == 1.0);
    CHECK(c.measurement.seed == 3);
    CHECK(c.plant.mgl_over_j == 70.0);
    const RunConfig d = load_config(kFixtures / "configs" / "disturbance.json");
    CHECK(d.weights.l2.ws(1, 1) == 2e-5);
    CHECK(d.l2_test.signals == 4);
  }
  SUBCASE("to_json round-trips") {
    RunConfig c;
    c.window_offset = 12;
    c.nd = 9;
    c.kind = synthesis::ProgramKind::L2Gain;
    c.measurement.quantization = 0.01;
    const RunConfig back = config_from_json(c.to_json());
    CHECK(back.window_offset == 12);
    CHECK(back.nd == 9);
    CHECK(back.kind == c.kind);
    CHECK(back.measurement.quantization == 0.01);
    CHECK(back.to_json() == c.to_json());
  }
  SUBCASE("errors") {
    CHECK(kind_of([] { load_config(kFixtures / "configs" / "missing.json"); }) == ErrorKind::Config);
    CHECK(kind_of([] { config_from_json(json{{"plant", "nowhere.json"}}, kFixtures); }) ==
          ErrorKind::Config);
    CHECK(kind_of([] { config_from_json(json{{"window", {{"offset", "first"}}}}); }) ==
          ErrorKind::Config);
    CHECK(kind_of([] { config_from_json(json{{"synthesis", {{"kind", "hinf"}}}}); }) ==
          ErrorKind::Config);
    CHECK(kind_of([] { config_from_json(json{{"excitation", {{"seed", "x"}}}}); }) ==
          ErrorKind::Config);
    RunConfig c;
    c.nd = 0;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);
    c.nd = 7;
    c.window_offset = 95;
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Config);
    c.window_offset = 92;
    CHECK(c.validate().empty());
    c.window_offset.reset();
    c.nd = 4;
    const auto warnings = c.validate();
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("PE threshold") != std::string::npos);
  }
  SUBCASE("window flag") {
    RunConfig c;
    apply_window_flag(c, "10:7");
    CHECK(c.window_offset == 10);
    apply_window_flag(c, "auto:9");
    CHECK_FALSE(c.window_offset.has_value());
    CHECK(c.nd == 9);
    apply_window_flag(c, "auto");
    CHECK(c.nd == 9);
    apply_window_flag(c, "4");
    CHECK(c.window_offset == 4);
    CHECK(c.nd == 9);
    CHECK(kind_of([&] { apply_window_flag(c, "-"); }) == ErrorKind::Config);
    CHECK(kind_of([&] { apply_window_flag(c, "a:b"); }) == ErrorKind::Config);
  }
  CHECK(make_scenario(def, "disturbance").pulses.size() == 5);
  CHECK(kind_of([&] { make_scenario(def, "sprint"); }) == ErrorKind::Config);
}

TEST_CASE("binary exit codes") {
  Scratch s("codes");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("collect --bogus") == 1);
  CHECK(run_cli("simulate " + (s.dir / "missing.json").string()) == 1);
  CHECK(run_cli("collect --window 95:7 --out " + (s.dir / "late").string()) == 1);
  CHECK(run_cli("collect --config " + (s.dir / "none.json").string()) == 1);

  // A dictionary below the PE threshold.
  REQUIRE(run_cli("collect --window 10:7 --out " + (s.dir / "ok").string()) == 0);
  const DataDictionary d = read_dictionary(s.dir / "ok" / "dictionary.csv").dictionary;
  write_dictionary(s.dir / "short.csv", d.truncated(5), {});
  CHECK(run_cli("check " + (s.dir / "short.csv").string()) == 2);
  CHECK(read_json(s.dir / "pe_report.json").at("is_pe") == false);
  CHECK(run_cli("synth " + (s.dir / "short.csv").string()) == 2);
  CHECK(run_cli("check " + (s.dir / "ok" / "dictionary.csv").string()) == 0);

  // Tampered data no longer matches the recorded hash.
  std::string text = read_text(s.dir / "ok" / "dictionary.csv");
  char& last = text[text.size() - 2];
  last = last == '1' ? '2' : '1';
  write_text(s.dir / "ok" / "dictionary.csv", text);
  CHECK(run_cli("check " + (s.dir / "ok" / "dictionary.csv").string()) == 2);
}

TEST_CASE("collect writes the log, dictionary and sweep") {
  Scratch s("collect");
  std::ostringstream out;
  RunConfig c;
  c.output = s.dir;
  cmd_collect(c, true, out);
  CHECK(out.str().find("offset") != std::string::npos);
  const auto log = read_text(s.dir / "log.csv");
  CHECK(std::count(log.begin(), log.end(), '\n') == 101);
  const LoadedDictionary ld = read_dictionary(s.dir / "dictionary.csv");
  CHECK(ld.dictionary.samples() == 8);
  CHECK(fs::exists(s.dir / "dictionary.json"));
  const auto sweep = read_text(s.dir / "window_sweep.csv");
  CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 1 + 93);
  CHECK(read_json(s.dir / "config.json").at("window").at("nd") == 7);
}

TEST_CASE("identical configuration gives byte-identical CSV outputs") {
  Scratch s("determinism");
  REQUIRE(run_cli("run --seed 11 --out " + (s.dir / "a").string()) == 0);
  REQUIRE(run_cli("run --seed 11 --out " + (s.dir / "b").string()) == 0);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(s.dir / "a"))
    if (e.path().extension() == ".csv") {
      CHECK(read_text(e.path()) == read_text(s.dir / "b" / e.path().filename()));
      ++compared;
    }
  CHECK(compared >= 5);
  CHECK(read_text(s.dir / "a" / "report" / "report.txt") ==
        read_text(s.dir / "b" / "report" / "report.txt"));
  REQUIRE(run_cli("collect --seed 12 --out " + (s.dir / "c").string()) == 0);
  CHECK(read_text(s.dir / "a" / "log.csv") != read_text(s.dir / "c" / "log.csv"));
}

TEST_CASE("commands compose through files only") {
  Scratch s("roundtrip");
  const std::string dir = s.dir.string();
  REQUIRE(run_cli("collect --out " + dir) == 0);
  REQUIRE(run_cli("check " + dir + "/dictionary.csv --out " + dir + "/pe.json") == 0);
  const json pe = read_json(s.dir / "pe.json");
  CHECK(pe.at("rank") == 6);
  CHECK(pe.at("required_rank") == 6);

  REQUIRE(run_cli("synth " + dir + "/dictionary.csv --kind l2 --out " + dir + "/l2.json") == 0);
  const synthesis::SynthesisResult r = synthesis::read_result(s.dir / "l2.json");
  CHECK(r.kind == synthesis::ProgramKind::L2Gain);
  CHECK(std::isfinite(r.certificate.gamma));
  CHECK(synthesis::verify_certificate(r).passed);
  // The file result equals an in-process synthesis on the same dictionary.
  const auto again = synthesis::synthesize(synthesis::ProgramKind::L2Gain,
                                           read_dictionary(s.dir / "dictionary.csv").dictionary,
                                           synthesis::Weights::disc_defaults());
  CHECK((again.gains.k0 - r.gains.k0).norm() == 0.0);

  REQUIRE(run_cli("simulate " + dir + "/l2.json --scenario disturbance --out " + dir + "/sim") == 0);
  const json sum = read_json(s.dir / "sim" / "summary_disturbance.json");
  CHECK(sum.at("settling_times").size() == 5);
  CHECK(sum.contains("l2"));
  CHECK(sum.at("l2").at("max_ratio").get<double>() <= r.certificate.gamma);
  const auto traj = plant::read_trajectory(s.dir / "sim" / "trajectory_disturbance.csv");
  CHECK(traj.size() == 2001);

  REQUIRE(run_cli("simulate " + dir + "/l2.json --scenario tracking --out " + dir + "/sim") == 0);
  CHECK(read_json(s.dir / "sim" / "summary_tracking.json").at("steady_state_errors").size() == 9);
}

TEST_CASE("reports match the golden files") {
  const bool update = std::getenv("LPVDD_UPDATE_GOLDEN") != nullptr;
  for (const std::string name : {"tracking", "disturbance", "regulation"}) {
    CAPTURE(name);
    Scratch s("golden_" + name);
    REQUIRE(run_cli("run --config " + (kFixtures / "configs" / (name + ".json")).string() +
                    " --out " + s.dir.string()) == 0);
    const fs::path produced = s.dir / "report" / "report.txt";
    const fs::path golden = kFixtures / "golden" / (name + ".txt");
    if (update) fs::copy_file(produced, golden, fs::copy_options::overwrite_existing);
    REQUIRE(fs::exists(golden));
    CHECK(read_text(produced) == read_text(golden));
    for (const auto* csv : {"scenarios.csv", "certification_grid.csv"})
      CHECK(fs::file_size(s.dir / "report" / csv) > 0);
  }
}
