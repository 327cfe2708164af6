#include "lpvdd/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

#include "lpvdd/core/data_matrices.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/synthesis/result_io.hpp"

namespace lpvdd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io:
    case ErrorKind::Config:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::InvalidArgument:
      return 1;
    case ErrorKind::Infeasible:
    case ErrorKind::IllPosed:
    case ErrorKind::Consistency:
      return 2;
    case ErrorKind::NumericalFailure:
    case ErrorKind::Divergence:
      return 3;
  }
  return 3;
}

namespace {

// Fixed 6 significant digits for human-readable output.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_row(const Eigen::MatrixXd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i || j) s += j ? ", " : "; ";
      s += fmt(m(i, j));
    }
  return s + "]";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string open_loop_csv(const plant::OpenLoopLog& log) {
  std::ostringstream os;
  os << "k,t,u,p,theta,omega\n";
  for (int k = 0; k < log.size(); ++k)
    os << k << ',' << format_double(k * log.ts) << ',' << format_double(log.u[k]) << ','
       << format_double(log.p[k]) << ',' << format_double(log.theta[k]) << ','
       << format_double(log.omega[k]) << '\n';
  return os.str();
}

std::string sweep_csv(const std::vector<plant::WindowReport>& sweep) {
  std::ostringstream os;
  os << "offset,rank,required_rank,condition_number,is_pe,flagged\n";
  for (const auto& r : sweep)
    os << r.offset << ',' << r.rank << ',' << r.required_rank << ','
       << format_double(r.condition_number) << ',' << r.is_pe << ',' << r.ill_conditioned << '\n';
  return os.str();
}

json pe_json(const PeReport& pe, const Dims& d) {
  return {{"dims", {{"nx", d.nx}, {"nu", d.nu}, {"np", d.np}, {"nd", d.nd}}},
          {"rank", pe.rank},
          {"required_rank", pe.required_rank},
          {"is_pe", pe.is_pe},
          {"condition_number", pe.condition_number},
          {"singular_values",
           std::vector<double>(pe.singular_values.data(),
                               pe.singular_values.data() + pe.singular_values.size())}};
}

void print_pe(const PeReport& pe, std::ostream& out) {
  out << "rank " << pe.rank << " / " << pe.required_rank << (pe.is_pe ? " (PE)" : " (not PE)")
      << ", cond(G) = " << fmt(pe.condition_number) << "\n";
}

// Non-finite values (a segment that never settles) are stored as null.
json finite_or_null(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}

std::vector<double> null_as_infinity(const json& a) {
  std::vector<double> v;
  for (const json& x : a)
    v.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
  return v;
}

json load_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

// Plant parameters echoed into a run directory, defaults otherwise.
plant::DiscParams run_params(const fs::path& dir) {
  const fs::path cfg = dir / "config.json";
  if (!fs::exists(cfg)) return {};
  return config_from_json(load_json(cfg), dir).plant;
}

}  // namespace

void cmd_collect(const RunConfig& c, bool sweep, std::ostream& out) {
  for (const auto& w : c.validate()) out << "warning: " << w << "\n";
  fs::create_directories(c.output);
  const auto u = plant::generate_excitation(c.excitation.seed, c.excitation.samples(c.plant.ts),
                                            c.excitation.cutoff_hz, c.excitation.amplitude,
                                            c.plant.ts);
  const plant::OpenLoopLog log = plant::simulate_open_loop(c.plant, u);
  write_text(c.output / "log.csv", open_loop_csv(log));
  out << "simulated " << log.size() << " samples (seed " << c.excitation.seed << ")\n";

  if (sweep) {
    const auto rows = plant::window_sweep(log, c.nd);
    write_text(c.output / "window_sweep.csv", sweep_csv(rows));
    out << "offset  rank  cond(G)\n";
    for (const auto& r : rows) {
      char line[96];
      std::snprintf(line, sizeof line, "%6d  %2d/%d  %-12s%s\n", r.offset, r.rank,
                    r.required_rank, fmt(r.condition_number).c_str(),
                    r.ill_conditioned ? "  ill-conditioned" : "");
      out << line;
    }
  }

  const plant::Window w = c.window_offset ? plant::Window{*c.window_offset, c.nd}
                                          : plant::best_window(log, c.nd);
  const DataDictionary d = plant::extract_window(log, w);
  DictionaryMeta meta;
  meta.sampling_period = c.plant.ts;
  meta.seed = c.excitation.seed;
  meta.window_offset = w.offset;
  meta.source = "simulated disc";
  meta.created = utc_now();
  write_dictionary(c.output / "dictionary.csv", d, meta);
  write_text(c.output / "config.json", c.to_json().dump(2) + "\n");
  out << "dictionary: window offset " << w.offset << ", N_d = " << w.nd << ", "
      << d.samples() << " samples -> " << (c.output / "dictionary.csv").string() << "\n";
}

bool cmd_check(const fs::path& dictionary, const std::optional<fs::path>& json_out,
               std::ostream& out) {
  const LoadedDictionary ld = read_dictionary(dictionary);
  const DataMatrices m = build_data_matrices(ld.dictionary);
  const PeReport pe = pe_check(m);
  print_pe(pe, out);
  if (pe.condition_number > plant::kConditionFlag)
    out << "warning: cond(G) above " << fmt(plant::kConditionFlag)
        << "; synthesis may run into numerical trouble\n";
  json j = pe_json(pe, m.dims);
  j["sha256"] = dictionary_hash(ld.dictionary);
  write_text(json_out ? *json_out : dictionary.parent_path() / "pe_report.json", j.dump(2) + "\n");
  return pe.is_pe;
}

void cmd_synth(const fs::path& dictionary, const RunConfig& c, const fs::path& result_out,
               std::ostream& out) {
  const LoadedDictionary ld = read_dictionary(dictionary);
  const synthesis::SynthesisResult r =
      synthesis::synthesize(c.kind, ld.dictionary, c.weights, c.synth);
  const synthesis::VerificationReport v = synthesis::verify_certificate(r);
  if (!v.passed) {
    std::string why;
    for (const auto& f : v.failures) why += "; " + f;
    fail(ErrorKind::NumericalFailure, "solver reported optimal but the certificate fails" + why);
  }
  const ControllerGains g = r.physical_gains();
  out << synthesis::to_string(r.kind) << ": " << sdp::to_string(r.status) << " after "
      << r.iterations << " iterations, objective " << fmt(r.objective) << "\n";
  out << "K0 = " << fmt_row(g.k0) << ", Kbar = " << fmt_row(g.kbar) << "\n";
  if (r.kind == synthesis::ProgramKind::L2Gain) out << "gamma = " << fmt(r.certificate.gamma) << "\n";
  const auto cert = synthesis::certify_closed_loop(r.data(), r.gains, r.box, 100);
  out << "frozen-p spectral radius (data, 100 points): " << fmt(cert.max_radius)
      << (cert.stable ? "" : "  NOT STABLE") << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  if (!result_out.parent_path().empty()) fs::create_directories(result_out.parent_path());
  synthesis::write_result(result_out, r);
  out << "result -> " << result_out.string() << "\n";
}

void cmd_simulate(const fs::path& result, const RunConfig& c, const std::string& scenario,
                  const fs::path& out_dir, std::ostream& out) {
  const synthesis::SynthesisResult r = synthesis::read_result(result);
  const plant::Scenario s = make_scenario(c, scenario);
  const plant::DeployedController ctrl{r.gains, r.map};
  const plant::Trajectory tr = plant::run_closed_loop(c.plant, ctrl, s);
  const plant::ScenarioMetrics m = plant::evaluate(tr, s);

  fs::create_directories(out_dir);
  std::ostringstream header;
  header << "scenario=" << scenario << " kind=" << synthesis::to_string(r.kind)
         << " measurement_seed=" << s.measurement.seed << " dictionary_sha256=" << r.dictionary_hash;
  plant::write_trajectory(out_dir / ("trajectory_" + scenario + ".csv"), tr, header.str());

  json j;
  j["scenario"] = scenario;
  j["kind"] = synthesis::to_string(r.kind);
  j["dictionary_sha256"] = r.dictionary_hash;
  j["max_abs_u"] = m.max_abs_u;
  j["settling_times"] = finite_or_null(m.settling_times);
  if (!m.steady_state_errors.empty()) j["steady_state_errors"] = finite_or_null(m.steady_state_errors);
  out << scenario << ": max |u| = " << fmt(m.max_abs_u) << "\n";
  for (std::size_t i = 0; i < m.settling_times.size(); ++i) {
    out << "  segment " << i + 1 << ": settling " << fmt(m.settling_times[i]) << " s";
    if (i < m.steady_state_errors.size())
      out << ", steady-state error " << fmt(m.steady_state_errors[i]) << " rad";
    out << "\n";
  }

  if (s.kind == plant::ScenarioKind::DisturbanceRejection &&
      r.kind == synthesis::ProgramKind::L2Gain) {
    const int n = static_cast<int>(std::lround(c.l2_test.duration_s / c.plant.ts));
    std::vector<double> ratios;
    double worst = 0.0;
    for (int i = 0; i < c.l2_test.signals; ++i) {
      const Eigen::MatrixXd w = plant::band_limited_disturbance(
          c.l2_test.seed + i, n, c.l2_test.amplitude, c.l2_test.cutoff_hz, c.plant.ts);
      const auto l2 = plant::empirical_l2_ratio(c.plant, ctrl, w, r.weights.l2.ws, r.weights.l2.wr);
      ratios.push_back(l2.ratio);
      worst = std::max(worst, l2.ratio);
    }
    j["l2"] = {{"gamma", r.certificate.gamma}, {"ratios", ratios}, {"max_ratio", worst}};
    out << "  empirical L2 ratio " << fmt(worst) << " (bound gamma = " << fmt(r.certificate.gamma)
        << ")\n";
  }
  write_text(out_dir / ("summary_" + scenario + ".json"), j.dump(2) + "\n");
}

void cmd_report(const fs::path& dir, std::ostream& out) {
  const fs::path dict_path = dir / "dictionary.csv", result_path = dir / "result.json";
  require(fs::exists(dict_path), ErrorKind::Io, "run directory has no dictionary.csv");
  require(fs::exists(result_path), ErrorKind::Io, "run directory has no result.json");
  const LoadedDictionary ld = read_dictionary(dict_path);
  const synthesis::SynthesisResult r = synthesis::read_result(result_path);
  require(r.dictionary_hash == dictionary_hash(ld.dictionary), ErrorKind::Consistency,
          "result.json was not synthesized from dictionary.csv");
  const plant::DiscParams params = run_params(dir);
  const Dims d = ld.dictionary.dims();
  const PeReport pe = pe_check(build_data_matrices(ld.dictionary));
  const synthesis::VerificationReport v = synthesis::verify_certificate(r);
  const ControllerGains g = r.physical_gains();

  std::ostringstream rep;
  rep << "run report\n\n";
  rep << "dictionary\n";
  rep << "  sha256 " << r.dictionary_hash << "\n";
  rep << "  n_x = " << d.nx << ", n_u = " << d.nu << ", n_p = " << d.np << ", N_d = " << d.nd;
  if (ld.meta.window_offset) rep << ", window offset " << *ld.meta.window_offset;
  if (ld.meta.seed) rep << ", seed " << *ld.meta.seed;
  rep << "\n  rank " << pe.rank << " / " << pe.required_rank << ", cond(G) "
      << fmt(pe.condition_number) << "\n\n";

  rep << "synthesis\n";
  rep << "  kind " << synthesis::to_string(r.kind) << ", status " << sdp::to_string(r.status)
      << ", objective " << fmt(r.objective) << ", solver " << r.solver << "\n";
  rep << "  K0 = " << fmt_row(g.k0) << ", Kbar = " << fmt_row(g.kbar) << " (physical p)\n";
  if (r.kind == synthesis::ProgramKind::L2Gain) rep << "  gamma = " << fmt(r.certificate.gamma) << "\n";
  rep << "  re-verification " << (v.passed ? "passed" : "FAILED") << "\n";
  for (const auto& f : v.failures) rep << "    " << f << "\n";

  const auto model = synthesis::certify_closed_loop(plant::euler_a(params), plant::euler_b(params),
                                                    g, ld.dictionary.box(), 100);
  const auto data = synthesis::certify_closed_loop(r.data(), r.gains, r.box, 100);
  rep << "  frozen-p spectral radius: model " << fmt(model.max_radius) << ", data "
      << fmt(data.max_radius) << " (100 points)\n\n";

  const fs::path bundle = dir / "report";
  fs::create_directories(bundle);
  {
    std::ostringstream os;
    os << "p,rho_model,rho_data\n";
    for (std::size_t i = 0; i < model.grid.size(); ++i)
      os << format_double(model.grid[i].first(0)) << ',' << format_double(model.grid[i].second)
         << ',' << format_double(data.grid[i].second) << '\n';
    write_text(bundle / "certification_grid.csv", os.str());
  }

  std::ostringstream sc;
  sc << "scenario,segment,settling_time,steady_state_error\n";
  rep << "scenarios\n";
  bool any = false;
  for (const char* name : {"regulation", "tracking", "disturbance"}) {
    const fs::path p = dir / (std::string("summary_") + name + ".json");
    if (!fs::exists(p)) continue;
    any = true;
    const json j = load_json(p);
    const auto settle = null_as_infinity(j.at("settling_times"));
    const auto sse = null_as_infinity(j.value("steady_state_errors", json::array()));
    double worst_settle = 0.0, worst_sse = 0.0;
    for (std::size_t i = 0; i < settle.size(); ++i) {
      worst_settle = std::max(worst_settle, settle[i]);
      sc << name << ',' << i + 1 << ',' << format_double(settle[i]) << ','
         << (i < sse.size() ? format_double(sse[i]) : "") << '\n';
    }
    for (double e : sse) worst_sse = std::max(worst_sse, e);
    rep << "  " << name << ": max |u| " << fmt(j.at("max_abs_u").get<double>())
        << ", worst settling " << fmt(worst_settle) << " s";
    if (!sse.empty()) rep << ", worst steady-state error " << fmt(worst_sse) << " rad";
    if (j.contains("l2"))
      rep << ", empirical L2 ratio " << fmt(j.at("l2").at("max_ratio").get<double>());
    rep << "\n";
  }
  if (!any) rep << "  none simulated\n";
  write_text(bundle / "scenarios.csv", sc.str());
  write_text(bundle / "report.txt", rep.str());
  out << rep.str();
}

void cmd_run(const RunConfig& c, std::ostream& out) {
  cmd_collect(c, false, out);
  cmd_synth(c.output / "dictionary.csv", c, c.output / "result.json", out);
  for (const char* s : {"regulation", "tracking", "disturbance"})
    cmd_simulate(c.output / "result.json", c, s, c.output, out);
  cmd_report(c.output, out);
}

}  // namespace lpvdd::cli
