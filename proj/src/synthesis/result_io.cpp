#include "lpvdd/synthesis/result_io.hpp"

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"

namespace lpvdd::synthesis {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  require(j.is_array(), ErrorKind::Config, "matrix must be an array of rows");
  if (j.empty()) return {};
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    require(j[i].is_array() && static_cast<Eigen::Index>(j[i].size()) == c, ErrorKind::Config,
            "matrix rows must have equal length");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Eigen::MatrixXd weight_from_json(const json& j) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  require(j.is_array() && !j.empty(), ErrorKind::Config, "weight must be a number or an array");
  if (j.at(0).is_number()) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) d(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return d.asDiagonal();
  }
  return matrix_from_json(j);
}

json weights_to_json(const Weights& w) {
  return {{"qp", {{"Q", matrix_to_json(w.qp.q)}, {"R", matrix_to_json(w.qp.r)}}},
          {"l2",
           {{"W_S", matrix_to_json(w.l2.ws)},
            {"W_R", matrix_to_json(w.l2.wr)},
            {"lambda", w.l2.lambda}}}};
}

Weights weights_from_json(const json& j, const Weights& defaults) {
  Weights w = defaults;
  try {
    if (j.contains("qp")) {
      const json& q = j.at("qp");
      if (q.contains("Q")) w.qp.q = weight_from_json(q.at("Q"));
      if (q.contains("R")) w.qp.r = weight_from_json(q.at("R"));
    }
    if (j.contains("l2")) {
      const json& l = j.at("l2");
      if (l.contains("W_S")) w.l2.ws = weight_from_json(l.at("W_S"));
      if (l.contains("W_R")) w.l2.wr = weight_from_json(l.at("W_R"));
      if (l.contains("lambda")) w.l2.lambda = l.at("lambda").get<double>();
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("bad weights: ") + e.what());
  }
  return w;
}

static json vec_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

static Eigen::VectorXd vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

static json gains_to_json(const ControllerGains& k) {
  return {{"K0", matrix_to_json(k.k0)}, {"Kbar", matrix_to_json(k.kbar)}};
}

static ControllerGains gains_from_json(const json& j) {
  return {matrix_from_json(j.at("K0")), matrix_from_json(j.at("Kbar"))};
}

static json box_to_json(const ScheduleBox& b) {
  return {{"lower", vec_to_json(b.lower())}, {"upper", vec_to_json(b.upper())}};
}

static ScheduleBox box_from_json(const json& j) {
  return {vec_from_json(j.at("lower")), vec_from_json(j.at("upper"))};
}

json result_to_json(const SynthesisResult& r) {
  const DataDictionary& d = r.dictionary;
  json j;
  j["format"] = "lpvdd-result";
  j["version"] = 1;
  j["kind"] = to_string(r.kind);
  j["status"] = sdp::to_string(r.status);
  j["dims"] = {{"nx", r.dims.nx}, {"nu", r.dims.nu}, {"np", r.dims.np}, {"nd", r.dims.nd}};
  j["gains"] = gains_to_json(r.gains);
  j["physical_gains"] = gains_to_json(r.physical_gains());
  j["scheduling_map"] = {{"rescaled", r.rescaled},
                         {"center", vec_to_json(r.map.center())},
                         {"half_width", vec_to_json(r.map.half_width())}};
  j["box"] = box_to_json(r.box);
  j["weights"] = weights_to_json(r.weights);
  j["gamma"] = r.kind == ProgramKind::L2Gain ? json(r.certificate.gamma) : json(nullptr);
  j["certificate"] = {{"Z", matrix_to_json(r.certificate.z)},
                      {"Y", matrix_to_json(r.certificate.y)},
                      {"F_Q", matrix_to_json(r.certificate.fq)},
                      {"Xi", matrix_to_json(r.certificate.xi)}};
  j["solver"] = {{"name", r.solver},
                 {"iterations", r.iterations},
                 {"objective", r.objective},
                 {"margin", r.margin},
                 {"projected_successor", r.projected}};
  j["residuals"] = {{"lmi", r.lmi_residual},
                    {"equality", r.equality_residual},
                    {"gain_recovery", r.gain_residual}};
  j["notes"] = r.notes;
  j["dictionary"] = {{"sha256", r.dictionary_hash},
                     {"schedule_box", box_to_json(d.box())},
                     {"u", matrix_to_json(d.u())},
                     {"p", matrix_to_json(d.p())},
                     {"x", matrix_to_json(d.x())}};
  return j;
}

static sdp::SolveStatus status_from_string(const std::string& s) {
  if (s == "optimal") return sdp::SolveStatus::Optimal;
  if (s == "infeasible") return sdp::SolveStatus::Infeasible;
  if (s == "numerical-failure") return sdp::SolveStatus::NumericalFailure;
  fail(ErrorKind::Io, "unknown status '" + s + "' in result file");
}

SynthesisResult result_from_json(const json& j) {
  SynthesisResult r;
  try {
    require(j.value("format", "") == "lpvdd-result", ErrorKind::Io, "not a synthesis result file");
    r.kind = kind_from_string(j.at("kind").get<std::string>());
    r.status = status_from_string(j.at("status").get<std::string>());
    const json& dims = j.at("dims");
    r.dims = {dims.at("nu").get<int>(), dims.at("np").get<int>(), dims.at("nx").get<int>(),
              dims.at("nd").get<int>()};
    r.gains = gains_from_json(j.at("gains"));
    const json& map = j.at("scheduling_map");
    r.rescaled = map.at("rescaled").get<bool>();
    r.map = SchedulingMap(vec_from_json(map.at("center")), vec_from_json(map.at("half_width")));
    r.box = box_from_json(j.at("box"));
    r.weights = weights_from_json(j.at("weights"), Weights{});
    const json& c = j.at("certificate");
    r.certificate.z = matrix_from_json(c.at("Z"));
    r.certificate.y = matrix_from_json(c.at("Y"));
    r.certificate.fq = matrix_from_json(c.at("F_Q"));
    r.certificate.xi = matrix_from_json(c.at("Xi"));
    if (!j.at("gamma").is_null()) r.certificate.gamma = j.at("gamma").get<double>();
    const json& s = j.at("solver");
    r.solver = s.at("name").get<std::string>();
    r.iterations = s.at("iterations").get<int>();
    r.objective = s.at("objective").get<double>();
    r.margin = s.at("margin").get<double>();
    r.projected = s.at("projected_successor").get<bool>();
    const json& res = j.at("residuals");
    r.lmi_residual = res.at("lmi").get<double>();
    r.equality_residual = res.at("equality").get<double>();
    r.gain_residual = res.at("gain_recovery").get<double>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    const json& d = j.at("dictionary");
    r.dictionary = DataDictionary(matrix_from_json(d.at("u")), matrix_from_json(d.at("p")),
                                  matrix_from_json(d.at("x")), box_from_json(d.at("schedule_box")));
    r.dictionary_hash = d.at("sha256").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("malformed result file: ") + e.what());
  }
  require(dictionary_hash(r.dictionary) == r.dictionary_hash, ErrorKind::Consistency,
          "embedded dictionary does not match its recorded hash");
  require(r.dictionary.dims() == r.dims, ErrorKind::Consistency,
          "embedded dictionary does not match the recorded dims");
  return r;
}

void write_result(const std::filesystem::path& path, const SynthesisResult& r) {
  write_text(path, result_to_json(r).dump(2) + "\n");
}

SynthesisResult read_result(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "result file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return result_from_json(j);
}

}  // namespace lpvdd::synthesis
