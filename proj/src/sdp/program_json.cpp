#include "lpvdd/sdp/program_json.hpp"

#include <json.hpp>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"

namespace lpvdd::sdp {

using nlohmann::json;

namespace {

json triplets(const Eigen::MatrixXd& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) entries.push_back({i, j, m(i, j)});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Eigen::MatrixXd from_triplets(const json& j) {
  const Eigen::Index r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  require(r >= 0 && c >= 0, ErrorKind::Io, "negative matrix size in program file");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, c);
  for (const json& e : j.at("entries")) {
    const auto i = e.at(0).get<Eigen::Index>(), k = e.at(1).get<Eigen::Index>();
    require(i >= 0 && i < r && k >= 0 && k < c, ErrorKind::Io, "triplet index out of range");
    m(i, k) += e.at(2).get<double>();
  }
  return m;
}

json dump_expr(const AffineMatrixExpr& e) {
  json terms = json::array();
  for (const Term& t : e.terms())
    terms.push_back({{"var", t.var},
                     {"left", triplets(t.left)},
                     {"right", triplets(t.right)},
                     {"transposed", t.transposed}});
  return {{"rows", e.rows()}, {"cols", e.cols()}, {"constant", triplets(e.constant())},
          {"terms", terms}};
}

AffineMatrixExpr load_expr(const json& j, const ConicProgram& p) {
  AffineMatrixExpr e(from_triplets(j.at("constant")));
  require(e.rows() == j.at("rows").get<Eigen::Index>() && e.cols() == j.at("cols").get<Eigen::Index>(),
          ErrorKind::Io, "expression shape disagrees with its constant");
  for (const json& t : j.at("terms")) {
    const int id = t.at("var").get<int>();
    require(id >= 0 && id < static_cast<int>(p.variables().size()), ErrorKind::Io,
            "term refers to an undeclared variable");
    e.add_term(from_triplets(t.at("left")), p.variable(id), from_triplets(t.at("right")),
               t.at("transposed").get<bool>());
  }
  return e;
}

}  // namespace

std::string dump_program(const ConicProgram& program) {
  json vars = json::array();
  for (const MatrixVariable& v : program.variables())
    vars.push_back({{"id", v.id}, {"name", v.name}, {"rows", v.rows}, {"cols", v.cols},
                    {"symmetric", v.symmetric}});
  json lmis = json::array();
  for (const LmiConstraint& c : program.lmis())
    lmis.push_back({{"name", c.name}, {"sense", to_string(c.sense)}, {"margin", c.margin},
                    {"expr", dump_expr(c.expr)}});
  json eqs = json::array();
  for (const EqualityConstraint& c : program.equalities())
    eqs.push_back({{"name", c.name}, {"expr", dump_expr(c.expr)}});
  json weights = json::array();
  for (const auto& [id, w] : program.objective().weights)
    weights.push_back({{"var", id}, {"weight", triplets(w)}});
  const json out = {{"format", "lpvdd-program"},
                    {"version", 1},
                    {"variables", vars},
                    {"lmis", lmis},
                    {"equalities", eqs},
                    {"objective", {{"constant", program.objective().constant}, {"weights", weights}}}};
  return out.dump(1) + "\n";
}

ConicProgram load_program(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    require(j.value("format", "") == "lpvdd-program", ErrorKind::Io, "not a program file");
    ConicProgram p;
    for (const json& v : j.at("variables")) {
      const MatrixVariable mv = p.add_variable(v.at("rows").get<int>(), v.at("cols").get<int>(),
                                               v.at("symmetric").get<bool>(),
                                               v.value("name", std::string()));
      require(mv.id == v.at("id").get<int>(), ErrorKind::Io, "variable ids must be 0, 1, 2, ...");
    }
    for (const json& c : j.at("lmis"))
      p.add_lmi(load_expr(c.at("expr"), p), sense_from_string(c.at("sense").get<std::string>()),
                c.value("name", std::string()), c.at("margin").get<double>());
    for (const json& c : j.at("equalities"))
      p.add_equality(load_expr(c.at("expr"), p), c.value("name", std::string()));
    const json& obj = j.at("objective");
    p.add_objective_constant(obj.at("constant").get<double>());
    for (const json& w : obj.at("weights")) {
      const int id = w.at("var").get<int>();
      require(id >= 0 && id < static_cast<int>(p.variables().size()), ErrorKind::Io,
              "objective refers to an undeclared variable");
      p.add_objective(p.variable(id), from_triplets(w.at("weight")));
    }
    return p;
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("malformed program file: ") + e.what());
  }
}

void write_program(const std::filesystem::path& path, const ConicProgram& program) {
  write_text(path, dump_program(program));
}

ConicProgram read_program(const std::filesystem::path& path) { return load_program(read_text(path)); }

}  // namespace lpvdd::sdp
