#include "lpvdd/core/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "lpvdd/core/error.hpp"

namespace lpvdd {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  std::size_t b = text.find_first_not_of(" \t\r");
  std::size_t e = text.find_last_not_of(" \t\r");
  if (b == std::string::npos) fail(ErrorKind::Io, "empty numeric field");
  const char* first = text.data() + b;
  const char* last = text.data() + e + 1;
  if (*first == '+') ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    fail(ErrorKind::Io, "cannot parse number '" + text + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  return p.replace_extension(".json");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string dictionary_csv(const DataDictionary& d) {
  const Dims dm = d.dims();
  std::ostringstream os;
  os << "k";
  for (int i = 1; i <= dm.nu; ++i) os << ",u_" << i;
  for (int i = 1; i <= dm.np; ++i) os << ",p_" << i;
  for (int i = 1; i <= dm.nx; ++i) os << ",x_" << i;
  os << '\n';
  for (int k = 0; k < d.samples(); ++k) {
    os << k + 1;
    for (int i = 0; i < dm.nu; ++i) os << ',' << format_double(d.u()(i, k));
    for (int i = 0; i < dm.np; ++i) os << ',' << format_double(d.p()(i, k));
    for (int i = 0; i < dm.nx; ++i) os << ',' << format_double(d.x()(i, k));
    os << '\n';
  }
  return os.str();
}

static json vec_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

void write_dictionary(const std::filesystem::path& csv, const DataDictionary& d,
                      const DictionaryMeta& meta) {
  write_text(csv, dictionary_csv(d));
  const Dims dm = d.dims();
  json side;
  side["dims"] = {{"nu", dm.nu}, {"np", dm.np}, {"nx", dm.nx}, {"nd", dm.nd}};
  side["schedule_box"] = {{"lower", vec_json(d.box().lower())},
                          {"upper", vec_json(d.box().upper())}};
  side["sampling_period"] = meta.sampling_period;
  json prov = json::object();
  prov["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
  prov["window_offset"] = meta.window_offset ? json(*meta.window_offset) : json(nullptr);
  prov["source"] = meta.source;
  prov["created"] = meta.created;
  prov["sha256"] = dictionary_hash(d);
  side["provenance"] = prov;
  write_text(sidecar_path(csv), side.dump(2) + "\n");
}

static Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

LoadedDictionary read_dictionary(const std::filesystem::path& csv) {
  json side;
  try {
    side = json::parse(read_text(sidecar_path(csv)));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "bad dictionary sidecar '" + sidecar_path(csv).string() +
                            "': " + e.what());
  }
  Dims dm;
  DictionaryMeta meta;
  ScheduleBox box;
  try {
    dm.nu = side.at("dims").at("nu").get<int>();
    dm.np = side.at("dims").at("np").get<int>();
    dm.nx = side.at("dims").at("nx").get<int>();
    dm.nd = side.at("dims").at("nd").get<int>();
    box = ScheduleBox(json_vec(side.at("schedule_box").at("lower")),
                      json_vec(side.at("schedule_box").at("upper")));
    meta.sampling_period = side.at("sampling_period").get<double>();
    const json& prov = side.value("provenance", json::object());
    if (prov.contains("seed") && !prov["seed"].is_null())
      meta.seed = prov["seed"].get<std::uint64_t>();
    if (prov.contains("window_offset") && !prov["window_offset"].is_null())
      meta.window_offset = prov["window_offset"].get<int>();
    meta.source = prov.value("source", "");
    meta.created = prov.value("created", "");
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, std::string("dictionary sidecar is missing fields: ") + e.what());
  }

  std::istringstream is(read_text(csv));
  std::string line;
  if (!std::getline(is, line)) fail(ErrorKind::Io, "dictionary CSV is empty");
  const auto header = split_csv_line(line);
  const std::size_t width = 1 + dm.nu + dm.np + dm.nx;
  require(header.size() == width && header[0] == "k", ErrorKind::Io,
          "dictionary header does not match the sidecar dims");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    require(f.size() == width, ErrorKind::Io,
            "dictionary row " + std::to_string(rows.size() + 1) + " has " +
                std::to_string(f.size()) + " fields, expected " + std::to_string(width));
    std::vector<double> r;
    for (const auto& s : f) r.push_back(parse_double(s));
    rows.push_back(std::move(r));
  }
  require(static_cast<int>(rows.size()) == dm.nd + 1, ErrorKind::Io,
          "dictionary holds " + std::to_string(rows.size()) + " samples, sidecar says " +
              std::to_string(dm.nd + 1));
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd u(dm.nu, n), p(dm.np, n), x(dm.nx, n);
  for (int k = 0; k < n; ++k) {
    int c = 1;
    for (int i = 0; i < dm.nu; ++i) u(i, k) = rows[k][c++];
    for (int i = 0; i < dm.np; ++i) p(i, k) = rows[k][c++];
    for (int i = 0; i < dm.nx; ++i) x(i, k) = rows[k][c++];
  }
  LoadedDictionary out{DataDictionary(u, p, x, box), meta};
  const json& prov = side.value("provenance", json::object());
  if (prov.contains("sha256") && prov["sha256"].is_string())
    require(prov["sha256"].get<std::string>() == dictionary_hash(out.dictionary),
            ErrorKind::Consistency,
            "dictionary '" + csv.string() + "' does not match the hash recorded in its sidecar");
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string dictionary_hash(const DataDictionary& d) { return sha256_hex(dictionary_csv(d)); }

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
  write_text(path, os.str());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::istringstream is(read_text(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> r;
    for (const auto& s : split_csv_line(line)) r.push_back(parse_double(s));
    if (!rows.empty())
      require(r.size() == rows[0].size(), ErrorKind::DimensionMismatch,
              "ragged matrix CSV '" + path.string() + "'");
    rows.push_back(std::move(r));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace lpvdd
