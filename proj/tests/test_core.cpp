#include <doctest.h>

#include <filesystem>
#include <functional>
#include <random>

#include "lpvdd/core/data_matrices.hpp"
#include "lpvdd/core/error.hpp"
#include "lpvdd/core/io.hpp"
#include "lpvdd/core/kron.hpp"
#include "lpvdd/core/linalg.hpp"
#include "lpvdd/core/rescale.hpp"
#include "support/random_lpv.hpp"

using namespace lpvdd;
using lpvdd::testing::random_lpv;
using lpvdd::testing::random_matrix;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an lpvdd::Error");
  return ErrorKind::Io;
}

// Simulated-disc-like dimensions with a random PE dictionary.
DataDictionary small_dictionary(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_lpv(rng, 2, 1, 1).dictionary;
}

}  // namespace

TEST_CASE("kron is scheduling-major") {
  Eigen::VectorXd p(2), v(3);
  p << 2, -1;
  v << 1, 3, 5;
  const Eigen::VectorXd k = kron(p, v);
  REQUIRE(k.size() == 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(k(i * 3 + j) == p(i) * v(j));

  std::mt19937_64 rng(1);
  const Eigen::MatrixXd a = random_matrix(rng, 2, 3), b = random_matrix(rng, 3, 2);
  const Eigen::MatrixXd ab = kron(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c) CHECK(ab(i * 3 + r, j * 2 + c) == a(i, j) * b(r, c));
}

TEST_CASE("lift operators agree with explicit Kronecker products") {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd p = random_matrix(rng, 2, 1), v = random_matrix(rng, 3, 1);
  Eigen::VectorXd expect(9);
  expect << v, kron(p, v);
  CHECK((lift(v, p) - expect).norm() == 0.0);
  CHECK((lift_operator(3, p) * v - expect).norm() < 1e-15);

  Eigen::VectorXd expect2(3 + 6 + 12);
  expect2 << v, kron(p, v), kron(kron(p, p), v);
  CHECK((lift_operator2(3, p) * v - expect2).norm() < 1e-15);
  Eigen::MatrixXd blk(4, 2);
  blk << 1, 0, 1, 0, 0, 1, 0, 1;
  CHECK((blkdiag_repeat(2, Eigen::MatrixXd::Ones(2, 1)) - blk).norm() == 0.0);
}

TEST_CASE("required rank for the disc dimensions") {
  const Dims d{1, 1, 2, 7};
  CHECK(d.required_rank() == 6);
  CHECK(Dims{2, 2, 3, 0}.required_rank() == 15);
  CHECK(Dims{1, 0, 2, 0}.required_rank() == 3);
}

TEST_CASE("schedule box") {
  const ScheduleBox box(Eigen::Vector2d(-1, 0), Eigen::Vector2d(1, 2));
  CHECK(box.vertices().size() == 4);
  CHECK(box.grid(5).size() == 25);
  CHECK(box.contains(Eigen::Vector2d(0.5, 1.0)));
  CHECK_FALSE(box.contains(Eigen::Vector2d(1.5, 1.0)));
  CHECK_FALSE(box.degenerate());

  const ScheduleBox point(Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, 0.3));
  CHECK(point.degenerate());
  REQUIRE(point.grid(100).size() == 1);
  CHECK(point.grid(100)[0](0) == 0.3);

  CHECK(kind_of([] { ScheduleBox(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([] { ScheduleBox(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(2)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("dictionary validation") {
  const ScheduleBox box = ScheduleBox::symmetric_unit(1);
  const Eigen::MatrixXd u = Eigen::MatrixXd::Zero(1, 4), x = Eigen::MatrixXd::Zero(2, 4);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(1, 4);
  CHECK_NOTHROW(DataDictionary(u, p, x, box));
  p(0, 2) = 1.5;
  CHECK(kind_of([&] { DataDictionary(u, p, x, box); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { DataDictionary(u, Eigen::MatrixXd::Zero(1, 3), x, box); }) ==
        ErrorKind::DimensionMismatch);
  Eigen::MatrixXd bad = x;
  bad(0, 0) = std::nan("");
  CHECK(kind_of([&] { DataDictionary(u, Eigen::MatrixXd::Zero(1, 4), bad, box); }) ==
        ErrorKind::InvalidArgument);

  const DataDictionary d(u, Eigen::MatrixXd::Zero(1, 4), x, box);
  const Dims dims = d.dims();
  CHECK(dims.nd == 3);
  CHECK(d.truncated(2).samples() == 3);
}

TEST_CASE("data matrices follow the column-wise definition") {
  const DataDictionary d = small_dictionary(3);
  const DataMatrices m = build_data_matrices(d);
  const int nd = m.dims.nd;
  CHECK(m.g.rows() == 6);
  CHECK(m.g.cols() == nd);
  for (int k = 0; k < nd; ++k) {
    const Eigen::VectorXd p = d.p().col(k), x = d.x().col(k), u = d.u().col(k);
    Eigen::VectorXd col(6);
    col << x, kron(p, x), u, kron(p, u);
    CHECK((m.g.col(k) - col).norm() == 0.0);
    CHECK((m.xnext.col(k) - d.x().col(k + 1)).norm() == 0.0);
  }
}

TEST_CASE("pe_check") {
  const DataDictionary d = small_dictionary(4);
  const PeReport ok = pe_check(build_data_matrices(d));
  CHECK(ok.is_pe);
  CHECK(ok.rank == 6);
  CHECK(std::isfinite(ok.condition_number));
  CHECK(ok.condition_number >= 1.0);

  // Fewer columns than the required rank can never be PE.
  const PeReport short_ = pe_check(build_data_matrices(d.truncated(5)));
  CHECK_FALSE(short_.is_pe);
  CHECK(short_.rank == 5);

  // Zero input and state from rest: G is zero.
  const DataDictionary rest(Eigen::MatrixXd::Zero(1, 9), Eigen::MatrixXd::Zero(1, 9),
                            Eigen::MatrixXd::Zero(2, 9), ScheduleBox::symmetric_unit(1));
  const PeReport none = pe_check(build_data_matrices(rest));
  CHECK_FALSE(none.is_pe);
  CHECK(none.rank == 0);
  CHECK(std::isinf(none.condition_number));
}

TEST_CASE("min-norm solve against the normal-equation formula") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd a = random_matrix(rng, 4, 7), b = random_matrix(rng, 4, 2);
  const Eigen::MatrixXd x = min_norm_solve(a, b);
  const Eigen::MatrixXd oracle = a.transpose() * (a * a.transpose()).inverse() * b;
  CHECK((x - oracle).norm() < 1e-12);
  CHECK((pseudo_inverse(a) * b - oracle).norm() < 1e-12);
}

TEST_CASE("data-driven open-loop step reproduces the generating system") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = random_lpv(rng, 2 + trial % 2, 1 + trial % 2, 1 + trial % 2);
    const DataMatrices m = build_data_matrices(sys.dictionary);
    const DataDrivenModel model(m);
    for (int q = 0; q < 10; ++q) {
      const Eigen::VectorXd x = random_matrix(rng, m.dims.nx, 1);
      const Eigen::VectorXd p = lpvdd::testing::random_in_box(rng, sys.dictionary.box());
      const Eigen::VectorXd u = random_matrix(rng, m.dims.nu, 1);
      const Eigen::VectorXd truth = sys.a(p) * x + sys.b(p) * u;
      CHECK((model.step(x, p, u) - truth).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((lpv_step(sys.a, sys.b, x, p, u) - truth).norm() < 1e-14);
    }
  }
}

TEST_CASE("non-PE dictionary is rejected by the data-driven model") {
  const DataDictionary d = small_dictionary(7).truncated(5);
  CHECK(kind_of([&] { DataDrivenModel m(build_data_matrices(d)); }) == ErrorKind::IllPosed);
}

TEST_CASE("closed-loop matrix evaluates to A(p) + B(p) K(p)") {
  std::mt19937_64 rng(8);
  const auto sys = random_lpv(rng, 3, 2, 2);
  ControllerGains k{random_matrix(rng, 2, 3), random_matrix(rng, 2, 6)};
  const Eigen::MatrixXd mcl = closed_loop_matrix(sys.a, sys.b, k);
  for (int q = 0; q < 10; ++q) {
    const Eigen::VectorXd p = random_matrix(rng, 2, 1);
    const Eigen::MatrixXd direct = sys.a(p) + sys.b(p) * k(p);
    CHECK((mcl * lift_operator2(3, p) - direct).norm() < 1e-12);
  }
  const ClosedLoopMap v = dd_closed_loop_map(build_data_matrices(sys.dictionary), k);
  CHECK((build_data_matrices(sys.dictionary).xnext * v.v - mcl).norm() < 1e-8);
}

TEST_CASE("gains as functions") {
  ControllerGains k{Eigen::RowVector2d(1, 2), Eigen::RowVector4d(3, 4, 5, 6)};
  CHECK(k.np() == 2);
  CHECK((k.block(2) - Eigen::RowVector2d(5, 6)).norm() == 0.0);
  Eigen::Vector2d p(0.5, -1);
  CHECK((k(p) - Eigen::RowVector2d(1 + 1.5 - 5, 2 + 2 - 6)).norm() < 1e-15);
  CHECK((k.as_function()(p) - k(p)).norm() == 0.0);
}

TEST_CASE("scheduling rescale") {
  const ScheduleBox box(Eigen::VectorXd::Constant(1, -0.22), Eigen::VectorXd::Constant(1, 1.0));
  const SchedulingMap map = rescale_scheduling(box);
  CHECK(map.center()(0) == doctest::Approx(0.39));
  CHECK(map.half_width()(0) == doctest::Approx(0.61));
  const ScheduleBox mapped = map.apply(box);
  CHECK(mapped.lower()(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mapped.upper()(0) == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(9);
  const ControllerGains k{random_matrix(rng, 1, 2), random_matrix(rng, 1, 2)};
  const ControllerGains phys = map.pull_back(k);
  for (double p : {-0.22, 0.0, 0.4, 1.0}) {
    const Eigen::VectorXd pv = Eigen::VectorXd::Constant(1, p);
    CHECK((phys(pv) - k(map.apply(pv))).norm() < 1e-13);
    CHECK((map.invert(map.apply(pv)) - pv).norm() < 1e-15);
  }
  CHECK(SchedulingMap::identity(2).is_identity());

  const ScheduleBox point(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.5));
  CHECK(kind_of([&] { rescale_scheduling(point); }) == ErrorKind::InvalidArgument);

  const DataDictionary d = small_dictionary(10);
  const DataDictionary md = map.apply(d);
  CHECK(md.dims() == d.dims());
  CHECK((md.p() - ((d.p().array() - 0.39) / 0.61).matrix()).norm() < 1e-12);
}

TEST_CASE("psd square root and eigenvalue helpers") {
  const Eigen::Matrix2d w = Eigen::Vector2d(4.0, 0.1).asDiagonal();
  const Eigen::MatrixXd s = psd_sqrt(w);
  CHECK((s * s - w).norm() < 1e-15);
  CHECK(s(0, 0) == doctest::Approx(2.0));
  CHECK(min_eigenvalue(w) == doctest::Approx(0.1));
  CHECK(max_eigenvalue(w) == doctest::Approx(4.0));
  Eigen::Matrix2d rot;
  rot << 0, -1.1, 1.1, 0;
  CHECK(spectral_radius(rot) == doctest::Approx(1.1));
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(kind_of([] { parse_double("1.5x"); }) == ErrorKind::Io);
}

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("dictionary files round-trip exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "lpvdd_core_io";
  std::filesystem::create_directories(dir);
  const DataDictionary d = small_dictionary(12);
  DictionaryMeta meta;
  meta.sampling_period = 0.01;
  meta.seed = 42;
  meta.window_offset = 3;
  meta.source = "unit test";
  write_dictionary(dir / "d.csv", d, meta);
  const LoadedDictionary back = read_dictionary(dir / "d.csv");
  CHECK((back.dictionary.x() - d.x()).norm() == 0.0);
  CHECK((back.dictionary.u() - d.u()).norm() == 0.0);
  CHECK((back.dictionary.p() - d.p()).norm() == 0.0);
  CHECK((back.dictionary.box().lower() - d.box().lower()).norm() == 0.0);
  CHECK(back.meta.seed == std::optional<std::uint64_t>(42));
  CHECK(back.meta.window_offset == std::optional<int>(3));
  CHECK(back.meta.sampling_period == 0.01);
  CHECK(dictionary_hash(back.dictionary) == dictionary_hash(d));

  Eigen::MatrixXd x = d.x();
  x(0, 0) += 1e-12;
  CHECK(dictionary_hash(DataDictionary(d.u(), d.p(), x, d.box())) != dictionary_hash(d));

  CHECK(kind_of([&] { read_dictionary(dir / "missing.csv"); }) == ErrorKind::Io);
  write_text(dir / "broken.csv", "k,u_1,p_1,x_1,x_2\n1,0,0,0\n");
  std::filesystem::copy_file(dir / "d.json", dir / "broken.json",
                             std::filesystem::copy_options::overwrite_existing);
  CHECK(kind_of([&] { read_dictionary(dir / "broken.csv"); }) == ErrorKind::Io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("matrix csv round-trip") {
  const auto path = std::filesystem::temp_directory_path() / "lpvdd_matrix.csv";
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd m = random_matrix(rng, 3, 4);
  write_matrix_csv(path, m);
  CHECK((read_matrix_csv(path) - m).norm() == 0.0);
  std::filesystem::remove(path);
}
