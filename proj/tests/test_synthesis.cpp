#include <doctest.h>

#include <filesystem>
#include <functional>
#include <random>

#include "lpvdd/core/error.hpp"
#include "lpvdd/core/kron.hpp"
#include "lpvdd/core/linalg.hpp"
#include "lpvdd/plant/collect.hpp"
#include "lpvdd/synthesis/result_io.hpp"
#include "lpvdd/synthesis/synthesis.hpp"
#include "support/random_lpv.hpp"

using namespace lpvdd;
using namespace lpvdd::synthesis;
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

const Dims kDisc{1, 1, 2, 7};

Eigen::MatrixXd blkdiag(const std::vector<Eigen::MatrixXd>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) r += b.rows(), c += b.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

DataDictionary disc_dictionary() {
  plant::DiscParams prm;
  plant::ExcitationSpec ex;
  const auto u = plant::generate_excitation(ex.seed, ex.samples(prm.ts), ex.cutoff_hz,
                                            ex.amplitude, prm.ts);
  const auto log = plant::simulate_open_loop(prm, u);
  return plant::extract_window(log, plant::best_window(log, 7));
}

}  // namespace

TEST_CASE("LFT block sizes for the disc") {
  const LftBlocks qp = lft_blocks(kDisc, ProgramKind::QuadraticPerformance);
  CHECK(qp.nw == 4);
  CHECK(qp.ne == 3);
  CHECK(qp.l11.rows() == 4);
  CHECK(qp.l11.norm() == 0.0);
  CHECK(qp.r1().rows() == 8);
  CHECK(qp.r1().cols() == 4 + 4 + 3);
  CHECK(qp.r2().rows() == 11);
  CHECK(qp.r2().cols() == 11);

  const LftBlocks l2 = lft_blocks(kDisc, ProgramKind::L2Gain);
  CHECK(l2.ne == 5);
  CHECK(l2.r1().cols() == 4 + 4 + 5);
  CHECK(l2.r2().rows() == 13);
}

TEST_CASE("LFT realizes blkdiag(Pi, Pi, I)") {
  std::mt19937_64 rng(1);
  for (const Dims d : {kDisc, Dims{2, 2, 3, 20}, Dims{1, 3, 1, 20}})
    for (const ProgramKind k : {ProgramKind::QuadraticPerformance, ProgramKind::L2Gain}) {
      const LftBlocks b = lft_blocks(d, k);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd p = random_matrix(rng, d.np, 1);
        const Eigen::MatrixXd pi = lift_operator(d.nx, p);
        const Eigen::MatrixXd phi = b.l22 + b.l21 * delta(p, d.nx) * b.l12;
        const Eigen::MatrixXd expect =
            blkdiag({pi, pi, Eigen::MatrixXd::Identity(b.ne, b.ne)});
        CHECK((phi - expect).norm() < 1e-14);
        // With L11 = 0 the lower LFT needs no inverse.
        CHECK(b.l11.norm() == 0.0);
      }
    }
}

TEST_CASE("F_Q expansion") {
  std::mt19937_64 rng(2);
  SUBCASE("n_p = 0 leaves F_Q unchanged") {
    const Dims d{1, 0, 2, 5};
    const Eigen::MatrixXd fq = random_matrix(rng, 5, 2);
    CHECK((expand_fq(fq, d) - fq).norm() == 0.0);
  }
  SUBCASE("n_p = 1 layout") {
    const Eigen::MatrixXd fq = random_matrix(rng, 14, 4);
    const Eigen::MatrixXd f = expand_fq(fq, kDisc);
    REQUIRE(f.cols() == 6);
    CHECK((f.leftCols(2) - fq.block(0, 0, 7, 2)).norm() == 0.0);
    CHECK((f.middleCols(2, 2) - (fq.block(0, 2, 7, 2) + fq.block(7, 0, 7, 2))).norm() == 0.0);
    CHECK((f.rightCols(2) - fq.block(7, 2, 7, 2)).norm() == 0.0);
  }
  SUBCASE("defining identity at random p") {
    for (int trial = 0; trial < 20; ++trial) {
      const Dims d{1 + trial % 2, 1 + trial % 3, 2 + trial % 2, 6 + trial % 4};
      const Eigen::MatrixXd fq = random_matrix(rng, d.nd * (1 + d.np), d.nx * (1 + d.np));
      const Eigen::MatrixXd f = expand_fq(fq, d);
      for (int q = 0; q < 20; ++q) {
        const Eigen::VectorXd p = random_matrix(rng, d.np, 1);
        const Eigen::MatrixXd lhs = f * lift_operator2(d.nx, p);
        const Eigen::MatrixXd rhs =
            lift_operator(d.nd, p).transpose() * fq * lift_operator(d.nx, p);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
  SUBCASE("symbolic and numeric expansions agree") {
    sdp::ConicProgram prog;
    const Dims d{1, 2, 2, 8};
    const auto v = prog.add_variable(d.nd * 3, d.nx * 3, false);
    const Eigen::MatrixXd fq = random_matrix(rng, d.nd * 3, d.nx * 3);
    CHECK((expand_fq(v, d).evaluate({fq}) - expand_fq(fq, d)).norm() < 1e-13);
  }
  CHECK(kind_of([] { expand_fq(Eigen::MatrixXd::Zero(13, 4), kDisc); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("blocked certificate equals the consistency matrix scaled by Z") {
  std::mt19937_64 rng(3);
  const Dims d{2, 2, 3, 0};
  const Eigen::MatrixXd a = random_matrix(rng, 3, 3);
  const Eigen::MatrixXd z = a * a.transpose() + Eigen::MatrixXd::Identity(3, 3);
  const ControllerGains k{random_matrix(rng, 2, 3), random_matrix(rng, 2, 6)};
  Eigen::MatrixXd y(2, 9);
  y << k.k0 * z, k.kbar * blkdiag_repeat(2, z);
  const Eigen::MatrixXd expect =
      consistency_matrix(k) * blkdiag({z, blkdiag_repeat(2, z), blkdiag_repeat(4, z)});
  CHECK((blocked_certificate(z, y, d) - expect).norm() < 1e-12);
}

TEST_CASE("weights validation") {
  QuadraticWeights q{Eigen::Vector2d(1.0, -0.1).asDiagonal(), Eigen::MatrixXd::Ones(1, 1)};
  CHECK(kind_of([&] { q.validate(2, 1); }) == ErrorKind::InvalidArgument);
  q.q = Eigen::Matrix2d::Zero();
  CHECK_NOTHROW(q.validate(2, 1));
  q.r = Eigen::MatrixXd::Zero(1, 1);
  CHECK(kind_of([&] { q.validate(2, 1); }) == ErrorKind::InvalidArgument);
  q.r = Eigen::MatrixXd::Ones(2, 2);
  CHECK(kind_of([&] { q.validate(2, 1); }) == ErrorKind::DimensionMismatch);
  L2Weights l{Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Ones(1, 1), -1.0};
  CHECK(kind_of([&] { l.validate(2, 1); }) == ErrorKind::InvalidArgument);
  const Weights w = Weights::disc_defaults();
  CHECK(w.qp.q(0, 0) == 4.0);
  CHECK(w.qp.q(1, 1) == 0.1);
  CHECK(w.qp.r(0, 0) == 3.5);
  CHECK(w.l2.ws(0, 0) == 1.5e-2);
  CHECK(w.l2.ws(1, 1) == 2e-5);
  CHECK(w.l2.wr(0, 0) == 3.06e-3);
  CHECK(w.l2.lambda == 1e-6);
}

TEST_CASE("program structure for the disc dimensions") {
  std::mt19937_64 rng(4);
  const auto sys = random_lpv(rng, 2, 1, 1, 1);  // N_d = 7
  const DataMatrices m = build_data_matrices(sys.dictionary);
  REQUIRE(m.dims.nd == 7);
  const ScheduleBox box = ScheduleBox::symmetric_unit(1);

  const SynthesisProgram qp =
      build_program(ProgramKind::QuadraticPerformance, m, Weights::disc_defaults(), box);
  CHECK(qp.xi.rows == 8);
  CHECK(qp.fq.rows == 14);
  CHECK(qp.fq.cols == 4);
  CHECK(qp.y.cols == 4);
  CHECK_FALSE(qp.gamma.has_value());
  int vertices = 0;
  for (const auto& c : qp.program.lmis()) {
    if (c.name == "performance") CHECK(c.expr.rows() == 11);
    if (c.name.rfind("multiplier vertex", 0) == 0) {
      ++vertices;
      CHECK(c.expr.rows() == 4);
    }
  }
  CHECK(vertices == 2);
  CHECK(qp.program.scalar_equation_count() == 36);

  const SynthesisProgram l2 = build_program(ProgramKind::L2Gain, m, Weights::disc_defaults(), box);
  CHECK(l2.gamma.has_value());
  bool found = false;
  for (const auto& c : l2.program.lmis())
    if (c.name == "performance") {
      found = true;
      CHECK(c.expr.rows() == 13);
    }
  CHECK(found);

  // Q = 0 keeps the structure.
  Weights w0 = Weights::disc_defaults();
  w0.qp.q = Eigen::Matrix2d::Zero();
  w0.qp.r = Eigen::MatrixXd::Identity(1, 1);
  CHECK_NOTHROW(build_program(ProgramKind::QuadraticPerformance, m, w0, box));

  const DataMatrices short_m = build_data_matrices(sys.dictionary.truncated(5));
  CHECK(kind_of([&] {
          build_program(ProgramKind::QuadraticPerformance, short_m, Weights::disc_defaults(), box);
        }) == ErrorKind::IllPosed);
}

TEST_CASE("gain recovery") {
  Eigen::MatrixXd y(1, 4);
  y << 1, 2, 3, 4;
  const ControllerGains k = recover_gains(Eigen::Matrix2d::Identity(), y, 1);
  CHECK((k.k0 - y.leftCols(2)).norm() == 0.0);
  CHECK((k.kbar - y.rightCols(2)).norm() == 0.0);

  std::mt19937_64 rng(5);
  const Eigen::MatrixXd a = random_matrix(rng, 2, 2);
  const Eigen::MatrixXd z = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(2, 2);
  double res = 1.0;
  recover_gains(z, random_matrix(rng, 1, 4), 1, &res);
  CHECK(res <= 1e-10);

  Eigen::Matrix2d sing;
  sing << 1, 1, 1, 1;
  CHECK(kind_of([&] { recover_gains(sing, y, 1); }) == ErrorKind::IllPosed);
}

TEST_CASE("synthesis on random LPV systems: data and model certification agree") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 4; ++trial) {
    const auto sys = random_lpv(rng, 2, 1, 1 + trial % 2);
    for (const ProgramKind kind : {ProgramKind::QuadraticPerformance, ProgramKind::L2Gain}) {
      Weights w;
      w.qp = {Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Identity(1, 1)};
      w.l2 = {Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Identity(1, 1), 1e-3};
      const SynthesisResult r = synthesize(kind, sys.dictionary, w);
      REQUIRE(r.status == sdp::SolveStatus::Optimal);
      const VerificationReport v = verify_certificate(r);
      for (const auto& f : v.failures) MESSAGE(f);
      CHECK(v.passed);
      const ControllerGains g = r.physical_gains();
      const FrozenStability model = certify_closed_loop(sys.a, sys.b, g, sys.dictionary.box(), 7);
      const FrozenStability data = certify_closed_loop(r.data(), r.gains, r.box, 7);
      CHECK(model.stable);
      CHECK(model.max_radius == doctest::Approx(data.max_radius).epsilon(1e-8));
      if (kind == ProgramKind::L2Gain) CHECK(r.certificate.gamma > 0.0);
    }
  }
}

TEST_CASE("unstabilizable system is reported infeasible") {
  std::mt19937_64 rng(7);
  auto sys = random_lpv(rng, 2, 1, 1);
  // Rebuild the data with B = 0 and an unstable A.
  Eigen::Matrix2d a0;
  a0 << 1.5, 0.0, 0.0, 0.5;
  const DataDictionary& d = sys.dictionary;
  Eigen::MatrixXd x = d.x();
  for (int k = 0; k + 1 < d.samples(); ++k) x.col(k + 1) = a0 * x.col(k);
  const DataDictionary dead(d.u(), d.p(), x, d.box());
  try {
    synthesize(ProgramKind::QuadraticPerformance, dead, Weights::disc_defaults());
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
    CHECK(std::string(e.what()).find("performance") != std::string::npos);
  }
}

TEST_CASE("frozen-p certification") {
  // A(p) has eigenvalue 1.1 at p = 1.
  std::vector<Eigen::MatrixXd> ac{Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.6)};
  std::vector<Eigen::MatrixXd> bc{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1)};
  const AffineMatrixFunction a(ac), b(bc);
  const ControllerGains zero{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};
  const FrozenStability f = certify_closed_loop(a, b, zero, ScheduleBox::symmetric_unit(1), 11);
  CHECK(f.max_radius == doctest::Approx(1.1));
  CHECK_FALSE(f.stable);
  CHECK(f.worst_p(0) == doctest::Approx(1.0));
  CHECK(f.grid.size() == 11);

  const ScheduleBox point(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 0.0));
  const FrozenStability g = certify_closed_loop(a, b, zero, point, 100);
  CHECK(g.degenerate_box);
  CHECK(g.grid.size() == 1);
  CHECK(g.max_radius == doctest::Approx(0.5));
  CHECK(kind_of([&] { certify_closed_loop(a, b, zero, point, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("disc dictionary: both programs, re-verification, coordinates") {
  const DataDictionary d = disc_dictionary();
  const Weights w = Weights::disc_defaults();
  const SynthesisResult qp = synthesize(ProgramKind::QuadraticPerformance, d, w);
  CHECK(qp.status == sdp::SolveStatus::Optimal);
  CHECK(qp.rescaled);
  CHECK(verify_certificate(qp).passed);
  CHECK(qp.gain_residual <= 1e-10);

  const SynthesisResult l2 = synthesize(ProgramKind::L2Gain, d, w);
  CHECK(l2.status == sdp::SolveStatus::Optimal);
  CHECK(std::isfinite(l2.certificate.gamma));
  CHECK(l2.certificate.gamma > 0.0);
  CHECK(verify_certificate(l2).passed);

  // The scheduling change is an invertible affine map absorbed by Ξ, so the
  // optimum does not depend on the coordinates.
  SynthesisOptions raw;
  raw.rescale = false;
  const SynthesisResult qp_raw = synthesize(ProgramKind::QuadraticPerformance, d, w, raw);
  CHECK(qp_raw.map.is_identity());
  CHECK(qp_raw.objective == doctest::Approx(qp.objective).epsilon(1e-4));
}

TEST_CASE("tampered certificates fail re-verification") {
  std::mt19937_64 rng(8);
  const auto sys = random_lpv(rng, 2, 1, 1);
  SynthesisResult r = synthesize(ProgramKind::QuadraticPerformance, sys.dictionary, Weights::disc_defaults());
  REQUIRE(verify_certificate(r).passed);

  SynthesisResult bad_xi = r;
  bad_xi.certificate.xi.bottomRightCorner(4, 4) *= -1.0;
  CHECK_FALSE(verify_certificate(bad_xi).passed);

  SynthesisResult bad_gain = r;
  bad_gain.gains.k0(0, 0) += 0.1;
  const VerificationReport v = verify_certificate(bad_gain);
  CHECK_FALSE(v.passed);
  CHECK(v.gain_residual > 1e-10);

  SynthesisResult bad_fq = r;
  bad_fq.certificate.fq(0, 0) += 1e-3;
  CHECK(verify_certificate(bad_fq).equality_fro > 1e-7);
}

TEST_CASE("result JSON round-trip") {
  std::mt19937_64 rng(9);
  const auto sys = random_lpv(rng, 2, 1, 1);
  const SynthesisResult r = synthesize(ProgramKind::L2Gain, sys.dictionary, Weights::disc_defaults());
  const auto path = std::filesystem::temp_directory_path() / "lpvdd_result.json";
  write_result(path, r);
  const SynthesisResult back = read_result(path);
  CHECK(back.kind == r.kind);
  CHECK((back.gains.k0 - r.gains.k0).norm() == 0.0);
  CHECK((back.gains.kbar - r.gains.kbar).norm() == 0.0);
  CHECK((back.certificate.xi - r.certificate.xi).norm() == 0.0);
  CHECK(back.certificate.gamma == r.certificate.gamma);
  CHECK(back.dictionary_hash == r.dictionary_hash);
  CHECK(verify_certificate(back).passed);

  auto j = result_to_json(r);
  j["dictionary"]["x"][0][0] = 123.0;
  CHECK(kind_of([&] { result_from_json(j); }) == ErrorKind::Consistency);
  CHECK(kind_of([&] { result_from_json(nlohmann::json::object()); }) == ErrorKind::Io);
  std::filesystem::remove(path);
}

TEST_CASE("weights from config accept diagonals, scalars and full matrices") {
  const auto j = nlohmann::json::parse(R"({"qp": {"Q": [1, 2], "R": 0.5},
                                          "l2": {"W_S": [[1, 0.1], [0.1, 1]], "lambda": 0}})");
  const Weights w = weights_from_json(j, Weights::disc_defaults());
  CHECK(w.qp.q(1, 1) == 2.0);
  CHECK(w.qp.q(0, 1) == 0.0);
  CHECK(w.qp.r(0, 0) == 0.5);
  CHECK(w.l2.ws(0, 1) == 0.1);
  CHECK(w.l2.wr(0, 0) == 3.06e-3);
  CHECK(w.l2.lambda == 0.0);
}
