#include <catch2/catch_amalgamated.hpp>

#include "isomtau/frames.hpp"
#include "isomtau/verify.hpp"

using namespace isomtau;

TEST_CASE("frame inventory per kind") {
  struct Row {
    PainleveKind kind;
    std::size_t frames;
    std::vector<std::size_t> coeff_counts;
  };
  const std::vector<Row> rows = {
      {PainleveKind::P1, 1, {5}},    {PainleveKind::P2, 1, {3}},
      {PainleveKind::P3, 2, {1, 1}}, {PainleveKind::P4, 2, {2, 0}},
      {PainleveKind::P5, 3, {1, 0, 0}}, {PainleveKind::P6, 3, {0, 0, 1}},
  };
  for (const Row& row : rows) {
    RandomPoint pt = random_admissible(row.kind, 3);
    auto frames = local_frames(row.kind, pt.theta, pt.state, pt.t, max_frame_order(row.kind));
    REQUIRE(frames.size() == row.frames);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      REQUIRE(frames[i].series_coeffs.size() == row.coeff_counts[i]);
      REQUIRE(std::abs(mat_inverse(frames[i].gauge).determinant()) > 0.0);
    }
  }
}

TEST_CASE("order cap is enforced") {
  RandomPoint pt = random_admissible(PainleveKind::P2, 5);
  REQUIRE_THROWS_AS(local_frames(PainleveKind::P2, pt.theta, pt.state, pt.t, 4), ConfigError);
  auto frames = local_frames(PainleveKind::P2, pt.theta, pt.state, pt.t, 1);
  REQUIRE(frames.front().series_coeffs.size() == 1);
}

TEST_CASE("pinned coefficient entries") {
  SECTION("P2: g1(1,1) = -H") {
    RandomPoint pt = random_admissible(PainleveKind::P2, 11);
    Complex h = hamiltonian(PainleveKind::P2, pt.theta, pt.state, pt.t);
    auto frames = local_frames(PainleveKind::P2, pt.theta, pt.state, pt.t, 3);
    REQUIRE(std::abs(frames[0].series_coeffs[0](0, 0) + h) < 1e-14);
  }
  SECTION("P1: g1 is diagonal") {
    RandomPoint pt = random_admissible(PainleveKind::P1, 13);
    auto frames = local_frames(PainleveKind::P1, pt.theta, pt.state, pt.t, 5);
    REQUIRE(std::abs(frames[0].series_coeffs[0](0, 1)) == 0.0);
    REQUIRE(std::abs(frames[0].series_coeffs[0](1, 0)) == 0.0);
  }
  SECTION("P3 at 0: gauge conjugates -t sigma3/2 back to A_{-2}") {
    RandomPoint pt = random_admissible(PainleveKind::P3, 17);
    auto frames = local_frames(PainleveKind::P3, pt.theta, pt.state, pt.t, 1);
    const LocalFrame& f0 = frames[1];
    RationalMatrix a = lax_a(PainleveKind::P3, pt.theta, pt.state, pt.t);
    Mat am2 = a.poles[0].coef[1];
    Mat recon = f0.gauge * (sigma3() * (-pt.t / 2.0)) * mat_inverse(f0.gauge);
    REQUIRE(max_abs(Mat(recon - am2)) < 1e-12 * std::max(1.0, max_abs(am2)));
  }
  SECTION("finite gauges diagonalize their residues") {
    for (PainleveKind kind : {PainleveKind::P4, PainleveKind::P5, PainleveKind::P6}) {
      RandomPoint pt = random_admissible(kind, 19);
      RationalMatrix a = lax_a(kind, pt.theta, pt.state, pt.t);
      for (const LocalFrame& f : local_frames(kind, pt.theta, pt.state, pt.t, 0)) {
        if (f.location.at_infinity) continue;
        Mat res = a.residue_at(f.location.center);
        Mat diag = mat_inverse(f.gauge) * res * f.gauge;
        REQUIRE(std::abs(diag(0, 1)) < 1e-10 * std::max(1.0, max_abs(res)));
        REQUIRE(std::abs(diag(1, 0)) < 1e-10 * std::max(1.0, max_abs(res)));
        REQUIRE(max_abs(Mat(diag - f.exponent.log_coeff)) < 1e-9 * std::max(1.0, max_abs(res)));
      }
    }
  }
}

TEST_CASE("series recursion certifies every supplied coefficient") {
  for (PainleveKind kind : all_kinds()) {
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
      RandomPoint pt = random_admissible(kind, seed);
      ResidualReport r = check_series_recursion_all(kind, pt.theta, pt.state, pt.t);
      INFO(kind_name(kind) << " seed " << seed << " residual " << r.residual);
      REQUIRE(r.passed);
    }
  }
}

TEST_CASE("recursion at a named location") {
  RandomPoint pt = random_admissible(PainleveKind::P3, 33);
  ResidualReport at_inf = check_series_recursion(PainleveKind::P3, pt.theta, pt.state, pt.t,
                                                 SeriesAnchor::infinity());
  ResidualReport at_zero = check_series_recursion(PainleveKind::P3, pt.theta, pt.state, pt.t,
                                                  SeriesAnchor::at(0.0));
  REQUIRE(at_inf.passed);
  REQUIRE(at_zero.passed);
  REQUIRE_THROWS_AS(check_series_recursion(PainleveKind::P3, pt.theta, pt.state, pt.t,
                                           SeriesAnchor::at(1.0)),
                    ConfigError);
}

TEST_CASE("corruption control: perturbed coefficient is flagged") {
  RandomPoint pt = random_admissible(PainleveKind::P2, 37);
  RationalMatrix a = lax_a(PainleveKind::P2, pt.theta, pt.state, pt.t);
  auto frames = local_frames(PainleveKind::P2, pt.theta, pt.state, pt.t, 3);
  LocalFrame f = frames[0];
  auto residual_with_bump = [&](double eps) {
    LocalFrame g = f;
    g.series_coeffs[1](0, 1) += eps;
    auto [full, diag] = detail::frame_recursion_residual(a, g);
    return std::max(full, diag);
  };
  double clean = residual_with_bump(0.0);
  double r3 = residual_with_bump(1e-3);
  double r2 = residual_with_bump(1e-2);
  REQUIRE(clean < 1e-9);
  REQUIRE(r3 >= 1e-4);
  // locally linear response: 10x the perturbation scales the residual >= 5x
  REQUIRE(r2 >= 5.0 * r3);
}

TEST_CASE("frame guards") {
  RandomPoint pt = random_admissible(PainleveKind::P4, 41);
  ThetaParams bad = pt.theta;
  bad.theta0 = 0.0;
  REQUIRE_THROWS_AS(local_frames(PainleveKind::P4, bad, pt.state, pt.t, 2), GuardError);
  RandomPoint p5 = random_admissible(PainleveKind::P5, 43);
  ThetaParams bad5 = p5.theta;
  bad5.theta1 = 0.0;
  REQUIRE_THROWS_AS(local_frames(PainleveKind::P5, bad5, p5.state, p5.t, 1), GuardError);
  RandomPoint p6 = random_admissible(PainleveKind::P6, 47);
  ThetaParams bad6 = p6.theta;
  bad6.theta_t = 0.5;  // 2 theta_t - 1 = 0
  REQUIRE_THROWS_AS(local_frames(PainleveKind::P6, bad6, p6.state, p6.t, 1), GuardError);
}
