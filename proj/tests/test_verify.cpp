#include <catch2/catch_amalgamated.hpp>

#include "isomtau/verify.hpp"

using namespace isomtau;

namespace {

PathSpec unit_path(const RandomPoint& pt) {
  return PathSpec::painleve({pt.t, pt.t + Complex(0.8, 0.6)});
}

Tolerances tight_tol() {
  Tolerances tol;
  tol.rel_tol = 1e-12;
  tol.abs_tol = 1e-14;
  return tol;
}

std::vector<Complex> z_ring(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<Complex> zs;
  for (int i = 0; i < count; ++i) zs.push_back(rng.box(2.8, 4.4, 0.8, 2.0));
  return zs;
}

}  // namespace

TEST_CASE("lax compatibility on-shell") {
  for (PainleveKind kind : all_kinds()) {
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
      RandomPoint pt = random_admissible(kind, seed);
      ResidualReport r =
          check_lax_compatibility(kind, pt.theta, pt.state, pt.t, z_ring(seed, 6), 1e-6);
      INFO(kind_name(kind) << " seed " << seed << " residual " << r.residual);
      REQUIRE(r.passed);
    }
  }
}

TEST_CASE("lax corruption controls") {
  RandomPoint pt = random_admissible(PainleveKind::P2, 57);
  std::vector<Complex> zs = z_ring(3, 4);

  SECTION("sign-flipped pdot in the advance breaks compatibility at O(1)") {
    const double h = 1e-4;
    auto euler_corrupt = [&](double hh) {
      ExtendedState v = vector_field(PainleveKind::P2, pt.theta, pt.state, pt.t);
      v.p = -v.p;
      return detail::add_scaled(PainleveKind::P2, pt.state, v, hh);
    };
    RationalMatrix af = lax_a(PainleveKind::P2, pt.theta, euler_corrupt(h), pt.t + h);
    RationalMatrix ab = lax_a(PainleveKind::P2, pt.theta, euler_corrupt(-h), pt.t - h);
    RationalMatrix b = lax_b(PainleveKind::P2, pt.theta, pt.state, pt.t);
    RationalMatrix dbdz = b.derivative();
    RationalMatrix a = lax_a(PainleveKind::P2, pt.theta, pt.state, pt.t);
    double worst = 0.0;
    for (Complex z : zs) {
      Mat da = (af.eval(z) - ab.eval(z)) / (2.0 * h);
      Mat az = a.eval(z), bz = b.eval(z);
      worst = std::max(worst, max_abs(Mat(da - dbdz.eval(z) - (bz * az - az * bz))));
    }
    REQUIRE(worst > 1e-2);
  }

  SECTION("theta perturbed between A and B scales linearly") {
    auto residual_with = [&](double eps) {
      ThetaParams shifted = pt.theta;
      shifted.theta_inf += eps;
      const double h = 1e-6;
      ExtendedState fwd = detail::rk4_advance(PainleveKind::P2, pt.theta, pt.state, pt.t, h);
      ExtendedState bwd = detail::rk4_advance(PainleveKind::P2, pt.theta, pt.state, pt.t, -h);
      RationalMatrix af = lax_a(PainleveKind::P2, shifted, fwd, pt.t + h);
      RationalMatrix ab = lax_a(PainleveKind::P2, shifted, bwd, pt.t - h);
      RationalMatrix a = lax_a(PainleveKind::P2, shifted, pt.state, pt.t);
      RationalMatrix b = lax_b(PainleveKind::P2, pt.theta, pt.state, pt.t);
      RationalMatrix dbdz = b.derivative();
      double worst = 0.0;
      for (Complex z : zs) {
        Mat da = (af.eval(z) - ab.eval(z)) / (2.0 * h);
        Mat az = a.eval(z), bz = b.eval(z);
        worst = std::max(worst, max_abs(Mat(da - dbdz.eval(z) - (bz * az - az * bz))));
      }
      return worst;
    };
    double r3 = residual_with(1e-3);
    double r2 = residual_with(1e-2);
    REQUIRE(r3 > 1e-4);
    REQUIRE(r2 >= 5.0 * r3);
  }
}

TEST_CASE("hamilton corruption control") {
  RandomPoint pt = random_admissible(PainleveKind::P2, 59);
  auto residual_with = [&](double eps) {
    // gradient of H + eps*q against the true field: pdot picks up eps
    ExtendedState v = vector_field(PainleveKind::P2, pt.theta, pt.state, pt.t);
    auto ham_c = [&](const ExtendedState& s) {
      return hamiltonian(PainleveKind::P2, pt.theta, s, pt.t) + eps * s.q;
    };
    const double h = 1e-6;
    ExtendedState qp = pt.state, qm = pt.state;
    qp.q += h;
    qm.q -= h;
    Complex grad_q = (ham_c(qp) - ham_c(qm)) / (2.0 * h);
    return std::abs(v.p + grad_q);
  };
  REQUIRE(residual_with(1.0) > 0.5);
  double r3 = residual_with(1e-3);
  double r2 = residual_with(1e-2);
  REQUIRE(r2 >= 5.0 * r3);
}

TEST_CASE("action identity along unit paths") {
  for (PainleveKind kind : all_kinds()) {
    int successes = 0;
    for (std::uint64_t seed = 60; seed < 80 && successes < 4; ++seed) {
      RandomPoint pt = random_admissible(kind, seed);
      try {
        ResidualReport r =
            check_action_identity(kind, pt.theta, pt.state, unit_path(pt), tight_tol());
        INFO(kind_name(kind) << " seed " << seed << " residual " << r.residual);
        REQUIRE(r.passed);
        ++successes;
      } catch (const IntegrationError&) {
        continue;  // movable pole on this draw
      }
    }
    REQUIRE(successes == 4);
  }
}

TEST_CASE("action identity trivially zero on empty paths") {
  RandomPoint pt = random_admissible(PainleveKind::P5, 81);
  PathSpec path = PathSpec::painleve({pt.t, pt.t});
  ResidualReport r = check_action_identity(PainleveKind::P5, pt.theta, pt.state, path, {});
  REQUIRE(r.residual == 0.0);
}

TEST_CASE("gamma discrimination for P1") {
  int tested = 0;
  for (std::uint64_t seed = 82; seed < 100 && tested < 3; ++seed) {
    RandomPoint pt = random_admissible(PainleveKind::P1, seed);
    try {
      IntegrationResult run =
          integrate_path(PainleveKind::P1, pt.theta, pt.state, unit_path(pt), tight_tol());
      if (std::abs(run.delta_action) <= 1e-2) continue;
      ResidualReport good =
          check_action_identity(PainleveKind::P1, pt.theta, pt.state, unit_path(pt), tight_tol());
      ResidualReport forced = check_action_identity(PainleveKind::P1, pt.theta, pt.state,
                                                    unit_path(pt), tight_tol(), 1.0, 1e-7);
      REQUIRE(good.residual < 1e-8);
      REQUIRE(forced.residual > 1e-3);
      ++tested;
    } catch (const IntegrationError&) {
      continue;
    }
  }
  REQUIRE(tested == 3);
}

TEST_CASE("variational identity") {
  SECTION("zero direction gives zero") {
    RandomPoint pt = random_admissible(PainleveKind::P2, 101);
    ResidualReport r = check_variational_identity(PainleveKind::P2, pt.theta, pt.state,
                                                  unit_path(pt), 0.0, 0.0, 1e-5, tight_tol());
    REQUIRE(r.residual < 1e-14);
  }
  SECTION("P2 and P6 random runs") {
    for (PainleveKind kind : {PainleveKind::P2, PainleveKind::P6}) {
      int successes = 0;
      for (std::uint64_t seed = 102; seed < 122 && successes < 3; ++seed) {
        RandomPoint pt = random_admissible(kind, seed);
        Rng rng(seed);
        Complex dq = rng.box(-1.0, 1.0, -1.0, 1.0);
        Complex dp = rng.box(-1.0, 1.0, -1.0, 1.0);
        try {
          ResidualReport r = check_variational_identity(kind, pt.theta, pt.state, unit_path(pt),
                                                        dq, dp, 1e-5, tight_tol(), 1e-5);
          INFO(kind_name(kind) << " seed " << seed << " residual " << r.residual);
          REQUIRE(r.passed);
          ++successes;
        } catch (const IntegrationError&) {
          continue;
        }
      }
      REQUIRE(successes == 3);
    }
  }
  SECTION("omitting the dG boundary term is detected") {
    int done = 0;
    for (std::uint64_t seed = 123; seed < 140 && done < 1; ++seed) {
      RandomPoint pt = random_admissible(PainleveKind::P2, seed);
      const double h = 1e-5;
      ExtendedState plus = pt.state, minus = pt.state;
      plus.q += h;
      minus.q -= h;
      try {
        IntegrationResult rp =
            integrate_path(PainleveKind::P2, pt.theta, plus, unit_path(pt), tight_tol());
        IntegrationResult rm =
            integrate_path(PainleveKind::P2, pt.theta, minus, unit_path(pt), tight_tol());
        Complex dg = ((rp.g_end - rm.g_end) - (rp.g_start - rm.g_start)) / (2.0 * h);
        if (std::abs(dg) < 1e-2) continue;
        Complex lhs = (rp.delta_ln_tau - rm.delta_ln_tau) / (2.0 * h);
        ExtendedState ep = unpack_state(PainleveKind::P2, rp.y_nodes.back());
        ExtendedState em = unpack_state(PainleveKind::P2, rm.y_nodes.back());
        Complex boundary = (ep.p + em.p) / 2.0 * (ep.q - em.q) / (2.0 * h) - pt.state.p;
        double without_dg = std::abs(lhs - boundary);
        REQUIRE(without_dg > 0.3 * std::abs(dg));
        ++done;
      } catch (const IntegrationError&) {
        continue;
      }
    }
    REQUIRE(done == 1);
  }
}

TEST_CASE("tau log-derivative certification") {
  for (PainleveKind kind : all_kinds()) {
    int successes = 0;
    for (std::uint64_t seed = 141; seed < 160 && successes < 2; ++seed) {
      RandomPoint pt = random_admissible(kind, seed);
      try {
        IntegrationResult probe =
            integrate_path(kind, pt.theta, pt.state, unit_path(pt), tight_tol());
        if (!trajectory_is_tame(probe)) continue;
        ResidualReport r =
            check_tau_log_derivative(kind, pt.theta, pt.state, unit_path(pt), tight_tol());
        INFO(kind_name(kind) << " seed " << seed << " residual " << r.residual);
        REQUIRE(r.passed);
        ++successes;
      } catch (const IntegrationError&) {
        continue;
      }
    }
    REQUIRE(successes == 2);
  }
}

TEST_CASE("tau density corruption: dropping P4's q/2 is visible") {
  int done = 0;
  for (std::uint64_t seed = 161; seed < 175 && done < 1; ++seed) {
    RandomPoint pt = random_admissible(PainleveKind::P4, seed);
    try {
      IntegrationResult r =
          integrate_path(PainleveKind::P4, pt.theta, pt.state, unit_path(pt), tight_tol());
      if (!trajectory_is_tame(r)) continue;
      double s_mid = 0.5 * r.s_nodes.back();
      const double delta = r.s_nodes.back() / 500.0;
      auto acc_at = [&](double ss) {
        return r.state_at_s(ss)[static_cast<std::size_t>(r.state_size)];
      };
      Complex deriv = (-acc_at(s_mid + 2 * delta) + 8.0 * acc_at(s_mid + delta) -
                       8.0 * acc_at(s_mid - delta) + acc_at(s_mid - 2 * delta)) /
                      (12.0 * delta);
      std::vector<Complex> point, dir;
      r.path.locate(s_mid, point, dir);
      ExtendedState st = unpack_state(PainleveKind::P4, r.state_at_s(s_mid));
      Complex h_only = hamiltonian(PainleveKind::P4, pt.theta, st, point[0]) * dir[0];
      double miss = std::abs(deriv - h_only);
      double expected = std::abs(st.q / 2.0);
      REQUIRE(miss > 0.5 * expected);
      REQUIRE(miss < 2.0 * expected + 1e-6);
      ++done;
    } catch (const IntegrationError&) {
      continue;
    }
  }
  REQUIRE(done == 1);
}

TEST_CASE("schlesinger suite") {
  SECTION("commuting residues: everything frozen on a loop") {
    SchlesingerModel m;
    m.mat_dim = 2;
    m.pole_count = 2;
    m.thetas = {{Complex(1.0), Complex(-1.0)}, {Complex(0.5), Complex(-0.5)}};
    m.theta_inf = {Complex(-1.5), Complex(1.5)};
    SchlesingerState st;
    st.poles = {Complex(0.0), Complex(1.0)};
    st.q_mats = {mat2(1, 0, 0, -1), mat2(0.5, 0, 0, -0.5)};
    st.p_mats = {Mat::Identity(2, 2), Mat::Identity(2, 2)};
    PathSpec loop;
    loop.waypoints = {{Complex(0.0), Complex(1.0)},
                      {Complex(0.1), Complex(1.0)},
                      {Complex(0.1), Complex(1.1)},
                      {Complex(0.0), Complex(1.1)},
                      {Complex(0.0), Complex(1.0)}};
    auto reports = check_schlesinger_suite(m, st, loop, tight_tol());
    for (const ResidualReport& r : reports) {
      INFO(r.name << " residual " << r.residual);
      REQUIRE(r.residual < 1e-10);
    }
  }

  SECTION("random 2x2 with three poles on a rectangle loop") {
    auto [m, st] = random_schlesinger_setup(201, 3, 2);
    PathSpec loop;
    auto base = st.poles;
    auto wp = [&](double d1, double d2) {
      std::vector<Complex> w = base;
      w[0] += d1;
      w[1] += d2;
      return w;
    };
    loop.waypoints = {wp(0, 0), wp(0.1, 0), wp(0.1, 0.1), wp(0, 0.1), wp(0, 0)};
    auto reports = check_schlesinger_suite(m, st, loop, tight_tol());
    for (const ResidualReport& r : reports) {
      INFO(r.name << " residual " << r.residual);
      REQUIRE(r.passed);
    }
  }

  SECTION("sign-flipped P-equation breaks the commutator agreement at O(1)") {
    auto [m, st] = random_schlesinger_setup(202, 3, 2);
    double worst = 0.0;
    for (int nu = 0; nu < m.pole_count; ++nu) {
      SchlesingerTangent tg = schlesinger_vector_field(st, nu);
      for (int mu = 0; mu < m.pole_count; ++mu) {
        Mat da = tg.dq[mu] * st.p_mats[mu] - st.q_mats[mu] * tg.dp[mu];  // flipped sign
        Mat want = Mat::Zero(2, 2);
        if (mu != nu) {
          want = commutator_of(st.residue(mu), st.residue(nu)) / (st.poles[mu] - st.poles[nu]);
        } else {
          for (int rho = 0; rho < m.pole_count; ++rho) {
            if (rho == nu) continue;
            want -=
                commutator_of(st.residue(rho), st.residue(nu)) / (st.poles[rho] - st.poles[nu]);
          }
        }
        worst = std::max(worst, max_abs(Mat(da - want)));
      }
    }
    REQUIRE(worst > 1e-2);
  }
}

TEST_CASE("reports are deterministic and self-consistent") {
  RandomPoint a = random_admissible(PainleveKind::P3, 300);
  RandomPoint b = random_admissible(PainleveKind::P3, 300);
  REQUIRE(a.state.q == b.state.q);
  REQUIRE(a.t == b.t);
  ResidualReport r1 = check_hamilton_equations(PainleveKind::P3, a.theta, a.state, a.t);
  ResidualReport r2 = check_hamilton_equations(PainleveKind::P3, b.theta, b.state, b.t);
  REQUIRE(r1.residual == r2.residual);
  REQUIRE(r1.passed == (r1.residual <= r1.threshold));
}
