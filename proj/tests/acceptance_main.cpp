// Acceptance suite: every identity the library promises, exercised across all
// six Painleve systems and the Schlesinger family at pinned thresholds. Each
// criterion prints one PASS/FAIL line; exit code 0 only when all pass.
#include <cstdio>
#include <string>
#include <vector>

#include "isomtau/config.hpp"
#include "isomtau/verify.hpp"

using namespace isomtau;

namespace {

int g_failures = 0;

void report(int number, const std::string& label, bool passed, double worst, double threshold) {
  std::printf("%s  criterion %d: %s (worst residual %.3e, threshold %.1e)\n",
              passed ? "PASS" : "FAIL", number, label.c_str(), worst, threshold);
  if (!passed) ++g_failures;
}

Tolerances run_tol() {
  Tolerances tol;
  tol.rel_tol = 1e-12;
  tol.abs_tol = 1e-14;
  return tol;
}

PathSpec unit_path(const RandomPoint& pt) {
  return PathSpec::painleve({pt.t, pt.t + Complex(0.8, 0.6)});
}

// Draw seeds until `count` integrations stay pole-free (tame); apply fn to each.
template <typename Fn>
bool for_tame_runs(PainleveKind kind, std::uint64_t base_seed, int count, Fn&& fn) {
  int produced = 0;
  for (std::uint64_t i = 0; i < 200 && produced < count; ++i) {
    RandomPoint pt = random_admissible(kind, base_seed + i);
    try {
      IntegrationResult probe = integrate_path(kind, pt.theta, pt.state, unit_path(pt), run_tol());
      if (!trajectory_is_tame(probe)) continue;
      fn(pt, probe);
      ++produced;
    } catch (const IntegrationError&) {
      continue;
    }
  }
  return produced == count;
}

void criterion_series_recursion() {
  double worst = 0.0;
  for (PainleveKind kind : all_kinds()) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      RandomPoint pt = random_admissible(kind, 1000 + i);
      ResidualReport r = check_series_recursion_all(kind, pt.theta, pt.state, pt.t);
      worst = std::max(worst, r.residual);
    }
  }
  report(1, "series-recursion certification, 100 states x 6 kinds, all singular points",
         worst < 1e-9, worst, 1e-9);
}

void criterion_hamilton() {
  double worst = 0.0;
  for (PainleveKind kind : all_kinds()) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      RandomPoint pt = random_admissible(kind, 2000 + i);
      ResidualReport r = check_hamilton_equations(kind, pt.theta, pt.state, pt.t);
      worst = std::max(worst, r.residual);
    }
  }
  report(2, "Hamilton certification incl. log-gauge/theta pairs, 100 states x 6 kinds",
         worst < 1e-5, worst, 1e-5);
}

void criterion_lax() {
  double worst = 0.0;
  for (PainleveKind kind : all_kinds()) {
    for (std::uint64_t i = 0; i < 25; ++i) {
      RandomPoint pt = random_admissible(kind, 3000 + i);
      Rng zr(3500 + i);
      std::vector<Complex> zs;
      for (int k = 0; k < 8; ++k) zs.push_back(zr.box(2.8, 4.4, 0.8, 2.0));
      ResidualReport r = check_lax_compatibility(kind, pt.theta, pt.state, pt.t, zs);
      worst = std::max(worst, r.residual);
    }
  }
  report(3, "Lax compatibility, 25 states x 8 z-samples x 6 kinds", worst < 1e-5, worst, 1e-5);
}

void criterion_action_identity() {
  double worst = 0.0;
  bool complete = true;
  double gamma_worst_margin = 1.0;  // min forced-gamma residual over eligible P1 runs
  for (PainleveKind kind : all_kinds()) {
    bool ok = for_tame_runs(kind, 4000, 10, [&](const RandomPoint&, const IntegrationResult& run) {
      double gamma = spec_for(kind).gamma;
      Complex resid = run.delta_ln_tau - gamma * run.delta_action - (run.g_end - run.g_start);
      worst = std::max(worst, std::abs(resid));
      if (kind == PainleveKind::P1 && std::abs(run.delta_action) > 1e-2) {
        Complex forced = run.delta_ln_tau - run.delta_action - (run.g_end - run.g_start);
        gamma_worst_margin = std::min(gamma_worst_margin, std::abs(forced));
      }
    });
    complete = complete && ok;
  }
  report(4, "action identity |dlntau - gamma dS - dG|, 10 pole-free unit paths x 6 kinds",
         complete && worst < 1e-7, worst, 1e-7);
  report(4, "gamma discrimination for P1 (gamma=1 forced, |dS| > 1e-2)",
         gamma_worst_margin > 1e-3, gamma_worst_margin, 1e-3);
}

void criterion_tau_density() {
  double worst = 0.0;
  bool complete = true;
  for (PainleveKind kind : all_kinds()) {
    bool ok = for_tame_runs(kind, 5000, 3, [&](const RandomPoint& pt, const IntegrationResult&) {
      ResidualReport r = check_tau_log_derivative(kind, pt.theta, pt.state, unit_path(pt), run_tol());
      worst = std::max(worst, r.residual);
    });
    complete = complete && ok;
  }
  report(5, "tau-density pointwise certification incl. corrections and P3 log-gauge identity",
         complete && worst < 1e-6, worst, 1e-6);
}

void criterion_variational() {
  double worst = 0.0;
  bool complete = true;
  for (PainleveKind kind : {PainleveKind::P2, PainleveKind::P6}) {
    int produced = 0;
    for (std::uint64_t i = 0; i < 200 && produced < 5; ++i) {
      RandomPoint pt = random_admissible(kind, 6000 + i);
      Rng dr(6500 + i);
      Complex dq = dr.box(-1.0, 1.0, -1.0, 1.0);
      Complex dp = dr.box(-1.0, 1.0, -1.0, 1.0);
      try {
        IntegrationResult probe =
            integrate_path(kind, pt.theta, pt.state, unit_path(pt), run_tol());
        if (!trajectory_is_tame(probe)) continue;
        ResidualReport r = check_variational_identity(kind, pt.theta, pt.state, unit_path(pt), dq,
                                                      dp, 1e-5, run_tol());
        worst = std::max(worst, r.residual);
        ++produced;
      } catch (const IntegrationError&) {
        continue;
      }
    }
    complete = complete && produced == 5;
  }
  report(6, "variational identity for P2 and P6, 5 runs each, h = 1e-5",
         complete && worst < 1e-4, worst, 1e-4);
}

void criterion_schlesinger() {
  double worst_iso = 0.0, worst_cons = 0.0, worst_closed = 0.0, worst_comm = 0.0, worst_act = 0.0;
  for (auto [poles, dim, seed] : {std::tuple<int, int, std::uint64_t>{3, 2, 7000},
                                  std::tuple<int, int, std::uint64_t>{2, 3, 7100}}) {
    auto [model, st] = random_schlesinger_setup(seed, poles, dim);
    PathSpec loop;
    auto wp = [&](double d1, double d2) {
      std::vector<Complex> w = st.poles;
      w[0] += d1;
      w[1] += d2;
      return w;
    };
    loop.waypoints = {wp(0, 0), wp(0.1, 0), wp(0.1, 0.1), wp(0, 0.1), wp(0, 0)};
    for (const ResidualReport& r : check_schlesinger_suite(model, st, loop, run_tol())) {
      if (r.name == "schlesinger_isospectral") worst_iso = std::max(worst_iso, r.residual);
      if (r.name == "schlesinger_conservation") worst_cons = std::max(worst_cons, r.residual);
      if (r.name == "schlesinger_closedness") worst_closed = std::max(worst_closed, r.residual);
      if (r.name == "schlesinger_commutator") worst_comm = std::max(worst_comm, r.residual);
      if (r.name == "schlesinger_action_identity") worst_act = std::max(worst_act, r.residual);
    }
  }
  report(7, "Schlesinger 2x2/n=3 and 3x3/n=2: isospectral drift", worst_iso < 1e-9, worst_iso,
         1e-9);
  report(7, "Schlesinger: sum A_nu conservation", worst_cons < 1e-9, worst_cons, 1e-9);
  report(7, "Schlesinger: loop closedness on side-0.1 rectangles", worst_closed < 1e-8,
         worst_closed, 1e-8);
  report(7, "Schlesinger: commutator vs Hamiltonian field", worst_comm < 1e-8, worst_comm, 1e-8);
  report(7, "Schlesinger: G == 0 action identity", worst_act < 1e-8, worst_act, 1e-8);
}

void criterion_scalar_equations() {
  double worst = 0.0;
  bool complete = true;
  for (PainleveKind kind : all_kinds()) {
    // qdot comes from the flow at the dense-output state, qddot from the
    // once-differentiated (q, p) system: qdd = f_q qd + f_p pd + f_t with
    // fourth-order differences in the arguments.
    bool ok = for_tame_runs(kind, 8000, 5, [&](const RandomPoint& pt, const IntegrationResult& run) {
      const double s1 = run.s_nodes.back();
      for (int k = 0; k < 50; ++k) {
        double s = s1 * (0.05 + 0.9 * k / 49.0);
        std::vector<Complex> point, dir;
        run.path.locate(s, point, dir);
        ExtendedState st = unpack_state(kind, run.state_at_s(s));
        ExtendedState v = vector_field(kind, pt.theta, st, point[0]);
        auto qdot_of = [&](const ExtendedState& ss, Complex tt) {
          return vector_field(kind, pt.theta, ss, tt).q;
        };
        auto partial4 = [&](auto bump) {
          const double h = 5e-4;
          return (-bump(h) + 8.0 * bump(h / 2.0) - 8.0 * bump(-h / 2.0) + bump(-h)) / (6.0 * h);
        };
        try {
          Complex fq = partial4([&](double h) {
            ExtendedState ss = st;
            ss.q += h;
            return qdot_of(ss, point[0]);
          });
          Complex fp = partial4([&](double h) {
            ExtendedState ss = st;
            ss.p += h;
            return qdot_of(ss, point[0]);
          });
          Complex ft = partial4([&](double h) { return qdot_of(st, point[0] + h); });
          Complex qdd = fq * v.q + fp * v.p + ft;
          Complex r = painleve_residual(kind, pt.theta, st.q, v.q, qdd, point[0]);
          worst = std::max(worst, std::abs(r));
        } catch (const GuardError&) {
          // sample too close to a coordinate singularity of the scalar form
        }
      }
    });
    complete = complete && ok;
  }
  report(8, "scalar Painleve equations along 5 trajectories x 50 dense samples x 6 kinds",
         complete && worst < 1e-5, worst, 1e-5);
}

void criterion_integrator() {
  double worst_halving = 0.0, worst_concat = 0.0, worst_reversal = 0.0;
  for (PainleveKind kind : all_kinds()) {
    RandomPoint pt;
    IntegrationResult probe;
    bool found = false;
    for (std::uint64_t i = 0; i < 100 && !found; ++i) {
      pt = random_admissible(kind, 9000 + i);
      try {
        probe = integrate_path(kind, pt.theta, pt.state, unit_path(pt), run_tol());
        found = trajectory_is_tame(probe);
      } catch (const IntegrationError&) {
        continue;
      }
    }
    if (!found) {
      worst_halving = worst_concat = worst_reversal = 1.0;
      break;
    }
    PathSpec path = unit_path(pt);
    // step halving at the default tolerances
    Tolerances tol;
    Tolerances half = tol;
    half.rel_tol /= 2.0;
    half.abs_tol /= 2.0;
    IntegrationResult a = integrate_path(kind, pt.theta, pt.state, path, tol);
    IntegrationResult b = integrate_path(kind, pt.theta, pt.state, path, half);
    double scale = 1.0, diff = 0.0;
    for (std::size_t i = 0; i < a.y_nodes.back().size(); ++i) {
      scale = std::max(scale, std::abs(a.y_nodes.back()[i]));
      diff = std::max(diff, std::abs(a.y_nodes.back()[i] - b.y_nodes.back()[i]));
    }
    worst_halving = std::max(worst_halving, diff / (10.0 * (tol.rel_tol * scale + tol.abs_tol)));

    // concatenation through the midpoint
    Complex ta = path.waypoints[0][0], tc = path.waypoints[1][0];
    Complex tb = ta + 0.5 * (tc - ta);
    IntegrationResult ab =
        integrate_path(kind, pt.theta, pt.state, PathSpec::painleve({ta, tb}), run_tol());
    ExtendedState mid = unpack_state(kind, ab.y_nodes.back());
    IntegrationResult bc =
        integrate_path(kind, pt.theta, mid, PathSpec::painleve({tb, tc}), run_tol());
    IntegrationResult ac =
        integrate_path(kind, pt.theta, pt.state, PathSpec::painleve({ta, tc}), run_tol());
    worst_concat = std::max(worst_concat,
                            std::abs(ab.delta_ln_tau + bc.delta_ln_tau - ac.delta_ln_tau));
    worst_concat = std::max(worst_concat,
                            std::abs(ab.delta_action + bc.delta_action - ac.delta_action));

    // reversal
    IntegrationResult rev =
        integrate_path(kind, pt.theta, pt.state, PathSpec::painleve({ta, tc, ta}), run_tol());
    std::vector<Complex> y0 = pack_state(kind, pt.state);
    y0.push_back(0.0);
    y0.push_back(0.0);
    for (std::size_t i = 0; i < y0.size(); ++i) {
      worst_reversal = std::max(worst_reversal, std::abs(rev.y_nodes.back()[i] - y0[i]));
    }
  }
  report(9, "integrator: halving tolerances moves endpoints < 10x request (ratio)",
         worst_halving < 1.0, worst_halving, 1.0);
  report(9, "integrator: concatenation additivity", worst_concat < 1e-9, worst_concat, 1e-9);
  report(9, "integrator: reversal returns state and zeroes accumulators", worst_reversal < 1e-8,
         worst_reversal, 1e-8);
}

}  // namespace

int main() {
  criterion_series_recursion();
  criterion_hamilton();
  criterion_lax();
  criterion_action_identity();
  criterion_tau_density();
  criterion_variational();
  criterion_schlesinger();
  criterion_scalar_equations();
  criterion_integrator();
  if (g_failures == 0) {
    std::printf("ALL ACCEPTANCE CRITERIA PASSED\n");
    return 0;
  }
  std::printf("%d acceptance line(s) FAILED\n", g_failures);
  return 1;
}
