#pragma once

#include <string>
#include <vector>

#include "isomtau/types.hpp"

namespace isomtau {

enum class PainleveKind { P1, P2, P3, P4, P5, P6 };

inline const char* kind_name(PainleveKind k) {
  switch (k) {
    case PainleveKind::P1: return "P1";
    case PainleveKind::P2: return "P2";
    case PainleveKind::P3: return "P3";
    case PainleveKind::P4: return "P4";
    case PainleveKind::P5: return "P5";
    case PainleveKind::P6: return "P6";
  }
  return "?";
}

inline const std::vector<PainleveKind>& all_kinds() {
  static const std::vector<PainleveKind> ks = {PainleveKind::P1, PainleveKind::P2,
                                               PainleveKind::P3, PainleveKind::P4,
                                               PainleveKind::P5, PainleveKind::P6};
  return ks;
}

// Formal monodromy exponents held constant along a run. Slots used per kind:
// P1 none; P2 theta_inf; P3/P4 theta0, theta_inf; P5 theta0, theta1,
// theta_inf; P6 all four.
struct ThetaParams {
  Complex theta0{}, theta1{}, theta_t{}, theta_inf{};
};

// Darboux phase point (q, p) plus the log-gauge slots ln k, ln a, ln b, ln c.
// Slots beyond the kind's layout are ignored.
struct ExtendedState {
  Complex q{}, p{}, log_k{}, log_a{}, log_b{}, log_c{};
};

struct SystemSpec {
  PainleveKind kind;
  double gamma;  // ln tau = gamma * S + [G]; 2 for P1, 1 otherwise
  std::vector<std::string> state_layout;
  std::vector<std::string> param_names;
  std::string singular_times;
};

inline SystemSpec spec_for(PainleveKind k) {
  switch (k) {
    case PainleveKind::P1:
      return {k, 2.0, {"q", "p"}, {}, "none (movable poles only)"};
    case PainleveKind::P2:
      return {k, 1.0, {"q", "p", "log_k"}, {"theta_inf"}, "none (movable poles only)"};
    case PainleveKind::P3:
      return {k, 1.0, {"q", "p", "log_k", "log_a"}, {"theta0", "theta_inf"}, "t = 0"};
    case PainleveKind::P4:
      return {k, 1.0, {"q", "p", "log_k", "log_a"}, {"theta0", "theta_inf"}, "none (movable poles only)"};
    case PainleveKind::P5:
      return {k, 1.0, {"q", "p", "log_k", "log_a", "log_b"}, {"theta0", "theta1", "theta_inf"}, "t = 0"};
    case PainleveKind::P6:
      return {k, 1.0, {"q", "p", "log_k", "log_a", "log_b", "log_c"},
              {"theta0", "theta1", "theta_t", "theta_inf"}, "t in {0, 1}"};
  }
  throw ConfigError("unknown kind");
}

inline int state_slot_count(PainleveKind k) {
  return static_cast<int>(spec_for(k).state_layout.size());
}

// Flow-evaluation guards: denominators of H / the vector field, plus the
// fixed singular times. Frame-specific guards (sqrt arguments, 2*theta_t
// resonance) live with the frame constructors.
inline void check_guards(PainleveKind k, const ThetaParams& th, const ExtendedState& st,
                         Complex t) {
  (void)th;
  switch (k) {
    case PainleveKind::P1:
    case PainleveKind::P2:
      break;
    case PainleveKind::P3:
      require_guard(t, "t");
      break;
    case PainleveKind::P4:
      require_guard(st.q, "q");
      break;
    case PainleveKind::P5:
      require_guard(t, "t");
      break;
    case PainleveKind::P6:
      require_guard(t, "t");
      require_guard(t - 1.0, "t-1");
      require_guard(st.q, "q");
      require_guard(st.q - 1.0, "q-1");
      require_guard(st.q - t, "q-t");
      break;
  }
  if (!finite(st.q) || !finite(st.p)) throw GuardError("non-finite state");
}

inline Complex hamiltonian(PainleveKind k, const ThetaParams& th, const ExtendedState& st,
                           Complex t) {
  check_guards(k, th, st, t);
  const Complex q = st.q, p = st.p;
  switch (k) {
    case PainleveKind::P1:
      return p * p / 2.0 - 2.0 * q * q * q - t * q;
    case PainleveKind::P2: {
      const Complex th_ = th.theta_inf;
      return p * p / 2.0 + p * q * q + p * t / 2.0 + q * th_;
    }
    case PainleveKind::P3: {
      const Complex th0 = th.theta0, thi = th.theta_inf;
      return (2.0 * p * p * q * q + p * (2.0 * t - 2.0 * t * q * q + (4.0 * thi - 1.0) * q) -
              2.0 * t * q * (th0 + thi) + thi * thi - th0 * th0) / t;
    }
    case PainleveKind::P4: {
      const Complex th0 = th.theta0, thi = th.theta_inf;
      return 2.0 * p * p * q - q * q * q / 8.0 - t * q * q / 2.0 +
             (2.0 * thi - 1.0 - t * t) * q / 2.0 + 2.0 * thi * t - 2.0 * th0 * th0 / q;
    }
    case PainleveKind::P5: {
      const Complex th0 = th.theta0, th1 = th.theta1, thi = th.theta_inf;
      const Complex qm = q - 1.0;
      return p * p * qm * qm * q / t +
             p * (q * q / t * (th0 + 3.0 * th1 + thi) + q / t * (t - 2.0 * thi - 4.0 * th1) +
                  (thi + th1 - th0) / t) +
             2.0 * q * th1 / t * (thi + th1 + th0) +
             (th0 * th0 - th1 * th1 - thi * thi + th1 * t - 2.0 * th1 * thi) / t;
    }
    case PainleveKind::P6: {
      const Complex th0 = th.theta0, th1 = th.theta1, tht = th.theta_t, thi = th.theta_inf;
      const Complex tt1 = t * (t - 1.0);
      return p * p * q * (q - 1.0) * (q - t) / tt1 + p * q * (q - 1.0) / tt1 +
             thi * (1.0 - thi) * (q - t) / tt1 + th0 * th0 * (q - t) / (q * tt1) -
             th1 * th1 * (q - t) / ((q - 1.0) * tt1) +
             tht * tht * (t * t - q * (2.0 * t - 1.0)) / ((q - t) * tt1);
    }
  }
  throw ConfigError("unknown kind");
}

// Time derivatives of every state slot; the log-gauge slots carry the
// d(ln .)/dt right-hand sides.
inline ExtendedState vector_field(PainleveKind k, const ThetaParams& th, const ExtendedState& st,
                                  Complex t) {
  check_guards(k, th, st, t);
  const Complex q = st.q, p = st.p;
  ExtendedState d{};
  switch (k) {
    case PainleveKind::P1:
      d.q = p;
      d.p = 6.0 * q * q + t;
      break;
    case PainleveKind::P2: {
      const Complex th_ = th.theta_inf;
      d.q = p + q * q + t / 2.0;
      d.p = -2.0 * p * q - th_;
      d.log_k = -q;
      break;
    }
    case PainleveKind::P3: {
      const Complex th0 = th.theta0, thi = th.theta_inf;
      d.q = 4.0 * p * q * q / t - 2.0 * q * q + q * (4.0 * thi - 1.0) / t + 2.0;
      d.p = -4.0 * p * p * q / t + p * (4.0 * t * q - 4.0 * thi + 1.0) / t + 2.0 * th0 + 2.0 * thi;
      d.log_k = -4.0 * p * q / t + 2.0 * q - 2.0 * thi / t;
      d.log_a = 2.0 * q + 2.0 * th0 / t;
      break;
    }
    case PainleveKind::P4: {
      const Complex th0 = th.theta0, thi = th.theta_inf;
      d.q = 4.0 * p * q;
      d.p = -2.0 * p * p + 3.0 / 8.0 * q * q + q * t + t * t / 2.0 - thi + 0.5 -
            2.0 * th0 * th0 / (q * q);
      d.log_k = -(q + 2.0 * t);
      d.log_a = 4.0 * th0 / q;
      break;
    }
    case PainleveKind::P5: {
      const Complex th0 = th.theta0, th1 = th.theta1, thi = th.theta_inf;
      const Complex qm = q - 1.0;
      d.q = 2.0 * p * q * qm * qm / t + q * q / t * (th0 + 3.0 * th1 + thi) +
            q / t * (t - 2.0 * thi - 4.0 * th1) + (thi + th1 - th0) / t;
      d.p = -p * p / t * (3.0 * q * q - 4.0 * q + 1.0) -
            p * (2.0 * q / t * (th0 + 3.0 * th1 + thi) + (t - 2.0 * thi - 4.0 * th1) / t) -
            2.0 * th1 / t * (thi + th1 + th0);
      d.log_k = -(p * q * q - 2.0 * p * q + p + 2.0 * th1 * q - 2.0 * thi - 2.0 * th1) / t;
      d.log_a = (p - p * q * q - 2.0 * th1 * q - 2.0 * th0) / t;
      d.log_b = -(3.0 * p * q * q + p - 4.0 * p * q + 2.0 * thi * q + 4.0 * th1 * q +
                  2.0 * th0 * q - 2.0 * thi - 2.0 * th1 + t) / t;
      break;
    }
    case PainleveKind::P6: {
      const Complex th0 = th.theta0, th1 = th.theta1, tht = th.theta_t, thi = th.theta_inf;
      const Complex tt1 = t * (t - 1.0);
      d.q = 2.0 * p * q * (q - 1.0) * (q - t) / tt1 + q * (q - 1.0) / tt1;
      d.p = (4.0 * p * p * (2.0 * t * q - 3.0 * q * q - t + 2.0 * q) + 4.0 * p * (1.0 - 2.0 * q) +
             4.0 * thi * (thi - 1.0)) / (4.0 * tt1) -
            th0 * th0 / (q * q * (t - 1.0)) + th1 * th1 / (t * (q - 1.0) * (q - 1.0)) -
            tht * tht / ((q - t) * (q - t));
      d.log_k = (2.0 * thi - 1.0) * (q - t) / tt1;
      d.log_a = -2.0 * th0 * (q - t) / (q * tt1);
      d.log_b = 2.0 * th1 * (q - t) / (tt1 * (q - 1.0));
      d.log_c = 2.0 * tht * (q * (2.0 * t - 1.0) - t * t) / ((q - t) * tt1);
      break;
    }
  }
  return d;
}

// The three integrands at a phase point: H, the omega_JMU correction beyond
// H dt, the classical-action density p qdot - H, and the boundary function G.
struct DensityBreakdown {
  Complex hamiltonian;
  Complex tau_correction;
  Complex tau_density;     // = hamiltonian + tau_correction
  Complex action_density;  // = p * qdot - hamiltonian
  Complex g_value;
};

inline Complex g_function(PainleveKind k, const ThetaParams& th, const ExtendedState& st,
                          Complex t, Complex H) {
  switch (k) {
    case PainleveKind::P1:
      return 2.0 / 5.0 * (4.0 * H * t - 2.0 * st.p * st.q);
    case PainleveKind::P2:
      return 2.0 / 3.0 * H * t - st.q * st.p / 3.0 - th.theta_inf * st.log_k;
    case PainleveKind::P3:
      return H * t - th.theta_inf * st.log_k - th.theta0 * st.log_a - t * t / 2.0;
    case PainleveKind::P4:
      return H * t / 2.0 - st.p * st.q / 2.0 - th.theta_inf * st.log_k - th.theta0 * st.log_a;
    case PainleveKind::P5:
      return H * t - th.theta_inf * st.log_k - th.theta0 * st.log_a - th.theta1 * st.log_b;
    case PainleveKind::P6:
      return -th.theta0 * st.log_a - th.theta1 * st.log_b - th.theta_t * st.log_c -
             th.theta_inf * st.log_k;
  }
  throw ConfigError("unknown kind");
}

inline DensityBreakdown density_breakdown(PainleveKind k, const ThetaParams& th,
                                          const ExtendedState& st, Complex t) {
  DensityBreakdown out{};
  out.hamiltonian = hamiltonian(k, th, st, t);
  const Complex q = st.q, p = st.p;
  switch (k) {
    case PainleveKind::P1:
      out.tau_correction = out.hamiltonian;  // d ln tau / dt = 2H
      break;
    case PainleveKind::P2:
    case PainleveKind::P5:
      out.tau_correction = 0.0;
      break;
    case PainleveKind::P3:
      out.tau_correction = p * q / t - t;
      break;
    case PainleveKind::P4:
      out.tau_correction = q / 2.0;
      break;
    case PainleveKind::P6: {
      const Complex tt1 = t * (t - 1.0);
      out.tau_correction = -p * q * (q - 1.0) / tt1 - th.theta_inf * (q - t) / tt1;
      break;
    }
  }
  out.tau_density = out.hamiltonian + out.tau_correction;
  out.action_density = p * vector_field(k, th, st, t).q - out.hamiltonian;
  out.g_value = g_function(k, th, st, t, out.hamiltonian);
  return out;
}

// Left minus right side of the scalar Painleve equation, with the
// alpha..delta dictionaries taken from the theta parameters.
inline Complex painleve_residual(PainleveKind k, const ThetaParams& th, Complex q, Complex qd,
                                 Complex qdd, Complex t) {
  switch (k) {
    case PainleveKind::P1:
      return qdd - 6.0 * q * q - t;
    case PainleveKind::P2: {
      const Complex alpha = 0.5 - th.theta_inf;
      return qdd - t * q - 2.0 * q * q * q - alpha;
    }
    case PainleveKind::P3: {
      const Complex alpha = 8.0 * th.theta0;
      const Complex beta = 4.0 - 8.0 * th.theta_inf;
      const Complex gamma = 4.0, delta = -4.0;
      require_guard(q, "q");
      require_guard(t, "t");
      return qdd - qd * qd / q + qd / t - (alpha * q * q + beta) / t - gamma * q * q * q -
             delta / q;
    }
    case PainleveKind::P4: {
      const Complex alpha = 2.0 * th.theta_inf - 1.0;
      const Complex beta = -8.0 * th.theta0 * th.theta0;
      require_guard(q, "q");
      return qdd - qd * qd / (2.0 * q) - 1.5 * q * q * q - 4.0 * t * q * q -
             2.0 * (t * t - alpha) * q - beta / q;
    }
    case PainleveKind::P5: {
      const Complex th0 = th.theta0, th1 = th.theta1, thi = th.theta_inf;
      const Complex alpha = (th0 - th1 + thi) * (th0 - th1 + thi) / 2.0;
      const Complex beta = -(th0 - th1 - thi) * (th0 - th1 - thi) / 2.0;
      const Complex gamma = 1.0 - 2.0 * th0 - 2.0 * th1;
      const Complex delta = -0.5;
      require_guard(q, "q");
      require_guard(q - 1.0, "q-1");
      require_guard(t, "t");
      const Complex qm = q - 1.0;
      return qdd - (1.0 / (2.0 * q) + 1.0 / qm) * qd * qd + qd / t -
             qm * qm / (t * t) * (alpha * q + beta / q) - gamma * q / t -
             delta * q * (q + 1.0) / qm;
    }
    case PainleveKind::P6: {
      const Complex th0 = th.theta0, th1 = th.theta1, tht = th.theta_t, thi = th.theta_inf;
      const Complex alpha = (2.0 * thi - 1.0) * (2.0 * thi - 1.0) / 2.0;
      const Complex beta = -2.0 * th0 * th0;
      const Complex gamma = 2.0 * th1 * th1;
      const Complex delta = (1.0 - 4.0 * tht * tht) / 2.0;
      require_guard(q, "q");
      require_guard(q - 1.0, "q-1");
      require_guard(q - t, "q-t");
      require_guard(t, "t");
      require_guard(t - 1.0, "t-1");
      const Complex qm = q - 1.0, qt = q - t, tm = t - 1.0;
      return qdd - 0.5 * (1.0 / q + 1.0 / qm + 1.0 / qt) * qd * qd +
             (1.0 / t + 1.0 / tm + 1.0 / qt) * qd -
             q * qm * qt / (t * t * tm * tm) *
                 (alpha + beta * t / (q * q) + gamma * tm / (qm * qm) +
                  delta * t * tm / (qt * qt));
    }
  }
  throw ConfigError("unknown kind");
}

}  // namespace isomtau
