#pragma once

#include "isomtau/painleve.hpp"
#include "isomtau/rational.hpp"

namespace isomtau {

// Parametrization of the PVI residue matrices: x's first, then u, v, w,
// self-checked against the constraints
//   (e1) x0+th0+x1+th1+xt+tht = -th_inf
//   (e2) u x0 + v x1 + w xt = 0
//   (e3) (x0+2th0)/u + (x1+2th1)/v + (xt+2tht)/w = 0
//   (e4) u x0 t = k q
// plus p = A11(q).
struct PviResidueParams {
  Complex x0, x1, xt, u, v, w, k;
};

inline PviResidueParams pvi_residue_params(const ThetaParams& th, const ExtendedState& st,
                                           Complex t) {
  check_guards(PainleveKind::P6, th, st, t);
  const Complex q = st.q, p = st.p;
  const Complex th0 = th.theta0, th1 = th.theta1, tht = th.theta_t, thi = th.theta_inf;
  require_guard(2.0 * thi, "2*theta_inf");
  const Complex k = std::exp(st.log_k);

  const Complex x0 = p * p * q * q * (q - 1.0) * (q - t) / (t * 2.0 * thi) +
                     p * q * (q - 1.0) * (q - t) / t + thi * q * (q - t - 1.0) / (2.0 * t) +
                     th1 * th1 * (t - 1.0) / (2.0 * t * thi * (q - 1.0)) -
                     tht * tht * t * (t - 1.0) / (2.0 * thi * (q - t)) -
                     th1 * th1 * (1.0 - t) / (2.0 * t * thi) -
                     tht * tht * t * (t - 1.0) / (2.0 * t * thi) - th0 - th0 * th0 / (2.0 * thi);
  const Complex x1 = p * p * q * (q - 1.0) * (q - 1.0) * (t - q) / ((t - 1.0) * 2.0 * thi) +
                     p * q * (q - 1.0) * (t - q) / (t - 1.0) +
                     thi * (q - 1.0) * (t - q - 1.0) / (2.0 * (t - 1.0)) -
                     th0 * th0 * t / (2.0 * q * thi * (t - 1.0)) +
                     tht * tht * t * (t - 1.0) / (2.0 * thi * (q - t)) +
                     th0 * th0 * t / (2.0 * (t - 1.0) * thi) +
                     tht * tht * t * (t - 1.0) / (2.0 * (t - 1.0) * thi) - th1 -
                     th1 * th1 / (2.0 * thi);
  const Complex xt = p * p * q * (q - 1.0) * (t - q) * (t - q) / (t * (t - 1.0) * 2.0 * thi) +
                     p * q * (q - 1.0) * (q - t) / (t * (t - 1.0)) +
                     thi * (q - t) * (q + t - 1.0) / (2.0 * t * (t - 1.0)) +
                     th0 * th0 * t / (2.0 * q * thi * (t - 1.0)) -
                     th1 * th1 * (t - 1.0) / (2.0 * thi * t * (q - 1.0)) -
                     th0 * th0 / (2.0 * (t - 1.0) * thi) + th1 * th1 / (2.0 * t * thi) - tht -
                     tht * tht / (2.0 * thi);

  require_guard(x0, "x0");
  require_guard(x1, "x1");
  require_guard(xt, "xt");
  const Complex u = k * q / (x0 * t);
  const Complex v = k * (q - 1.0) / (x1 * (1.0 - t));
  const Complex w = k * (t - q) / (xt * t * (1.0 - t));

  auto rel_check = [](Complex resid, double scale, const char* what) {
    if (std::abs(resid) > 1e-10 * std::max(1.0, scale)) {
      throw GuardError(std::string("PVI parametrization constraint failed: ") + what);
    }
  };
  const Complex e1 = x0 + th0 + x1 + th1 + xt + tht + thi;
  const Complex e2 = u * x0 + v * x1 + w * xt;
  const Complex e3 = (x0 + 2.0 * th0) / u + (x1 + 2.0 * th1) / v + (xt + 2.0 * tht) / w;
  const Complex e4 = u * x0 * t - k * q;
  const Complex e5 = (x0 + th0) / q + (x1 + th1) / (q - 1.0) + (xt + tht) / (q - t) - p;
  double s1 = std::abs(x0) + std::abs(x1) + std::abs(xt) + std::abs(thi);
  rel_check(e1, s1, "e1");
  rel_check(e2, std::abs(u * x0) + std::abs(v * x1) + std::abs(w * xt), "e2");
  rel_check(e3, std::abs((x0 + 2.0 * th0) / u) + std::abs((x1 + 2.0 * th1) / v), "e3");
  rel_check(e4, std::abs(k * q), "e4");
  rel_check(e5, std::abs(p), "e5/p");
  return {x0, x1, xt, u, v, w, k};
}

namespace detail {
inline Mat pvi_residue(Complex x, Complex theta, Complex uu) {
  return mat2(x + theta, -uu * x, (x + 2.0 * theta) / uu, -x - theta);
}
}  // namespace detail

// A(z) of the kind's linear system, as a rational matrix in z.
inline RationalMatrix lax_a(PainleveKind kind, const ThetaParams& th, const ExtendedState& st,
                            Complex t) {
  check_guards(kind, th, st, t);
  const Complex q = st.q, p = st.p;
  RationalMatrix A;
  switch (kind) {
    case PainleveKind::P1: {
      Mat a4 = mat2(4, 0, 0, -4);
      Mat a2 = mat2(0, -4.0 * q, 4.0 * q, 0);
      Mat a1 = mat2(0, -2.0 * p, -2.0 * p, 0);
      Mat a0 = mat2(2.0 * q * q + t, -2.0 * q * q - t, 2.0 * q * q + t, -2.0 * q * q - t);
      Mat am1 = mat2(0, -0.5, -0.5, 0);
      A.poly = {a0, a1, a2, Mat::Zero(2, 2), a4};
      A.poles = {{Complex(0.0), {am1}}};
      break;
    }
    case PainleveKind::P2: {
      const Complex k = std::exp(st.log_k), th_ = th.theta_inf;
      Mat a1 = mat2(0, k, -2.0 * p / k, 0);
      Mat a0 = mat2(p + t / 2.0, -k * q, -(2.0 / k) * (th_ + p * q), -p - t / 2.0);
      A.poly = {a0, a1, sigma3()};
      break;
    }
    case PainleveKind::P3: {
      const Complex k = std::exp(st.log_k);
      const Complex th0 = th.theta0, thi = th.theta_inf;
      Mat am1 = mat2(-thi, -q * k * t,
                     p * q * (t - p) / (k * t) + (th0 + thi) / k - 2.0 * thi * p / (k * t), thi);
      Mat am2 = mat2(p - t / 2.0, -k * t, p * (p - t) / (k * t), -p + t / 2.0);
      A.poly = {sigma3() * (t / 2.0)};
      A.poles = {{Complex(0.0), {am1, am2}}};
      break;
    }
    case PainleveKind::P4: {
      const Complex k = std::exp(st.log_k);
      const Complex th0 = th.theta0, thi = th.theta_inf;
      const Complex S = q * (4.0 * p - q - 2.0 * t);
      Mat a0 = mat2(t, k, -(S + 4.0 * thi) / (2.0 * k), -t);
      Mat am1 = mat2(S / 4.0, -k * q / 2.0, (S * S - 16.0 * th0 * th0) / (8.0 * k * q), -S / 4.0);
      A.poly = {a0, sigma3()};
      A.poles = {{Complex(0.0), {am1}}};
      break;
    }
    case PainleveKind::P5: {
      const Complex k = std::exp(st.log_k);
      const Complex th0 = th.theta0, th1 = th.theta1, thi = th.theta_inf;
      Mat a0 = mat2(-p * q - thi - th1, k * (p * q + thi + th1 - th0),
                    -(p * q + thi + th1 + th0) / k, p * q + thi + th1);
      Mat a1 = mat2(p * q + th1, -k * q * (p * q + 2.0 * th1), p / k, -p * q - th1);
      A.poly = {sigma3() * (t / 2.0)};
      A.poles = {{Complex(0.0), {a0}}, {Complex(1.0), {a1}}};
      break;
    }
    case PainleveKind::P6: {
      PviResidueParams pr = pvi_residue_params(th, st, t);
      A.poles = {{Complex(0.0), {detail::pvi_residue(pr.x0, th.theta0, pr.u)}},
                 {Complex(1.0), {detail::pvi_residue(pr.x1, th.theta1, pr.v)}},
                 {t, {detail::pvi_residue(pr.xt, th.theta_t, pr.w)}}};
      break;
    }
  }
  return A;
}

// B(z) of the deformation equation d Phi/dt = B Phi.
inline RationalMatrix lax_b(PainleveKind kind, const ThetaParams& th, const ExtendedState& st,
                            Complex t) {
  check_guards(kind, th, st, t);
  const Complex q = st.q, p = st.p;
  RationalMatrix B;
  switch (kind) {
    case PainleveKind::P1: {
      B.poly = {Mat::Zero(2, 2), sigma3()};
      B.poles = {{Complex(0.0), {mat2(q, -q, q, -q)}}};
      break;
    }
    case PainleveKind::P2: {
      const Complex k = std::exp(st.log_k);
      B.poly = {mat2(0, k / 2.0, -p / k, 0), sigma3() * 0.5};
      break;
    }
    case PainleveKind::P3: {
      const Complex k = std::exp(st.log_k);
      const Complex th0 = th.theta0, thi = th.theta_inf;
      Mat b0 = mat2(0, -q * k,
                    (p * q * (t - p) / (k * t) + (th0 + thi) / k - 2.0 * thi * p / (k * t)) / t, 0);
      Mat bm1 = mat2((t - 2.0 * p) / (2.0 * t), k, p * (t - p) / (k * t * t),
                     (2.0 * p - t) / (2.0 * t));
      B.poly = {b0, sigma3() * 0.5};
      B.poles = {{Complex(0.0), {bm1}}};
      break;
    }
    case PainleveKind::P4: {
      const Complex k = std::exp(st.log_k);
      const Complex thi = th.theta_inf;
      const Complex S = q * (4.0 * p - q - 2.0 * t);
      // (2,1) sign matches A0's: compatibility needs A0 - B0 diagonal
      Mat b0 = mat2(0, k, -(S + 4.0 * thi) / (2.0 * k), 0);
      B.poly = {b0, sigma3()};
      break;
    }
    case PainleveKind::P5: {
      const Complex k = std::exp(st.log_k);
      const Complex th0 = th.theta0, th1 = th.theta1, thi = th.theta_inf;
      Mat b0 = mat2(0, k / t * (-p * q * q + p * q - 2.0 * th1 * q + thi + th1 - th0),
                    -(p * q + thi - p + th1 + th0) / (t * k), 0);
      B.poly = {b0, sigma3() * 0.5};
      break;
    }
    case PainleveKind::P6: {
      PviResidueParams pr = pvi_residue_params(th, st, t);
      Mat at = detail::pvi_residue(pr.xt, th.theta_t, pr.w);
      B.poles = {{t, {Mat(-at)}}};
      break;
    }
  }
  return B;
}

inline Mat a_matrix(PainleveKind kind, const ThetaParams& th, const ExtendedState& st, Complex t,
                    Complex z) {
  return lax_a(kind, th, st, t).eval(z);
}

inline Mat b_matrix(PainleveKind kind, const ThetaParams& th, const ExtendedState& st, Complex t,
                    Complex z) {
  return lax_b(kind, th, st, t).eval(z);
}

}  // namespace isomtau
