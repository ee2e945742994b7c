#pragma once

#include <utility>
#include <vector>

#include "isomtau/lax.hpp"
#include "isomtau/painleve.hpp"
#include "isomtau/series.hpp"

namespace isomtau {

// Data of the local exponent Theta(z) = sum_{k<0} polar_k zeta^k
// + log_coeff * ln(z - a) (at infinity the log term is log_coeff * ln z,
// with zeta = 1/z). All stored matrices are diagonal.
struct ExponentData {
  std::vector<std::pair<int, Mat>> polar;  // (zeta exponent k < 0, coefficient)
  Mat log_coeff = Mat::Zero(2, 2);
};

// Formal local solution data at one singular point: G(z) =
// gauge * (I + c_1 zeta + c_2 zeta^2 + ...) with Phi = G e^Theta.
struct LocalFrame {
  SeriesAnchor location;
  Mat gauge = Mat::Identity(2, 2);
  std::vector<Mat> series_coeffs;  // c_1, c_2, ... closed forms in the phase point
  ExponentData exponent;
  bool irregular = false;
};

// Theta'(z) as an exact local series (in zeta). At infinity
// d/dz(zeta^k) = -k zeta^(k+1) and d/dz ln z = zeta.
inline MatrixSeries theta_prime_series(const LocalFrame& frame) {
  std::vector<std::pair<int, Mat>> terms;
  if (frame.location.at_infinity) {
    for (const auto& [k, c] : frame.exponent.polar) {
      terms.emplace_back(k + 1, Mat(static_cast<double>(-k) * c));
    }
    if (max_abs(frame.exponent.log_coeff) > 0.0) {
      terms.emplace_back(1, frame.exponent.log_coeff);
    }
  } else {
    for (const auto& [k, c] : frame.exponent.polar) {
      terms.emplace_back(k - 1, Mat(static_cast<double>(k) * c));
    }
    if (max_abs(frame.exponent.log_coeff) > 0.0) {
      terms.emplace_back(-1, frame.exponent.log_coeff);
    }
  }
  int lo = terms.front().first, hi = terms.front().first;
  for (const auto& [k, c] : terms) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  std::vector<Mat> coeffs(static_cast<std::size_t>(hi - lo + 1), Mat::Zero(2, 2));
  for (const auto& [k, c] : terms) coeffs[static_cast<std::size_t>(k - lo)] += c;
  return MatrixSeries(frame.location, lo, std::move(coeffs), true);
}

inline int max_frame_order(PainleveKind kind) {
  switch (kind) {
    case PainleveKind::P1: return 5;
    case PainleveKind::P2: return 3;
    case PainleveKind::P3: return 1;
    case PainleveKind::P4: return 2;
    case PainleveKind::P5: return 1;
    case PainleveKind::P6: return 1;
  }
  return 0;
}

namespace detail {

inline Mat diag_gauge_power(Complex value) {
  // value^(-sigma3/2), principal branch
  Complex r = std::sqrt(value);
  return mat2(1.0 / r, 0.0, 0.0, r);
}

}  // namespace detail

// The frames with closed-form series coefficients at every singular point the
// frame theory covers (P1's resonant z=0 contributes nothing and is omitted).
// `order` truncates the coefficient lists; it may not exceed
// max_frame_order(kind).
inline std::vector<LocalFrame> local_frames(PainleveKind kind, const ThetaParams& th,
                                            const ExtendedState& st, Complex t, int order) {
  if (order < 0 || order > max_frame_order(kind)) {
    throw ConfigError("requested frame order exceeds available closed forms");
  }
  check_guards(kind, th, st, t);
  const Complex q = st.q, p = st.p;
  const Complex H = hamiltonian(kind, th, st, t);
  const Mat s3 = sigma3();
  std::vector<LocalFrame> frames;

  auto push_inf = [&](std::vector<Mat> gs, ExponentData expo) {
    LocalFrame f;
    f.location = SeriesAnchor::infinity();
    f.irregular = true;
    if (static_cast<int>(gs.size()) > order) gs.resize(static_cast<std::size_t>(order));
    f.series_coeffs = std::move(gs);
    f.exponent = std::move(expo);
    frames.push_back(std::move(f));
  };

  switch (kind) {
    case PainleveKind::P1: {
      const Complex w = 2.0 * p - t * t;
      Mat g1 = mat2(-H, 0, 0, H);
      Mat g2 = mat2(H * H / 2.0, q / 2.0, q / 2.0, H * H / 2.0);
      Mat g3 = mat2(-H * H * H / 6.0 - w / 24.0, q * H / 2.0 + p / 4.0,
                    -q * H / 2.0 - p / 4.0, H * H * H / 6.0 + w / 24.0);
      const Complex g4d = H * H * H * H / 24.0 + w / 24.0 * H + q * q / 8.0;
      const Complex g4o = q * H * H / 4.0 + p * H / 4.0 + (2.0 * q * q + t) / 8.0;
      Mat g4 = mat2(g4d, g4o, g4o, g4d);
      const Complex g5d = H * H * H * H * H / 120.0 + w / 48.0 * H * H +
                          (5.0 * q * q - 2.0 * t) / 40.0 * H + (4.0 * p * q + 1.0) / 160.0;
      const Complex g5o = q * H * H * H / 12.0 + p * H * H / 8.0 + (2.0 * q * q + t) / 8.0 * H +
                          w / 48.0 * q + 1.0 / 16.0;
      Mat g5 = mat2(-g5d, g5o, -g5o, g5d);
      ExponentData e;
      e.polar = {{-5, Mat(s3 * (4.0 / 5.0))}, {-1, Mat(s3 * t)}};
      push_inf({g1, g2, g3, g4, g5}, std::move(e));
      break;
    }
    case PainleveKind::P2: {
      const Complex k = std::exp(st.log_k), th_ = th.theta_inf;
      Mat g1 = mat2(-H, -k / 2.0, -p / k, H);
      Mat g2 = mat2(H * H / 2.0 + p / 4.0 - t * th_ / 4.0, -k * H / 2.0 + k * q / 2.0,
                    p * H / k - p * q / k - th_ / k, H * H / 2.0 + p / 4.0 + t * th_ / 4.0);
      Mat g3 = mat2(-H * H * H / 6.0 - H * p / 4.0 + H * t / 6.0 + H * t * th_ / 4.0 +
                        p * q / 6.0 + th_ * th_ / 6.0 + th_ / 3.0,
                    -k * H * H / 4.0 + k * q * H / 2.0 + k * p / 8.0 + k * t / 4.0 -
                        k * t * th_ / 8.0,
                    -p * H * H / (2.0 * k) + H * p * q / k + H * th_ / k + p * p / (4.0 * k) +
                        p * t * th_ / (4.0 * k) + p * t / (2.0 * k),
                    H * H * H / 6.0 + H * p / 4.0 - H * t / 6.0 + H * t * th_ / 4.0 -
                        p * q / 6.0 - th_ * th_ / 6.0 + th_ / 6.0);
      ExponentData e;
      e.polar = {{-3, Mat(s3 / 3.0)}, {-1, Mat(s3 * (t / 2.0))}};
      e.log_coeff = s3 * (-th_);
      push_inf({g1, g2, g3}, std::move(e));
      break;
    }
    case PainleveKind::P3: {
      const Complex k = std::exp(st.log_k), a = std::exp(st.log_a);
      const Complex th0 = th.theta0, thi = th.theta_inf;
      const Complex hh = H / 2.0 + p * q / (2.0 * t);
      const Complex dd = (thi * thi - th0 * th0) / (2.0 * t);
      Mat ginf1 = mat2(-hh + dd + t / 2.0, k * q,
                       p * q * (t - p) / (k * t * t) + (th0 + thi) / (k * t) -
                           2.0 * thi * p / (k * t * t),
                       hh - dd - t / 2.0);
      ExponentData einf;
      einf.polar = {{-1, Mat(s3 * (t / 2.0))}};
      einf.log_coeff = s3 * (-thi);
      push_inf({ginf1}, std::move(einf));

      // z = 0, rank 1. The off-diagonal of g_{0,1} is pinned by the zeta^-1
      // order of the recursion with this gauge.
      Mat g01 = mat2(-hh - dd + t / 2.0, q * a / t * (p - t) + a / t * (thi - th0),
                     -(p * q + th0 + thi) / (t * a), hh + dd - t / 2.0);
      require_guard(k, "k");
      Mat g0 = (1.0 / std::sqrt(k)) * mat2(k, -k, p / t, (t - p) / t) *
               detail::diag_gauge_power(a);
      LocalFrame f0;
      f0.location = SeriesAnchor::at(0.0);
      f0.irregular = true;
      f0.gauge = g0;
      if (order >= 1) f0.series_coeffs = {g01};
      f0.exponent.polar = {{-1, Mat(s3 * (t / 2.0))}};
      f0.exponent.log_coeff = s3 * th0;
      frames.push_back(std::move(f0));
      break;
    }
    case PainleveKind::P4: {
      const Complex k = std::exp(st.log_k), a = std::exp(st.log_a);
      const Complex th0 = th.theta0, thi = th.theta_inf;
      const Complex S = q * (4.0 * p - q - 2.0 * t);
      Mat g1 = mat2(-(2.0 * H + q) / 4.0, -k / 2.0, -(S + 4.0 * thi) / (4.0 * k),
                    (2.0 * H + q) / 4.0);
      const Complex w2 = (2.0 * H + q + 2.0 * t) * (2.0 * H + q + 2.0 * t) - 4.0 * t * t;
      Mat g2 = mat2((w2 - 8.0 * th0 * th0 + 8.0 * thi * thi) / 32.0,
                    -k * (2.0 * H - q - 4.0 * t) / 8.0,
                    ((2.0 * H - q) * (S + 4.0 * thi + 4.0) + 8.0 * q) / (16.0 * k),
                    (w2 + 8.0 * th0 * th0 - 8.0 * thi * thi) / 32.0);
      ExponentData einf;
      einf.polar = {{-2, Mat(s3 * 0.5)}, {-1, Mat(s3 * t)}};
      einf.log_coeff = s3 * (-thi);
      push_inf({g1, g2}, std::move(einf));

      require_guard(th0, "theta0");
      require_guard(k * q * th0, "k*q*theta0");
      Mat g0 = (1.0 / (2.0 * std::sqrt(k * q * th0))) *
               mat2(-k * q, -k * q, -(S - 4.0 * th0) / 2.0, -(S + 4.0 * th0) / 2.0) *
               detail::diag_gauge_power(a);
      LocalFrame f0;
      f0.location = SeriesAnchor::at(0.0);
      f0.irregular = false;
      f0.gauge = g0;
      f0.exponent.log_coeff = s3 * th0;
      frames.push_back(std::move(f0));
      break;
    }
    case PainleveKind::P5: {
      const Complex k = std::exp(st.log_k), a = std::exp(st.log_a), b = std::exp(st.log_b);
      const Complex th0 = th.theta0, th1 = th.theta1, thi = th.theta_inf;
      // (2,1) entry pinned by the recursion at z^-1: (A0+A1)_21 / t
      Mat g1 = mat2(-H, k * (p * q * q - p * q + 2.0 * th1 * q - thi - th1 + th0) / t,
                    -(p * q - p + thi + th1 + th0) / (t * k), H);
      ExponentData einf;
      einf.polar = {{-1, Mat(s3 * (t / 2.0))}};
      einf.log_coeff = s3 * (-thi);
      push_inf({g1}, std::move(einf));

      require_guard(th0, "theta0");
      require_guard(th1, "theta1");
      const Complex s = p * q + thi + th1;
      Mat g0 = (1.0 / std::sqrt(-4.0 * k * th0)) *
               mat2(k * (2.0 * s - 2.0 * th0), k, 2.0 * s + 2.0 * th0, 1.0) *
               detail::diag_gauge_power(a);
      LocalFrame f0;
      f0.location = SeriesAnchor::at(0.0);
      f0.gauge = g0;
      f0.exponent.log_coeff = s3 * th0;
      frames.push_back(std::move(f0));

      Mat g1g = (1.0 / std::sqrt(2.0 * k * th1)) *
                mat2(k * (p * q + 2.0 * th1), k * q, p, 1.0) * detail::diag_gauge_power(b);
      LocalFrame f1;
      f1.location = SeriesAnchor::at(1.0);
      f1.gauge = g1g;
      f1.exponent.log_coeff = s3 * th1;
      frames.push_back(std::move(f1));
      break;
    }
    case PainleveKind::P6: {
      const Complex a = std::exp(st.log_a), b = std::exp(st.log_b), c = std::exp(st.log_c);
      const Complex th0 = th.theta0, th1 = th.theta1, tht = th.theta_t, thi = th.theta_inf;
      PviResidueParams pr = pvi_residue_params(th, st, t);
      require_guard(tht, "theta_t");
      require_guard(2.0 * tht - 1.0, "2*theta_t - 1");
      require_guard(2.0 * tht + 1.0, "2*theta_t + 1");
      const Complex k = pr.k;
      const Complex tt1 = t * (t - 1.0);

      LocalFrame f0;
      f0.location = SeriesAnchor::at(0.0);
      f0.gauge = std::sqrt(k * q / t) *
                 mat2(1.0, 1.0, 1.0 / pr.u, (pr.x0 + 2.0 * th0) / (pr.u * pr.x0)) *
                 detail::diag_gauge_power(a);
      f0.exponent.log_coeff = s3 * th0;
      frames.push_back(std::move(f0));

      LocalFrame f1;
      f1.location = SeriesAnchor::at(1.0);
      f1.gauge = std::sqrt(k * (q - 1.0) / (1.0 - t)) *
                 mat2(1.0, 1.0, 1.0 / pr.v, (pr.x1 + 2.0 * th1) / (pr.v * pr.x1)) *
                 detail::diag_gauge_power(b);
      f1.exponent.log_coeff = s3 * th1;
      frames.push_back(std::move(f1));

      LocalFrame ft;
      ft.location = SeriesAnchor::at(t);
      ft.gauge = std::sqrt(k * (t - q) / (t * (1.0 - t))) *
                 mat2(1.0, 1.0, 1.0 / pr.w, (pr.xt + 2.0 * tht) / (pr.w * pr.xt)) *
                 detail::diag_gauge_power(c);
      ft.exponent.log_coeff = s3 * tht;
      if (order >= 1) {
        const Complex base = H / (2.0 * tht) - p * q * (q - 1.0) / (2.0 * tht * tt1) -
                             thi * (q - t) / (2.0 * tht * tt1);
        const Complex mid = p * q * (q - 1.0) / (2.0 * tht * tt1) +
                            thi * (q - t) / (2.0 * tht * tt1);
        const Complex tail = tht * (2.0 * q * t - t * t - q) / (tt1 * (q - t));
        const Complex g12 = H * c / (2.0 * tht * (1.0 - 2.0 * tht)) - mid * c -
                            tail * c / (2.0 * tht - 1.0);
        // the (z-t)^0 recursion order fixes the -H sign here
        const Complex g21 = -H / (2.0 * tht * (1.0 + 2.0 * tht) * c) + mid / c -
                            tail / ((2.0 * tht + 1.0) * c);
        ft.series_coeffs = {mat2(base, g12, g21, -base)};
      }
      frames.push_back(std::move(ft));
      break;
    }
  }
  return frames;
}

}  // namespace isomtau
