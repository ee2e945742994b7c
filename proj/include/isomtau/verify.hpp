#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "isomtau/frames.hpp"
#include "isomtau/integrate.hpp"
#include "isomtau/lax.hpp"
#include "isomtau/painleve.hpp"

namespace isomtau {

struct ResidualReport {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string context;

  static ResidualReport make(std::string name, double residual, double threshold,
                             std::string context) {
    ResidualReport r;
    r.name = std::move(name);
    r.residual = residual;
    r.threshold = threshold;
    r.passed = residual <= threshold;
    r.context = std::move(context);
    return r;
  }
};

// splitmix64-backed uniform draws; identical sequences on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  Complex box(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }

 private:
  std::uint64_t state_;
};

struct RandomPoint {
  ThetaParams theta;
  ExtendedState state;
  Complex t;
  std::uint64_t seed = 0;
};

// Uniform draws from bounded admissible boxes (|q|,|p| <= 2, |theta| <= 1,
// t away from the fixed critical points), rejecting guard violations and
// ill-conditioned PVI parametrizations.
inline RandomPoint random_admissible(PainleveKind kind, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 500; ++attempt) {
    RandomPoint pt;
    pt.seed = seed;
    pt.state.q = rng.box(-1.4, 1.4, -1.4, 1.4);
    pt.state.p = rng.box(-1.4, 1.4, -1.4, 1.4);
    pt.state.log_k = rng.box(-0.4, 0.4, -0.4, 0.4);
    pt.state.log_a = rng.box(-0.4, 0.4, -0.4, 0.4);
    pt.state.log_b = rng.box(-0.4, 0.4, -0.4, 0.4);
    pt.state.log_c = rng.box(-0.4, 0.4, -0.4, 0.4);
    auto unit_theta = [&] { return rng.box(-1.0, 1.0, -0.5, 0.5); };
    switch (kind) {
      case PainleveKind::P1:
        pt.t = rng.box(0.6, 1.6, -0.4, 0.4);
        break;
      case PainleveKind::P2:
        pt.theta.theta_inf = unit_theta();
        pt.t = rng.box(0.6, 1.6, -0.4, 0.4);
        break;
      case PainleveKind::P3:
        pt.theta.theta0 = unit_theta();
        pt.theta.theta_inf = unit_theta();
        pt.t = rng.box(0.8, 1.8, 0.1, 0.5);
        if (std::abs(pt.state.q) < 0.25) continue;
        break;
      case PainleveKind::P4:
        pt.theta.theta0 = unit_theta();
        pt.theta.theta_inf = unit_theta();
        pt.t = rng.box(0.6, 1.6, -0.4, 0.4);
        if (std::abs(pt.state.q) < 0.3) continue;
        if (std::abs(pt.theta.theta0) < 0.15) continue;
        break;
      case PainleveKind::P5:
        pt.theta.theta0 = unit_theta();
        pt.theta.theta1 = unit_theta();
        pt.theta.theta_inf = unit_theta();
        pt.t = rng.box(0.8, 1.8, 0.1, 0.5);
        if (std::abs(pt.state.q) < 0.25 || std::abs(pt.state.q - 1.0) < 0.25) continue;
        if (std::abs(pt.theta.theta0) < 0.15 || std::abs(pt.theta.theta1) < 0.15) continue;
        break;
      case PainleveKind::P6: {
        pt.theta.theta0 = unit_theta();
        pt.theta.theta1 = unit_theta();
        pt.theta.theta_t = unit_theta();
        pt.theta.theta_inf = unit_theta();
        pt.t = rng.box(1.6, 2.4, 0.2, 0.6);
        pt.state.p = rng.box(-0.9, 0.9, -0.9, 0.9);
        if (std::abs(pt.state.q) < 0.2 || std::abs(pt.state.q - 1.0) < 0.2 ||
            std::abs(pt.state.q - pt.t) < 0.2)
          continue;
        if (std::abs(pt.theta.theta_inf) < 0.25 || std::abs(pt.theta.theta0) < 0.15 ||
            std::abs(pt.theta.theta1) < 0.15 || std::abs(pt.theta.theta_t) < 0.15)
          continue;
        if (std::abs(2.0 * pt.theta.theta_t - 1.0) < 0.15 ||
            std::abs(2.0 * pt.theta.theta_t + 1.0) < 0.15)
          continue;
        try {
          PviResidueParams pr = pvi_residue_params(pt.theta, pt.state, pt.t);
          if (std::abs(pr.x0) < 1e-3 || std::abs(pr.x1) < 1e-3 || std::abs(pr.xt) < 1e-3) continue;
        } catch (const GuardError&) {
          continue;
        }
        break;
      }
    }
    try {
      check_guards(kind, pt.theta, pt.state, pt.t);
      return pt;
    } catch (const GuardError&) {
      continue;
    }
  }
  throw ConfigError("random_admissible: no admissible point found");
}

// A run counts as pole-free when no state slot leaves a moderate box; close
// passages to movable poles show up as large |p| or |q| excursions and spoil
// the pointwise identities even when the integrator resolves them.
inline bool trajectory_is_tame(const IntegrationResult& r, double bound = 20.0) {
  for (const auto& y : r.y_nodes) {
    for (int i = 0; i < r.state_size; ++i) {
      if (std::abs(y[static_cast<std::size_t>(i)]) > bound) return false;
    }
  }
  return true;
}

// Random Schlesinger family with a diagonal residue at infinity: random distinct
// traceless exponents and well-conditioned gauges, then the whole family is
// conjugated into the eigenbasis of sum A_nu so the residue at infinity is
// diagonal. theta_inf is read off from that diagonal.
inline std::pair<SchlesingerModel, SchlesingerState> random_schlesinger_setup(std::uint64_t seed,
                                                                              int poles,
                                                                              int dim) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SchlesingerModel model;
    model.mat_dim = dim;
    model.pole_count = poles;
    std::vector<Mat> gauges;
    std::vector<Complex> positions;
    for (int nu = 0; nu < poles; ++nu) {
      std::vector<Complex> th(static_cast<std::size_t>(dim));
      Complex acc{};
      for (int i = 0; i + 1 < dim; ++i) {
        th[static_cast<std::size_t>(i)] = rng.box(0.3, 1.1, 0.1, 0.5) + 0.7 * static_cast<double>(i);
        acc += th[static_cast<std::size_t>(i)];
      }
      th[static_cast<std::size_t>(dim - 1)] = -acc;
      model.thetas.push_back(std::move(th));
      Mat g(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.box(-0.8, 0.8, -0.8, 0.8);
      g += 2.0 * Mat::Identity(dim, dim);
      gauges.push_back(g);
      positions.push_back(Complex(1.7 * nu, 0.0) + rng.box(-0.2, 0.2, -0.2, 0.2));
    }
    try {
      model.validate();
      SchlesingerState raw = schlesinger_state_from_gauges(model, positions, gauges);
      Mat sum = Mat::Zero(dim, dim);
      for (int nu = 0; nu < poles; ++nu) sum += raw.residue(nu);
      Eigen::ComplexEigenSolver<Mat> es(sum, /*computeEigenvectors=*/true);
      Mat w = es.eigenvectors();
      Mat wi = mat_inverse(w);
      std::vector<Mat> rotated;
      for (int nu = 0; nu < poles; ++nu) {
        rotated.push_back(wi * gauges[static_cast<std::size_t>(nu)]);
      }
      SchlesingerState st = schlesinger_state_from_gauges(model, positions, rotated);
      Mat dsum = Mat::Zero(dim, dim);
      for (int nu = 0; nu < poles; ++nu) dsum += st.residue(nu);
      for (int i = 0; i < dim; ++i) model.theta_inf.push_back(-dsum(i, i));
      if (schlesinger_state_residual(model, st) > 1e-10) continue;
      return {model, st};
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  throw ConfigError("random_schlesinger_setup: no admissible family found");
}

namespace detail {

inline std::string point_context(PainleveKind kind, const RandomPoint& pt) {
  std::ostringstream os;
  os << kind_name(kind) << " seed=" << pt.seed << " t=(" << pt.t.real() << "," << pt.t.imag()
     << ") q=(" << pt.state.q.real() << "," << pt.state.q.imag() << ")";
  return os.str();
}

inline ExtendedState add_scaled(PainleveKind kind, const ExtendedState& a,
                                const ExtendedState& d, Complex c) {
  ExtendedState out = a;
  out.q += c * d.q;
  out.p += c * d.p;
  int n = state_slot_count(kind);
  if (n > 2) out.log_k += c * d.log_k;
  if (n > 3) out.log_a += c * d.log_a;
  if (n > 4) out.log_b += c * d.log_b;
  if (n > 5) out.log_c += c * d.log_c;
  return out;
}

inline ExtendedState rk4_advance(PainleveKind kind, const ThetaParams& th,
                                 const ExtendedState& st, Complex t, double h) {
  ExtendedState k1 = vector_field(kind, th, st, t);
  ExtendedState k2 = vector_field(kind, th, add_scaled(kind, st, k1, h / 2.0), t + h / 2.0);
  ExtendedState k3 = vector_field(kind, th, add_scaled(kind, st, k2, h / 2.0), t + h / 2.0);
  ExtendedState k4 = vector_field(kind, th, add_scaled(kind, st, k3, h), t + h);
  ExtendedState out = st;
  out = add_scaled(kind, out, k1, h / 6.0);
  out = add_scaled(kind, out, k2, h / 3.0);
  out = add_scaled(kind, out, k3, h / 3.0);
  out = add_scaled(kind, out, k4, h / 6.0);
  return out;
}

}  // namespace detail

// || dA/dt - dB/dz - [B, A] || maximized over the z samples; dA/dt by central
// differences through vector-field-advanced states, dB/dz analytic.
inline ResidualReport check_lax_compatibility(PainleveKind kind, const ThetaParams& th,
                                              const ExtendedState& st, Complex t,
                                              const std::vector<Complex>& z_samples,
                                              double threshold = 1e-5,
                                              std::string context = {}) {
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  ExtendedState fwd = detail::rk4_advance(kind, th, st, t, h);
  ExtendedState bwd = detail::rk4_advance(kind, th, st, t, -h);
  RationalMatrix a_mid = lax_a(kind, th, st, t);
  RationalMatrix b_mid = lax_b(kind, th, st, t);
  RationalMatrix db_dz = b_mid.derivative();
  RationalMatrix a_fwd = lax_a(kind, th, fwd, t + h);
  RationalMatrix a_bwd = lax_a(kind, th, bwd, t - h);
  double worst = 0.0;
  for (Complex z : z_samples) {
    Mat da_dt = (a_fwd.eval(z) - a_bwd.eval(z)) / (2.0 * h);
    Mat az = a_mid.eval(z);
    Mat bz = b_mid.eval(z);
    Mat r = da_dt - db_dz.eval(z) - (bz * az - az * bz);
    worst = std::max(worst, max_abs(r));
  }
  return ResidualReport::make("lax_compatibility", worst, threshold, std::move(context));
}

// Central-difference gradients of H against the vector field, including the
// log-gauge / theta canonical pairs.
inline ResidualReport check_hamilton_equations(PainleveKind kind, const ThetaParams& th,
                                               const ExtendedState& st, Complex t,
                                               double threshold = 1e-5,
                                               std::string context = {}) {
  ExtendedState v = vector_field(kind, th, st, t);
  auto fd_state = [&](Complex ExtendedState::* slot, Complex ExtendedState::* vf_slot,
                      double sign) {
    ExtendedState plus = st, minus = st;
    double h = 1e-6 * std::max(1.0, std::abs(st.*slot));
    (plus.*slot) += h;
    (minus.*slot) -= h;
    Complex grad = (hamiltonian(kind, th, plus, t) - hamiltonian(kind, th, minus, t)) / (2.0 * h);
    return std::abs(v.*vf_slot - sign * grad);
  };
  double worst = std::max(fd_state(&ExtendedState::p, &ExtendedState::q, +1.0),
                          fd_state(&ExtendedState::q, &ExtendedState::p, -1.0));
  auto fd_theta = [&](Complex ThetaParams::* par, Complex ExtendedState::* vf_slot) {
    ThetaParams plus = th, minus = th;
    double h = 1e-6 * std::max(1.0, std::abs(th.*par));
    (plus.*par) += h;
    (minus.*par) -= h;
    Complex grad = (hamiltonian(kind, plus, st, t) - hamiltonian(kind, minus, st, t)) / (2.0 * h);
    return std::abs(v.*vf_slot + grad);
  };
  switch (kind) {
    case PainleveKind::P1:
      break;
    case PainleveKind::P2:
      worst = std::max(worst, fd_theta(&ThetaParams::theta_inf, &ExtendedState::log_k));
      break;
    case PainleveKind::P3:
    case PainleveKind::P4:
      worst = std::max(worst, fd_theta(&ThetaParams::theta_inf, &ExtendedState::log_k));
      worst = std::max(worst, fd_theta(&ThetaParams::theta0, &ExtendedState::log_a));
      break;
    case PainleveKind::P5:
      worst = std::max(worst, fd_theta(&ThetaParams::theta_inf, &ExtendedState::log_k));
      worst = std::max(worst, fd_theta(&ThetaParams::theta0, &ExtendedState::log_a));
      worst = std::max(worst, fd_theta(&ThetaParams::theta1, &ExtendedState::log_b));
      break;
    case PainleveKind::P6:
      worst = std::max(worst, fd_theta(&ThetaParams::theta_inf, &ExtendedState::log_k));
      worst = std::max(worst, fd_theta(&ThetaParams::theta0, &ExtendedState::log_a));
      worst = std::max(worst, fd_theta(&ThetaParams::theta1, &ExtendedState::log_b));
      worst = std::max(worst, fd_theta(&ThetaParams::theta_t, &ExtendedState::log_c));
      break;
  }
  return ResidualReport::make("hamilton_equations", worst, threshold, std::move(context));
}

namespace detail {

inline MatrixSeries conjugate_series(const MatrixSeries& s, const Mat& g, const Mat& gi) {
  std::vector<Mat> coeffs;
  coeffs.reserve(s.coeffs().size());
  for (const Mat& c : s.coeffs()) coeffs.push_back(gi * c * g);
  return MatrixSeries(s.anchor(), s.start_exponent(), std::move(coeffs), s.exact());
}

// Recursion residual R = A~ G~ - G~' - G~ Theta' for one frame, in the
// frame's own gauge. Returns {max full-window norm, diagonal norm at the
// first truncated order} (the latter only meaningful at irregular points,
// where the unknown next coefficient enters off-diagonally).
inline std::pair<double, double> frame_recursion_residual(const RationalMatrix& a,
                                                          const LocalFrame& frame) {
  Mat gauge_inv = mat_inverse(frame.gauge);
  std::vector<Mat> gcoeffs;
  gcoeffs.push_back(Mat::Identity(2, 2));
  for (const Mat& c : frame.series_coeffs) gcoeffs.push_back(c);
  if (frame.irregular) gcoeffs.push_back(Mat::Zero(2, 2));  // diag-extension order
  MatrixSeries gser(frame.location, 0, gcoeffs, false);
  MatrixSeries thp = theta_prime_series(frame);
  MatrixSeries a_loc = a.expand_at(frame.location, gser.order() + 8 + std::abs(thp.start_exponent()));
  MatrixSeries a_til = conjugate_series(a_loc, frame.gauge, gauge_inv);
  MatrixSeries r = series_sub(series_mul(a_til, gser),
                              series_add(series_differentiate(gser), series_mul(gser, thp)));
  int full_hi = frame.irregular ? r.order() - 1 : r.order();
  double full = 0.0;
  for (int k = r.start_exponent(); k <= full_hi; ++k) full = std::max(full, max_abs(r.coeff(k)));
  double diag = 0.0;
  if (frame.irregular) {
    Mat ext = r.coeff(r.order());
    for (Eigen::Index i = 0; i < ext.rows(); ++i) diag = std::max(diag, std::abs(ext(i, i)));
  }
  return {full, diag};
}

}  // namespace detail

// Assemble R(z) = A G - G' - G Theta' as truncated series products at one
// singular point; certifies the closed-form coefficients and gauge relations
// through every order the supplied coefficients determine.
inline ResidualReport check_series_recursion(PainleveKind kind, const ThetaParams& th,
                                             const ExtendedState& st, Complex t,
                                             const SeriesAnchor& location,
                                             double threshold = 1e-9, std::string context = {}) {
  std::vector<LocalFrame> frames = local_frames(kind, th, st, t, max_frame_order(kind));
  RationalMatrix a = lax_a(kind, th, st, t);
  for (const LocalFrame& f : frames) {
    if (!f.location.same_as(location)) continue;
    auto [full, diag] = detail::frame_recursion_residual(a, f);
    return ResidualReport::make("series_recursion", std::max(full, diag), threshold,
                                std::move(context));
  }
  throw ConfigError("no frame at the requested location");
}

// Worst recursion residual over every frame with closed-form data.
inline ResidualReport check_series_recursion_all(PainleveKind kind, const ThetaParams& th,
                                                 const ExtendedState& st, Complex t,
                                                 double threshold = 1e-9,
                                                 std::string context = {}) {
  std::vector<LocalFrame> frames = local_frames(kind, th, st, t, max_frame_order(kind));
  RationalMatrix a = lax_a(kind, th, st, t);
  double worst = 0.0;
  for (const LocalFrame& f : frames) {
    auto [full, diag] = detail::frame_recursion_residual(a, f);
    worst = std::max({worst, full, diag});
  }
  return ResidualReport::make("series_recursion", worst, threshold, std::move(context));
}

// | delta ln tau - gamma * delta S - (G_end - G_start) | over one run.
inline ResidualReport check_action_identity(PainleveKind kind, const ThetaParams& th,
                                            const ExtendedState& initial, const PathSpec& path,
                                            const Tolerances& tol, double gamma_override = 0.0,
                                            double threshold = 1e-7, std::string context = {}) {
  IntegrationResult r = integrate_path(kind, th, initial, path, tol);
  double gamma = gamma_override > 0.0 ? gamma_override : spec_for(kind).gamma;
  Complex resid = r.delta_ln_tau - gamma * r.delta_action - (r.g_end - r.g_start);
  return ResidualReport::make("action_identity", std::abs(resid), threshold, std::move(context));
}

// Variational identity: central-difference d(ln tau)/d(initial data) against
// the boundary terms gamma * [p dq] + [dG].
inline ResidualReport check_variational_identity(PainleveKind kind, const ThetaParams& th,
                                                 const ExtendedState& initial,
                                                 const PathSpec& path, Complex dq, Complex dp,
                                                 double h, const Tolerances& tol,
                                                 double threshold = 1e-4,
                                                 std::string context = {}) {
  ExtendedState plus = initial, minus = initial;
  plus.q += h * dq;
  plus.p += h * dp;
  minus.q -= h * dq;
  minus.p -= h * dp;
  IntegrationResult rp = integrate_path(kind, th, plus, path, tol);
  IntegrationResult rm = integrate_path(kind, th, minus, path, tol);
  const double gamma = spec_for(kind).gamma;
  Complex lhs = (rp.delta_ln_tau - rm.delta_ln_tau) / (2.0 * h);
  ExtendedState end_p = unpack_state(kind, rp.y_nodes.back());
  ExtendedState end_m = unpack_state(kind, rm.y_nodes.back());
  Complex p_end = (end_p.p + end_m.p) / 2.0;
  Complex dq_end = (end_p.q - end_m.q) / (2.0 * h);
  Complex dg_end = (rp.g_end - rm.g_end) / (2.0 * h);
  Complex dg_start = (rp.g_start - rm.g_start) / (2.0 * h);
  Complex rhs = gamma * (p_end * dq_end - initial.p * dq) + (dg_end - dg_start);
  return ResidualReport::make("variational_identity", std::abs(lhs - rhs), threshold,
                              std::move(context));
}

// Dense-output differentiation of the ln tau accumulator against the
// pointwise omega_JMU density; for P3 additionally the log-gauge identity
// pq/t = (1/4) d/dt(log a - log k) - (th0+thinf)/(2t).
inline ResidualReport check_tau_log_derivative(PainleveKind kind, const ThetaParams& th,
                                               const ExtendedState& initial, const PathSpec& path,
                                               const Tolerances& tol, double threshold = 1e-6,
                                               std::string context = {}) {
  IntegrationResult r = integrate_path(kind, th, initial, path, tol);
  const int acc_idx = r.state_size;
  const double s0 = r.s_nodes.front(), s1 = r.s_nodes.back();
  const double delta = (s1 - s0) / 900.0;
  double worst = 0.0;
  const int samples = 40;
  for (int i = 0; i < samples; ++i) {
    double s = s0 + (s1 - s0) * (0.05 + 0.9 * static_cast<double>(i) / (samples - 1));
    auto acc_at = [&](double ss) { return r.state_at_s(ss)[static_cast<std::size_t>(acc_idx)]; };
    Complex deriv = (-acc_at(s + 2.0 * delta) + 8.0 * acc_at(s + delta) - 8.0 * acc_at(s - delta) +
                     acc_at(s - 2.0 * delta)) /
                    (12.0 * delta);
    std::vector<Complex> point, dir;
    r.path.locate(s, point, dir);
    ExtendedState st = unpack_state(kind, r.state_at_s(s));
    DensityBreakdown den = density_breakdown(kind, th, st, point[0]);
    worst = std::max(worst, std::abs(deriv - den.tau_density * dir[0]));
    if (kind == PainleveKind::P3) {
      ExtendedState v = vector_field(kind, th, st, point[0]);
      Complex sub = st.p * st.q / point[0] - 0.25 * (v.log_a - v.log_k) +
                    (th.theta0 + th.theta_inf) / (2.0 * point[0]);
      worst = std::max(worst, std::abs(sub));
    }
  }
  return ResidualReport::make("tau_log_derivative", worst, threshold, std::move(context));
}

// Schlesinger certification bundle: isospectrality, sum conservation, loop
// closedness, Hamiltonian-vs-commutator vector field, and the G == 0 action
// identity.
inline std::vector<ResidualReport> check_schlesinger_suite(const SchlesingerModel& model,
                                                           const SchlesingerState& initial,
                                                           const PathSpec& loop,
                                                           const Tolerances& tol,
                                                           std::string context = {}) {
  std::vector<ResidualReport> out;
  const int n = model.pole_count, d = model.mat_dim;

  // commutator oracle at the initial state
  double comm_worst = 0.0;
  for (int nu = 0; nu < n; ++nu) {
    SchlesingerTangent tang = schlesinger_vector_field(initial, nu);
    for (int mu = 0; mu < n; ++mu) {
      Mat da = tang.dq[static_cast<std::size_t>(mu)] * initial.p_mats[static_cast<std::size_t>(mu)] +
               initial.q_mats[static_cast<std::size_t>(mu)] * tang.dp[static_cast<std::size_t>(mu)];
      Mat want = Mat::Zero(d, d);
      if (mu != nu) {
        want = commutator_of(initial.residue(mu), initial.residue(nu)) /
               (initial.poles[static_cast<std::size_t>(mu)] - initial.poles[static_cast<std::size_t>(nu)]);
      } else {
        for (int rho = 0; rho < n; ++rho) {
          if (rho == nu) continue;
          want -= commutator_of(initial.residue(rho), initial.residue(nu)) /
                  (initial.poles[static_cast<std::size_t>(rho)] - initial.poles[static_cast<std::size_t>(nu)]);
        }
      }
      comm_worst = std::max(comm_worst, max_abs(Mat(da - want)));
    }
  }
  out.push_back(ResidualReport::make("schlesinger_commutator", comm_worst, 1e-8, context));

  IntegrationResult run = integrate_schlesinger(model, initial, loop, tol);

  double iso_worst = 0.0, cons_worst = 0.0;
  Mat sum0 = Mat::Zero(d, d);
  for (int nu = 0; nu < n; ++nu) sum0 += initial.residue(nu);
  const int samples = 24;
  for (int i = 0; i <= samples; ++i) {
    double s = run.s_nodes.back() * static_cast<double>(i) / samples;
    SchlesingerState st = schlesinger_state_at(model, run, s);
    Mat sum = Mat::Zero(d, d);
    for (int nu = 0; nu < n; ++nu) {
      Mat a = st.residue(nu);
      sum += a;
      iso_worst = std::max(iso_worst, spectrum_distance(eigenvalues_of(a),
                                                        model.thetas[static_cast<std::size_t>(nu)]));
    }
    cons_worst = std::max(cons_worst, max_abs(Mat(sum - sum0)));
    for (int r1 = 0; r1 < d; ++r1)
      for (int c1 = 0; c1 < d; ++c1)
        if (r1 != c1) cons_worst = std::max(cons_worst, std::abs(sum(r1, c1)));
  }
  out.push_back(ResidualReport::make("schlesinger_isospectral", iso_worst, 1e-9, context));
  out.push_back(ResidualReport::make("schlesinger_conservation", cons_worst, 1e-9, context));

  bool closed = PathSpec::seg_norm(loop.waypoints.front(), loop.waypoints.back()) < 1e-14;
  if (closed) {
    out.push_back(ResidualReport::make("schlesinger_closedness", std::abs(run.delta_ln_tau), 1e-8,
                                       context));
  }

  Complex act = run.delta_ln_tau - run.delta_action;
  out.push_back(ResidualReport::make("schlesinger_action_identity", std::abs(act), 1e-8, context));

  // mixed-partial symmetry via RK4-advanced flows
  double mixed_worst = 0.0;
  const double h = 1e-5;
  auto advance = [&](const SchlesingerState& st, int nu, double hh) {
    SchlesingerTangent k1 = schlesinger_vector_field(st, nu);
    auto add = [&](const SchlesingerState& base, const SchlesingerTangent& tg, double c) {
      SchlesingerState o = base;
      for (std::size_t m = 0; m < o.q_mats.size(); ++m) {
        o.q_mats[m] += c * tg.dq[m];
        o.p_mats[m] += c * tg.dp[m];
      }
      o.poles[static_cast<std::size_t>(nu)] += c;
      return o;
    };
    SchlesingerTangent k2 = schlesinger_vector_field(add(st, k1, hh / 2.0), nu);
    SchlesingerTangent k3 = schlesinger_vector_field(add(st, k2, hh / 2.0), nu);
    SchlesingerTangent k4 = schlesinger_vector_field(add(st, k3, hh), nu);
    SchlesingerState o = st;
    for (std::size_t m = 0; m < o.q_mats.size(); ++m) {
      o.q_mats[m] += hh / 6.0 * (k1.dq[m] + 2.0 * k2.dq[m] + 2.0 * k3.dq[m] + k4.dq[m]);
      o.p_mats[m] += hh / 6.0 * (k1.dp[m] + 2.0 * k2.dp[m] + 2.0 * k3.dp[m] + k4.dp[m]);
    }
    o.poles[static_cast<std::size_t>(nu)] += hh;
    return o;
  };
  for (int nu = 0; nu < n; ++nu) {
    for (int mu = 0; mu < n; ++mu) {
      if (mu == nu) continue;
      auto hmu = [&](const SchlesingerState& st) {
        return schlesinger_hamiltonians(st)[static_cast<std::size_t>(mu)];
      };
      auto hnu = [&](const SchlesingerState& st) {
        return schlesinger_hamiltonians(st)[static_cast<std::size_t>(nu)];
      };
      Complex dmu_dnu = (hmu(advance(initial, nu, h)) - hmu(advance(initial, nu, -h))) / (2.0 * h);
      Complex dnu_dmu = (hnu(advance(initial, mu, h)) - hnu(advance(initial, mu, -h))) / (2.0 * h);
      mixed_worst = std::max(mixed_worst, std::abs(dmu_dnu - dnu_dmu));
    }
  }
  out.push_back(ResidualReport::make("schlesinger_mixed_partials", mixed_worst, 1e-6, context));
  return out;
}

}  // namespace isomtau
