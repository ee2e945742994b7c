#pragma once

#include <vector>

#include "isomtau/linalg.hpp"
#include "isomtau/types.hpp"

namespace isomtau {

// Fuchsian model data: diagonal exponents Theta_nu at each finite pole and
// the diagonal residue Theta_inf at infinity (= -sum A_nu).
struct SchlesingerModel {
  int mat_dim = 2;
  int pole_count = 2;
  std::vector<std::vector<Complex>> thetas;  // pole_count vectors of length mat_dim
  std::vector<Complex> theta_inf;

  void validate() const {
    if (mat_dim < 2) throw ConfigError("schlesinger: mat_dim must be >= 2");
    if (pole_count < 2) throw ConfigError("schlesinger: pole_count must be >= 2");
    if (static_cast<int>(thetas.size()) != pole_count) {
      throw ConfigError("schlesinger: need one theta vector per pole");
    }
    for (const auto& v : thetas) {
      if (static_cast<int>(v.size()) != mat_dim) throw ConfigError("schlesinger: theta size");
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
          if (std::abs(v[i] - v[j]) < 1e-10) {
            throw ConfigError("schlesinger: theta eigenvalues must be distinct");
          }
        }
      }
    }
    if (!theta_inf.empty() && static_cast<int>(theta_inf.size()) != mat_dim) {
      throw ConfigError("schlesinger: theta_inf size");
    }
  }
};

// Matrix Darboux phase point: Q_nu = G_nu Theta_nu, P_nu = G_nu^-1, so that
// A_nu = Q_nu P_nu has the prescribed eigenvalues.
struct SchlesingerState {
  std::vector<Complex> poles;
  std::vector<Mat> q_mats;
  std::vector<Mat> p_mats;

  int pole_count() const { return static_cast<int>(poles.size()); }
  Mat residue(int nu) const { return q_mats[static_cast<std::size_t>(nu)] *
                                     p_mats[static_cast<std::size_t>(nu)]; }
};

inline void check_pole_separation(const std::vector<Complex>& poles) {
  for (std::size_t i = 0; i < poles.size(); ++i) {
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      require_guard(poles[i] - poles[j], "pole separation");
    }
  }
}

// Build the Darboux state from user-supplied invertible gauges G_nu.
inline SchlesingerState schlesinger_state_from_gauges(const SchlesingerModel& model,
                                                      const std::vector<Complex>& poles,
                                                      const std::vector<Mat>& gauges) {
  model.validate();
  if (static_cast<int>(poles.size()) != model.pole_count ||
      static_cast<int>(gauges.size()) != model.pole_count) {
    throw ConfigError("schlesinger: poles/gauges count mismatch");
  }
  check_pole_separation(poles);
  SchlesingerState st;
  st.poles = poles;
  for (int nu = 0; nu < model.pole_count; ++nu) {
    const Mat& g = gauges[static_cast<std::size_t>(nu)];
    if (g.rows() != model.mat_dim || g.cols() != model.mat_dim) {
      throw ConfigError("schlesinger: gauge dim mismatch");
    }
    Mat gi;
    try {
      gi = mat_inverse(g);
    } catch (const SingularMatrixError&) {
      throw ConfigError("schlesinger: gauge matrix is singular or ill-conditioned");
    }
    double norm1 = g.cwiseAbs().colwise().sum().maxCoeff();
    double inv1 = gi.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 * inv1 > 1e8) throw ConfigError("schlesinger: gauge condition exceeds 1e8");
    Mat theta = Mat::Zero(model.mat_dim, model.mat_dim);
    for (int i = 0; i < model.mat_dim; ++i) {
      theta(i, i) = model.thetas[static_cast<std::size_t>(nu)][static_cast<std::size_t>(i)];
    }
    st.q_mats.push_back(g * theta);
    st.p_mats.push_back(gi);
  }
  return st;
}

// Check the state invariants: spectra of A_nu match the model thetas and
// -sum A_nu is diagonal (equal to theta_inf when provided).
inline double schlesinger_state_residual(const SchlesingerModel& model,
                                         const SchlesingerState& st) {
  double worst = 0.0;
  Mat sum = Mat::Zero(model.mat_dim, model.mat_dim);
  for (int nu = 0; nu < model.pole_count; ++nu) {
    Mat a = st.residue(nu);
    sum += a;
    worst = std::max(worst, spectrum_distance(eigenvalues_of(a),
                                              model.thetas[static_cast<std::size_t>(nu)]));
  }
  Mat minus = -sum;
  for (int i = 0; i < model.mat_dim; ++i) {
    for (int j = 0; j < model.mat_dim; ++j) {
      if (i != j) worst = std::max(worst, std::abs(minus(i, j)));
    }
    if (!model.theta_inf.empty()) {
      worst = std::max(worst, std::abs(minus(i, i) - model.theta_inf[static_cast<std::size_t>(i)]));
    }
  }
  return worst;
}

// H_nu = sum_{mu != nu} Tr(A_mu A_nu) / (a_nu - a_mu)
inline std::vector<Complex> schlesinger_hamiltonians(const SchlesingerState& st) {
  check_pole_separation(st.poles);
  int n = st.pole_count();
  std::vector<Mat> a(static_cast<std::size_t>(n));
  for (int nu = 0; nu < n; ++nu) a[static_cast<std::size_t>(nu)] = st.residue(nu);
  std::vector<Complex> h(static_cast<std::size_t>(n), Complex{});
  for (int nu = 0; nu < n; ++nu) {
    for (int mu = 0; mu < n; ++mu) {
      if (mu == nu) continue;
      h[static_cast<std::size_t>(nu)] +=
          trace_of(a[static_cast<std::size_t>(mu)] * a[static_cast<std::size_t>(nu)]) /
          (st.poles[static_cast<std::size_t>(nu)] - st.poles[static_cast<std::size_t>(mu)]);
    }
  }
  return h;
}

struct SchlesingerTangent {
  std::vector<Mat> dq;
  std::vector<Mat> dp;
};

// Hamiltonian flow in direction a_nu realized on (Q, P):
//   dQ_mu/da_nu = A_nu Q_mu / (a_nu - a_mu)            (mu != nu)
//   dP_mu/da_nu = -P_mu A_nu / (a_nu - a_mu)           (mu != nu)
//   dQ_nu/da_nu = -sum_{mu != nu} A_mu Q_nu / (a_mu - a_nu)
//   dP_nu/da_nu = +sum_{mu != nu} P_nu A_mu / (a_mu - a_nu)
// These are dQ_{jk} = dH/dP_{kj}, dP_{jk} = -dH/dQ_{kj} written out.
inline SchlesingerTangent schlesinger_vector_field(const SchlesingerState& st, int nu) {
  check_pole_separation(st.poles);
  int n = st.pole_count();
  int d = static_cast<int>(st.q_mats.front().rows());
  std::vector<Mat> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = st.residue(i);
  SchlesingerTangent out;
  out.dq.assign(static_cast<std::size_t>(n), Mat::Zero(d, d));
  out.dp.assign(static_cast<std::size_t>(n), Mat::Zero(d, d));
  for (int mu = 0; mu < n; ++mu) {
    if (mu != nu) {
      Complex den = st.poles[static_cast<std::size_t>(nu)] - st.poles[static_cast<std::size_t>(mu)];
      out.dq[static_cast<std::size_t>(mu)] =
          a[static_cast<std::size_t>(nu)] * st.q_mats[static_cast<std::size_t>(mu)] / den;
      out.dp[static_cast<std::size_t>(mu)] =
          -st.p_mats[static_cast<std::size_t>(mu)] * a[static_cast<std::size_t>(nu)] / den;
    } else {
      for (int rho = 0; rho < n; ++rho) {
        if (rho == nu) continue;
        Complex den =
            st.poles[static_cast<std::size_t>(rho)] - st.poles[static_cast<std::size_t>(nu)];
        out.dq[static_cast<std::size_t>(nu)] -=
            a[static_cast<std::size_t>(rho)] * st.q_mats[static_cast<std::size_t>(nu)] / den;
        out.dp[static_cast<std::size_t>(nu)] +=
            st.p_mats[static_cast<std::size_t>(nu)] * a[static_cast<std::size_t>(rho)] / den;
      }
    }
  }
  return out;
}

// Per-direction tau densities; for the Schlesinger family omega_JMU =
// sum H_nu da_nu with gamma = 1 and G identically zero.
inline std::vector<Complex> schlesinger_tau_density(const SchlesingerState& st) {
  return schlesinger_hamiltonians(st);
}

// Classical-action density in direction nu: sum_mu Tr(P_mu dQ_mu/da_nu) - H_nu.
inline Complex schlesinger_action_density(const SchlesingerState& st, int nu) {
  SchlesingerTangent tang = schlesinger_vector_field(st, nu);
  Complex s{};
  for (std::size_t mu = 0; mu < st.q_mats.size(); ++mu) {
    s += trace_of(st.p_mats[mu] * tang.dq[mu]);
  }
  return s - schlesinger_hamiltonians(st)[static_cast<std::size_t>(nu)];
}

}  // namespace isomtau
