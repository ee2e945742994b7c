#pragma once

#include <vector>

#include "isomtau/types.hpp"

namespace isomtau {

inline Complex trace_of(const Mat& m) { return m.trace(); }

inline Mat commutator_of(const Mat& a, const Mat& b) { return a * b - b * a; }

// Inverse with a cheap condition estimate; rejects cond_1 > 1e12.
inline Mat mat_inverse(const Mat& m) {
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw SingularMatrixError("matrix is singular");
  Mat inv = lu.inverse();
  double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  double inv1 = inv.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 * inv1 > kConditionLimit) {
    throw SingularMatrixError("matrix condition estimate exceeds 1e12");
  }
  return inv;
}

inline std::vector<Complex> eigenvalues_of(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> solver(m, /*computeEigenvectors=*/false);
  std::vector<Complex> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

// Distance between spectra as multisets (greedy matching; fine for dim <= 4).
inline double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    double best = -1.0;
    std::size_t pick = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      double d = std::abs(x - b[j]);
      if (best < 0 || d < best) {
        best = d;
        pick = j;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return worst;
}

}  // namespace isomtau
