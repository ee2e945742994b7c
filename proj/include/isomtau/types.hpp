#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isomtau {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

constexpr double kGuardRadius = 1e-8;
constexpr double kConditionLimit = 1e12;

inline Mat sigma3() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Mat mat2(Complex a11, Complex a12, Complex a21, Complex a22) {
  Mat m(2, 2);
  m << a11, a12, a21, a22;
  return m;
}

inline bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline bool finite(const Mat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!finite(m(i, j))) return false;
  return true;
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// Evaluation hit a guarded denominator or an excluded parameter value.
struct GuardError : std::runtime_error {
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

struct SeriesError : std::runtime_error {
  explicit SeriesError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive integration could not continue (step underflow near a movable
// pole, or a non-finite state). Carries the last good path parameter.
struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, double s, Complex t)
      : std::runtime_error(what), last_good_s(s), last_good_t(t) {}
  double last_good_s;
  Complex last_good_t;
};

inline void require_guard(Complex denom, const char* what) {
  if (std::abs(denom) < kGuardRadius) {
    throw GuardError(std::string("guard violation: |") + what + "| < 1e-8");
  }
}

}  // namespace isomtau
