#pragma once

#include <vector>

#include "isomtau/series.hpp"
#include "isomtau/types.hpp"

namespace isomtau {

// Matrix-valued rational function of z held as polynomial part plus pole
// parts: sum_j poly[j] z^j + sum_poles sum_m coef[m-1] (z-pos)^-m.
// This is the common carrier for the Lax matrices A(z), B(z).
struct RationalMatrix {
  struct PolePart {
    Complex pos;
    std::vector<Mat> coef;  // coef[m-1] multiplies (z-pos)^-(m)
  };

  std::vector<Mat> poly;
  std::vector<PolePart> poles;

  int dim() const {
    if (!poly.empty()) return static_cast<int>(poly.front().rows());
    return static_cast<int>(poles.front().coef.front().rows());
  }

  Mat eval(Complex z) const {
    int d = dim();
    Mat out = Mat::Zero(d, d);
    Complex zp = 1.0;
    for (const Mat& c : poly) {
      out += c * zp;
      zp *= z;
    }
    for (const PolePart& p : poles) {
      require_guard(z - p.pos, "z - pole");
      Complex w = 1.0 / (z - p.pos);
      Complex wp = w;
      for (const Mat& c : p.coef) {
        out += c * wp;
        wp *= w;
      }
    }
    return out;
  }

  RationalMatrix derivative() const {
    RationalMatrix out;
    int d = dim();
    if (poly.size() > 1) {
      out.poly.resize(poly.size() - 1, Mat::Zero(d, d));
      for (std::size_t j = 1; j < poly.size(); ++j) {
        out.poly[j - 1] = static_cast<double>(j) * poly[j];
      }
    }
    for (const PolePart& p : poles) {
      PolePart dp;
      dp.pos = p.pos;
      dp.coef.resize(p.coef.size() + 1, Mat::Zero(d, d));
      for (std::size_t m = 1; m <= p.coef.size(); ++m) {
        dp.coef[m] = -static_cast<double>(m) * p.coef[m - 1];
      }
      out.poles.push_back(std::move(dp));
    }
    if (out.poly.empty() && out.poles.empty()) out.poly.push_back(Mat::Zero(d, d));
    return out;
  }

  Mat residue_at(Complex pos) const {
    int d = dim();
    for (const PolePart& p : poles) {
      if (std::abs(p.pos - pos) < 1e-12) return p.coef.front();
    }
    return Mat::Zero(d, d);
  }

  Mat residue_at_infinity() const {
    int d = dim();
    Mat out = Mat::Zero(d, d);
    for (const PolePart& p : poles) out -= p.coef.front();
    return out;
  }

  // Exact local expansion, materialized through zeta-exponent `hi`.
  MatrixSeries expand_at(const SeriesAnchor& anchor, int hi) const {
    int d = dim();
    if (anchor.at_infinity) return expand_at_infinity(hi, d);
    return expand_at_finite(anchor.center, hi, d);
  }

 private:
  static double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
  }

  static Complex ipow(Complex z, int n) {
    Complex r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
  }

  MatrixSeries expand_at_infinity(int hi, int d) const {
    // z^j = zeta^-j; (z-b)^-m = zeta^m sum_i binom(m-1+i, i) b^i zeta^i
    int lo = 0;
    for (std::size_t j = 0; j < poly.size(); ++j) lo = std::min(lo, -static_cast<int>(j));
    if (hi < lo) hi = lo;
    std::vector<Mat> coeffs(static_cast<std::size_t>(hi - lo + 1), Mat::Zero(d, d));
    auto at = [&](int k) -> Mat& { return coeffs[static_cast<std::size_t>(k - lo)]; };
    for (std::size_t j = 0; j < poly.size(); ++j) {
      if (-static_cast<int>(j) <= hi) at(-static_cast<int>(j)) += poly[j];
    }
    for (const PolePart& p : poles) {
      for (std::size_t mi = 0; mi < p.coef.size(); ++mi) {
        int m = static_cast<int>(mi) + 1;
        Complex bp = 1.0;
        for (int i = 0; m + i <= hi; ++i) {
          at(m + i) += p.coef[mi] * (binom(m - 1 + i, i) * bp);
          bp *= p.pos;
        }
      }
    }
    return MatrixSeries(SeriesAnchor::infinity(), lo, std::move(coeffs), false);
  }

  MatrixSeries expand_at_finite(Complex a, int hi, int d) const {
    int lo = 0;
    for (const PolePart& p : poles) {
      if (std::abs(p.pos - a) < 1e-12) lo = std::min(lo, -static_cast<int>(p.coef.size()));
    }
    if (hi < lo) hi = lo;
    std::vector<Mat> coeffs(static_cast<std::size_t>(hi - lo + 1), Mat::Zero(d, d));
    auto at = [&](int k) -> Mat& { return coeffs[static_cast<std::size_t>(k - lo)]; };
    // polynomial part: z^j = (zeta + a)^j
    for (std::size_t j = 0; j < poly.size(); ++j) {
      for (int i = 0; i <= static_cast<int>(j) && i <= hi; ++i) {
        at(i) += poly[j] * (binom(static_cast<int>(j), i) * ipow(a, static_cast<int>(j) - i));
      }
    }
    for (const PolePart& p : poles) {
      if (std::abs(p.pos - a) < 1e-12) {
        for (std::size_t mi = 0; mi < p.coef.size(); ++mi) at(-(static_cast<int>(mi) + 1)) += p.coef[mi];
        continue;
      }
      Complex delta = a - p.pos;
      require_guard(delta, "pole separation");
      for (std::size_t mi = 0; mi < p.coef.size(); ++mi) {
        int m = static_cast<int>(mi) + 1;
        // (zeta + delta)^-m = sum_i binom(m-1+i, i) (-1)^i zeta^i / delta^(m+i)
        Complex dp = 1.0 / ipow(delta, m);
        for (int i = 0; i <= hi; ++i) {
          double sgn = (i % 2 == 0) ? 1.0 : -1.0;
          at(i) += p.coef[mi] * (binom(m - 1 + i, i) * sgn * dp);
          dp /= delta;
        }
      }
    }
    return MatrixSeries(SeriesAnchor::at(a), lo, std::move(coeffs), false);
  }
};

}  // namespace isomtau
