#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "isomtau/linalg.hpp"
#include "isomtau/types.hpp"

namespace isomtau {

// Expansion point of a local series: a finite center with zeta = z - center,
// or infinity with zeta = 1/z.
struct SeriesAnchor {
  bool at_infinity = false;
  Complex center{};

  static SeriesAnchor at(Complex c) { return {false, c}; }
  static SeriesAnchor infinity() { return {true, Complex{}}; }

  bool same_as(const SeriesAnchor& o) const {
    if (at_infinity != o.at_infinity) return false;
    return at_infinity || std::abs(center - o.center) < 1e-13;
  }
};

// Truncated matrix-valued local expansion sum_k C_k zeta^(start+k).
// `order()` is the highest zeta-exponent the stored coefficients are valid to;
// it is tracked through every operation and never silently exceeded. A series
// marked exact has no truncation error (all omitted coefficients are zero).
class MatrixSeries {
 public:
  MatrixSeries(SeriesAnchor anchor, int start, std::vector<Mat> coeffs, bool exact = false)
      : anchor_(anchor), start_(start), coeffs_(std::move(coeffs)), exact_(exact) {
    if (coeffs_.empty()) throw SeriesError("series needs at least one coefficient");
    dim_ = static_cast<int>(coeffs_.front().rows());
    for (const Mat& c : coeffs_) {
      if (c.rows() != dim_ || c.cols() != dim_) throw SeriesError("coefficient dim mismatch");
    }
  }

  static MatrixSeries zero(SeriesAnchor anchor, int dim, int order) {
    std::vector<Mat> c(1, Mat::Zero(dim, dim));
    MatrixSeries s(anchor, order, std::move(c), false);
    return s;
  }

  static MatrixSeries constant(SeriesAnchor anchor, const Mat& value) {
    return MatrixSeries(anchor, 0, {value}, true);
  }

  const SeriesAnchor& anchor() const { return anchor_; }
  int dim() const { return dim_; }
  int start_exponent() const { return start_; }
  int order() const { return start_ + static_cast<int>(coeffs_.size()) - 1; }
  bool exact() const { return exact_; }
  const std::vector<Mat>& coeffs() const { return coeffs_; }

  // Stored-or-zero coefficient read; window enforcement is the caller's job
  // (residue_at / recursion checks validate exponents against order()).
  Mat coeff(int exponent) const {
    int idx = exponent - start_;
    if (idx < 0 || idx >= static_cast<int>(coeffs_.size())) return Mat::Zero(dim_, dim_);
    return coeffs_[static_cast<std::size_t>(idx)];
  }

  bool covers(int exponent) const { return exact_ || exponent <= order(); }

  double max_coeff_norm() const {
    double m = 0.0;
    for (const Mat& c : coeffs_) m = std::max(m, max_abs(c));
    return m;
  }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max() / 4;
  int effective_order() const { return exact_ ? kInf : order(); }

  friend MatrixSeries series_add(const MatrixSeries& a, const MatrixSeries& b);
  friend MatrixSeries series_scale(const MatrixSeries& a, Complex c);
  friend MatrixSeries series_mul(const MatrixSeries& a, const MatrixSeries& b);
  friend MatrixSeries series_inverse(const MatrixSeries& a, int nterms);
  friend MatrixSeries series_differentiate(const MatrixSeries& a);
  friend Mat residue_at(const MatrixSeries& a);

  SeriesAnchor anchor_;
  int start_;
  std::vector<Mat> coeffs_;
  bool exact_;
  int dim_ = 0;
};

namespace detail {
inline void check_compatible(const MatrixSeries& a, const MatrixSeries& b) {
  if (!a.anchor().same_as(b.anchor())) throw SeriesError("series expansion points differ");
  if (a.dim() != b.dim()) throw SeriesError("series dims differ");
}
}  // namespace detail

inline MatrixSeries series_add(const MatrixSeries& a, const MatrixSeries& b) {
  detail::check_compatible(a, b);
  int start = std::min(a.start_, b.start_);
  bool exact = a.exact_ && b.exact_;
  int hi = exact ? std::max(a.order(), b.order())
                 : std::min(a.effective_order(), b.effective_order());
  if (hi < start) start = hi;
  std::vector<Mat> coeffs;
  coeffs.reserve(static_cast<std::size_t>(hi - start + 1));
  for (int k = start; k <= hi; ++k) coeffs.push_back(a.coeff(k) + b.coeff(k));
  return MatrixSeries(a.anchor_, start, std::move(coeffs), exact);
}

inline MatrixSeries series_scale(const MatrixSeries& a, Complex c) {
  std::vector<Mat> coeffs = a.coeffs_;
  for (Mat& m : coeffs) m *= c;
  return MatrixSeries(a.anchor_, a.start_, std::move(coeffs), a.exact_);
}

inline MatrixSeries series_sub(const MatrixSeries& a, const MatrixSeries& b) {
  return series_add(a, series_scale(b, Complex(-1.0, 0.0)));
}

// Cauchy product. The window narrows pessimistically: a factor known to order
// o contributes error O(zeta^(o+1)) which the other factor's leading term
// multiplies down to its start exponent.
inline MatrixSeries series_mul(const MatrixSeries& a, const MatrixSeries& b) {
  detail::check_compatible(a, b);
  int start = a.start_ + b.start_;
  bool exact = a.exact_ && b.exact_;
  long hi_l;
  if (exact) {
    hi_l = static_cast<long>(a.order()) + b.order();
  } else {
    long ha = static_cast<long>(a.start_) + b.effective_order();
    long hb = static_cast<long>(b.start_) + a.effective_order();
    hi_l = std::min(ha, hb);
    hi_l = std::min(hi_l, static_cast<long>(a.order()) + b.order());
  }
  int hi = static_cast<int>(hi_l);
  if (hi < start) {
    return MatrixSeries::zero(a.anchor_, a.dim(), hi);
  }
  std::vector<Mat> coeffs(static_cast<std::size_t>(hi - start + 1), Mat::Zero(a.dim(), a.dim()));
  int na = static_cast<int>(a.coeffs_.size());
  int nb = static_cast<int>(b.coeffs_.size());
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      int k = a.start_ + i + b.start_ + j;
      if (k > hi) continue;
      coeffs[static_cast<std::size_t>(k - start)] += a.coeffs_[static_cast<std::size_t>(i)] *
                                                     b.coeffs_[static_cast<std::size_t>(j)];
    }
  }
  return MatrixSeries(a.anchor_, start, std::move(coeffs), exact);
}

// b with series_mul(a, b) = I through the first nterms orders; needs an
// invertible leading coefficient. Valid window also respects a's own window.
inline MatrixSeries series_inverse(const MatrixSeries& a, int nterms) {
  if (nterms < 1) throw SeriesError("series_inverse needs nterms >= 1");
  const Mat lead = a.coeffs_.front();
  Mat lead_inv = mat_inverse(lead);  // throws SingularMatrixError
  int avail = a.exact_ ? nterms : std::min(nterms, a.order() - a.start_ + 1);
  std::vector<Mat> b(static_cast<std::size_t>(avail));
  b[0] = lead_inv;
  for (int m = 1; m < avail; ++m) {
    Mat acc = Mat::Zero(a.dim(), a.dim());
    for (int j = 1; j <= m; ++j) {
      acc += a.coeff(a.start_ + j) * b[static_cast<std::size_t>(m - j)];
    }
    b[static_cast<std::size_t>(m)] = -lead_inv * acc;
  }
  return MatrixSeries(a.anchor_, -a.start_, std::move(b), false);
}

// Termwise d/dz. At a finite center d/dz = d/dzeta; at infinity the chain
// rule for zeta = 1/z gives d/dz(zeta^k) = -k zeta^(k+1).
inline MatrixSeries series_differentiate(const MatrixSeries& a) {
  std::vector<Mat> coeffs;
  int start;
  if (!a.anchor_.at_infinity) {
    start = a.start_ - 1;
    coeffs.reserve(a.coeffs_.size());
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      int k = a.start_ + static_cast<int>(i);
      coeffs.push_back(static_cast<double>(k) * a.coeffs_[i]);
    }
  } else {
    start = a.start_ + 1;
    coeffs.reserve(a.coeffs_.size());
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      int k = a.start_ + static_cast<int>(i);
      coeffs.push_back(static_cast<double>(-k) * a.coeffs_[i]);
    }
  }
  return MatrixSeries(a.anchor_, start, std::move(coeffs), a.exact_);
}

// Residue in z. Finite center: coefficient of zeta^-1. Infinity: with
// res_inf f = -(coefficient of 1/z), this is minus the zeta^1 coefficient, so
// the residues of a rational function over all points sum to zero.
inline Mat residue_at(const MatrixSeries& a) {
  int want = a.anchor_.at_infinity ? 1 : -1;
  if (!a.covers(want)) throw SeriesError("residue exponent outside truncation window");
  Mat c = a.coeff(want);
  return a.anchor_.at_infinity ? Mat(-c) : c;
}

}  // namespace isomtau
