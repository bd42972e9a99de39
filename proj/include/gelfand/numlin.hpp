#pragma once

// Dense complex linear algebra used by every other module: a small matrix
// type, cyclic Jacobi for Hermitian matrices, joint diagonalization of
// commuting normal families and tolerance-aware rank.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "gelfand/error.hpp"
#include "gelfand/rng.hpp"

namespace gelfand {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

struct Tolerance {
  double abs_eps = 1e-9;
  double rel_eps = 1e-9;

  Tolerance() = default;
  Tolerance(double abs, double rel) : abs_eps(abs), rel_eps(rel) {
    if (!(abs_eps > 0.0) || !(rel_eps > 0.0)) {
      throw std::invalid_argument("tolerances must be strictly positive");
    }
  }

  /// Slack used for structural checks (axioms, commutators, phase moduli)
  /// where a few matrix products compound round-off.
  double structural() const { return 1e3 * abs_eps; }
};

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, CVector data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("CMatrix: entry count does not match shape");
    }
  }
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("CMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(std::span<const cplx> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static CMatrix from_columns(std::size_t rows, const std::vector<CVector>& cols) {
    CMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const cplx> entries() const { return data_; }
  std::span<cplx> entries() { return data_; }

  CVector row(std::size_t i) const {
    return CVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  CVector column(std::size_t j) const {
    CVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const cplx> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  CMatrix adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  CMatrix conjugate() const {
    CMatrix m = *this;
    for (auto& z : m.data_) z = std::conj(z);
    return m;
  }

  /// Largest entry modulus (0 for empty matrices).
  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("CMatrix: inner dimensions differ");
    CMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend CVector operator*(const CMatrix& a, std::span<const cplx> x) {
    if (a.cols_ != x.size()) throw std::invalid_argument("CMatrix: vector length differs");
    CVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) y[i] += a(i, k) * x[k];
    return y;
  }

  bool operator==(const CMatrix&) const = default;

 private:
  void check_same_shape(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("CMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVector data_;
};

inline CVector operator*(const CMatrix& a, const CVector& x) { return a * std::span<const cplx>(x); }

// ---------------------------------------------------------------------------
// vector helpers

inline double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// <a, b> conjugate-linear in the first argument.
inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline CVector axpy(cplx alpha, std::span<const cplx> x, CVector y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
  return y;
}

inline CVector scaled(std::span<const cplx> x, cplx alpha) {
  CVector y(x.begin(), x.end());
  for (auto& z : y) z *= alpha;
  return y;
}

inline double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline CVector unit_vector(std::size_t n, std::size_t i) {
  CVector e(n);
  e[i] = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// Hermitian eigenproblem

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  CMatrix vectors;                  // unitary, columns are eigenvectors
};

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot
/// a_pq with a diagonal unitary, then applies the real symmetric rotation.
inline HermitianEigen hermitian_eig(const CMatrix& m, const Tolerance& tol = {}) {
  if (!m.square()) throw Error(ErrorCode::NotSquare, "hermitian_eig needs a square matrix");
  if (!m.all_finite()) throw Error(ErrorCode::NotHermitian, "matrix has non-finite entries");
  const std::size_t n = m.rows();
  const double scale = std::max(1.0, m.max_abs());
  const double asym = (m - m.adjoint()).max_abs();
  if (asym > tol.abs_eps * scale) {
    std::ostringstream os;
    os << "|M - M*|_max = " << asym;
    throw Error(ErrorCode::NotHermitian, os.str());
  }

  CMatrix a = (m + m.adjoint()) * cplx{0.5};
  CMatrix v = CMatrix::identity(n);

  auto off_norm2 = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return s;
  };
  double frob2 = 0.0;
  for (const auto& z : a.entries()) frob2 += std::norm(z);
  const double target = std::pow(std::numeric_limits<double>::epsilon(), 2) * frob2;

  int sweep = 0;
  for (; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_norm2() <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        const cplx phase = a(p, q) / r;  // a_pq = r e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
        const cplx gpp = c;
        const cplx gpq = s;
        const cplx gqp = -s * std::conj(phase);
        const cplx gqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // a <- a G
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // a <- G* a
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {  // v <- v G
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }
  if (sweep == kJacobiMaxSweeps && off_norm2() > target) {
    throw Error(ErrorCode::NoConvergence, "Jacobi sweep cap reached");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEigen out;
  out.eigenvalues.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// joint diagonalization

namespace detail {

inline double commutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).max_abs(); }

inline bool is_scalar(const CMatrix& m, double eps) {
  if (m.rows() == 0) return true;
  cplx mean{};
  for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, i);
  mean /= static_cast<double>(m.rows());
  return (m - CMatrix::identity(m.rows()) * mean).max_abs() <= eps;
}

inline CMatrix joint_diag_rec(const std::vector<CMatrix>& ms, std::uint64_t seed, int depth, double eps) {
  const std::size_t n = ms.front().rows();
  if (depth > 32) throw Error(ErrorCode::NoConvergence, "joint diagonalization recursion too deep");

  Rng rng(seed);
  CMatrix h(n, n);
  for (const auto& m : ms) {
    const CMatrix herm = m + m.adjoint();
    const CMatrix anti = (m - m.adjoint()) * cplx{0.0, 1.0};
    h += herm * cplx{rng.uniform(-1.0, 1.0)};
    h += anti * cplx{rng.uniform(-1.0, 1.0)};
  }
  h = (h + h.adjoint()) * cplx{0.5};
  const auto eig = hermitian_eig(h, Tolerance{1e-6, 1e-6});
  CMatrix u = eig.vectors;

  const double gap = 1e-6 * std::max(1.0, h.max_abs());
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && eig.eigenvalues[stop] - eig.eigenvalues[stop - 1] < gap) ++stop;
    if (stop - start > 1) {
      CMatrix basis(n, stop - start);
      for (std::size_t j = start; j < stop; ++j) basis.set_column(j - start, u.column(j));
      std::vector<CMatrix> restricted;
      bool all_scalar = true;
      for (const auto& m : ms) {
        restricted.push_back(basis.adjoint() * m * basis);
        all_scalar = all_scalar && is_scalar(restricted.back(), eps);
      }
      if (!all_scalar) {
        const CMatrix w = joint_diag_rec(restricted, Rng::splitmix64(seed) + 1, depth + 1, eps);
        const CMatrix refined = basis * w;
        for (std::size_t j = start; j < stop; ++j) u.set_column(j, refined.column(j - start));
      }
    }
    start = stop;
  }
  return u;
}

}  // namespace detail

inline constexpr std::uint64_t kJointDiagSeed = 0x6a6f696e74ULL;

/// Returns a unitary U with U* M U diagonal for every M in the family.
///
/// A seeded random real combination of the Hermitian parts M + M* and
/// i(M - M*) is diagonalized; eigenvalue clusters closer than
/// 1e-6 * |H|_max are split recursively by a fresh combination restricted to
/// the cluster.
inline CMatrix simultaneous_diag(const std::vector<CMatrix>& ms, const Tolerance& tol = {}) {
  if (ms.empty()) throw std::invalid_argument("simultaneous_diag needs at least one matrix");
  const std::size_t n = ms.front().rows();
  double scale = 1.0;
  for (const auto& m : ms) {
    if (!m.square() || m.rows() != n) throw Error(ErrorCode::NotSquare, "family must be square of one size");
    scale = std::max(scale, m.max_abs());
  }
  if (n == 0) return CMatrix{};
  const double eps = tol.structural() * scale * scale;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (detail::commutator_norm(ms[i], ms[i].adjoint()) > eps) {
      throw Error(ErrorCode::NotNormal, "matrix " + std::to_string(i) + " is not normal");
    }
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      if (detail::commutator_norm(ms[i], ms[j]) > eps) {
        throw Error(ErrorCode::NotCommuting,
                    "matrices " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
      }
    }
  }
  CMatrix u = detail::joint_diag_rec(ms, kJointDiagSeed, 0, tol.structural() * scale);

  const double diag_eps = 100.0 * tol.abs_eps * scale;
  for (const auto& m : ms) {
    const CMatrix d = u.adjoint() * m * u;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && std::abs(d(i, j)) > diag_eps) {
          throw Error(ErrorCode::NoConvergence, "joint diagonalization left off-diagonal residue");
        }
  }
  return u;
}

// ---------------------------------------------------------------------------
// rank, singular values, solving

/// Singular values in descending order, read off the Hermitian dilation
/// [[0, M], [M*, 0]] whose spectrum is {+-sigma_i} plus zeros. Working on the
/// dilation instead of M*M keeps the absolute error at eps*|M| rather than
/// sqrt(eps)*|M| for the small singular values.
inline std::vector<double> singular_values(const CMatrix& m, const Tolerance& tol = {}) {
  const std::size_t r = m.rows(), c = m.cols();
  const std::size_t k = std::min(r, c);
  if (k == 0) return {};
  CMatrix dil(r + c, r + c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      dil(i, r + j) = m(i, j);
      dil(r + j, i) = std::conj(m(i, j));
    }
  const auto eig = hermitian_eig(dil, tol);
  std::vector<double> sv(k);
  for (std::size_t i = 0; i < k; ++i) sv[i] = std::max(0.0, eig.eigenvalues[r + c - 1 - i]);
  return sv;
}

inline std::size_t numeric_rank(const CMatrix& m, const Tolerance& tol = {}) {
  const auto sv = singular_values(m, tol);
  if (sv.empty()) return 0;
  const double cut = tol.rel_eps * sv.front() + tol.abs_eps;
  return static_cast<std::size_t>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > cut; }));
}

/// Orthonormal basis (columns) of the column space of m.
inline CMatrix image_basis(const CMatrix& m, const Tolerance& tol = {}) {
  const std::size_t rank = numeric_rank(m, tol);
  CMatrix out(m.rows(), rank);
  if (rank == 0) return out;
  const auto eig = hermitian_eig(m * m.adjoint(), Tolerance{1e-6, 1e-6});
  for (std::size_t k = 0; k < rank; ++k) out.set_column(k, eig.vectors.column(m.rows() - 1 - k));
  return out;
}

/// Solves A X = B by Gaussian elimination with partial pivoting.
inline CMatrix solve(CMatrix a, CMatrix b) {
  if (!a.square() || a.rows() != b.rows()) throw Error(ErrorCode::NotSquare, "solve: shape mismatch");
  const std::size_t n = a.rows();
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) <= 1e-13 * scale) throw Error(ErrorCode::Singular, "matrix is singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(piv, j), b(col, j));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      const cplx f = a(i, col) / a(col, col);
      if (f == cplx{}) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cplx d = a(i, i);
    for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) /= d;
  }
  return b;
}

inline CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.rows())); }

}  // namespace gelfand
