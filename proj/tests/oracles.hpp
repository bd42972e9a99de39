#pragma once

// Reference computations that share no code path with the library's
// spectral machinery. They only work on instances whose answer is known by
// construction (delta bases, generated spaceoids), which is enough to pin
// the numerical routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <vector>

#include "gelfand/gelfand.hpp"

namespace oracle {

using gelfand::cplx;
using gelfand::CMatrix;
using gelfand::CVector;

/// Determinant by Laplace expansion; fine for n <= 6.
inline cplx det(const CMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  cplx s{};
  for (std::size_t j = 0; j < n; ++j) {
    CMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    s += (j % 2 ? -1.0 : 1.0) * m(0, j) * det(minor);
  }
  return s;
}

/// Eigenvalues of a 2x2 Hermitian matrix, ascending, from the quadratic formula.
inline std::pair<double, double> eig2(const CMatrix& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double b = std::abs(m(0, 1));
  const double mid = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {mid - rad, mid + rad};
}

/// Number of points of the spaceoid over each (A, B): the corner dimensions
/// summed per Hom-set, and the multiset of (target, source) base pairs.
inline std::size_t points_over(const gelfand::FiniteSpaceoid& e, std::size_t a, std::size_t b) {
  return e.fiber(a, b).size();
}

/// C*-norm of an element of Gamma(E)_AB given in delta coordinates: for pair
/// groupoid components every base point of B carries at most one point of
/// E_AB, so x*x is diagonal with entries |x_p|^2 and the norm is the largest
/// coordinate modulus.
inline double sections_norm(const CVector& x) {
  double m = 0.0;
  for (const auto& z : x) m = std::max(m, std::abs(z));
  return m;
}

/// Orbit classes of the sections category of a spaceoid, by brute force over
/// every tuple of base points (one per object): a tuple is a class iff for
/// every pair of objects either both nodes lie in one component, or neither
/// node's component reaches the other object.
inline std::size_t orbit_class_count(const gelfand::FiniteSpaceoid& e) {
  const auto comps = gelfand::spaceoid_components(e);
  std::map<gelfand::SpaceoidNode, std::size_t> comp_of;
  std::vector<std::set<std::size_t>> reach(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k)
    for (const auto& node : comps[k]) {
      comp_of[node] = k;
      reach[k].insert(node.first);
    }
  const std::size_t n = e.size();
  std::vector<std::size_t> pick(n, 0);
  std::size_t count = 0;
  while (true) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      for (std::size_t b = 0; b < n && ok; ++b) {
        if (a == b) continue;
        const std::size_t ka = comp_of.at({a, pick[a]}), kb = comp_of.at({b, pick[b]});
        if (ka == kb) continue;
        ok = !reach[ka].count(b) && !reach[kb].count(a);
      }
    if (ok) ++count;
    std::size_t a = 0;
    while (a < n && ++pick[a] == e.base_sets[a].size()) pick[a++] = 0;
    if (a == n) break;
  }
  return count;
}

/// Composition and involution of Gamma(E) evaluated directly from the
/// spaceoid's phase tables, as an independent check of the tensors.
inline CVector sections_compose(const gelfand::FiniteSpaceoid& e, std::size_t a, std::size_t b, std::size_t c,
                                const CVector& x, const CVector& y) {
  CVector out(e.fiber(a, c).size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const auto& p = e.fiber(a, b)[i];
      const auto& q = e.fiber(b, c)[j];
      if (p.source != q.target) continue;
      for (std::size_t k = 0; k < out.size(); ++k) {
        const auto& r = e.fiber(a, c)[k];
        if (r.target == p.target && r.source == q.source)
          out[k] += x[i] * y[j] * e.phase({a, b, i}, {b, c, j});
      }
    }
  return out;
}

}  // namespace oracle
