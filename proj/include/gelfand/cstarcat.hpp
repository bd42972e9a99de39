#pragma once

// Finite-dimensional commutative C*-categories given by structure constants:
// validation, diagonal characters, corners e_p o C_AB o e_q, the C*-norm,
// orbit classes of characters, *-functors and the linking category of a
// Hilbert C*-bimodule.

#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gelfand/numlin.hpp"
#include "gelfand/report.hpp"

namespace gelfand {

/// Hom-set data are indexed by object positions. For objects A, B, C:
///  - dims[A*n+B] is dim C_AB;
///  - comp[(A*n+B)*n+C] has (d_AB*d_BC) rows and d_AC columns, row i*d_BC+j
///    holding the coordinates of b_i o b_j;
///  - invol[A*n+B] is d_BA x d_AB and maps conj(coords of x) to coords of x*;
///  - units[A] are the coordinates of the identity of C_AA.
struct FiniteCStarCategory {
  std::vector<std::string> objects;
  std::vector<std::size_t> dims;
  std::vector<CMatrix> comp;
  std::vector<CMatrix> invol;
  std::vector<CVector> units;

  static FiniteCStarCategory with_objects(std::vector<std::string> names) {
    FiniteCStarCategory c;
    const std::size_t n = names.size();
    c.objects = std::move(names);
    c.dims.assign(n * n, 0);
    c.comp.assign(n * n * n, CMatrix{});
    c.invol.assign(n * n, CMatrix{});
    c.units.assign(n, CVector{});
    return c;
  }

  std::size_t size() const { return objects.size(); }
  std::size_t dim(std::size_t a, std::size_t b) const { return dims[a * size() + b]; }
  const CMatrix& composition(std::size_t a, std::size_t b, std::size_t c) const {
    return comp[(a * size() + b) * size() + c];
  }
  CMatrix& composition(std::size_t a, std::size_t b, std::size_t c) { return comp[(a * size() + b) * size() + c]; }
  const CMatrix& involution(std::size_t a, std::size_t b) const { return invol[a * size() + b]; }
  CMatrix& involution(std::size_t a, std::size_t b) { return invol[a * size() + b]; }

  std::optional<std::size_t> find_object(const std::string& name) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i] == name) return i;
    return std::nullopt;
  }

  /// x o y for x in C_AB, y in C_BC.
  CVector compose(std::size_t a, std::size_t b, std::size_t c, std::span<const cplx> x,
                  std::span<const cplx> y) const {
    const CMatrix& t = composition(a, b, c);
    const std::size_t dbc = dim(b, c);
    CVector out(dim(a, c));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == cplx{}) continue;
      for (std::size_t j = 0; j < dbc; ++j) {
        const cplx w = x[i] * y[j];
        if (w == cplx{}) continue;
        const std::size_t row = i * dbc + j;
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * t(row, k);
      }
    }
    return out;
  }

  /// x* in C_BA for x in C_AB.
  CVector star(std::size_t a, std::size_t b, std::span<const cplx> x) const {
    CVector cx(x.begin(), x.end());
    for (auto& z : cx) z = std::conj(z);
    return involution(a, b) * cx;
  }

  /// Largest structure constant modulus, used to scale tolerances.
  double scale() const {
    double s = 0.0;
    for (const auto& m : comp) s = std::max(s, m.max_abs());
    for (const auto& m : invol) s = std::max(s, m.max_abs());
    for (const auto& u : units) s = std::max(s, max_abs(u));
    return s;
  }

  bool operator==(const FiniteCStarCategory&) const = default;
};

inline double axiom_eps(const FiniteCStarCategory& c, const Tolerance& tol) {
  const double s = 1.0 + c.scale();
  return tol.structural() * s * s * s;
}

/// Shape checks only; everything else lives in validate_category.
inline void check_shapes(const FiniteCStarCategory& c, ValidationReport& report) {
  const std::size_t n = c.size();
  report.ran("shape");
  if (c.dims.size() != n * n || c.comp.size() != n * n * n || c.invol.size() != n * n || c.units.size() != n) {
    report.fail("shape", "tensor table sizes do not match the object count");
    return;
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (c.units[a].size() != c.dim(a, a)) report.fail("shape", "unit of " + c.objects[a] + " has wrong length", {a});
    for (std::size_t b = 0; b < n; ++b) {
      const CMatrix& j = c.involution(a, b);
      if (j.rows() != c.dim(b, a) || j.cols() != c.dim(a, b)) {
        report.fail("shape", "involution " + c.objects[a] + "|" + c.objects[b] + " has wrong shape", {a, b});
      }
      for (std::size_t k = 0; k < n; ++k) {
        const CMatrix& t = c.composition(a, b, k);
        if (t.rows() != c.dim(a, b) * c.dim(b, k) || t.cols() != c.dim(a, k)) {
          report.fail("shape", "composition " + c.objects[a] + "|" + c.objects[b] + "|" + c.objects[k] +
                                   " has wrong shape",
                      {a, b, k});
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// characters of the diagonal algebras

/// A character of the commutative algebra C_AA, with its minimal idempotent.
struct DiagonalCharacter {
  std::size_t object = 0;
  CVector values;      // value on each basis element of C_AA
  CVector idempotent;  // coordinates of e_p, the idempotent with p(e_p) = 1
};

struct DiagonalSpectrum {
  std::vector<DiagonalCharacter> characters;
};

inline cplx evaluate(const DiagonalCharacter& p, std::span<const cplx> x) {
  cplx s{};
  for (std::size_t k = 0; k < x.size(); ++k) s += p.values[k] * x[k];
  return s;
}

namespace detail {

/// Left multiplication operators L_k(:, j) = coords of b_k o b_j on C_AA.
inline std::vector<CMatrix> left_multiplications(const FiniteCStarCategory& c, std::size_t a) {
  const std::size_t d = c.dim(a, a);
  const CMatrix& t = c.composition(a, a, a);
  std::vector<CMatrix> ls(d, CMatrix(d, d));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t l = 0; l < d; ++l) ls[k](l, j) = t(k * d + j, l);
  return ls;
}

/// Gram matrix of the trace form tau(x* o y) with tau(z) = Tr(L_z). For a
/// commutative C*-algebra tau is the sum of all characters, hence faithful
/// and positive; the left regular representation is then a
/// *-representation for the inner product it defines.
inline CMatrix trace_form_gram(const FiniteCStarCategory& c, std::size_t a) {
  const std::size_t d = c.dim(a, a);
  const auto ls = left_multiplications(c, a);
  CVector traces(d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i) traces[k] += ls[k](i, i);
  CMatrix g(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const CVector bi_star = c.star(a, a, unit_vector(d, i));
    for (std::size_t j = 0; j < d; ++j) {
      const CVector prod = c.compose(a, a, a, bi_star, unit_vector(d, j));
      cplx s{};
      for (std::size_t k = 0; k < d; ++k) s += prod[k] * traces[k];
      g(i, j) = s;
    }
  }
  return g;
}

/// Lexicographic order on value tuples, descending, with a 1e-6 dead band.
inline bool character_before(const CVector& x, const CVector& y) {
  constexpr double band = 1e-6;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::abs(x[k].real() - y[k].real()) > band) return x[k].real() > y[k].real();
    if (std::abs(x[k].imag() - y[k].imag()) > band) return x[k].imag() > y[k].imag();
  }
  return false;
}

}  // namespace detail

/// All characters of C_AA, each with its minimal idempotent, in canonical
/// (descending lexicographic) order of their value tuples.
inline DiagonalSpectrum diagonal_spectrum(const FiniteCStarCategory& c, std::size_t a, const Tolerance& tol = {}) {
  const std::size_t d = c.dim(a, a);
  if (d == 0) throw Error(ErrorCode::DiagonalNotSemisimple, "C_" + c.objects[a] + c.objects[a] + " is zero");

  const CMatrix gram = detail::trace_form_gram(c, a);
  const double eps = axiom_eps(c, tol);
  if ((gram - gram.adjoint()).max_abs() > eps * (1.0 + gram.max_abs())) {
    throw Error(ErrorCode::DiagonalNotSemisimple, "trace form of " + c.objects[a] + " is not Hermitian");
  }
  const auto g = hermitian_eig((gram + gram.adjoint()) * cplx{0.5}, Tolerance{1e-6, 1e-6});
  if (g.eigenvalues.front() <= eps * std::max(1.0, g.eigenvalues.back())) {
    throw Error(ErrorCode::DiagonalNotSemisimple, "trace form of " + c.objects[a] + " is not positive definite");
  }
  CVector sq(d), isq(d);
  for (std::size_t i = 0; i < d; ++i) {
    sq[i] = std::sqrt(g.eigenvalues[i]);
    isq[i] = 1.0 / sq[i];
  }
  const CMatrix r = g.vectors * CMatrix::diagonal(sq) * g.vectors.adjoint();
  const CMatrix rinv = g.vectors * CMatrix::diagonal(isq) * g.vectors.adjoint();

  const auto ls = detail::left_multiplications(c, a);
  std::vector<CMatrix> normal_ops;
  normal_ops.reserve(d);
  for (const auto& l : ls) normal_ops.push_back(r * l * rinv);
  CMatrix u;
  try {
    u = simultaneous_diag(normal_ops, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::DiagonalNotSemisimple, std::string("joint diagonalization failed: ") + e.what());
  }

  std::vector<CVector> values(d, CVector(d));
  for (std::size_t k = 0; k < d; ++k) {
    const CMatrix diag = u.adjoint() * normal_ops[k] * u;
    for (std::size_t i = 0; i < d; ++i) values[i][k] = diag(i, i);
  }
  std::sort(values.begin(), values.end(), detail::character_before);

  CMatrix ev(d, d);
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t k = 0; k < d; ++k) ev(q, k) = values[q][k];
  CMatrix idem;
  try {
    idem = inverse(ev);
  } catch (const Error&) {
    throw Error(ErrorCode::DiagonalNotSemisimple, "characters of " + c.objects[a] + " are linearly dependent");
  }

  DiagonalSpectrum out;
  for (std::size_t p = 0; p < d; ++p) {
    DiagonalCharacter ch{a, values[p], idem.column(p)};
    if (std::abs(evaluate(ch, c.units[a]) - 1.0) > eps) {
      throw Error(ErrorCode::DiagonalNotSemisimple, "character is not unital");
    }
    for (std::size_t i = 0; i < d; ++i) {
      const CVector bi = unit_vector(d, i);
      if (std::abs(evaluate(ch, c.star(a, a, bi)) - std::conj(ch.values[i])) > eps) {
        throw Error(ErrorCode::DiagonalNotSemisimple, "character is not involutive");
      }
      for (std::size_t j = 0; j < d; ++j) {
        const cplx lhs = evaluate(ch, c.compose(a, a, a, bi, unit_vector(d, j)));
        if (std::abs(lhs - ch.values[i] * ch.values[j]) > eps) {
          throw Error(ErrorCode::DiagonalNotSemisimple, "character is not multiplicative");
        }
      }
    }
    out.characters.push_back(std::move(ch));
  }
  return out;
}

inline std::vector<DiagonalCharacter> characters_of_diagonal(const FiniteCStarCategory& c, std::size_t a,
                                                             const Tolerance& tol = {}) {
  return diagonal_spectrum(c, a, tol).characters;
}

inline std::vector<DiagonalSpectrum> all_diagonal_spectra(const FiniteCStarCategory& c, const Tolerance& tol = {}) {
  std::vector<DiagonalSpectrum> out;
  out.reserve(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) out.push_back(diagonal_spectrum(c, a, tol));
  return out;
}

// ---------------------------------------------------------------------------
// corners and norms

/// Matrix of x -> e_p o x o e_q on C_AB.
inline CMatrix corner_projector(const FiniteCStarCategory& c, std::size_t a, std::size_t b,
                                const DiagonalCharacter& p, const DiagonalCharacter& q) {
  const std::size_t d = c.dim(a, b);
  CMatrix proj(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const CVector left = c.compose(a, a, b, p.idempotent, unit_vector(d, j));
    proj.set_column(j, c.compose(a, b, b, left, q.idempotent));
  }
  return proj;
}

/// Orthonormal basis of e_p o C_AB o e_q. At most one column for valid input.
inline CMatrix corner(const FiniteCStarCategory& c, std::size_t a, std::size_t b, const DiagonalCharacter& p,
                      const DiagonalCharacter& q, const Tolerance& tol = {}) {
  const CMatrix basis = image_basis(corner_projector(c, a, b, p, q), tol);
  if (basis.cols() > 1) {
    std::ostringstream os;
    os << "corner in " << c.objects[a] << "|" << c.objects[b] << " has dimension " << basis.cols();
    throw Error(ErrorCode::CornerDimensionExceedsOne, os.str());
  }
  return basis;
}

/// sqrt(max_q q(x* o x)) over the characters q of C_BB.
inline double cstar_norm(const FiniteCStarCategory& c, std::size_t a, std::size_t b, std::span<const cplx> x,
                         const std::vector<DiagonalCharacter>& chars_b) {
  const CVector y = c.compose(b, a, b, c.star(a, b, x), x);
  double m = 0.0;
  for (const auto& q : chars_b) m = std::max(m, evaluate(q, y).real());
  return std::sqrt(std::max(0.0, m));
}

inline double cstar_norm(const FiniteCStarCategory& c, std::size_t a, std::size_t b, std::span<const cplx> x,
                         const Tolerance& tol = {}) {
  return cstar_norm(c, a, b, x, characters_of_diagonal(c, b, tol));
}

/// Corner dimensions for every (A, B) and every pair of diagonal characters.
struct CornerTable {
  std::size_t objects = 0;
  std::vector<std::vector<int>> dims;  // [A*n+B][p*|X_B|+q]
  std::vector<std::size_t> spectrum_sizes;

  int at(std::size_t a, std::size_t b, std::size_t p, std::size_t q) const {
    return dims[a * objects + b][p * spectrum_sizes[b] + q];
  }
};

inline CornerTable corner_table(const FiniteCStarCategory& c, const std::vector<DiagonalSpectrum>& spectra,
                                const Tolerance& tol = {}) {
  CornerTable t;
  const std::size_t n = c.size();
  t.objects = n;
  for (const auto& s : spectra) t.spectrum_sizes.push_back(s.characters.size());
  t.dims.resize(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      auto& cell = t.dims[a * n + b];
      cell.assign(t.spectrum_sizes[a] * t.spectrum_sizes[b], 0);
      if (c.dim(a, b) == 0) continue;
      for (std::size_t p = 0; p < t.spectrum_sizes[a]; ++p)
        for (std::size_t q = 0; q < t.spectrum_sizes[b]; ++q) {
          cell[p * t.spectrum_sizes[b] + q] = static_cast<int>(
              numeric_rank(corner_projector(c, a, b, spectra[a].characters[p], spectra[b].characters[q]), tol));
        }
    }
  return t;
}

// ---------------------------------------------------------------------------
// validation

/// Exhaustive axiom check on basis elements. Positivity is tested through the
/// trace form of each diagonal and then via characters on x* o x for every
/// basis x of every Hom-set.
inline ValidationReport validate_category(const FiniteCStarCategory& c, const Tolerance& tol = {}) {
  ValidationReport report;
  check_shapes(c, report);
  if (!report.ok()) return report;

  const std::size_t n = c.size();
  report.ran("finite");
  for (const auto& m : c.comp)
    if (!m.all_finite()) report.fail("finite", "non-finite structure constant");
  for (const auto& m : c.invol)
    if (!m.all_finite()) report.fail("finite", "non-finite involution entry");
  if (!report.ok()) return report;

  const double eps = axiom_eps(c, tol);

  report.ran("associativity");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t d = 0; d < n; ++d) {
          const std::size_t dab = c.dim(a, b), dbk = c.dim(b, k), dkd = c.dim(k, d);
          if (dab == 0 || dbk == 0 || dkd == 0) continue;
          for (std::size_t i = 0; i < dab; ++i)
            for (std::size_t j = 0; j < dbk; ++j) {
              const CVector xy = c.compose(a, b, k, unit_vector(dab, i), unit_vector(dbk, j));
              for (std::size_t l = 0; l < dkd; ++l) {
                const CVector z = unit_vector(dkd, l);
                const CVector lhs = c.compose(a, k, d, xy, z);
                const CVector rhs = c.compose(a, b, d, unit_vector(dab, i), c.compose(b, k, d, unit_vector(dbk, j), z));
                if (max_diff(lhs, rhs) > eps) {
                  report.fail("associativity",
                              c.objects[a] + c.objects[b] + c.objects[k] + c.objects[d] + " basis triple", {a, b, k, d, i, j, l});
                }
              }
            }
        }

  report.ran("left_unit");
  report.ran("right_unit");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < c.dim(a, b); ++i) {
        const CVector x = unit_vector(c.dim(a, b), i);
        if (max_diff(c.compose(a, a, b, c.units[a], x), x) > eps) {
          report.fail("left_unit", "unit of " + c.objects[a] + " on " + c.objects[a] + "|" + c.objects[b], {a, b, i});
        }
        if (max_diff(c.compose(a, b, b, x, c.units[b]), x) > eps) {
          report.fail("right_unit", "unit of " + c.objects[b] + " on " + c.objects[a] + "|" + c.objects[b], {a, b, i});
        }
      }

  report.ran("involution_involutive");
  report.ran("involution_conjugate_linear");  // structural: the map acts on conjugated coordinates
  report.ran("involution_antimultiplicative");
  report.ran("involution_unit");
  for (std::size_t a = 0; a < n; ++a) {
    if (max_diff(c.star(a, a, c.units[a]), c.units[a]) > eps) {
      report.fail("involution_unit", "unit of " + c.objects[a] + " is not self-adjoint", {a});
    }
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t i = 0; i < c.dim(a, b); ++i) {
        const CVector x = unit_vector(c.dim(a, b), i);
        if (max_diff(c.star(b, a, c.star(a, b, x)), x) > eps) {
          report.fail("involution_involutive", c.objects[a] + "|" + c.objects[b], {a, b, i});
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < c.dim(a, b); ++i)
          for (std::size_t j = 0; j < c.dim(b, k); ++j) {
            const CVector x = unit_vector(c.dim(a, b), i);
            const CVector y = unit_vector(c.dim(b, k), j);
            const CVector lhs = c.star(a, k, c.compose(a, b, k, x, y));
            const CVector rhs = c.compose(k, b, a, c.star(b, k, y), c.star(a, b, x));
            if (max_diff(lhs, rhs) > eps) {
              report.fail("involution_antimultiplicative",
                          c.objects[a] + c.objects[b] + c.objects[k] + " basis pair", {a, b, k, i, j});
            }
          }
      }
    }
  }

  report.ran("diagonal_commutative");
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t d = c.dim(a, a);
    if (d == 0) report.fail("shape", "diagonal C_" + c.objects[a] + c.objects[a] + " is zero", {a});
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        const CVector x = unit_vector(d, i), y = unit_vector(d, j);
        if (max_diff(c.compose(a, a, a, x, y), c.compose(a, a, a, y, x)) > eps) {
          report.fail("diagonal_commutative", c.objects[a], {a, i, j});
        }
      }
  }
  if (!report.ok()) return report;

  report.ran("positivity");
  std::vector<DiagonalSpectrum> spectra;
  for (std::size_t a = 0; a < n; ++a) {
    const CMatrix gram = detail::trace_form_gram(c, a);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < gram.rows(); ++i)
      if (gram(i, i).real() < gram(worst, worst).real()) worst = i;
    try {
      spectra.push_back(diagonal_spectrum(c, a, tol));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "diagonal " << c.objects[a] << ": " << e.what() << " (smallest tau(b*b) = " << gram(worst, worst).real()
         << " at basis " << worst << ")";
      report.fail("positivity", os.str(), {a, worst});
    }
  }
  if (!report.ok()) return report;

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < c.dim(a, b); ++i) {
        const CVector x = unit_vector(c.dim(a, b), i);
        const CVector xx = c.compose(b, a, b, c.star(a, b, x), x);
        double top = 0.0;
        for (const auto& q : spectra[b].characters) top = std::max(top, evaluate(q, xx).real());
        for (std::size_t qi = 0; qi < spectra[b].characters.size(); ++qi) {
          const cplx v = evaluate(spectra[b].characters[qi], xx);
          if (v.real() < -1e-7 * (1.0 + top) || std::abs(v.imag()) > eps * (1.0 + top)) {
            std::ostringstream os;
            os << "x*x for basis " << i << " of " << c.objects[a] << "|" << c.objects[b] << " has spectral value " << v;
            report.fail("positivity", os.str(), {a, b, i, qi});
          }
        }
      }
  return report;
}

// ---------------------------------------------------------------------------
// orbit classes of characters C -> C

/// One equivalence class of *-functors C -> C under per-Hom-set phases. The
/// class is a choice of diagonal character per object; objects whose
/// characters are linked by a nonzero corner form one pair component, all
/// other Hom-sets are annihilated.
struct OrbitClass {
  std::vector<std::size_t> characters;  // per object, index into that diagonal spectrum
  std::vector<std::size_t> component;   // per object, component label within the class
  std::vector<std::pair<std::size_t, std::size_t>> zero_homs;
};

/// Maximal linked systems of diagonal characters: connected components of the
/// graph whose edges are nonzero corners. Each holds at most one character
/// per object, listed as (object, character) in object order.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> linked_components(const CornerTable& t,
                                                                                        const FiniteCStarCategory& c) {
  const std::size_t n = t.objects;
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t a = 0; a < n; ++a) offset[a + 1] = offset[a] + t.spectrum_sizes[a];
  std::vector<std::size_t> parent(offset[n]);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      for (std::size_t p = 0; p < t.spectrum_sizes[a]; ++p)
        for (std::size_t q = 0; q < t.spectrum_sizes[b]; ++q) {
          if (t.at(a, b, p, q) == 0) continue;
          const std::size_t x = find(offset[a] + p), y = find(offset[b] + q);
          if (x != y) parent[std::max(x, y)] = std::min(x, y);
        }
    }
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> groups;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t p = 0; p < t.spectrum_sizes[a]; ++p) groups[find(offset[a] + p)].push_back({a, p});

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  for (auto& [root, nodes] : groups) {
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (nodes[i].first == nodes[i - 1].first) {
        throw Error(ErrorCode::HolonomyViolation, "two characters of " + c.objects[nodes[i].first] +
                                                      " are linked through a chain of nonzero corners");
      }
    }
    for (const auto& [a, p] : nodes)
      for (const auto& [b, q] : nodes)
        if (a != b && t.at(a, b, p, q) == 0) {
          throw Error(ErrorCode::InvalidCategory,
                      "linked characters of " + c.objects[a] + " and " + c.objects[b] + " have a zero corner");
        }
    out.push_back(std::move(nodes));
  }
  return out;
}

namespace detail {

inline void exact_covers(const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& comps,
                         const std::vector<std::vector<std::size_t>>& by_object, std::vector<bool>& covered,
                         std::vector<std::size_t>& chosen, std::vector<std::vector<std::size_t>>& out) {
  const auto next = std::find(covered.begin(), covered.end(), false);
  if (next == covered.end()) {
    out.push_back(chosen);
    return;
  }
  const auto obj = static_cast<std::size_t>(next - covered.begin());
  for (std::size_t ci : by_object[obj]) {
    const auto& comp = comps[ci];
    if (std::any_of(comp.begin(), comp.end(), [&](const auto& node) { return covered[node.first]; })) continue;
    for (const auto& node : comp) covered[node.first] = true;
    chosen.push_back(ci);
    exact_covers(comps, by_object, covered, chosen, out);
    chosen.pop_back();
    for (const auto& node : comp) covered[node.first] = false;
  }
}

}  // namespace detail

/// Orbit classes of [C; C]. A tuple of diagonal characters extends to a
/// *-functor exactly when it is a disjoint union of whole linked components
/// covering every object, so classes are enumerated as exact covers. The
/// count grows like the product of spectrum sizes for nearly discrete input.
inline std::vector<OrbitClass> enumerate_orbit_classes(const FiniteCStarCategory& c, const CornerTable& table) {
  const auto comps = linked_components(table, c);
  const std::size_t n = c.size();
  std::vector<std::vector<std::size_t>> by_object(n);
  for (std::size_t i = 0; i < comps.size(); ++i) by_object[comps[i].front().first].push_back(i);

  std::vector<bool> covered(n, false);
  std::vector<std::size_t> chosen;
  std::vector<std::vector<std::size_t>> covers;
  detail::exact_covers(comps, by_object, covered, chosen, covers);

  std::vector<OrbitClass> out;
  out.reserve(covers.size());
  for (const auto& cover : covers) {
    OrbitClass cls;
    cls.characters.assign(n, 0);
    cls.component.assign(n, 0);
    for (std::size_t k = 0; k < cover.size(); ++k)
      for (const auto& [a, p] : comps[cover[k]]) {
        cls.characters[a] = p;
        cls.component[a] = k;
      }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && cls.component[a] != cls.component[b]) cls.zero_homs.push_back({a, b});
    out.push_back(std::move(cls));
  }
  return out;
}

inline std::vector<OrbitClass> enumerate_orbit_classes(const FiniteCStarCategory& c, const Tolerance& tol = {}) {
  const auto spectra = all_diagonal_spectra(c, tol);
  return enumerate_orbit_classes(c, corner_table(c, spectra, tol));
}

// ---------------------------------------------------------------------------
// *-functors

/// Object-bijective linear functor. hom_maps[A*n+B] is the matrix
/// C_AB -> D_{phi(A) phi(B)} in the two coordinate systems.
struct StarFunctor {
  std::shared_ptr<const FiniteCStarCategory> source;
  std::shared_ptr<const FiniteCStarCategory> target;
  std::vector<std::size_t> obj_map;
  std::vector<CMatrix> hom_maps;

  const CMatrix& hom(std::size_t a, std::size_t b) const { return hom_maps[a * source->size() + b]; }
  CVector apply(std::size_t a, std::size_t b, std::span<const cplx> x) const { return hom(a, b) * x; }
};

inline StarFunctor identity_functor(std::shared_ptr<const FiniteCStarCategory> c) {
  StarFunctor f;
  f.source = c;
  f.target = c;
  f.obj_map.resize(c->size());
  std::iota(f.obj_map.begin(), f.obj_map.end(), 0);
  for (std::size_t a = 0; a < c->size(); ++a)
    for (std::size_t b = 0; b < c->size(); ++b) f.hom_maps.push_back(CMatrix::identity(c->dim(a, b)));
  return f;
}

/// second o first.
inline StarFunctor compose_functors(const StarFunctor& first, const StarFunctor& second) {
  if (first.target != second.source && !(*first.target == *second.source)) {
    throw Error(ErrorCode::EndpointMismatch, "functor endpoints do not match");
  }
  StarFunctor f;
  f.source = first.source;
  f.target = second.target;
  const std::size_t n = first.source->size();
  f.obj_map.resize(n);
  for (std::size_t a = 0; a < n; ++a) f.obj_map[a] = second.obj_map[first.obj_map[a]];
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      f.hom_maps.push_back(second.hom(first.obj_map[a], first.obj_map[b]) * first.hom(a, b));
  return f;
}

inline double functor_distance(const StarFunctor& f, const StarFunctor& g) {
  if (f.obj_map != g.obj_map || f.hom_maps.size() != g.hom_maps.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t k = 0; k < f.hom_maps.size(); ++k) {
    if (f.hom_maps[k].rows() != g.hom_maps[k].rows() || f.hom_maps[k].cols() != g.hom_maps[k].cols()) {
      return std::numeric_limits<double>::infinity();
    }
    m = std::max(m, (f.hom_maps[k] - g.hom_maps[k]).max_abs());
  }
  return m;
}

inline ValidationReport check_star_functor(const StarFunctor& f, const Tolerance& tol = {}) {
  ValidationReport report;
  const auto& c = *f.source;
  const auto& d = *f.target;
  const std::size_t n = c.size();
  report.ran("object_bijective");
  if (f.obj_map.size() != n || d.size() != n) {
    report.fail("object_bijective", "object counts differ");
    return report;
  }
  std::vector<bool> hit(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    if (f.obj_map[a] >= n || hit[f.obj_map[a]]) {
      report.fail("object_bijective", "object map is not a bijection", {a});
      return report;
    }
    hit[f.obj_map[a]] = true;
  }
  report.ran("shape");
  if (f.hom_maps.size() != n * n) {
    report.fail("shape", "hom map table has wrong size");
    return report;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const CMatrix& h = f.hom(a, b);
      if (h.rows() != d.dim(f.obj_map[a], f.obj_map[b]) || h.cols() != c.dim(a, b)) {
        report.fail("shape", "hom map " + c.objects[a] + "|" + c.objects[b] + " has wrong shape", {a, b});
      }
    }
  if (!report.ok()) return report;

  const double eps = std::max(axiom_eps(c, tol), axiom_eps(d, tol)) * (1.0 + [&] {
    double s = 0.0;
    for (const auto& h : f.hom_maps) s = std::max(s, h.max_abs());
    return s * s;
  }());

  report.ran("unital");
  for (std::size_t a = 0; a < n; ++a) {
    if (max_diff(f.apply(a, a, c.units[a]), d.units[f.obj_map[a]]) > eps) {
      report.fail("unital", "identity of " + c.objects[a] + " is not preserved", {a});
    }
  }
  report.ran("involutive");
  report.ran("multiplicative");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t fa = f.obj_map[a], fb = f.obj_map[b];
      for (std::size_t i = 0; i < c.dim(a, b); ++i) {
        const CVector x = unit_vector(c.dim(a, b), i);
        if (max_diff(f.apply(b, a, c.star(a, b, x)), d.star(fa, fb, f.apply(a, b, x))) > eps) {
          report.fail("involutive", c.objects[a] + "|" + c.objects[b], {a, b, i});
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t fk = f.obj_map[k];
        for (std::size_t i = 0; i < c.dim(a, b); ++i)
          for (std::size_t j = 0; j < c.dim(b, k); ++j) {
            const CVector x = unit_vector(c.dim(a, b), i), y = unit_vector(c.dim(b, k), j);
            const CVector lhs = f.apply(a, k, c.compose(a, b, k, x, y));
            const CVector rhs = d.compose(fa, fb, fk, f.apply(a, b, x), f.apply(b, k, y));
            if (max_diff(lhs, rhs) > eps) {
              report.fail("multiplicative", c.objects[a] + c.objects[b] + c.objects[k], {a, b, k, i, j});
            }
          }
      }
    }
  return report;
}

struct NonDegeneracy {
  bool ok = true;
  // witness: source objects (A, B) and the target characters (p, q) of the
  // point of D_{phi(A) phi(B)} whose functional pulls back to zero on C_AB.
  std::size_t a = 0, b = 0, p = 0, q = 0;
};

/// For every point (p, q) of the target's spectrum over (phi(A), phi(B)),
/// i.e. every class of characters nonzero on D_{phi(A) phi(B)}, the
/// pulled-back functional x -> omega(phi(x)) must be nonzero on C_AB. This is
/// tested as: the corner projection of phi(C_AB) onto (p, q) is nonzero.
inline NonDegeneracy check_non_degenerate(const StarFunctor& f, const Tolerance& tol = {}) {
  const auto& c = *f.source;
  const auto& d = *f.target;
  const auto spectra = all_diagonal_spectra(d, tol);
  const std::size_t n = c.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const std::size_t fa = f.obj_map[a], fb = f.obj_map[b];
      if (d.dim(fa, fb) == 0) continue;
      for (std::size_t p = 0; p < spectra[fa].characters.size(); ++p)
        for (std::size_t q = 0; q < spectra[fb].characters.size(); ++q) {
          const CMatrix proj = corner_projector(d, fa, fb, spectra[fa].characters[p], spectra[fb].characters[q]);
          if (numeric_rank(proj, tol) == 0) continue;
          const CMatrix pulled = proj * f.hom(a, b);
          if (pulled.cols() == 0 || numeric_rank(pulled, tol) == 0) return {false, a, b, p, q};
        }
    }
  return {};
}

// ---------------------------------------------------------------------------
// Hilbert C*-bimodules

/// algA and algB are one-object categories. For a module basis m_i:
///  - left_action row a*dM+j: coords of a_a . m_j
///  - right_action row j*dB+b: coords of m_j . b_b
///  - ip_a row i*dM+j: coords in algA of A<m_i, m_j> (linear in the first slot)
///  - ip_b row i*dM+j: coords in algB of <m_i, m_j>B (linear in the second slot)
struct HilbertBimodule {
  FiniteCStarCategory alg_a;
  FiniteCStarCategory alg_b;
  std::size_t module_dim = 0;
  CMatrix left_action;
  CMatrix right_action;
  CMatrix ip_a;
  CMatrix ip_b;
  std::vector<std::string> labels_a;  // optional names of the basis of alg_a
  std::vector<std::string> labels_b;

  bool operator==(const HilbertBimodule&) const = default;
};

namespace detail {

inline CVector bimodule_left(const HilbertBimodule& m, std::span<const cplx> a, std::span<const cplx> x) {
  CVector out(m.module_dim);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const cplx w = a[i] * x[j];
      if (w == cplx{}) continue;
      for (std::size_t k = 0; k < m.module_dim; ++k) out[k] += w * m.left_action(i * m.module_dim + j, k);
    }
  return out;
}

inline CVector bimodule_right(const HilbertBimodule& m, std::span<const cplx> x, std::span<const cplx> b) {
  const std::size_t db = m.alg_b.dim(0, 0);
  CVector out(m.module_dim);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t l = 0; l < b.size(); ++l) {
      const cplx w = x[j] * b[l];
      if (w == cplx{}) continue;
      for (std::size_t k = 0; k < m.module_dim; ++k) out[k] += w * m.right_action(j * db + l, k);
    }
  return out;
}

/// Sesquilinear extension of a basis table; conj_first selects which slot is
/// conjugate-linear.
inline CVector sesquilinear(const CMatrix& table, std::size_t dm, std::span<const cplx> x, std::span<const cplx> y,
                            bool conj_first) {
  CVector out(table.cols());
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j) {
      const cplx w = conj_first ? std::conj(x[i]) * y[j] : x[i] * std::conj(y[j]);
      if (w == cplx{}) continue;
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * table(i * dm + j, k);
    }
  return out;
}

}  // namespace detail

inline CVector inner_a(const HilbertBimodule& m, std::span<const cplx> x, std::span<const cplx> y) {
  return detail::sesquilinear(m.ip_a, m.module_dim, x, y, false);
}

inline CVector inner_b(const HilbertBimodule& m, std::span<const cplx> x, std::span<const cplx> y) {
  return detail::sesquilinear(m.ip_b, m.module_dim, x, y, true);
}

/// Bimodule-level axioms: algebra validity, shapes, compatibility
/// A<x,y>.z = x.<y,z>B, hermitian symmetry and positivity of both inner
/// products. Module associativity is left to the linking category check.
inline ValidationReport validate_bimodule(const HilbertBimodule& m, const Tolerance& tol = {}) {
  ValidationReport report;
  if (m.alg_a.size() != 1 || m.alg_b.size() != 1) {
    report.fail("shape", "coefficient algebras must have exactly one object");
    return report;
  }
  report.merge(validate_category(m.alg_a, tol), "alg_a.");
  report.merge(validate_category(m.alg_b, tol), "alg_b.");
  if (!report.ok()) return report;

  const std::size_t dm = m.module_dim, da = m.alg_a.dim(0, 0), db = m.alg_b.dim(0, 0);
  report.ran("shape");
  if (m.left_action.rows() != da * dm || m.left_action.cols() != dm || m.right_action.rows() != dm * db ||
      m.right_action.cols() != dm || m.ip_a.rows() != dm * dm || m.ip_a.cols() != da || m.ip_b.rows() != dm * dm ||
      m.ip_b.cols() != db) {
    report.fail("shape", "action or inner product tables have wrong shape");
    return report;
  }

  double scale = std::max({m.alg_a.scale(), m.alg_b.scale(), m.left_action.max_abs(), m.right_action.max_abs(),
                           m.ip_a.max_abs(), m.ip_b.max_abs()});
  const double eps = tol.structural() * (1.0 + scale) * (1.0 + scale) * (1.0 + scale);

  report.ran("compatibility");
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j)
      for (std::size_t k = 0; k < dm; ++k) {
        const CVector x = unit_vector(dm, i), y = unit_vector(dm, j), z = unit_vector(dm, k);
        const CVector lhs = detail::bimodule_left(m, inner_a(m, x, y), z);
        const CVector rhs = detail::bimodule_right(m, x, inner_b(m, y, z));
        if (max_diff(lhs, rhs) > eps) report.fail("compatibility", "A<x,y>z != x<y,z>B", {i, j, k});
      }

  report.ran("hermitian_a");
  report.ran("hermitian_b");
  for (std::size_t i = 0; i < dm; ++i)
    for (std::size_t j = 0; j < dm; ++j) {
      const CVector x = unit_vector(dm, i), y = unit_vector(dm, j);
      if (max_diff(m.alg_a.star(0, 0, inner_a(m, x, y)), inner_a(m, y, x)) > eps) {
        report.fail("hermitian_a", "A<x,y>* != A<y,x>", {i, j});
      }
      if (max_diff(m.alg_b.star(0, 0, inner_b(m, x, y)), inner_b(m, y, x)) > eps) {
        report.fail("hermitian_b", "<x,y>B* != <y,x>B", {i, j});
      }
    }

  report.ran("positivity_a");
  report.ran("positivity_b");
  const auto chars_a = characters_of_diagonal(m.alg_a, 0, tol);
  const auto chars_b = characters_of_diagonal(m.alg_b, 0, tol);
  for (std::size_t i = 0; i < dm; ++i) {
    const CVector x = unit_vector(dm, i);
    const CVector xa = inner_a(m, x, x), xb = inner_b(m, x, x);
    for (std::size_t p = 0; p < chars_a.size(); ++p) {
      const cplx v = evaluate(chars_a[p], xa);
      if (v.real() < -1e-7 || std::abs(v.imag()) > eps) report.fail("positivity_a", "A<x,x> not positive", {i, p});
    }
    for (std::size_t q = 0; q < chars_b.size(); ++q) {
      const cplx v = evaluate(chars_b[q], xb);
      if (v.real() < -1e-7 || std::abs(v.imag()) > eps) report.fail("positivity_b", "<x,x>B not positive", {i, q});
    }
  }
  return report;
}

/// Two-object category [[A, M], [M*, B]] with x o y* = A<x,y> and
/// x* o y = <x,y>B. C_BA uses the dual basis m_i*.
inline FiniteCStarCategory linking_category(const HilbertBimodule& m, const Tolerance& tol = {}) {
  const ValidationReport pre = validate_bimodule(m, tol);
  if (!pre.ok()) throw Error(ErrorCode::BimoduleAxiomViolation, pre.summary());

  const std::size_t dm = m.module_dim, da = m.alg_a.dim(0, 0), db = m.alg_b.dim(0, 0);
  constexpr std::size_t A = 0, B = 1;
  auto c = FiniteCStarCategory::with_objects({"A", "B"});
  c.dims = {da, dm, dm, db};
  c.units[A] = m.alg_a.units[0];
  c.units[B] = m.alg_b.units[0];
  c.involution(A, A) = m.alg_a.involution(0, 0);
  c.involution(B, B) = m.alg_b.involution(0, 0);
  c.involution(A, B) = CMatrix::identity(dm);
  c.involution(B, A) = CMatrix::identity(dm);

  c.composition(A, A, A) = m.alg_a.composition(0, 0, 0);
  c.composition(B, B, B) = m.alg_b.composition(0, 0, 0);
  c.composition(A, A, B) = m.left_action;
  c.composition(A, B, B) = m.right_action;
  c.composition(A, B, A) = m.ip_a;
  c.composition(B, A, B) = m.ip_b;

  // b o m_j* = (m_j o b*)*
  CMatrix bba(db * dm, dm);
  for (std::size_t k = 0; k < db; ++k)
    for (std::size_t j = 0; j < dm; ++j) {
      const CVector bstar = m.alg_b.star(0, 0, unit_vector(db, k));
      const CVector prod = detail::bimodule_right(m, unit_vector(dm, j), bstar);
      for (std::size_t l = 0; l < dm; ++l) bba(k * dm + j, l) = std::conj(prod[l]);
    }
  c.composition(B, B, A) = bba;

  // m_j* o a = (a* o m_j)*
  CMatrix baa(dm * da, dm);
  for (std::size_t j = 0; j < dm; ++j)
    for (std::size_t k = 0; k < da; ++k) {
      const CVector astar = m.alg_a.star(0, 0, unit_vector(da, k));
      const CVector prod = detail::bimodule_left(m, astar, unit_vector(dm, j));
      for (std::size_t l = 0; l < dm; ++l) baa(j * da + k, l) = std::conj(prod[l]);
    }
  c.composition(B, A, A) = baa;

  const ValidationReport post = validate_category(c, tol);
  if (!post.ok()) throw Error(ErrorCode::BimoduleAxiomViolation, "linking category: " + post.summary());
  return c;
}

}  // namespace gelfand
