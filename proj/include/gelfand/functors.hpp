#pragma once

// The two functors of the duality: sections Gamma (spaceoid -> category) and
// the spectral spaceoid Sigma (category -> spaceoid), on objects and on
// morphisms. Both are contravariant.

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gelfand/cstarcat.hpp"
#include "gelfand/spaceoid.hpp"

namespace gelfand {

// ---------------------------------------------------------------------------
// Gamma

/// Category of sections. C_AB has the basis delta_p, p in E_AB, with
///   delta_p o delta_q = c(p, q) delta_pq  (zero when not composable)
///   (delta_p)* = nu(p) delta_{p*}.
inline FiniteCStarCategory sections_category(const FiniteSpaceoid& e, const Tolerance& tol = {}) {
  require_valid(e, tol);
  const std::size_t n = e.size();
  auto c = FiniteCStarCategory::with_objects(e.objects);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) c.dims[a * n + b] = e.fiber(a, b).size();

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dbk = c.dim(b, k);
        CMatrix t(c.dim(a, b) * dbk, c.dim(a, k));
        for (std::size_t i = 0; i < c.dim(a, b); ++i)
          for (std::size_t j = 0; j < dbk; ++j) {
            const PointRef p{a, b, i}, q{b, k, j};
            if (const auto pq = e.compose(p, q)) t(i * dbk + j, pq->index) = e.phase(p, q);
          }
        c.composition(a, b, k) = std::move(t);
      }
      CMatrix inv(c.dim(b, a), c.dim(a, b));
      for (std::size_t i = 0; i < c.dim(a, b); ++i) {
        const PointRef p{a, b, i};
        inv(e.inverse(p).index, i) = e.nu(p);
      }
      c.involution(a, b) = std::move(inv);
    }
  for (std::size_t a = 0; a < n; ++a) c.units[a] = CVector(c.dim(a, a), cplx{1.0, 0.0});
  return c;
}

/// Gamma(m) : Gamma(E2) -> Gamma(E1), delta_q -> sum_{f(p) = q} F_p delta_p.
inline StarFunctor gamma_on_morphism(const SpaceoidMorphism& m, std::shared_ptr<const FiniteCStarCategory> gamma_target,
                                     std::shared_ptr<const FiniteCStarCategory> gamma_source) {
  const std::size_t n = m.size();
  StarFunctor f;
  f.source = std::move(gamma_target);
  f.target = std::move(gamma_source);
  f.obj_map.resize(n);
  for (std::size_t a = 0; a < n; ++a) f.obj_map[m.obj_map[a]] = a;
  f.hom_maps.resize(n * n);
  for (std::size_t a2 = 0; a2 < n; ++a2)
    for (std::size_t b2 = 0; b2 < n; ++b2) {
      const std::size_t a1 = f.obj_map[a2], b1 = f.obj_map[b2];
      CMatrix h(m.source->fiber(a1, b1).size(), m.target->fiber(a2, b2).size());
      for (std::size_t i = 0; i < m.source->fiber(a1, b1).size(); ++i) {
        const PointRef p{a1, b1, i};
        h(i, m.image(p).index) = m.scalar(p);
      }
      f.hom_maps[a2 * n + b2] = std::move(h);
    }
  return f;
}

inline StarFunctor gamma_on_morphism(const SpaceoidMorphism& m, const Tolerance& tol = {}) {
  return gamma_on_morphism(m, std::make_shared<const FiniteCStarCategory>(sections_category(*m.target, tol)),
                           std::make_shared<const FiniteCStarCategory>(sections_category(*m.source, tol)));
}

// ---------------------------------------------------------------------------
// Sigma

/// Spectral spaceoid of a category together with everything needed to
/// transport elements: the diagonal spectra, the corner table, the chosen
/// unit frame u_P of every corner and, per Hom-set, the matrix of
/// x -> (coefficient of e_p x e_q against u_P)_P.
struct SpectralSpaceoid {
  FiniteSpaceoid spaceoid;
  std::vector<DiagonalSpectrum> spectra;
  CornerTable corners;
  std::vector<std::vector<CVector>> frames;  // [A*n+B][P]
  std::vector<CMatrix> transforms;           // [A*n+B], |X_AB| x d_AB

  const CMatrix& transform(std::size_t a, std::size_t b) const { return transforms[a * spaceoid.size() + b]; }
  const CVector& frame(const PointRef& p) const { return frames[p.a * spaceoid.size() + p.b][p.index]; }
  cplx coefficient(const PointRef& p, std::span<const cplx> x) const {
    const CMatrix& t = transform(p.a, p.b);
    cplx s{};
    for (std::size_t k = 0; k < x.size(); ++k) s += t(p.index, k) * x[k];
    return s;
  }
};

namespace detail {

inline CVector rephase_first_nonzero(CVector v) {
  const double m = max_abs(v);
  for (const auto& z : v)
    if (std::abs(z) > 1e-8 * m) {
      const cplx ph = std::conj(z) / std::abs(z);
      for (auto& w : v) w *= ph;
      break;
    }
  return v;
}

}  // namespace detail

/// Sigma(C). Base points over A are the characters of C_AA (named
/// "<A>#<k>"); points over (A, B) are the pairs of characters with a nonzero
/// corner, named "A|B|k". Frames and phases are read off the corners.
inline SpectralSpaceoid spectral_spaceoid(const FiniteCStarCategory& c, const Tolerance& tol = {}) {
  {
    const auto r = validate_category(c, tol);
    if (!r.ok()) throw Error(ErrorCode::InvalidCategory, r.summary());
  }
  const std::size_t n = c.size();
  SpectralSpaceoid s;
  s.spectra = all_diagonal_spectra(c, tol);
  s.corners = corner_table(c, s.spectra, tol);
  s.spaceoid = FiniteSpaceoid::with_objects(c.objects);
  s.frames.resize(n * n);
  s.transforms.resize(n * n);
  auto& e = s.spaceoid;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < s.spectra[a].characters.size(); ++k)
      e.base_sets[a].push_back(c.objects[a] + "#" + std::to_string(k));

  std::vector<std::vector<CMatrix>> projectors(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto& ca = s.spectra[a].characters;
      const auto& cb = s.spectra[b].characters;
      const std::size_t d = c.dim(a, b);
      std::size_t total = 0;
      for (std::size_t p = 0; p < ca.size(); ++p)
        for (std::size_t q = 0; q < cb.size(); ++q) {
          const int dim = s.corners.at(a, b, p, q);
          if (dim == 0) continue;
          if (dim > 1) {
            std::ostringstream os;
            os << "corner (" << p << "," << q << ") of " << c.objects[a] << "|" << c.objects[b] << " has dimension "
               << dim;
            throw Error(ErrorCode::CornerDimensionExceedsOne, os.str());
          }
          total += 1;
          const CMatrix proj = corner_projector(c, a, b, ca[p], cb[q]);
          CVector u;
          if (a == b && p == q) {
            u = ca[p].idempotent;
          } else {
            u = detail::rephase_first_nonzero(image_basis(proj, tol).column(0));
            const double nrm = cstar_norm(c, a, b, u, cb);
            for (auto& z : u) z /= nrm;
          }
          const std::size_t idx = e.fiber(a, b).size();
          e.fiber(a, b).push_back({c.objects[a] + "|" + c.objects[b] + "|" + std::to_string(idx), p, q, cplx{1.0, 0.0}});
          s.frames[a * n + b].push_back(std::move(u));
          projectors[a * n + b].push_back(proj);
        }
      if (total > d) throw Error(ErrorCode::CornerDimensionExceedsOne, "corners overflow the Hom-set");
      CMatrix t(total, d);
      for (std::size_t i = 0; i < total; ++i) {
        const CVector& u = s.frames[a * n + b][i];
        const double uu = dot(u, u).real();
        const CMatrix& proj = projectors[a * n + b][i];
        for (std::size_t k = 0; k < d; ++k) {
          cplx acc{};
          for (std::size_t l = 0; l < d; ++l) acc += std::conj(u[l]) * proj(l, k);
          t(i, k) = acc / uu;
        }
      }
      s.transforms[a * n + b] = std::move(t);
    }

  e.for_each_point([&](const PointRef& p) {
    const auto& pt = e.point(p);
    const auto ps = e.find(p.b, p.a, pt.source, pt.target);
    if (!ps) throw Error(ErrorCode::HolonomyViolation, "corner " + pt.id + " has no adjoint corner");
    e.point(p).nu = s.coefficient({p.b, p.a, *ps}, c.star(p.a, p.b, s.frame(p)));
  });
  e.for_each_point([&](const PointRef& p) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < e.fiber(p.b, k).size(); ++j) {
        const PointRef q{p.b, k, j};
        if (!e.composable(p, q)) continue;
        const auto pq = e.compose(p, q);
        if (!pq) {
          throw Error(ErrorCode::HolonomyViolation,
                      "composite of " + e.point(p).id + " and " + e.point(q).id + " lands in a zero corner");
        }
        const cplx ph = s.coefficient(*pq, c.compose(p.a, p.b, k, s.frame(p), s.frame(q)));
        if (std::abs(ph - 1.0) > 1e-12) e.set_phase(p, q, ph);
      }
  });
  const auto r = validate_spaceoid(e, tol);
  if (!r.ok()) throw Error(ErrorCode::HolonomyViolation, r.summary());
  return s;
}

/// Sigma(phi) : Sigma(C2) -> Sigma(C1) for phi : C1 -> C2. Characters are
/// pulled back along phi, points follow, and F_P is the coefficient of
/// e_p phi(u_{f(P)}) e_q against u_P.
inline SpaceoidMorphism sigma_on_morphism(const StarFunctor& phi, const SpectralSpaceoid& s1, const SpectralSpaceoid& s2,
                                          std::shared_ptr<const FiniteSpaceoid> e1,
                                          std::shared_ptr<const FiniteSpaceoid> e2, const Tolerance& tol = {}) {
  {
    const auto r = check_star_functor(phi, tol);
    if (!r.ok()) throw Error(ErrorCode::InvalidFunctor, r.summary());
  }
  const auto nd = check_non_degenerate(phi, tol);
  if (!nd.ok) {
    std::ostringstream os;
    os << "point (" << nd.p << "," << nd.q << ") over " << phi.target->objects[phi.obj_map[nd.a]] << "|"
       << phi.target->objects[phi.obj_map[nd.b]] << " pulls back to zero on " << phi.source->objects[nd.a] << "|"
       << phi.source->objects[nd.b];
    throw Error(ErrorCode::DegenerateFunctor, os.str());
  }
  const std::size_t n = phi.obj_map.size();
  std::vector<std::size_t> obj(n);
  for (std::size_t a1 = 0; a1 < n; ++a1) obj[phi.obj_map[a1]] = a1;
  std::vector<std::vector<std::size_t>> base(n);
  for (std::size_t a2 = 0; a2 < n; ++a2) {
    const std::size_t a1 = obj[a2];
    const CMatrix& h = phi.hom(a1, a1);
    for (const auto& w : s2.spectra[a2].characters) {
      CVector pulled(h.cols());
      for (std::size_t k = 0; k < h.cols(); ++k)
        for (std::size_t l = 0; l < h.rows(); ++l) pulled[k] += w.values[l] * h(l, k);
      std::optional<std::size_t> match;
      for (std::size_t i = 0; i < s1.spectra[a1].characters.size(); ++i)
        if (max_diff(pulled, s1.spectra[a1].characters[i].values) <= 1e-6) match = i;
      if (!match) throw Error(ErrorCode::InvalidFunctor, "pulled back character is not a character");
      base[a2].push_back(*match);
    }
  }
  SpaceoidMorphism m = make_morphism(std::move(e2), std::move(e1), obj, base);
  m.source->for_each_point([&](const PointRef& p) {
    const PointRef q = m.image(p);
    const CVector moved = phi.apply(q.a, q.b, s1.frame(q));
    m.scalars[p.a * n + p.b][p.index] = s2.coefficient(p, moved);
  });
  return m;
}

}  // namespace gelfand
