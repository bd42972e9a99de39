#pragma once

// Unit and counit of the duality: the Gelfand transform C -> Gamma(Sigma(C))
// and the evaluation transform E -> Sigma(Gamma(E)), their naturality
// squares, and the spectral picture of an imprimitivity bimodule.

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gelfand/functors.hpp"
#include "gelfand/rng.hpp"

namespace gelfand {

/// Both sides of the duality for one category, built once and shared.
struct GelfandData {
  std::shared_ptr<const FiniteCStarCategory> category;
  std::shared_ptr<const SpectralSpaceoid> spectral;
  std::shared_ptr<const FiniteSpaceoid> spaceoid;           // Sigma(C)
  std::shared_ptr<const FiniteCStarCategory> sections;      // Gamma(Sigma(C))

  static GelfandData build(std::shared_ptr<const FiniteCStarCategory> c, const Tolerance& tol = {}) {
    GelfandData g;
    g.category = std::move(c);
    g.spectral = std::make_shared<const SpectralSpaceoid>(spectral_spaceoid(*g.category, tol));
    g.spaceoid = std::shared_ptr<const FiniteSpaceoid>(g.spectral, &g.spectral->spaceoid);
    g.sections = std::make_shared<const FiniteCStarCategory>(sections_category(*g.spaceoid, tol));
    return g;
  }
};

/// The Gelfand transform x -> x^ as a *-functor C -> Gamma(Sigma(C)); the
/// Hom-set matrices are the per-corner coefficient maps.
inline StarFunctor gelfand_transform(const GelfandData& g) {
  StarFunctor f;
  f.source = g.category;
  f.target = g.sections;
  const std::size_t n = g.category->size();
  f.obj_map.resize(n);
  std::iota(f.obj_map.begin(), f.obj_map.end(), 0);
  f.hom_maps = g.spectral->transforms;
  return f;
}

struct GelfandCheck {
  ValidationReport report;
  double max_deviation = 0.0;  // worst | |x^| - |x| | seen
  bool ok() const { return report.ok(); }
};

/// Per Hom-set: rank equal to dimension, *-functor axioms, and isometry
/// | |x^| - |x| | <= 1e-6 (1 + |x|) on the basis and on `samples` random
/// elements per Hom-set.
inline GelfandCheck check_gelfand_isomorphism(const GelfandData& g, std::size_t samples, std::uint64_t seed,
                                              const Tolerance& tol = {}) {
  GelfandCheck out;
  ValidationReport& report = out.report;
  const StarFunctor f = gelfand_transform(g);
  report.merge(check_star_functor(f, tol), "functor.");
  const auto& c = *g.category;
  const auto& t = *g.sections;
  const std::size_t n = c.size();
  const auto chars_t = all_diagonal_spectra(t, tol);
  Rng rng(seed);
  report.ran("bijective");
  report.ran("isometric");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const CMatrix& h = f.hom(a, b);
      if (h.rows() != c.dim(a, b) || numeric_rank(h, tol) != c.dim(a, b)) {
        std::ostringstream os;
        os << c.objects[a] << "|" << c.objects[b] << ": " << h.rows() << " points for dimension " << c.dim(a, b);
        report.fail("bijective", os.str(), {a, b});
        continue;
      }
      for (std::size_t k = 0; k < c.dim(a, b) + samples; ++k) {
        CVector x(c.dim(a, b));
        if (k < c.dim(a, b)) {
          x = unit_vector(c.dim(a, b), k);
        } else {
          for (auto& z : x) z = rng.gaussian_complex();
        }
        const double nx = cstar_norm(c, a, b, x, g.spectral->spectra[b].characters);
        const double ny = cstar_norm(t, a, b, h * x, chars_t[b].characters);
        out.max_deviation = std::max(out.max_deviation, std::abs(nx - ny));
        if (std::abs(nx - ny) > 1e-6 * (1.0 + nx)) {
          std::ostringstream os;
          os << c.objects[a] << "|" << c.objects[b] << ": norm " << nx << " becomes " << ny;
          report.fail("isometric", os.str(), {a, b, k});
        }
      }
    }
  return out;
}

/// Evaluation E -> Sigma(Gamma(E)): a base point x goes to the character of
/// Gamma(E)_AA that is 1 on delta_{1_x} and 0 on the other identities; F_p is
/// the delta_p coordinate of the frame over the image point.
inline SpaceoidMorphism evaluation_transform(std::shared_ptr<const FiniteSpaceoid> e, const GelfandData& gamma_data) {
  const std::size_t n = e->size();
  const auto& spectra = gamma_data.spectral->spectra;
  std::vector<std::size_t> obj(n);
  std::iota(obj.begin(), obj.end(), 0);
  std::vector<std::vector<std::size_t>> base(n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t d = e->fiber(a, a).size();
    for (std::size_t x = 0; x < e->base_sets[a].size(); ++x) {
      const CVector target = unit_vector(d, e->identity(a, x).index);
      std::optional<std::size_t> match;
      for (std::size_t i = 0; i < spectra[a].characters.size(); ++i)
        if (max_diff(spectra[a].characters[i].values, target) <= 1e-6) match = i;
      if (!match) throw Error(ErrorCode::InvalidSpaceoid, "no evaluation character for " + e->base_sets[a][x]);
      base[a].push_back(*match);
    }
  }
  SpaceoidMorphism m = make_morphism(e, gamma_data.spaceoid, obj, base);
  e->for_each_point([&](const PointRef& p) {
    m.scalars[p.a * n + p.b][p.index] = gamma_data.spectral->frame(m.image(p))[p.index];
  });
  return m;
}

struct EvaluationCheck {
  ValidationReport report;
  double deviation = 0.0;  // distance of both composites with the inverse from the identities
  bool ok() const { return report.ok(); }
};

/// The evaluation transform is a valid morphism with an explicit inverse.
inline EvaluationCheck check_evaluation_transform(std::shared_ptr<const FiniteSpaceoid> e, const GelfandData& gamma_data,
                                                  const Tolerance& tol = {}) {
  EvaluationCheck out;
  const SpaceoidMorphism ev = evaluation_transform(e, gamma_data);
  out.report.merge(validate_morphism(ev, tol), "evaluation.");
  out.report.ran("invertible");
  try {
    const SpaceoidMorphism inv = invert(ev);
    out.report.merge(validate_morphism(inv, tol), "inverse.");
    out.deviation = std::max(morphism_distance(compose_morphisms(ev, inv), identity_morphism(e)),
                             morphism_distance(compose_morphisms(inv, ev), identity_morphism(gamma_data.spaceoid)));
    if (out.deviation > tol.structural()) out.report.fail("invertible", "composites with the inverse are not identities");
  } catch (const Error& err) {
    out.deviation = std::numeric_limits<double>::infinity();
    out.report.fail("invertible", err.what());
  }
  return out;
}

struct NaturalityReport {
  double deviation = 0.0;
  std::string detail;
  bool ok(double eps) const { return deviation <= eps; }
};

/// Gamma(Sigma(phi)) o G_{C1} against G_{C2} o phi for phi : C1 -> C2.
inline NaturalityReport check_naturality_G(const StarFunctor& phi, const Tolerance& tol = {}) {
  const GelfandData g1 = GelfandData::build(phi.source, tol);
  const GelfandData g2 = GelfandData::build(phi.target, tol);
  const SpaceoidMorphism sp = sigma_on_morphism(phi, *g1.spectral, *g2.spectral, g1.spaceoid, g2.spaceoid, tol);
  const StarFunctor gsp = gamma_on_morphism(sp, g1.sections, g2.sections);
  const StarFunctor lhs = compose_functors(gelfand_transform(g1), gsp);
  const StarFunctor rhs = compose_functors(phi, gelfand_transform(g2));
  NaturalityReport r;
  r.deviation = functor_distance(lhs, rhs);
  if (r.deviation > tol.structural()) r.detail = "Gelfand square does not commute";
  return r;
}

/// Sigma(Gamma(m)) o E_{E1} against E_{E2} o m for m : E1 -> E2.
inline NaturalityReport check_naturality_E(const SpaceoidMorphism& m, const Tolerance& tol = {}) {
  const GelfandData d1 = GelfandData::build(std::make_shared<const FiniteCStarCategory>(sections_category(*m.source, tol)), tol);
  const GelfandData d2 = GelfandData::build(std::make_shared<const FiniteCStarCategory>(sections_category(*m.target, tol)), tol);
  const StarFunctor gm = gamma_on_morphism(m, d2.category, d1.category);
  const SpaceoidMorphism sgm = sigma_on_morphism(gm, *d2.spectral, *d1.spectral, d2.spaceoid, d1.spaceoid, tol);
  const SpaceoidMorphism lhs = compose_morphisms(evaluation_transform(m.source, d1), sgm);
  const SpaceoidMorphism rhs = compose_morphisms(m, evaluation_transform(m.target, d2));
  NaturalityReport r;
  r.deviation = morphism_distance(lhs, rhs);
  if (r.deviation > tol.structural()) r.detail = "evaluation square does not commute";
  return r;
}

// ---------------------------------------------------------------------------
// bimodules

/// Spectrum of an imprimitivity bimodule read through its linking category:
/// the points over (A, B) as (character of A, character of B) pairs, the two
/// supports and the module-to-sections isomorphism.
struct BimoduleSpectrum {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> left_support;
  std::vector<std::size_t> right_support;
  CMatrix iso;  // |pairs| x module_dim
  std::vector<std::string> labels_a;  // per character of alg_a
  std::vector<std::string> labels_b;
  FiniteCStarCategory linking;
  std::shared_ptr<const SpectralSpaceoid> spectral;
};

namespace detail {

inline std::vector<std::string> character_labels(const DiagonalSpectrum& s, const std::vector<std::string>& basis) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.characters.size(); ++i) {
    const auto& v = s.characters[i].values;
    std::string label = "#" + std::to_string(i);
    if (basis.size() == v.size())
      for (std::size_t k = 0; k < v.size(); ++k)
        if (max_diff(v, unit_vector(v.size(), k)) <= 1e-6) label = basis[k];
    out.push_back(label);
  }
  return out;
}

}  // namespace detail

inline BimoduleSpectrum bimodule_spectrum(const HilbertBimodule& m, const Tolerance& tol = {}) {
  BimoduleSpectrum out;
  out.linking = linking_category(m, tol);
  out.spectral = std::make_shared<const SpectralSpaceoid>(spectral_spaceoid(out.linking, tol));
  const auto& e = out.spectral->spaceoid;
  for (const auto& pt : e.fiber(0, 1)) {
    out.pairs.push_back({pt.target, pt.source});
    out.left_support.push_back(pt.target);
    out.right_support.push_back(pt.source);
  }
  std::sort(out.left_support.begin(), out.left_support.end());
  std::sort(out.right_support.begin(), out.right_support.end());
  out.iso = out.spectral->transform(0, 1);
  out.labels_a = detail::character_labels(out.spectral->spectra[0], m.labels_a);
  out.labels_b = detail::character_labels(out.spectral->spectra[1], m.labels_b);
  return out;
}

struct BimoduleCheck {
  bool full_rank = false;
  double deviation = 0.0;  // worst mismatch of both inner products, on basis pairs
};

/// The module becomes sections over the support pairs, with
///   A<x, y>(p) = x^(P) conj(y^(P)) and <x, y>B(q) = conj(x^(P)) y^(P)
/// where P is the unique pair over p (resp. q), and zero off the supports.
inline BimoduleCheck verify_bimodule_spectrum(const HilbertBimodule& m, const BimoduleSpectrum& s,
                                              const Tolerance& tol = {}) {
  BimoduleCheck r;
  r.full_rank = s.iso.rows() == m.module_dim && numeric_rank(s.iso, tol) == m.module_dim;
  const auto& chars_a = s.spectral->spectra[0].characters;
  const auto& chars_b = s.spectral->spectra[1].characters;
  for (std::size_t i = 0; i < m.module_dim; ++i)
    for (std::size_t j = 0; j < m.module_dim; ++j) {
      const CVector x = unit_vector(m.module_dim, i), y = unit_vector(m.module_dim, j);
      const CVector sx = s.iso * x, sy = s.iso * y;
      const CVector ia = inner_a(m, x, y), ib = inner_b(m, x, y);
      for (std::size_t p = 0; p < chars_a.size(); ++p) {
        cplx expect{};
        for (std::size_t k = 0; k < s.pairs.size(); ++k)
          if (s.pairs[k].first == p) expect += sx[k] * std::conj(sy[k]);
        r.deviation = std::max(r.deviation, std::abs(evaluate(chars_a[p], ia) - expect));
      }
      for (std::size_t q = 0; q < chars_b.size(); ++q) {
        cplx expect{};
        for (std::size_t k = 0; k < s.pairs.size(); ++k)
          if (s.pairs[k].second == q) expect += std::conj(sx[k]) * sy[k];
        r.deviation = std::max(r.deviation, std::abs(evaluate(chars_b[q], ib) - expect));
      }
    }
  return r;
}

}  // namespace gelfand
