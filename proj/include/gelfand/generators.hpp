#pragma once

// Seeded random instances with known answers: spaceoids, categories obtained
// from them by a change of basis, and morphisms between spaceoids.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gelfand/duality.hpp"
#include "gelfand/rng.hpp"

namespace gelfand {

enum class PhaseMode { trivial, random };
enum class Scramble { none, unitary, invertible };

struct GenParams {
  std::uint64_t seed = 0;
  std::size_t n_objects = 2;
  std::size_t max_base = 3;
  double edge_density = 0.5;
  PhaseMode phase_mode = PhaseMode::random;
  Scramble scramble = Scramble::unitary;

  void check() const {
    if (n_objects < 1 || n_objects > 8) throw Error(ErrorCode::Schema, "n_objects must lie in [1, 8]");
    if (max_base < 1 || max_base > 6) throw Error(ErrorCode::Schema, "max_base must lie in [1, 6]");
    if (!(edge_density >= 0.0 && edge_density <= 1.0)) throw Error(ErrorCode::Schema, "edge_density must lie in [0, 1]");
  }
};

inline std::string object_name(std::size_t a) {
  return a < 26 ? std::string(1, static_cast<char>('A' + a)) : "O" + std::to_string(a);
}

namespace detail {

/// Trivial-phase spaceoid whose pair components are the given node lists.
inline FiniteSpaceoid spaceoid_from_components(const std::vector<std::string>& objects,
                                               const std::vector<std::size_t>& base_sizes,
                                               const std::vector<std::vector<SpaceoidNode>>& comps) {
  const std::size_t n = objects.size();
  auto e = FiniteSpaceoid::with_objects(objects);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t x = 0; x < base_sizes[a]; ++x) e.base_sets[a].push_back(objects[a] + std::to_string(x + 1));
  for (const auto& comp : comps)
    for (const auto& [a, x] : comp)
      for (const auto& [b, y] : comp)
        e.fiber(a, b).push_back({e.base_sets[a][x] + "-" + e.base_sets[b][y], x, y, cplx{1.0, 0.0}});
  for (auto& f : e.points)
    std::sort(f.begin(), f.end(), [](const SpaceoidPoint& p, const SpaceoidPoint& q) {
      return std::pair(p.target, p.source) < std::pair(q.target, q.source);
    });
  return e;
}

/// Per-point phases, 1 on identities.
inline std::vector<std::vector<cplx>> random_gauge(const FiniteSpaceoid& e, Rng& rng) {
  const std::size_t n = e.size();
  std::vector<std::vector<cplx>> mu(n * n);
  for (std::size_t k = 0; k < n * n; ++k) mu[k].assign(e.points[k].size(), cplx{1.0, 0.0});
  e.for_each_point([&](const PointRef& p) {
    if (!e.is_identity(p)) mu[p.a * n + p.b][p.index] = rng.phase();
  });
  return mu;
}

}  // namespace detail

/// Base sets of size 1..max_base; nodes are grouped greedily into pair
/// components, each further object joining with probability edge_density;
/// with random phases the frames are rotated by a random gauge, which leaves
/// the phases cohomologically trivial but not equal to 1.
inline FiniteSpaceoid gen_spaceoid(const GenParams& params) {
  params.check();
  Rng rng(params.seed);
  const std::size_t n = params.n_objects;
  std::vector<std::string> objects;
  std::vector<std::size_t> sizes;
  for (std::size_t a = 0; a < n; ++a) {
    objects.push_back(object_name(a));
    sizes.push_back(static_cast<std::size_t>(rng.integer(1, params.max_base)));
  }
  std::vector<std::vector<std::size_t>> free_nodes(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t x = 0; x < sizes[a]; ++x) free_nodes[a].push_back(x);
    rng.shuffle(free_nodes[a]);
  }
  std::vector<std::vector<SpaceoidNode>> comps;
  for (std::size_t a = 0; a < n; ++a)
    while (!free_nodes[a].empty()) {
      std::vector<SpaceoidNode> comp{{a, free_nodes[a].back()}};
      free_nodes[a].pop_back();
      for (std::size_t b = a + 1; b < n; ++b) {
        if (free_nodes[b].empty() || !rng.bernoulli(params.edge_density)) continue;
        comp.push_back({b, free_nodes[b].back()});
        free_nodes[b].pop_back();
      }
      comps.push_back(std::move(comp));
    }
  FiniteSpaceoid e = detail::spaceoid_from_components(objects, sizes, comps);
  if (params.phase_mode == PhaseMode::random) e = regauge(e, detail::random_gauge(e, rng));
  return e;
}

// ---------------------------------------------------------------------------
// basis changes

/// Random d x d matrix of the requested kind: unitary (Gram-Schmidt of a
/// complex Gaussian matrix) or U diag(s) V with s in [0.5, 2].
inline CMatrix random_basis_change(std::size_t d, Scramble mode, Rng& rng) {
  if (mode == Scramble::none || d == 0) return CMatrix::identity(d);
  auto unitary = [&] {
    std::vector<CVector> cols;
    while (cols.size() < d) {
      CVector v(d);
      for (auto& z : v) z = rng.gaussian_complex();
      for (const auto& u : cols) v = axpy(-dot(u, v), u, v);
      const double nv = norm2(v);
      if (nv < 1e-3) continue;
      for (auto& z : v) z /= nv;
      cols.push_back(std::move(v));
    }
    return CMatrix::from_columns(d, cols);
  };
  if (mode == Scramble::unitary) return unitary();
  CVector s(d);
  for (auto& z : s) z = rng.uniform(0.5, 2.0);
  return unitary() * CMatrix::diagonal(s) * unitary();
}

/// The same abstract category in the basis b'_i = sum_k T_AB(k, i) b_k.
inline FiniteCStarCategory change_basis(const FiniteCStarCategory& c, const std::vector<CMatrix>& t) {
  const std::size_t n = c.size();
  FiniteCStarCategory out = c;
  std::vector<CMatrix> tinv(n * n);
  for (std::size_t k = 0; k < n * n; ++k) tinv[k] = inverse(t[k]);
  for (std::size_t a = 0; a < n; ++a) {
    out.units[a] = tinv[a * n + a] * c.units[a];
    for (std::size_t b = 0; b < n; ++b) {
      out.involution(a, b) = tinv[b * n + a] * c.involution(a, b) * t[a * n + b].conjugate();
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dab = c.dim(a, b), dbk = c.dim(b, k);
        CMatrix comp(dab * dbk, c.dim(a, k));
        for (std::size_t i = 0; i < dab; ++i)
          for (std::size_t j = 0; j < dbk; ++j) {
            const CVector v = tinv[a * n + k] * c.compose(a, b, k, t[a * n + b].column(i), t[b * n + k].column(j));
            for (std::size_t l = 0; l < v.size(); ++l) comp(i * dbk + j, l) = v[l];
          }
        out.composition(a, b, k) = std::move(comp);
      }
    }
  }
  return out;
}

/// phi expressed in the bases given by t_src on its source and t_tgt on its
/// target: hom' = t_tgt^{-1} hom t_src.
inline StarFunctor change_basis(const StarFunctor& phi, const std::vector<CMatrix>& t_src,
                                const std::vector<CMatrix>& t_tgt, std::shared_ptr<const FiniteCStarCategory> src,
                                std::shared_ptr<const FiniteCStarCategory> tgt) {
  const std::size_t n = phi.obj_map.size();
  StarFunctor out;
  out.source = std::move(src);
  out.target = std::move(tgt);
  out.obj_map = phi.obj_map;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      out.hom_maps.push_back(inverse(t_tgt[phi.obj_map[a] * n + phi.obj_map[b]]) * phi.hom(a, b) * t_src[a * n + b]);
  return out;
}

struct GeneratedCategory {
  FiniteCStarCategory category;
  FiniteSpaceoid oracle;
  std::vector<CMatrix> basis_change;  // from the delta basis of Gamma(oracle)
};

inline std::vector<CMatrix> random_basis_changes(const FiniteCStarCategory& c, Scramble mode, Rng& rng) {
  std::vector<CMatrix> t;
  for (std::size_t d : c.dims) t.push_back(random_basis_change(d, mode, rng));
  return t;
}

inline GeneratedCategory scramble_sections(const FiniteSpaceoid& e, Scramble mode, Rng& rng) {
  GeneratedCategory g;
  g.oracle = e;
  const FiniteCStarCategory c = sections_category(e);
  g.basis_change = random_basis_changes(c, mode, rng);
  g.category = change_basis(c, g.basis_change);
  return g;
}

inline GeneratedCategory gen_category(const GenParams& params) {
  const FiniteSpaceoid e = gen_spaceoid(params);
  Rng rng(params.seed ^ 0x5c7a3b1e9d2f4608ULL);
  return scramble_sections(e, params.scramble, rng);
}

// ---------------------------------------------------------------------------
// morphisms

struct GeneratedMorphism {
  std::shared_ptr<const FiniteSpaceoid> source;
  SpaceoidMorphism morphism;
};

/// A random source spaceoid E1 with a morphism E1 -> target. E1 consists of
/// zero or more copies of each component of the target (at least one over
/// every object), its objects are a random relabelling, its frames a random
/// gauge, and the scalars come from random node phases beta:
/// F_p = mu2(f(p)) beta(t(p)) conj(beta(s(p))) / mu1(p), where mu1, mu2 are
/// the gauges of the two spaceoids relative to trivial phases.
inline GeneratedMorphism gen_morphism_into(std::shared_ptr<const FiniteSpaceoid> target, Rng& rng,
                                           PhaseMode phase_mode = PhaseMode::random) {
  const FiniteSpaceoid& e2 = *target;
  const std::size_t n = e2.size();
  const auto comps2 = spaceoid_components(e2);

  std::vector<std::size_t> perm(n);  // E1 object a -> E2 object perm[a]
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<std::size_t> inv_perm(n);
  for (std::size_t a = 0; a < n; ++a) inv_perm[perm[a]] = a;

  std::vector<std::size_t> copies(comps2.size());
  for (auto& k : copies) k = static_cast<std::size_t>(rng.integer(0, 2));
  for (std::size_t b = 0; b < n; ++b) {
    bool covered = false;
    for (std::size_t k = 0; k < comps2.size() && !covered; ++k)
      if (copies[k] > 0)
        for (const auto& node : comps2[k]) covered = covered || node.first == b;
    if (covered) continue;
    for (std::size_t k = 0; k < comps2.size(); ++k)
      if (std::any_of(comps2[k].begin(), comps2[k].end(), [&](const SpaceoidNode& nd) { return nd.first == b; })) {
        copies[k] = 1;
        break;
      }
  }

  std::vector<std::size_t> sizes(n, 0);
  std::vector<std::vector<SpaceoidNode>> comps1;
  std::vector<std::vector<std::size_t>> base(n);  // E1 base point -> E2 base point
  for (std::size_t k = 0; k < comps2.size(); ++k)
    for (std::size_t r = 0; r < copies[k]; ++r) {
      std::vector<SpaceoidNode> comp;
      for (const auto& [b2, y] : comps2[k]) {
        const std::size_t a1 = inv_perm[b2];
        comp.push_back({a1, sizes[a1]++});
        base[a1].push_back(y);
      }
      std::sort(comp.begin(), comp.end());
      comps1.push_back(std::move(comp));
    }
  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) names.push_back(object_name(a));
  FiniteSpaceoid triv1 = detail::spaceoid_from_components(names, sizes, comps1);
  auto mu1 = phase_mode == PhaseMode::random ? detail::random_gauge(triv1, rng)
                                              : std::vector<std::vector<cplx>>{};
  if (mu1.empty()) {
    mu1.resize(n * n);
    for (std::size_t k = 0; k < n * n; ++k) mu1[k].assign(triv1.points[k].size(), cplx{1.0, 0.0});
  }
  auto e1 = std::make_shared<const FiniteSpaceoid>(regauge(triv1, mu1));

  const GaugeFix g2 = gauge_fix(e2);
  std::vector<std::vector<cplx>> beta(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t x = 0; x < sizes[a]; ++x) beta[a].push_back(rng.phase());

  GeneratedMorphism out;
  out.source = e1;
  out.morphism = make_morphism(e1, target, perm, base);
  e1->for_each_point([&](const PointRef& p) {
    const auto& pt = e1->point(p);
    const PointRef q = out.morphism.image(p);
    const cplx mu2 = 1.0 / g2.lambda[q.a * n + q.b][q.index];
    const cplx ftriv = beta[p.a][pt.target] * std::conj(beta[p.b][pt.source]);
    out.morphism.scalars[p.a * n + p.b][p.index] = mu2 * ftriv / mu1[p.a * n + p.b][p.index];
  });
  return out;
}

}  // namespace gelfand
