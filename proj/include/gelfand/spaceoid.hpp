#pragma once

// Finite spaceoids: for each pair of objects (A, B) a set of points over
// X_A x X_B, each carrying a one-dimensional fiber with a chosen unit frame.
// The frames obey
//   u_p o u_q = c(p, q) u_{pq}      (u_p)* = nu(p) u_{p*}
// with unimodular phases c and nu. Morphisms are object bijections together
// with base maps and unimodular fiber scalars.

#include <algorithm>
#include <compare>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gelfand/numlin.hpp"
#include "gelfand/report.hpp"

namespace gelfand {

struct SpaceoidPoint {
  std::string id;
  std::size_t target = 0;  // index into the base set of the first object
  std::size_t source = 0;  // index into the base set of the second object
  cplx nu{1.0, 0.0};

  bool operator==(const SpaceoidPoint&) const = default;
};

/// Point `index` of the fiber set E_ab.
struct PointRef {
  std::size_t a = 0, b = 0, index = 0;
  auto operator<=>(const PointRef&) const = default;
};

struct FiniteSpaceoid {
  std::vector<std::string> objects;
  std::vector<std::vector<std::string>> base_sets;
  std::vector<std::vector<SpaceoidPoint>> points;  // [a*n+b]
  std::map<std::pair<PointRef, PointRef>, cplx> phases;  // missing entries are 1

  static FiniteSpaceoid with_objects(std::vector<std::string> names) {
    FiniteSpaceoid e;
    const std::size_t n = names.size();
    e.objects = std::move(names);
    e.base_sets.assign(n, {});
    e.points.assign(n * n, {});
    return e;
  }

  std::size_t size() const { return objects.size(); }
  const std::vector<SpaceoidPoint>& fiber(std::size_t a, std::size_t b) const { return points[a * size() + b]; }
  std::vector<SpaceoidPoint>& fiber(std::size_t a, std::size_t b) { return points[a * size() + b]; }
  const SpaceoidPoint& point(const PointRef& p) const { return fiber(p.a, p.b)[p.index]; }
  SpaceoidPoint& point(const PointRef& p) { return fiber(p.a, p.b)[p.index]; }

  std::optional<std::size_t> find(std::size_t a, std::size_t b, std::size_t t, std::size_t s) const {
    const auto& f = fiber(a, b);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i].target == t && f[i].source == s) return i;
    return std::nullopt;
  }

  /// Identity point over base point x of object a.
  PointRef identity(std::size_t a, std::size_t x) const {
    const auto i = find(a, a, x, x);
    if (!i) throw Error(ErrorCode::InvalidSpaceoid, "missing identity point");
    return {a, a, *i};
  }

  bool is_identity(const PointRef& p) const {
    const auto& pt = point(p);
    return p.a == p.b && pt.target == pt.source;
  }

  PointRef inverse(const PointRef& p) const {
    const auto& pt = point(p);
    const auto i = find(p.b, p.a, pt.source, pt.target);
    if (!i) throw Error(ErrorCode::InvalidSpaceoid, "point " + pt.id + " has no inverse");
    return {p.b, p.a, *i};
  }

  bool composable(const PointRef& p, const PointRef& q) const {
    return p.b == q.a && point(p).source == point(q).target;
  }

  std::optional<PointRef> compose(const PointRef& p, const PointRef& q) const {
    if (!composable(p, q)) return std::nullopt;
    const auto i = find(p.a, q.b, point(p).target, point(q).source);
    if (!i) return std::nullopt;
    return PointRef{p.a, q.b, *i};
  }

  cplx phase(const PointRef& p, const PointRef& q) const {
    const auto it = phases.find({p, q});
    return it == phases.end() ? cplx{1.0, 0.0} : it->second;
  }

  void set_phase(const PointRef& p, const PointRef& q, cplx c) {
    if (c == cplx{1.0, 0.0})
      phases.erase({p, q});
    else
      phases[{p, q}] = c;
  }

  cplx nu(const PointRef& p) const { return point(p).nu; }

  template <class F>
  void for_each_point(F&& f) const {
    const std::size_t n = size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t i = 0; i < fiber(a, b).size(); ++i) f(PointRef{a, b, i});
  }

  std::size_t point_count() const {
    std::size_t k = 0;
    for (const auto& f : points) k += f.size();
    return k;
  }

  bool operator==(const FiniteSpaceoid&) const = default;
};

/// Node (object, base point).
using SpaceoidNode = std::pair<std::size_t, std::size_t>;

/// Connected components of the node graph whose edges are points. Each is
/// sorted by object, then base point.
inline std::vector<std::vector<SpaceoidNode>> spaceoid_components(const FiniteSpaceoid& e) {
  const std::size_t n = e.size();
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t a = 0; a < n; ++a) offset[a + 1] = offset[a] + e.base_sets[a].size();
  std::vector<std::size_t> parent(offset[n]);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  e.for_each_point([&](const PointRef& p) {
    const auto& pt = e.point(p);
    if (pt.target >= e.base_sets[p.a].size() || pt.source >= e.base_sets[p.b].size()) return;
    const std::size_t x = find(offset[p.a] + pt.target), y = find(offset[p.b] + pt.source);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  });
  std::map<std::size_t, std::vector<SpaceoidNode>> groups;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t x = 0; x < e.base_sets[a].size(); ++x) groups[find(offset[a] + x)].push_back({a, x});
  std::vector<std::vector<SpaceoidNode>> out;
  for (auto& [root, nodes] : groups) out.push_back(std::move(nodes));
  return out;
}

/// Objects covered by a component, ascending.
inline std::vector<std::size_t> component_support(const std::vector<SpaceoidNode>& comp) {
  std::vector<std::size_t> s;
  for (const auto& [a, x] : comp) s.push_back(a);
  return s;
}

inline ValidationReport validate_spaceoid(const FiniteSpaceoid& e, const Tolerance& tol = {}) {
  ValidationReport report;
  const std::size_t n = e.size();
  const double eps = tol.structural();

  report.ran("shape");
  if (e.base_sets.size() != n || e.points.size() != n * n) {
    report.fail("shape", "table sizes do not match the object count");
    return report;
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (e.base_sets[a].empty()) report.fail("shape", "base set of " + e.objects[a] + " is empty", {a});
    for (std::size_t b = 0; b < n; ++b) {
      const auto& f = e.fiber(a, b);
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].target >= e.base_sets[a].size() || f[i].source >= e.base_sets[b].size()) {
          report.fail("shape", "point " + f[i].id + " lies over a missing base point", {a, b, i});
        }
        for (std::size_t j = 0; j < i; ++j)
          if (f[j].target == f[i].target && f[j].source == f[i].source) {
            report.fail("shape", "two points over the same base pair in " + e.objects[a] + "|" + e.objects[b], {a, b, i});
          }
      }
    }
  }
  if (!report.ok()) return report;

  report.ran("identities");
  for (std::size_t a = 0; a < n; ++a) {
    const auto& f = e.fiber(a, a);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i].target != f[i].source) {
        report.fail("identities", "point " + f[i].id + " joins two base points of " + e.objects[a], {a, a, i});
      }
    for (std::size_t x = 0; x < e.base_sets[a].size(); ++x)
      if (!e.find(a, a, x, x)) report.fail("identities", "no identity over " + e.base_sets[a][x], {a, x});
  }

  report.ran("inverse_closed");
  report.ran("composition_closed");
  e.for_each_point([&](const PointRef& p) {
    const auto& pt = e.point(p);
    if (!e.find(p.b, p.a, pt.source, pt.target)) report.fail("inverse_closed", "point " + pt.id, {p.a, p.b, p.index});
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t j = 0; j < e.fiber(p.b, c).size(); ++j) {
        const PointRef q{p.b, c, j};
        if (e.composable(p, q) && !e.compose(p, q)) {
          report.fail("composition_closed", pt.id + " o " + e.point(q).id, {p.a, p.b, p.index, c, j});
        }
      }
  });
  if (!report.ok()) return report;

  report.ran("phase_domain");
  for (const auto& [key, c] : e.phases) {
    const auto& [p, q] = key;
    const bool in_range = p.a < n && p.b < n && q.a < n && q.b < n && p.index < e.fiber(p.a, p.b).size() &&
                          q.index < e.fiber(q.a, q.b).size();
    if (!in_range || !e.composable(p, q)) report.fail("phase_domain", "phase stored for a non-composable pair");
  }
  if (!report.ok()) return report;

  report.ran("unimodular");
  report.ran("identity_phases");
  report.ran("nu_symmetric");
  report.ran("nu_inverse");
  for (const auto& [key, c] : e.phases) {
    if (std::abs(std::abs(c) - 1.0) > eps) report.fail("unimodular", "phase of modulus " + std::to_string(std::abs(c)));
  }
  e.for_each_point([&](const PointRef& p) {
    const auto& pt = e.point(p);
    const std::vector<std::size_t> w{p.a, p.b, p.index};
    if (std::abs(std::abs(pt.nu) - 1.0) > eps) report.fail("unimodular", "nu of " + pt.id, w);
    const PointRef ps = e.inverse(p);
    if (std::abs(e.nu(ps) - pt.nu) > eps) report.fail("nu_symmetric", pt.id, w);
    if (std::abs(pt.nu * e.phase(p, ps) - 1.0) > eps || std::abs(pt.nu * e.phase(ps, p) - 1.0) > eps) {
      report.fail("nu_inverse", pt.id, w);
    }
    if (e.is_identity(p)) {
      if (std::abs(pt.nu - 1.0) > eps) report.fail("identity_phases", "nu of identity " + pt.id, w);
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t j = 0; j < e.fiber(p.b, c).size(); ++j) {
          const PointRef q{p.b, c, j};
          if (e.composable(p, q) && std::abs(e.phase(p, q) - 1.0) > eps) report.fail("identity_phases", pt.id, w);
        }
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t j = 0; j < e.fiber(c, p.a).size(); ++j) {
          const PointRef q{c, p.a, j};
          if (e.composable(q, p) && std::abs(e.phase(q, p) - 1.0) > eps) report.fail("identity_phases", pt.id, w);
        }
    }
  });

  report.ran("cocycle");
  report.ran("nu_antimultiplicative");
  e.for_each_point([&](const PointRef& p) {
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t j = 0; j < e.fiber(p.b, c).size(); ++j) {
        const PointRef q{p.b, c, j};
        if (!e.composable(p, q)) continue;
        const PointRef pq = *e.compose(p, q);
        const cplx lhs = std::conj(e.phase(p, q)) * e.nu(pq);
        const cplx rhs = e.nu(p) * e.nu(q) * e.phase(e.inverse(q), e.inverse(p));
        if (std::abs(lhs - rhs) > eps) {
          report.fail("nu_antimultiplicative", e.point(p).id + ", " + e.point(q).id, {p.a, p.b, p.index, c, j});
        }
        for (std::size_t d = 0; d < n; ++d)
          for (std::size_t k = 0; k < e.fiber(c, d).size(); ++k) {
            const PointRef r{c, d, k};
            if (!e.composable(q, r)) continue;
            const PointRef qr = *e.compose(q, r);
            const cplx l = e.phase(p, q) * e.phase(pq, r);
            const cplx rr = e.phase(q, r) * e.phase(p, qr);
            if (std::abs(l - rr) > eps) {
              report.fail("cocycle", e.point(p).id + ", " + e.point(q).id + ", " + e.point(r).id,
                          {p.a, p.b, p.index, c, j, d, k});
            }
          }
      }
  });
  return report;
}

inline void require_valid(const FiniteSpaceoid& e, const Tolerance& tol = {}) {
  const auto r = validate_spaceoid(e, tol);
  if (!r.ok()) throw Error(ErrorCode::InvalidSpaceoid, r.summary());
}

// ---------------------------------------------------------------------------
// gauge changes

/// Spaceoid with frames u'_p = lambda_p u_p.
inline FiniteSpaceoid regauge(const FiniteSpaceoid& e, const std::vector<std::vector<cplx>>& lambda) {
  FiniteSpaceoid out = e;
  out.phases.clear();
  const std::size_t n = e.size();
  e.for_each_point([&](const PointRef& p) {
    const cplx lp = lambda[p.a * n + p.b][p.index];
    const PointRef ps = e.inverse(p);
    out.point(p).nu = std::conj(lp) * e.nu(p) / lambda[ps.a * n + ps.b][ps.index];
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t j = 0; j < e.fiber(p.b, c).size(); ++j) {
        const PointRef q{p.b, c, j};
        if (!e.composable(p, q)) continue;
        const PointRef pq = *e.compose(p, q);
        const cplx lq = lambda[q.a * n + q.b][q.index];
        out.set_phase(p, q, lp * lq * e.phase(p, q) / lambda[pq.a * n + pq.b][pq.index]);
      }
  });
  return out;
}

struct GaugeFix {
  FiniteSpaceoid spaceoid;                // all phases equal to 1
  std::vector<std::vector<cplx>> lambda;  // [a*n+b][i], new frame = lambda * old frame
};

/// Trivializes all phases. In each component the root is the node over the
/// lowest object; with a_B the point from the root to the node over B, a
/// point p from the node over A to the node over B gets
/// lambda_p = nu(a_A) c(a_A*, a_B).
inline GaugeFix gauge_fix(const FiniteSpaceoid& e, const Tolerance& tol = {}) {
  require_valid(e, tol);
  const std::size_t n = e.size();
  GaugeFix g;
  g.lambda.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) g.lambda[k].assign(e.points[k].size(), cplx{1.0, 0.0});

  for (const auto& comp : spaceoid_components(e)) {
    const auto [r, xr] = comp.front();
    std::vector<std::optional<PointRef>> from_root(n);
    std::vector<std::size_t> base_of(n, 0);
    for (const auto& [a, x] : comp) {
      from_root[a] = PointRef{r, a, *e.find(r, a, xr, x)};
      base_of[a] = x;
    }
    for (const auto& [a, x] : comp)
      for (const auto& [b, y] : comp) {
        const PointRef p{a, b, *e.find(a, b, x, y)};
        const PointRef aa = *from_root[a], ab = *from_root[b];
        g.lambda[a * n + b][p.index] = e.nu(aa) * e.phase(e.inverse(aa), ab);
      }
  }
  g.spaceoid = regauge(e, g.lambda);
  for (auto& pt : g.spaceoid.points)
    for (auto& q : pt)
      if (std::abs(q.nu - 1.0) < 1e-6) q.nu = 1.0;
  for (auto it = g.spaceoid.phases.begin(); it != g.spaceoid.phases.end();) {
    if (std::abs(it->second - 1.0) < 1e-6)
      it = g.spaceoid.phases.erase(it);
    else
      ++it;
  }
  return g;
}

// ---------------------------------------------------------------------------
// morphisms

/// A morphism E1 -> E2: an object bijection, base maps X1_A -> X2_{f(A)}, the
/// induced point map and for every point p of E1 a unimodular scalar F_p
/// relating the frame over f(p) to the frame over p.
struct SpaceoidMorphism {
  std::shared_ptr<const FiniteSpaceoid> source;
  std::shared_ptr<const FiniteSpaceoid> target;
  std::vector<std::size_t> obj_map;
  std::vector<std::vector<std::size_t>> base_map;   // [a][x]
  std::vector<std::vector<std::size_t>> point_map;  // [a*n+b][i], index into E2_{f(a) f(b)}
  std::vector<std::vector<cplx>> scalars;           // [a*n+b][i]

  std::size_t size() const { return obj_map.size(); }
  PointRef image(const PointRef& p) const {
    return {obj_map[p.a], obj_map[p.b], point_map[p.a * size() + p.b][p.index]};
  }
  cplx scalar(const PointRef& p) const { return scalars[p.a * size() + p.b][p.index]; }
};

/// Fills point_map from obj_map and base_map. Throws InvalidMorphism when a
/// point has no image.
inline void induce_point_map(SpaceoidMorphism& m) {
  const auto& e1 = *m.source;
  const auto& e2 = *m.target;
  const std::size_t n = e1.size();
  m.point_map.assign(n * n, {});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (const auto& pt : e1.fiber(a, b)) {
        const auto i =
            e2.find(m.obj_map[a], m.obj_map[b], m.base_map[a][pt.target], m.base_map[b][pt.source]);
        if (!i) throw Error(ErrorCode::InvalidMorphism, "point " + pt.id + " has no image");
        m.point_map[a * n + b].push_back(*i);
      }
}

inline SpaceoidMorphism make_morphism(std::shared_ptr<const FiniteSpaceoid> source,
                                      std::shared_ptr<const FiniteSpaceoid> target, std::vector<std::size_t> obj_map,
                                      std::vector<std::vector<std::size_t>> base_map) {
  SpaceoidMorphism m;
  m.source = std::move(source);
  m.target = std::move(target);
  m.obj_map = std::move(obj_map);
  m.base_map = std::move(base_map);
  induce_point_map(m);
  const std::size_t n = m.source->size();
  m.scalars.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) m.scalars[k].assign(m.source->points[k].size(), cplx{1.0, 0.0});
  return m;
}

inline ValidationReport validate_morphism(const SpaceoidMorphism& m, const Tolerance& tol = {}) {
  ValidationReport report;
  const auto& e1 = *m.source;
  const auto& e2 = *m.target;
  const std::size_t n = e1.size();
  const double eps = tol.structural();

  report.ran("object_bijective");
  if (m.obj_map.size() != n || e2.size() != n) {
    report.fail("object_bijective", "object counts differ");
    return report;
  }
  std::vector<bool> hit(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    if (m.obj_map[a] >= n || hit[m.obj_map[a]]) {
      report.fail("object_bijective", "object map is not a bijection", {a});
      return report;
    }
    hit[m.obj_map[a]] = true;
  }

  report.ran("shape");
  if (m.base_map.size() != n || m.point_map.size() != n * n || m.scalars.size() != n * n) {
    report.fail("shape", "map tables have wrong size");
    return report;
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (m.base_map[a].size() != e1.base_sets[a].size()) report.fail("shape", "base map of " + e1.objects[a], {a});
    for (std::size_t x : m.base_map[a])
      if (x >= e2.base_sets[m.obj_map[a]].size()) report.fail("shape", "base map of " + e1.objects[a] + " out of range", {a});
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t k = a * n + b;
      if (m.point_map[k].size() != e1.points[k].size() || m.scalars[k].size() != e1.points[k].size()) {
        report.fail("shape", "point table of " + e1.objects[a] + "|" + e1.objects[b], {a, b});
      }
    }
  }
  if (!report.ok()) return report;

  report.ran("point_map");
  e1.for_each_point([&](const PointRef& p) {
    const auto& pt = e1.point(p);
    const std::size_t fi = m.point_map[p.a * n + p.b][p.index];
    const auto& f2 = e2.fiber(m.obj_map[p.a], m.obj_map[p.b]);
    if (fi >= f2.size() || f2[fi].target != m.base_map[p.a][pt.target] || f2[fi].source != m.base_map[p.b][pt.source]) {
      report.fail("point_map", "image of " + pt.id + " is not over the image base pair", {p.a, p.b, p.index});
    }
  });
  if (!report.ok()) return report;

  // The pulled-back section algebra is unital and multiplicative only when
  // every component of E1 reaches every object its image component reaches.
  report.ran("non_degenerate");
  {
    const auto comps2 = spaceoid_components(e2);
    std::map<SpaceoidNode, std::size_t> comp_of2;
    for (std::size_t k = 0; k < comps2.size(); ++k)
      for (const auto& node : comps2[k]) comp_of2[node] = k;
    for (const auto& comp : spaceoid_components(e1)) {
      const auto [a, x] = comp.front();
      const auto& image_comp = comps2[comp_of2.at({m.obj_map[a], m.base_map[a][x]})];
      std::vector<std::size_t> s1;
      for (const auto& [b, y] : comp) s1.push_back(m.obj_map[b]);
      std::sort(s1.begin(), s1.end());
      if (s1 != component_support(image_comp)) {
        report.fail("non_degenerate", "component through " + e1.base_sets[a][x] + " misses objects of its image", {a, x});
      }
    }
  }

  report.ran("unimodular");
  report.ran("identity_scalars");
  report.ran("multiplicative");
  report.ran("involutive");
  e1.for_each_point([&](const PointRef& p) {
    const std::vector<std::size_t> w{p.a, p.b, p.index};
    const cplx fp = m.scalar(p);
    if (std::abs(std::abs(fp) - 1.0) > eps) report.fail("unimodular", "scalar of " + e1.point(p).id, w);
    if (e1.is_identity(p) && std::abs(fp - 1.0) > eps) report.fail("identity_scalars", e1.point(p).id, w);
    const PointRef ps = e1.inverse(p);
    if (std::abs(e2.nu(m.image(p)) * m.scalar(ps) - std::conj(fp) * e1.nu(p)) > eps) {
      report.fail("involutive", e1.point(p).id, w);
    }
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t j = 0; j < e1.fiber(p.b, c).size(); ++j) {
        const PointRef q{p.b, c, j};
        if (!e1.composable(p, q)) continue;
        const PointRef pq = *e1.compose(p, q);
        const cplx lhs = e2.phase(m.image(p), m.image(q)) * m.scalar(pq);
        const cplx rhs = fp * m.scalar(q) * e1.phase(p, q);
        if (std::abs(lhs - rhs) > eps) report.fail("multiplicative", e1.point(p).id + ", " + e1.point(q).id, w);
      }
  });
  // Finite base sets: every section converges and vanishes at infinity.
  report.ran("converging_at_infinity");
  report.ran("vanishing_at_infinity");
  return report;
}

inline SpaceoidMorphism identity_morphism(std::shared_ptr<const FiniteSpaceoid> e) {
  const std::size_t n = e->size();
  std::vector<std::size_t> obj(n);
  std::iota(obj.begin(), obj.end(), 0);
  std::vector<std::vector<std::size_t>> base(n);
  for (std::size_t a = 0; a < n; ++a) {
    base[a].resize(e->base_sets[a].size());
    std::iota(base[a].begin(), base[a].end(), 0);
  }
  return make_morphism(e, e, obj, base);
}

/// snd o fst.
inline SpaceoidMorphism compose_morphisms(const SpaceoidMorphism& fst, const SpaceoidMorphism& snd) {
  if (fst.target != snd.source && !(*fst.target == *snd.source)) {
    throw Error(ErrorCode::EndpointMismatch, "morphism endpoints do not match");
  }
  const std::size_t n = fst.size();
  std::vector<std::size_t> obj(n);
  std::vector<std::vector<std::size_t>> base(n);
  for (std::size_t a = 0; a < n; ++a) {
    obj[a] = snd.obj_map[fst.obj_map[a]];
    for (std::size_t x : fst.base_map[a]) base[a].push_back(snd.base_map[fst.obj_map[a]][x]);
  }
  SpaceoidMorphism m = make_morphism(fst.source, snd.target, obj, base);
  fst.source->for_each_point([&](const PointRef& p) {
    m.scalars[p.a * n + p.b][p.index] = fst.scalar(p) * snd.scalar(fst.image(p));
  });
  return m;
}

/// Inverse of a morphism whose base maps are bijections.
inline SpaceoidMorphism invert(const SpaceoidMorphism& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> obj(n);
  std::vector<std::vector<std::size_t>> base(n);
  for (std::size_t a = 0; a < n; ++a) obj[m.obj_map[a]] = a;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t fa = m.obj_map[a];
    if (m.base_map[a].size() != m.target->base_sets[fa].size()) {
      throw Error(ErrorCode::InvalidMorphism, "base map of " + m.source->objects[a] + " is not a bijection");
    }
    base[fa].assign(m.base_map[a].size(), 0);
    std::vector<bool> hit(m.base_map[a].size(), false);
    for (std::size_t x = 0; x < m.base_map[a].size(); ++x) {
      if (hit[m.base_map[a][x]]) throw Error(ErrorCode::InvalidMorphism, "base map is not injective");
      hit[m.base_map[a][x]] = true;
      base[fa][m.base_map[a][x]] = x;
    }
  }
  SpaceoidMorphism inv = make_morphism(m.target, m.source, obj, base);
  m.source->for_each_point([&](const PointRef& p) {
    const PointRef q = m.image(p);
    inv.scalars[q.a * n + q.b][q.index] = std::conj(m.scalar(p));
  });
  return inv;
}

/// Maximum scalar difference of two morphisms with the same underlying maps;
/// infinity if the maps differ.
inline double morphism_distance(const SpaceoidMorphism& f, const SpaceoidMorphism& g) {
  if (f.obj_map != g.obj_map || f.base_map != g.base_map || f.point_map != g.point_map) {
    return std::numeric_limits<double>::infinity();
  }
  double d = 0.0;
  for (std::size_t k = 0; k < f.scalars.size(); ++k)
    for (std::size_t i = 0; i < f.scalars[k].size(); ++i) d = std::max(d, std::abs(f.scalars[k][i] - g.scalars[k][i]));
  return d;
}

// ---------------------------------------------------------------------------
// isomorphism

namespace detail {

inline bool next_object_permutation(std::vector<std::size_t>& perm) {
  return std::next_permutation(perm.begin(), perm.end());
}

}  // namespace detail

/// Searches for an isomorphism E1 -> E2. Both are gauge fixed, an object
/// bijection is enumerated (pruned on base set and fiber sizes), components
/// are paired by support and the fiber scalars are read off the gauges. The
/// candidate is verified through its explicit inverse.
inline std::optional<SpaceoidMorphism> spaceoids_isomorphic(std::shared_ptr<const FiniteSpaceoid> e1,
                                                            std::shared_ptr<const FiniteSpaceoid> e2,
                                                            const Tolerance& tol = {}) {
  const std::size_t n = e1->size();
  if (e2->size() != n || e1->point_count() != e2->point_count()) return std::nullopt;
  if (n > 8) throw Error(ErrorCode::InvalidSpaceoid, "isomorphism search supports at most 8 objects");
  const GaugeFix g1 = gauge_fix(*e1, tol);
  const GaugeFix g2 = gauge_fix(*e2, tol);
  const auto comps1 = spaceoid_components(*e1);
  const auto comps2 = spaceoid_components(*e2);
  if (comps1.size() != comps2.size()) return std::nullopt;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool sizes_ok = true;
    for (std::size_t a = 0; a < n && sizes_ok; ++a) {
      sizes_ok = e1->base_sets[a].size() == e2->base_sets[perm[a]].size();
      for (std::size_t b = 0; b < n && sizes_ok; ++b)
        sizes_ok = e1->fiber(a, b).size() == e2->fiber(perm[a], perm[b]).size();
    }
    if (!sizes_ok) continue;

    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> s1, s2;
    for (std::size_t k = 0; k < comps1.size(); ++k) {
      std::vector<std::size_t> s;
      for (const auto& [a, x] : comps1[k]) s.push_back(perm[a]);
      std::sort(s.begin(), s.end());
      s1.push_back({s, k});
    }
    for (std::size_t k = 0; k < comps2.size(); ++k) s2.push_back({component_support(comps2[k]), k});
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    bool match = true;
    for (std::size_t k = 0; k < s1.size() && match; ++k) match = s1[k].first == s2[k].first;
    if (!match) continue;

    std::vector<std::vector<std::size_t>> base(n);
    for (std::size_t a = 0; a < n; ++a) base[a].assign(e1->base_sets[a].size(), 0);
    for (std::size_t k = 0; k < s1.size(); ++k) {
      const auto& c1 = comps1[s1[k].second];
      const auto& c2 = comps2[s2[k].second];
      for (const auto& [a, x] : c1) {
        const auto it = std::find_if(c2.begin(), c2.end(), [&](const SpaceoidNode& nd) { return nd.first == perm[a]; });
        base[a][x] = it->second;
      }
    }
    SpaceoidMorphism m;
    try {
      m = make_morphism(e1, e2, perm, base);
    } catch (const Error&) {
      continue;
    }
    e1->for_each_point([&](const PointRef& p) {
      const PointRef q = m.image(p);
      m.scalars[p.a * n + p.b][p.index] = g1.lambda[p.a * n + p.b][p.index] / g2.lambda[q.a * n + q.b][q.index];
    });
    if (!validate_morphism(m, tol).ok()) continue;
    const SpaceoidMorphism inv = invert(m);
    if (!validate_morphism(inv, tol).ok()) continue;
    if (morphism_distance(compose_morphisms(m, inv), identity_morphism(e1)) > tol.structural()) continue;
    if (morphism_distance(compose_morphisms(inv, m), identity_morphism(e2)) > tol.structural()) continue;
    return m;
  } while (detail::next_object_permutation(perm));
  return std::nullopt;
}

}  // namespace gelfand
