#include <gtest/gtest.h>

#include "gelfand/gelfand.hpp"

using namespace gelfand;

namespace {

io::json fixture(const std::string& name) { return io::read_file(std::string(GELFAND_FIXTURES) + "/" + name); }

std::shared_ptr<const FiniteSpaceoid> e1() {
  return std::make_shared<const FiniteSpaceoid>(io::spaceoid_from_json(fixture("e1_spaceoid.json")));
}

PointRef point_p(const FiniteSpaceoid&) { return {0, 1, 0}; }

std::vector<std::vector<cplx>> unit_gauge(const FiniteSpaceoid& e) {
  std::vector<std::vector<cplx>> l;
  for (const auto& f : e.points) l.emplace_back(f.size(), cplx{1.0, 0.0});
  return l;
}

/// Same spaceoid with objects listed in the order `perm` (new index i holds
/// old object perm[i]) and every base set reversed and renamed.
FiniteSpaceoid relabel(const FiniteSpaceoid& e, const std::vector<std::size_t>& perm) {
  const std::size_t n = e.size();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("N" + e.objects[perm[i]]);
  auto out = FiniteSpaceoid::with_objects(names);
  auto flip = [&](std::size_t a, std::size_t x) { return e.base_sets[a].size() - 1 - x; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = perm[i];
    out.base_sets[i].resize(e.base_sets[a].size());
    for (std::size_t x = 0; x < e.base_sets[a].size(); ++x) out.base_sets[i][flip(a, x)] = "r" + e.base_sets[a][x];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto& f = out.fiber(i, j);
      for (auto pt : e.fiber(perm[i], perm[j])) {
        pt.target = flip(perm[i], pt.target);
        pt.source = flip(perm[j], pt.source);
        f.push_back(pt);
      }
      std::sort(f.begin(), f.end(), [](const SpaceoidPoint& p, const SpaceoidPoint& q) {
        return std::pair(p.target, p.source) < std::pair(q.target, q.source);
      });
    }
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
  auto moved = [&](const PointRef& p) {
    const auto& pt = e.point(p);
    const std::size_t i = inv[p.a], j = inv[p.b];
    return PointRef{i, j, *out.find(i, j, flip(p.a, pt.target), flip(p.b, pt.source))};
  };
  for (const auto& [key, c] : e.phases) out.set_phase(moved(key.first), moved(key.second), c);
  return out;
}

GenParams params(std::uint64_t seed, std::size_t n) {
  GenParams p;
  p.seed = seed;
  p.n_objects = n;
  p.max_base = 4;
  p.edge_density = 0.6;
  return p;
}

}  // namespace

TEST(ValidateSpaceoid, Fixtures) {
  EXPECT_TRUE(validate_spaceoid(io::spaceoid_from_json(fixture("s0_spaceoid.json"))).ok());
  const auto r = validate_spaceoid(*e1());
  EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(ValidateSpaceoid, SecondPointFromSameTargetIsInvalid) {
  auto e = *e1();
  e.fiber(0, 1).push_back({"q", 0, 1, 1.0});
  e.fiber(1, 0).push_back({"q*", 1, 0, 1.0});
  const auto r = validate_spaceoid(e);
  EXPECT_TRUE(r.failed("composition_closed"));
}

TEST(ValidateSpaceoid, MissingInverseAndIdentity) {
  auto e = *e1();
  e.fiber(1, 0).clear();
  EXPECT_TRUE(validate_spaceoid(e).failed("inverse_closed"));
  auto f = *e1();
  f.fiber(0, 0).pop_back();
  EXPECT_TRUE(validate_spaceoid(f).failed("identities"));
}

TEST(ValidateSpaceoid, PhaseConditions) {
  auto e = *e1();
  const PointRef p = point_p(e);
  const PointRef ps = e.inverse(p);
  e.set_phase(p, ps, cplx(0, 1));
  EXPECT_TRUE(validate_spaceoid(e).failed("nu_inverse"));

  auto f = *e1();
  f.point(p).nu = 2.0;
  EXPECT_TRUE(validate_spaceoid(f).failed("unimodular"));

  auto g = *e1();
  g.set_phase(p, {1, 1, 0}, cplx(0, 1));
  EXPECT_TRUE(validate_spaceoid(g).failed("identity_phases"));

  auto h = *e1();
  h.set_phase({0, 0, 1}, p, 1.0);
  h.phases[{{0, 0, 1}, p}] = 1.0;
  EXPECT_TRUE(validate_spaceoid(h).failed("phase_domain"));
}

TEST(ValidateSpaceoid, GeneratedAreValid) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto e = gen_spaceoid(params(seed, 1 + seed % 6));
    const auto r = validate_spaceoid(e);
    EXPECT_TRUE(r.ok()) << "seed " << seed << ": " << r.summary();
  }
}

TEST(GaugeFix, SingleEdgePhaseIsRemoved) {
  const auto e = e1();
  auto lambda = unit_gauge(*e);
  lambda[0 * 2 + 1][0] = std::polar(1.0, 0.7);
  const auto rotated = regauge(*e, lambda);
  EXPECT_TRUE(validate_spaceoid(rotated).ok());
  EXPECT_NE(rotated.nu(point_p(rotated)), cplx(1.0));
  const auto fixed = gauge_fix(rotated);
  EXPECT_TRUE(fixed.spaceoid.phases.empty());
  fixed.spaceoid.for_each_point([&](const PointRef& p) { EXPECT_EQ(fixed.spaceoid.nu(p), cplx(1.0)); });
}

TEST(GaugeFix, TrivializesGeneratedPhases) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto e = gen_spaceoid(params(seed, 4));
    const auto g = gauge_fix(e);
    EXPECT_TRUE(g.spaceoid.phases.empty()) << "seed " << seed;
    g.spaceoid.for_each_point([&](const PointRef& p) { EXPECT_NEAR(std::abs(g.spaceoid.nu(p) - 1.0), 0.0, 1e-12); });
    const auto again = regauge(e, g.lambda);
    again.for_each_point([&](const PointRef& p) { EXPECT_NEAR(std::abs(again.nu(p) - 1.0), 0.0, 1e-12); });
  }
}

TEST(Morphism, IdentityAndPhaseAutomorphism) {
  const auto e = e1();
  const auto id = identity_morphism(e);
  EXPECT_TRUE(validate_morphism(id).ok());

  auto m = identity_morphism(e);
  const PointRef p = point_p(*e);
  m.scalars[0 * 2 + 1][0] = cplx(0, 1);
  m.scalars[1 * 2 + 0][0] = cplx(0, -1);
  const auto r = validate_morphism(m);
  EXPECT_TRUE(r.ok()) << r.summary();
  const auto sq = compose_morphisms(m, m);
  EXPECT_NEAR(std::abs(sq.scalar(p) - cplx(-1.0)), 0.0, 1e-15);
  EXPECT_EQ(morphism_distance(compose_morphisms(m, id), m), 0.0);
  EXPECT_LE(morphism_distance(compose_morphisms(m, invert(m)), id), 1e-15);
}

TEST(Morphism, ViolationsAreNamed) {
  const auto e = e1();
  auto m = identity_morphism(e);
  m.scalars[0 * 2 + 1][0] = cplx(0, 1);  // the adjoint point keeps 1
  EXPECT_TRUE(validate_morphism(m).failed("involutive"));

  auto n = identity_morphism(e);
  n.scalars[0][0] = cplx(0, 1);
  EXPECT_TRUE(validate_morphism(n).failed("identity_scalars"));

  auto k = identity_morphism(e);
  k.scalars[0 * 2 + 1][0] = 2.0;
  EXPECT_TRUE(validate_morphism(k).failed("unimodular"));
}

TEST(Morphism, ComponentMissingAnObjectIsDegenerate) {
  // discrete two-object spaceoid into the full one: the image component
  // reaches both objects, the source components only one each
  auto full = FiniteSpaceoid::with_objects({"A", "B"});
  full.base_sets = {{"a"}, {"b"}};
  full.fiber(0, 0) = {{"a", 0, 0, 1.0}};
  full.fiber(1, 1) = {{"b", 0, 0, 1.0}};
  full.fiber(0, 1) = {{"ab", 0, 0, 1.0}};
  full.fiber(1, 0) = {{"ba", 0, 0, 1.0}};
  auto discrete = full;
  discrete.fiber(0, 1).clear();
  discrete.fiber(1, 0).clear();
  const auto m = make_morphism(std::make_shared<const FiniteSpaceoid>(discrete),
                               std::make_shared<const FiniteSpaceoid>(full), {0, 1}, {{0}, {0}});
  EXPECT_TRUE(validate_morphism(m).failed("non_degenerate"));
}

TEST(Morphism, EndpointMismatch) {
  const auto e = e1();
  const auto other = std::make_shared<const FiniteSpaceoid>(io::spaceoid_from_json(fixture("s0_spaceoid.json")));
  try {
    compose_morphisms(identity_morphism(e), identity_morphism(other));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::EndpointMismatch);
  }
}

TEST(Morphism, GeneratedAreValid) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto target = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(params(seed, 1 + seed % 5)));
    Rng rng(seed);
    const auto g = gen_morphism_into(target, rng);
    EXPECT_TRUE(validate_spaceoid(*g.source).ok());
    const auto r = validate_morphism(g.morphism);
    EXPECT_TRUE(r.ok()) << "seed " << seed << ": " << r.summary();
  }
}

TEST(Isomorphism, RelabelledE1) {
  const auto e = e1();
  const auto r = std::make_shared<const FiniteSpaceoid>(relabel(*e, {1, 0}));
  ASSERT_TRUE(validate_spaceoid(*r).ok());
  const auto iso = spaceoids_isomorphic(e, r);
  ASSERT_TRUE(iso.has_value());
  EXPECT_EQ(iso->obj_map, (std::vector<std::size_t>{1, 0}));
}

TEST(Isomorphism, EmptiedHomSetIsNotIsomorphic) {
  const auto e = e1();
  auto f = *e;
  f.fiber(0, 1).clear();
  f.fiber(1, 0).clear();
  EXPECT_FALSE(spaceoids_isomorphic(e, std::make_shared<const FiniteSpaceoid>(f)).has_value());
}

TEST(Isomorphism, RegaugedAndPermutedGeneratedSpaceoids) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + seed % 5;
    const auto e = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(params(seed, n)));
    Rng rng(seed + 99);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    auto lambda = unit_gauge(*e);
    e->for_each_point([&](const PointRef& p) {
      if (!e->is_identity(p)) lambda[p.a * n + p.b][p.index] = rng.phase();
    });
    const auto f = std::make_shared<const FiniteSpaceoid>(relabel(regauge(*e, lambda), perm));
    ASSERT_TRUE(validate_spaceoid(*f).ok()) << "seed " << seed;
    const auto iso = spaceoids_isomorphic(e, f);
    ASSERT_TRUE(iso.has_value()) << "seed " << seed;
    EXPECT_TRUE(validate_morphism(*iso).ok());
  }
}
