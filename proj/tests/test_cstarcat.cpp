#include <gtest/gtest.h>

#include "gelfand/gelfand.hpp"
#include "oracles.hpp"

using namespace gelfand;

namespace {

io::json fixture(const std::string& name) { return io::read_file(std::string(GELFAND_FIXTURES) + "/" + name); }

FiniteSpaceoid e1() { return io::spaceoid_from_json(fixture("e1_spaceoid.json")); }

FiniteCStarCategory one_dim(cplx invol = 1.0) {
  auto c = FiniteCStarCategory::with_objects({"A"});
  c.dims = {1};
  c.composition(0, 0, 0) = CMatrix{{1.0}};
  c.involution(0, 0) = CMatrix{{invol}};
  c.units[0] = {1.0};
  return c;
}

GeneratedCategory generated(std::uint64_t seed, Scramble mode, std::size_t n = 3) {
  GenParams p;
  p.seed = seed;
  p.n_objects = n;
  p.max_base = 4;
  p.edge_density = 0.6;
  p.scramble = mode;
  return gen_category(p);
}

}  // namespace

TEST(ValidateCategory, FootnoteCategoryIsValid) {
  const auto c = io::category_from_json(fixture("footnote_full.json"));
  const auto r = validate_category(c);
  EXPECT_TRUE(r.ok()) << r.summary();
  EXPECT_NE(std::find(r.checks.begin(), r.checks.end(), "positivity"), r.checks.end());
}

TEST(ValidateCategory, NonCommutativeDiagonalIsRejected) {
  const auto c = io::category_from_json(io::read_file(std::string(GELFAND_FIXTURES) + "/../tests/data/noncommutative.json"));
  const auto r = validate_category(c);
  EXPECT_TRUE(r.failed("diagonal_commutative"));
}

TEST(ValidateCategory, BrokenAssociativityIsLocated) {
  auto c = sections_category(e1());
  // delta_1 o delta_p should be delta_p; make it 2 delta_p
  c.composition(0, 0, 1)(0, 0) = 2.0;
  const auto r = validate_category(c);
  EXPECT_TRUE(r.failed("associativity") || r.failed("left_unit"));
}

TEST(ValidateCategory, WrongInvolutionSign) {
  const auto r = validate_category(one_dim(-1.0));
  EXPECT_TRUE(r.failed("involution_unit"));
}

TEST(ValidateCategory, SwappingInvolutionIsNotPositive) {
  // C^2 in the delta basis with delta_1* = delta_2: a *-algebra, but
  // delta_1* delta_1 = 0, so not a C*-algebra
  auto c = FiniteCStarCategory::with_objects({"A"});
  c.dims = {2};
  c.composition(0, 0, 0) = CMatrix{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}};
  c.involution(0, 0) = CMatrix{{0.0, 1.0}, {1.0, 0.0}};
  c.units[0] = {1.0, 1.0};
  const auto r = validate_category(c);
  EXPECT_FALSE(r.failed("involution_antimultiplicative"));
  EXPECT_TRUE(r.failed("positivity")) << r.summary();
}

TEST(ValidateCategory, ShapeErrors) {
  auto c = one_dim();
  c.units[0] = {1.0, 0.0};
  EXPECT_TRUE(validate_category(c).failed("shape"));
}

TEST(DiagonalSpectrum, DeltaBasisGivesCoordinateCharacters) {
  const auto c = sections_category(e1());
  const auto chars = characters_of_diagonal(c, 1);
  ASSERT_EQ(chars.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(max_diff(chars[i].values, unit_vector(3, i)), 1e-12);
    EXPECT_LE(max_diff(chars[i].idempotent, unit_vector(3, i)), 1e-12);
  }
}

TEST(DiagonalSpectrum, ScrambledBasisMatchesOracle) {
  for (Scramble mode : {Scramble::unitary, Scramble::invertible}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto g = generated(seed, mode);
      const std::size_t n = g.category.size();
      for (std::size_t a = 0; a < n; ++a) {
        const auto chars = characters_of_diagonal(g.category, a);
        const CMatrix& t = g.basis_change[a * n + a];
        ASSERT_EQ(chars.size(), g.oracle.base_sets[a].size());
        // evaluation at base point x reads row (identity index of x) of T
        for (std::size_t x = 0; x < g.oracle.base_sets[a].size(); ++x) {
          const CVector expect = t.row(g.oracle.identity(a, x).index);
          const auto hit = std::count_if(chars.begin(), chars.end(),
                                         [&](const DiagonalCharacter& w) { return max_diff(w.values, expect) <= 1e-8; });
          EXPECT_EQ(hit, 1) << "seed " << seed << " object " << a << " point " << x;
        }
        for (std::size_t p = 0; p < chars.size(); ++p) {
          for (std::size_t q = 0; q < chars.size(); ++q)
            EXPECT_NEAR(std::abs(evaluate(chars[p], chars[q].idempotent) - (p == q ? 1.0 : 0.0)), 0.0, 1e-8);
          const CVector sq = g.category.compose(a, a, a, chars[p].idempotent, chars[p].idempotent);
          EXPECT_LE(max_diff(sq, chars[p].idempotent), 1e-8);
        }
      }
    }
  }
}

TEST(DiagonalSpectrum, NotSemisimpleIsReported) {
  auto c = FiniteCStarCategory::with_objects({"A"});
  c.dims = {2};
  // C[x]/(x^2): nilpotent, no faithful trace form
  c.composition(0, 0, 0) = CMatrix{{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}};
  c.involution(0, 0) = CMatrix::identity(2);
  c.units[0] = {1.0, 0.0};
  try {
    diagonal_spectrum(c, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DiagonalNotSemisimple);
  }
}

TEST(Corner, FootnoteCornersAreLines) {
  const auto c = io::category_from_json(fixture("footnote_full.json"));
  const auto spectra = all_diagonal_spectra(c);
  const auto t = corner_table(c, spectra);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) EXPECT_EQ(t.at(a, b, 0, 0), 1);
}

TEST(Corner, DimensionsMatchOraclePoints) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generated(seed, Scramble::invertible);
    const auto spectra = all_diagonal_spectra(g.category);
    const auto t = corner_table(g.category, spectra);
    const std::size_t n = g.category.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        int sum = 0;
        for (int d : t.dims[a * n + b]) {
          EXPECT_TRUE(d == 0 || d == 1);
          sum += d;
        }
        EXPECT_EQ(static_cast<std::size_t>(sum), oracle::points_over(g.oracle, a, b));
        EXPECT_EQ(static_cast<std::size_t>(sum), g.category.dim(a, b));
      }
  }
}

TEST(Corner, MoreThanOneDimensionRaises) {
  auto c = FiniteCStarCategory::with_objects({"A", "B"});
  c.dims = {1, 2, 2, 1};
  c.composition(0, 0, 0) = CMatrix{{1.0}};
  c.composition(1, 1, 1) = CMatrix{{1.0}};
  c.composition(0, 0, 1) = CMatrix::identity(2);
  c.composition(0, 1, 1) = CMatrix::identity(2);
  c.involution(0, 0) = CMatrix{{1.0}};
  c.involution(1, 1) = CMatrix{{1.0}};
  c.units = {{1.0}, {1.0}};
  const auto pa = characters_of_diagonal(c, 0);
  const auto pb = characters_of_diagonal(c, 1);
  try {
    corner(c, 0, 1, pa[0], pb[0]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CornerDimensionExceedsOne);
  }
}

TEST(CStarNorm, MatchesSupNormOnSections) {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenParams p;
    p.seed = seed;
    p.n_objects = 3;
    p.max_base = 4;
    const auto e = gen_spaceoid(p);
    const auto c = sections_category(e);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        CVector x(c.dim(a, b));
        for (auto& z : x) z = rng.gaussian_complex();
        EXPECT_NEAR(cstar_norm(c, a, b, x), oracle::sections_norm(x), 1e-10);
      }
  }
}

TEST(OrbitClasses, FootnoteHasOneClass) {
  const auto classes = enumerate_orbit_classes(io::category_from_json(fixture("footnote_full.json")));
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_TRUE(classes[0].zero_homs.empty());
}

TEST(OrbitClasses, E1HasThreeClasses) {
  const auto classes = enumerate_orbit_classes(sections_category(e1()));
  ASSERT_EQ(classes.size(), 3u);
  // (1, 1') linked, then 2 with 2' or 3' and the off-diagonal Hom-sets zeroed
  EXPECT_EQ(classes[0].characters, (std::vector<std::size_t>{0, 0}));
  EXPECT_TRUE(classes[0].zero_homs.empty());
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_EQ(classes[k].characters[0], 1u);
    EXPECT_EQ(classes[k].zero_homs.size(), 2u);
  }
}

TEST(OrbitClasses, CountMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    GenParams p;
    p.seed = seed;
    p.n_objects = 1 + seed % 4;
    p.max_base = 3;
    p.edge_density = 0.5;
    const auto e = gen_spaceoid(p);
    EXPECT_EQ(enumerate_orbit_classes(sections_category(e)).size(), oracle::orbit_class_count(e)) << "seed " << seed;
  }
}

TEST(StarFunctor, FootnoteEmbeddingIsFunctorButDegenerate) {
  const auto f = io::functor_from_json(fixture("footnote_embedding.json"));
  const auto r = check_star_functor(f);
  EXPECT_TRUE(r.ok()) << r.summary();
  const auto nd = check_non_degenerate(f);
  EXPECT_FALSE(nd.ok);
  EXPECT_NE(nd.a, nd.b);
}

TEST(StarFunctor, IdentityIsNonDegenerate) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = std::make_shared<const FiniteCStarCategory>(generated(seed, Scramble::unitary).category);
    const auto id = identity_functor(c);
    EXPECT_TRUE(check_star_functor(id).ok());
    EXPECT_TRUE(check_non_degenerate(id).ok);
  }
}

TEST(StarFunctor, BrokenUnitAndComposition) {
  auto c = std::make_shared<const FiniteCStarCategory>(sections_category(e1()));
  auto f = identity_functor(c);
  f.hom_maps[0] = f.hom_maps[0] * cplx{2.0};
  const auto r = check_star_functor(f);
  EXPECT_TRUE(r.failed("unital"));
  EXPECT_TRUE(r.failed("multiplicative"));

  auto other = std::make_shared<const FiniteCStarCategory>(io::category_from_json(fixture("footnote_full.json")));
  try {
    compose_functors(identity_functor(c), identity_functor(other));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EndpointMismatch);
  }
}

TEST(Bimodule, NonFullFixtureAndLinkingCategory) {
  const auto m = io::bimodule_from_json(fixture("nonfull_bimodule.json"));
  const auto r = validate_bimodule(m);
  EXPECT_TRUE(r.ok()) << r.summary();
  const auto l = linking_category(m);
  EXPECT_EQ(l.dims, (std::vector<std::size_t>{2, 2, 2, 3}));
  EXPECT_TRUE(validate_category(l).ok());
}

TEST(Bimodule, ScalarModuleLinksToFootnoteCategory) {
  HilbertBimodule m;
  m.alg_a = one_dim();
  m.alg_b = one_dim();
  m.module_dim = 1;
  m.left_action = m.right_action = m.ip_a = m.ip_b = CMatrix{{1.0}};
  auto l = linking_category(m);
  const auto full = io::category_from_json(fixture("footnote_full.json"));
  EXPECT_EQ(l.dims, full.dims);
  for (std::size_t k = 0; k < l.comp.size(); ++k) EXPECT_EQ(l.comp[k], full.comp[k]);
  EXPECT_EQ(l.invol, full.invol);
}

TEST(Bimodule, IncompatibleInnerProductsAreRejected) {
  auto m = io::bimodule_from_json(fixture("nonfull_bimodule.json"));
  m.ip_a = m.ip_a * cplx{2.0};
  EXPECT_TRUE(validate_bimodule(m).failed("compatibility"));
  try {
    linking_category(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BimoduleAxiomViolation);
  }
}
