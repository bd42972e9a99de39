// Seeded property loops over generated instances.

#include <gtest/gtest.h>

#include "gelfand/gelfand.hpp"
#include "oracles.hpp"

using namespace gelfand;

namespace {

GenParams params(std::uint64_t seed) {
  GenParams p;
  p.seed = seed;
  p.n_objects = 1 + seed % 5;
  p.max_base = 1 + (seed / 5) % 6;
  p.edge_density = static_cast<double>(seed % 11) / 10.0;
  p.phase_mode = seed % 3 ? PhaseMode::random : PhaseMode::trivial;
  return p;
}

CVector random_vector(std::size_t d, Rng& rng) {
  CVector x(d);
  for (auto& z : x) z = rng.gaussian_complex();
  return x;
}

}  // namespace

TEST(Properties, GeneratedSpaceoidsAreValid) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto r = validate_spaceoid(gen_spaceoid(params(seed)));
    ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << r.summary();
  }
}

TEST(Properties, SectionsCategoriesAreValid) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto p = params(seed);
    p.scramble = seed % 2 ? Scramble::invertible : Scramble::unitary;
    const auto g = gen_category(p);
    const auto r = validate_category(g.category);
    ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << r.summary();
  }
}

TEST(Properties, CornersAreLinesSummingToHomDimension) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto p = params(seed);
    p.scramble = Scramble::invertible;
    const auto g = gen_category(p);
    const auto spectra = all_diagonal_spectra(g.category);
    const auto t = corner_table(g.category, spectra);
    const std::size_t n = g.category.size();
    for (std::size_t a = 0; a < n; ++a) {
      ASSERT_EQ(spectra[a].characters.size(), g.oracle.base_sets[a].size());
      for (std::size_t b = 0; b < n; ++b) {
        std::size_t sum = 0;
        for (int d : t.dims[a * n + b]) {
          ASSERT_TRUE(d == 0 || d == 1) << "seed " << seed;
          sum += static_cast<std::size_t>(d);
        }
        EXPECT_EQ(sum, g.category.dim(a, b));
        EXPECT_EQ(sum, oracle::points_over(g.oracle, a, b));
      }
    }
  }
}

TEST(Properties, NormIsSupOfDeltaCoordinates) {
  Rng rng(2024);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto p = params(seed);
    p.scramble = seed % 2 ? Scramble::invertible : Scramble::unitary;
    const auto g = gen_category(p);
    const auto& c = g.category;
    const std::size_t n = c.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (c.dim(a, b) == 0) continue;
        const CVector x = random_vector(c.dim(a, b), rng);
        const double expect = oracle::sections_norm(g.basis_change[a * n + b] * x);
        EXPECT_NEAR(cstar_norm(c, a, b, x), expect, 1e-9 * (1.0 + expect)) << "seed " << seed;
      }
  }
}

TEST(Properties, CStarIdentity) {
  Rng rng(99);
  std::size_t tested = 0;
  for (std::uint64_t seed = 0; tested < 1000; ++seed) {
    const auto g = gen_category(params(seed));
    const auto& c = g.category;
    const std::size_t n = c.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (c.dim(a, b) == 0) continue;
        const CVector x = random_vector(c.dim(a, b), rng);
        const double nx = cstar_norm(c, a, b, x);
        const double nxx = cstar_norm(c, b, b, c.compose(b, a, b, c.star(a, b, x), x));
        EXPECT_LE(std::abs(nxx - nx * nx), 1e-6 * (1.0 + nx * nx));
        ++tested;
      }
  }
}

TEST(Properties, OrbitClassCountMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto e = gen_spaceoid(params(seed));
    EXPECT_EQ(enumerate_orbit_classes(sections_category(e)).size(), oracle::orbit_class_count(e)) << "seed " << seed;
  }
}

TEST(Properties, RegaugingKeepsTheIsomorphismClass) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto e = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(params(seed)));
    Rng rng(seed);
    const auto f = std::make_shared<const FiniteSpaceoid>(regauge(*e, detail::random_gauge(*e, rng)));
    ASSERT_TRUE(validate_spaceoid(*f).ok());
    EXPECT_TRUE(spaceoids_isomorphic(e, f).has_value()) << "seed " << seed;
    EXPECT_TRUE(gauge_fix(*f).spaceoid.phases.empty());
  }
}

TEST(Properties, SectionsRoundTripThroughSpectrum) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto e = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(params(seed)));
    const GelfandData gd = GelfandData::build(std::make_shared<const FiniteCStarCategory>(sections_category(*e)));
    EXPECT_TRUE(spaceoids_isomorphic(e, gd.spaceoid).has_value()) << "seed " << seed;
    const auto check = check_evaluation_transform(e, gd);
    EXPECT_TRUE(check.ok()) << "seed " << seed << ": " << check.report.summary();
  }
}
