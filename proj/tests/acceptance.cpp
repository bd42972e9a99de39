// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "gelfand/gelfand.hpp"

using namespace gelfand;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

io::json fixture(const std::string& name) { return io::read_file(std::string(GELFAND_FIXTURES) + "/" + name); }

std::shared_ptr<const FiniteCStarCategory> shared(FiniteCStarCategory c) {
  return std::make_shared<const FiniteCStarCategory>(std::move(c));
}

GenParams params(std::uint64_t seed, Scramble scramble) {
  GenParams p;
  p.seed = seed;
  p.n_objects = 1 + seed % 5;
  p.max_base = 1 + (seed / 5) % 6;
  p.edge_density = 0.2 + 0.1 * static_cast<double>(seed % 8);
  p.scramble = scramble;
  return p;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Running state shared by the rank bound check, which covers the instances
// of criteria 1 and 3.
struct RankTally {
  std::size_t corners = 0;
  std::size_t bad_corners = 0;
  std::size_t bad_sums = 0;
  std::size_t identity_degenerate = 0;

  void add(const FiniteCStarCategory& c, const SpectralSpaceoid& s) {
    const std::size_t n = c.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        std::size_t sum = 0;
        for (int d : s.corners.dims[a * n + b]) {
          ++corners;
          if (d != 0 && d != 1) ++bad_corners;
          sum += static_cast<std::size_t>(std::max(d, 0));
        }
        if (sum != c.dim(a, b)) ++bad_sums;
      }
  }
};

Outcome criterion1(RankTally& tally) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t failed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = gen_category(params(seed, Scramble::unitary));
    const auto c = shared(g.category);
    const GelfandData gd = GelfandData::build(c);
    tally.add(*c, *gd.spectral);
    if (!check_non_degenerate(identity_functor(c)).ok) ++tally.identity_degenerate;
    const auto check = check_gelfand_isomorphism(gd, 4, seed);
    worst = std::max(worst, check.max_deviation);
    if (!check.ok() || check.max_deviation > 1e-6) ++failed;
  }
  const double t = seconds_since(t0);
  return {failed == 0 && t <= 60.0,
          std::to_string(failed) + "/200 failing, " + fmt("max deviation %.2e, %.2f s", worst, t)};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  std::size_t failed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto e = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(params(seed, Scramble::none)));
    const GelfandData gd = GelfandData::build(shared(sections_category(*e)));
    const auto ev = check_evaluation_transform(e, gd);
    if (!ev.ok() || !spaceoids_isomorphic(e, gd.spaceoid)) ++failed;
  }
  const double t = seconds_since(t0);
  return {failed == 0 && t <= 30.0, std::to_string(failed) + "/200 failing, " + fmt("%.2f s", t)};
}

Outcome criterion3(RankTally& tally) {
  std::size_t failed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = gen_category(params(seed, Scramble::invertible));
    const auto c = shared(g.category);
    const GelfandData gd = GelfandData::build(c);
    tally.add(*c, *gd.spectral);
    if (!check_non_degenerate(identity_functor(c)).ok) ++tally.identity_degenerate;
    if (!spaceoids_isomorphic(std::make_shared<const FiniteSpaceoid>(g.oracle), gd.spaceoid)) ++failed;
  }
  return {failed == 0, std::to_string(failed) + "/200 failing"};
}

Outcome criterion4(const RankTally& tally) {
  return {tally.corners > 0 && tally.bad_corners == 0 && tally.bad_sums == 0,
          std::to_string(tally.corners) + " corners, " + std::to_string(tally.bad_corners) + " of dimension > 1, " +
              std::to_string(tally.bad_sums) + " Hom-sets with wrong sum"};
}

Outcome criterion5(const RankTally& tally) {
  const auto f = io::functor_from_json(fixture("footnote_embedding.json"));
  const bool accepted = check_star_functor(f).ok();
  bool rejected = false;
  try {
    const GelfandData g1 = GelfandData::build(f.source), g2 = GelfandData::build(f.target);
    sigma_on_morphism(f, *g1.spectral, *g2.spectral, g1.spaceoid, g2.spaceoid);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::DegenerateFunctor;
  }
  return {accepted && rejected && tally.identity_degenerate == 0,
          std::string("footnote functor ") + (accepted ? "accepted" : "rejected") + " by check_star_functor, " +
              (rejected ? "DegenerateFunctor" : "no DegenerateFunctor") + " from Sigma; " +
              std::to_string(tally.identity_degenerate) + " degenerate identities"};
}

// A chain E1 -> E2 -> E3 of generated morphisms with the three sections
// categories in scrambled bases.
struct Chain {
  std::shared_ptr<const FiniteSpaceoid> e1, e2, e3;
  SpaceoidMorphism m12, m23;
  std::shared_ptr<const FiniteCStarCategory> c1, c2, c3;
  StarFunctor phi32, psi21;  // Gamma(m23) : C3 -> C2 and Gamma(m12) : C2 -> C1
};

Chain make_chain(std::uint64_t seed) {
  Chain ch;
  ch.e3 = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(params(seed, Scramble::none)));
  Rng rng(seed ^ 0xa5a5a5a5ULL);
  auto g23 = gen_morphism_into(ch.e3, rng);
  ch.e2 = g23.source;
  ch.m23 = g23.morphism;
  auto g12 = gen_morphism_into(ch.e2, rng);
  ch.e1 = g12.source;
  ch.m12 = g12.morphism;
  const auto s1 = scramble_sections(*ch.e1, Scramble::invertible, rng);
  const auto s2 = scramble_sections(*ch.e2, Scramble::unitary, rng);
  const auto s3 = scramble_sections(*ch.e3, Scramble::invertible, rng);
  ch.c1 = shared(s1.category);
  ch.c2 = shared(s2.category);
  ch.c3 = shared(s3.category);
  ch.phi32 = change_basis(gamma_on_morphism(ch.m23), s3.basis_change, s2.basis_change, ch.c3, ch.c2);
  ch.psi21 = change_basis(gamma_on_morphism(ch.m12), s2.basis_change, s1.basis_change, ch.c2, ch.c1);
  return ch;
}

Outcome criterion6() {
  double worst_sigma = 0.0, worst_gamma = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Chain ch = make_chain(seed);
    const GelfandData g1 = GelfandData::build(ch.c1), g2 = GelfandData::build(ch.c2), g3 = GelfandData::build(ch.c3);
    const auto sphi = sigma_on_morphism(ch.phi32, *g3.spectral, *g2.spectral, g3.spaceoid, g2.spaceoid);
    const auto spsi = sigma_on_morphism(ch.psi21, *g2.spectral, *g1.spectral, g2.spaceoid, g1.spaceoid);
    const auto scomp = sigma_on_morphism(compose_functors(ch.phi32, ch.psi21), *g3.spectral, *g1.spectral,
                                         g3.spaceoid, g1.spaceoid);
    worst_sigma = std::max(worst_sigma, morphism_distance(scomp, compose_morphisms(spsi, sphi)));

    const auto d1 = shared(sections_category(*ch.e1));
    const auto d2 = shared(sections_category(*ch.e2));
    const auto d3 = shared(sections_category(*ch.e3));
    const auto gcomp = gamma_on_morphism(compose_morphisms(ch.m12, ch.m23), d3, d1);
    const auto g12 = gamma_on_morphism(ch.m12, d2, d1);
    const auto g23 = gamma_on_morphism(ch.m23, d3, d2);
    worst_gamma = std::max(worst_gamma, functor_distance(gcomp, compose_functors(g23, g12)));
  }
  return {worst_sigma <= 1e-6 && worst_gamma <= 1e-6,
          fmt("50 functor pairs: max deviation %.2e; 50 morphism pairs: max deviation %.2e", worst_sigma, worst_gamma)};
}

Outcome criterion7() {
  double worst_g = 0.0, worst_e = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Chain ch = make_chain(seed + 1000);
    worst_g = std::max(worst_g, check_naturality_G(ch.phi32).deviation);
    worst_e = std::max(worst_e, check_naturality_E(ch.m23).deviation);
  }
  return {worst_g <= 1e-6 && worst_e <= 1e-6,
          fmt("G square max deviation %.2e, E square max deviation %.2e over 50 each", worst_g, worst_e)};
}

Outcome criterion8() {
  const auto m = io::bimodule_from_json(fixture("nonfull_bimodule.json"));
  const auto s = bimodule_spectrum(m);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& [p, q] : s.pairs) pairs.insert({s.labels_a[p], s.labels_b[q]});
  std::set<std::string> right;
  for (std::size_t q : s.right_support) right.insert(s.labels_b[q]);
  const bool pairs_ok = pairs == std::set<std::pair<std::string, std::string>>{{"1", "1'"}, {"2", "2'"}};
  const bool right_ok = right == std::set<std::string>{"1'", "2'"} && s.right_support.size() == 2;
  const auto check = verify_bimodule_spectrum(m, s);
  std::string listed;
  for (const auto& [a, b] : pairs) listed += " (" + a + "," + b + ")";
  return {pairs_ok && right_ok && check.full_rank && check.deviation <= 1e-9,
          "pairs" + listed + ", " + (check.full_rank ? "bijective" : "not bijective") +
              fmt(", inner product deviation %.2e", check.deviation)};
}

Outcome criterion9() {
  Rng rng(90210);
  std::size_t tested = 0, failed = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; tested < 1000; ++seed) {
    const auto g = gen_category(params(seed, seed % 2 ? Scramble::invertible : Scramble::unitary));
    const auto& c = g.category;
    const std::size_t n = c.size();
    for (std::size_t a = 0; a < n && tested < 1000; ++a)
      for (std::size_t b = 0; b < n && tested < 1000; ++b) {
        if (c.dim(a, b) == 0) continue;
        CVector x(c.dim(a, b));
        for (auto& z : x) z = rng.gaussian_complex();
        const double nx = cstar_norm(c, a, b, x);
        const double nxx = cstar_norm(c, b, b, c.compose(b, a, b, c.star(a, b, x), x));
        const double dev = std::abs(nxx - nx * nx) / (1.0 + nx * nx);
        worst = std::max(worst, dev);
        if (dev > 1e-6) ++failed;
        ++tested;
      }
  }
  return {failed == 0, std::to_string(tested) + " elements, " + std::to_string(failed) + " failing" +
                           fmt(", max relative deviation %.2e", worst)};
}

}  // namespace

int main() {
  RankTally tally;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 duality round-trip, category side", [&] { return criterion1(tally); }},
      {"2 duality round-trip, spaceoid side", criterion2},
      {"3 oracle recovery", [&] { return criterion3(tally); }},
      {"4 rank bound", [&] { return criterion4(tally); }},
      {"5 non-degeneracy gate", [&] { return criterion5(tally); }},
      {"6 functoriality", criterion6},
      {"7 naturality squares", criterion7},
      {"8 bimodule spectrum", criterion8},
      {"9 C*-identity", criterion9},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
