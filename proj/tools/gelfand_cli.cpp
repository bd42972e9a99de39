// gelfand: command line front end.
//
// Exit status: 0 pass, 1 I/O or schema error, 2 validation failure,
// 3 degenerate functor.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gelfand/gelfand.hpp"

namespace {

using namespace gelfand;
using io::json;

constexpr double kDualityEps = 1e-6;

struct Options {
  std::string input;
  std::string output;
  std::string oracle;
  double tol = 1e-9;
  std::uint64_t seed = 7;
  std::string format = "json";
  bool gen = false;
  std::string kind = "category";
  std::size_t n_objects = 3;
  std::size_t max_base = 3;
  double density = 0.5;
  std::string phase = "random";
  std::string scramble = "unitary";
};

Tolerance tolerance(const Options& o) { return Tolerance{o.tol, o.tol}; }

GenParams gen_params(const Options& o) {
  GenParams p;
  p.seed = o.seed;
  p.n_objects = o.n_objects;
  p.max_base = o.max_base;
  p.edge_density = o.density;
  p.phase_mode = o.phase == "trivial" ? PhaseMode::trivial : PhaseMode::random;
  p.scramble = o.scramble == "none" ? Scramble::none : o.scramble == "invertible" ? Scramble::invertible : Scramble::unitary;
  p.check();
  return p;
}

json load(const Options& o) {
  if (o.input.empty()) throw Error(ErrorCode::Schema, "--input is required");
  return io::read_file(o.input);
}

void emit(const Options& o, const json& j, const std::string& text) {
  std::ostringstream os;
  if (o.format == "text")
    os << text;
  else
    os << j.dump(2) << "\n";
  if (o.output.empty()) {
    std::cout << os.str();
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw Error(ErrorCode::Schema, "cannot write " + o.output);
  out << os.str();
}

std::string report_text(const ValidationReport& r) {
  std::ostringstream os;
  os << (r.ok() ? "ok" : "FAILED") << " (" << r.checks.size() << " checks)\n";
  for (const auto& v : r.violations) os << "  " << v.check << ": " << v.detail << "\n";
  return os.str();
}

json corner_json(const FiniteCStarCategory& c, const CornerTable& t) {
  json j = json::object();
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = 0; b < c.size(); ++b) j[c.objects[a] + "|" + c.objects[b]] = t.dims[a * c.size() + b];
  return j;
}

int cmd_validate(const Options& o) {
  const json j = load(o);
  const std::string kind = io::kind_of(j);
  const Tolerance tol = tolerance(o);
  ValidationReport r;
  json extra = json::object();
  int degenerate = 0;
  if (kind == "category") {
    r = validate_category(io::category_from_json(j), tol);
  } else if (kind == "spaceoid") {
    r = validate_spaceoid(io::spaceoid_from_json(j), tol);
  } else if (kind == "bimodule") {
    r = validate_bimodule(io::bimodule_from_json(j), tol);
  } else if (kind == "functor") {
    const StarFunctor f = io::functor_from_json(j);
    r = check_star_functor(f, tol);
    if (r.ok()) {
      const auto nd = check_non_degenerate(f, tol);
      extra["non_degenerate"] = nd.ok;
      if (!nd.ok) {
        extra["witness"] = {{"source", {f.source->objects[nd.a], f.source->objects[nd.b]}}, {"point", {nd.p, nd.q}}};
        degenerate = 3;
      }
    }
  } else if (kind == "morphism") {
    r = validate_morphism(io::morphism_from_json(j), tol);
  } else {
    throw Error(ErrorCode::Schema, "/kind: unknown kind '" + kind + "'");
  }
  json out = io::to_json(r);
  out["kind"] = kind;
  out.update(extra);
  std::string text = kind + ": " + report_text(r);
  if (degenerate) text += "degenerate: some point of the target pulls back to zero\n";
  emit(o, out, text);
  return r.ok() ? degenerate : 2;
}

int cmd_spectrum(const Options& o) {
  const json j = load(o);
  const std::string kind = io::kind_of(j);
  const Tolerance tol = tolerance(o);
  if (kind == "functor") {
    const StarFunctor f = io::functor_from_json(j);
    const GelfandData g1 = GelfandData::build(f.source, tol);
    const GelfandData g2 = GelfandData::build(f.target, tol);
    const SpaceoidMorphism m = sigma_on_morphism(f, *g1.spectral, *g2.spectral, g1.spaceoid, g2.spaceoid, tol);
    emit(o, io::to_json(m), "spectral morphism with " + std::to_string(m.source->point_count()) + " points\n");
    return 0;
  }
  if (kind != "category") throw Error(ErrorCode::Schema, "/kind: spectrum expects a category or functor");
  const auto c = std::make_shared<const FiniteCStarCategory>(io::category_from_json(j));
  const GelfandData g = GelfandData::build(c, tol);
  json out;
  out["spaceoid"] = io::to_json(*g.spaceoid);
  json transforms = json::object();
  for (std::size_t a = 0; a < c->size(); ++a)
    for (std::size_t b = 0; b < c->size(); ++b)
      transforms[c->objects[a] + "|" + c->objects[b]] = io::detail::to_json(g.spectral->transform(a, b));
  out["gelfand"] = transforms;
  out["corner_dims"] = corner_json(*c, g.spectral->corners);
  std::ostringstream text;
  for (std::size_t a = 0; a < c->size(); ++a)
    for (std::size_t b = 0; b < c->size(); ++b)
      text << c->objects[a] << "|" << c->objects[b] << ": " << g.spaceoid->fiber(a, b).size() << " points\n";
  emit(o, out, text.str());
  return 0;
}

int cmd_sections(const Options& o) {
  const json j = load(o);
  const std::string kind = io::kind_of(j);
  const Tolerance tol = tolerance(o);
  if (kind == "morphism") {
    const SpaceoidMorphism m = io::morphism_from_json(j);
    const auto r = validate_morphism(m, tol);
    if (!r.ok()) {
      emit(o, io::to_json(r), report_text(r));
      return 2;
    }
    emit(o, io::to_json(gamma_on_morphism(m, tol)), "functor of sections\n");
    return 0;
  }
  if (kind != "spaceoid") throw Error(ErrorCode::Schema, "/kind: sections expects a spaceoid or morphism");
  const FiniteCStarCategory c = sections_category(io::spaceoid_from_json(j), tol);
  std::ostringstream text;
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = 0; b < c.size(); ++b) text << c.objects[a] << "|" << c.objects[b] << ": dim " << c.dim(a, b) << "\n";
  emit(o, io::to_json(c), text.str());
  return 0;
}

int cmd_roundtrip(const Options& o) {
  const Tolerance tol = tolerance(o);
  std::shared_ptr<const FiniteCStarCategory> c;
  std::shared_ptr<const FiniteSpaceoid> oracle;
  if (o.gen) {
    GeneratedCategory g = gen_category(gen_params(o));
    c = std::make_shared<const FiniteCStarCategory>(std::move(g.category));
    oracle = std::make_shared<const FiniteSpaceoid>(std::move(g.oracle));
  } else {
    const json j = load(o);
    const std::string kind = io::kind_of(j);
    if (kind == "category") {
      c = std::make_shared<const FiniteCStarCategory>(io::category_from_json(j));
    } else if (kind == "spaceoid") {
      oracle = std::make_shared<const FiniteSpaceoid>(io::spaceoid_from_json(j));
      require_valid(*oracle, tol);
      c = std::make_shared<const FiniteCStarCategory>(sections_category(*oracle, tol));
    } else {
      throw Error(ErrorCode::Schema, "/kind: roundtrip expects a category or spaceoid");
    }
  }
  const GelfandData g = GelfandData::build(c, tol);
  const GelfandCheck a_side = check_gelfand_isomorphism(g, 4, o.seed, tol);
  const GelfandData gs = GelfandData::build(g.sections, tol);
  const EvaluationCheck t_side = check_evaluation_transform(g.spaceoid, gs, tol);
  bool ok = a_side.ok() && t_side.ok() && a_side.max_deviation <= kDualityEps && t_side.deviation <= kDualityEps;
  json out;
  out["gelfand"] = io::to_json(a_side.report);
  out["gelfand"]["deviation"] = a_side.max_deviation;
  out["evaluation"] = io::to_json(t_side.report);
  out["evaluation"]["deviation"] = t_side.deviation;
  std::ostringstream text;
  text << "gelfand transform: " << (a_side.ok() ? "ok" : "FAILED") << ", deviation " << a_side.max_deviation << "\n";
  text << "evaluation transform: " << (t_side.ok() ? "ok" : "FAILED") << ", deviation " << t_side.deviation << "\n";
  if (oracle) {
    const auto iso = spaceoids_isomorphic(g.spaceoid, oracle, tol);
    out["oracle_isomorphic"] = iso.has_value();
    text << "spectrum isomorphic to the generating spaceoid: " << (iso ? "yes" : "NO") << "\n";
    ok = ok && iso.has_value();
  }
  out["ok"] = ok;
  emit(o, out, text.str());
  return ok ? 0 : 2;
}

int cmd_naturality(const Options& o) {
  const json j = load(o);
  const std::string kind = io::kind_of(j);
  const Tolerance tol = tolerance(o);
  NaturalityReport r;
  if (kind == "functor") {
    const StarFunctor f = io::functor_from_json(j);
    const auto fr = check_star_functor(f, tol);
    if (!fr.ok()) {
      emit(o, io::to_json(fr), report_text(fr));
      return 2;
    }
    r = check_naturality_G(f, tol);
  } else if (kind == "morphism") {
    const SpaceoidMorphism m = io::morphism_from_json(j);
    const auto mr = validate_morphism(m, tol);
    if (!mr.ok()) {
      emit(o, io::to_json(mr), report_text(mr));
      return 2;
    }
    r = check_naturality_E(m, tol);
  } else {
    throw Error(ErrorCode::Schema, "/kind: naturality expects a functor or morphism");
  }
  std::ostringstream text;
  text << "naturality: " << (r.ok(kDualityEps) ? "ok" : "FAILED") << ", deviation " << r.deviation << "\n";
  emit(o, io::to_json(r, kDualityEps), text.str());
  return r.ok(kDualityEps) ? 0 : 2;
}

int cmd_link(const Options& o) {
  const json j = load(o);
  if (io::kind_of(j) != "bimodule") throw Error(ErrorCode::Schema, "/kind: link expects a bimodule");
  const Tolerance tol = tolerance(o);
  const HilbertBimodule m = io::bimodule_from_json(j);
  const BimoduleSpectrum s = bimodule_spectrum(m, tol);
  const BimoduleCheck check = verify_bimodule_spectrum(m, s, tol);
  const bool ok = check.full_rank && check.deviation <= 1e-9;
  json pairs = json::array();
  for (const auto& [p, q] : s.pairs) pairs.push_back({s.labels_a[p], s.labels_b[q]});
  json left = json::array(), right = json::array();
  for (std::size_t p : s.left_support) left.push_back(s.labels_a[p]);
  for (std::size_t q : s.right_support) right.push_back(s.labels_b[q]);
  json out = {{"partial_bijection", pairs},
              {"left_support", left},
              {"right_support", right},
              {"left_full", s.left_support.size() == s.labels_a.size()},
              {"right_full", s.right_support.size() == s.labels_b.size()},
              {"iso", io::detail::to_json(s.iso)},
              {"frames", io::to_json(s.spectral->spaceoid)},
              {"full_rank", check.full_rank},
              {"deviation", check.deviation},
              {"ok", ok}};
  std::ostringstream text;
  text << "partial bijection:";
  for (const auto& pr : pairs) text << " (" << pr[0].get<std::string>() << "," << pr[1].get<std::string>() << ")";
  text << "\nleft support:";
  for (const auto& x : left) text << " " << x.get<std::string>();
  text << "\nright support:";
  for (const auto& x : right) text << " " << x.get<std::string>();
  text << "\nisomorphism: " << (ok ? "verified" : "FAILED") << ", deviation " << check.deviation << "\n";
  emit(o, out, text.str());
  return ok ? 0 : 2;
}

int cmd_gen(const Options& o) {
  const GenParams p = gen_params(o);
  if (o.kind == "spaceoid") {
    emit(o, io::to_json(gen_spaceoid(p)), "spaceoid\n");
  } else if (o.kind == "category") {
    const GeneratedCategory g = gen_category(p);
    if (!o.oracle.empty()) {
      std::ofstream out(o.oracle);
      if (!out) throw Error(ErrorCode::Schema, "cannot write " + o.oracle);
      out << io::to_json(g.oracle).dump(2) << "\n";
    }
    emit(o, io::to_json(g.category), "category\n");
  } else if (o.kind == "morphism") {
    auto target = std::make_shared<const FiniteSpaceoid>(gen_spaceoid(p));
    Rng rng(p.seed ^ 0x3d1f5e7a9b2c4d60ULL);
    emit(o, io::to_json(gen_morphism_into(target, rng, p.phase_mode).morphism), "morphism\n");
  } else {
    throw Error(ErrorCode::Schema, "--kind must be spaceoid, category or morphism");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite Gelfand duality for commutative C*-categories and spaceoids"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", o.input, "instance file (JSON)");
    sub->add_option("--output,-o", o.output, "write the result here instead of stdout");
    sub->add_option("--tol", o.tol, "absolute and relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
  };
  auto generation = [&](CLI::App* sub) {
    sub->add_option("--objects", o.n_objects, "number of objects (1..8)");
    sub->add_option("--max-base", o.max_base, "largest base set (1..6)");
    sub->add_option("--density", o.density, "probability of joining another object");
    sub->add_option("--phase", o.phase, "frame phases")->check(CLI::IsMember({"trivial", "random"}));
    sub->add_option("--scramble", o.scramble, "basis change")->check(CLI::IsMember({"none", "unitary", "invertible"}));
  };

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"validate", "check the axioms of any instance", cmd_validate},
      {"spectrum", "spectral spaceoid of a category, or of a functor", cmd_spectrum},
      {"sections", "category of sections of a spaceoid, or functor of a morphism", cmd_sections},
      {"roundtrip", "check both natural isomorphisms on an instance", cmd_roundtrip},
      {"naturality", "check the naturality square of a functor or morphism", cmd_naturality},
      {"link", "spectrum of a Hilbert bimodule through its linking category", cmd_link},
      {"gen", "emit a seeded random instance", cmd_gen},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    common(sub);
    if (std::string(c.name) == "roundtrip") {
      sub->add_flag("--gen", o.gen, "generate the category from --seed instead of reading --input");
      generation(sub);
    }
    if (std::string(c.name) == "gen") {
      sub->add_option("--kind", o.kind, "what to generate")->check(CLI::IsMember({"spaceoid", "category", "morphism"}));
      sub->add_option("--oracle", o.oracle, "also write the generating spaceoid here");
      generation(sub);
    }
    sub->callback([&selected, run = c.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    return selected(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::Schema: return 1;
      case ErrorCode::DegenerateFunctor: return 3;
      default: return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
