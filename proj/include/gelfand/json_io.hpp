#pragma once

// JSON reading and writing for categories, spaceoids, bimodules, functors and
// spaceoid morphisms. Complex numbers are [re, im] pairs. Hom-set keys are
// "A|B" and composition keys "A|B|C"; missing tensors and phases mean zero
// tensors and unit phases respectively.

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gelfand/duality.hpp"

namespace gelfand::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Schema, path + ": " + what);
}

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(path + "/" + key, "missing");
  return *it;
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

inline std::size_t as_index(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    schema_error(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline cplx as_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_error(path, "expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(std::span<const cplx> v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(to_json(z));
  return a;
}

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(to_json(m.row(i)));
  return rows;
}

inline CVector vector_from(const json& j, std::size_t len, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  if (j.size() != len) schema_error(path, "expected " + std::to_string(len) + " entries, got " + std::to_string(j.size()));
  CVector v(len);
  for (std::size_t i = 0; i < len; ++i) v[i] = as_complex(j[i], path + "/" + std::to_string(i));
  return v;
}

inline CMatrix matrix_from(const json& j, std::size_t rows, std::size_t cols, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of rows");
  if (j.size() != rows) schema_error(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const CVector r = vector_from(j[i], cols, path + "/" + std::to_string(i));
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = r[k];
  }
  return m;
}

inline std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline bool is_zero(const CMatrix& m) { return m.max_abs() == 0.0; }

inline std::size_t lookup(const std::vector<std::string>& names, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  schema_error(path, "unknown name '" + name + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// categories

inline json to_json(const FiniteCStarCategory& c) {
  const std::size_t n = c.size();
  json j;
  j["kind"] = "category";
  j["objects"] = c.objects;
  j["dims"] = json::object();
  j["comp"] = json::object();
  j["invol"] = json::object();
  j["units"] = json::object();
  for (std::size_t a = 0; a < n; ++a) {
    j["units"][c.objects[a]] = detail::to_json(c.units[a]);
    for (std::size_t b = 0; b < n; ++b) {
      const std::string ab = c.objects[a] + "|" + c.objects[b];
      j["dims"][ab] = c.dim(a, b);
      if (!detail::is_zero(c.involution(a, b))) j["invol"][ab] = detail::to_json(c.involution(a, b));
      for (std::size_t k = 0; k < n; ++k)
        if (!detail::is_zero(c.composition(a, b, k))) {
          j["comp"][ab + "|" + c.objects[k]] = detail::to_json(c.composition(a, b, k));
        }
    }
  }
  return j;
}

inline FiniteCStarCategory category_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  auto c = FiniteCStarCategory::with_objects(string_list(member(j, "objects", path), path + "/objects"));
  const std::size_t n = c.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (c.objects[a] == c.objects[b]) schema_error(path + "/objects", "duplicate object '" + c.objects[a] + "'");

  const json& dims = member(j, "dims", path);
  if (!dims.is_object()) schema_error(path + "/dims", "expected an object");
  for (const auto& [key, val] : dims.items()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos) schema_error(path + "/dims/" + key, "key must be 'A|B'");
    const std::size_t a = lookup(c.objects, key.substr(0, bar), path + "/dims/" + key);
    const std::size_t b = lookup(c.objects, key.substr(bar + 1), path + "/dims/" + key);
    c.dims[a * n + b] = as_index(val, path + "/dims/" + key);
  }

  const json empty = json::object();
  const json& comp = j.contains("comp") ? j["comp"] : empty;
  const json& invol = j.contains("invol") ? j["invol"] : empty;
  const json& units = member(j, "units", path);
  for (std::size_t a = 0; a < n; ++a) {
    const std::string upath = path + "/units/" + c.objects[a];
    c.units[a] = vector_from(member(units, c.objects[a], path + "/units"), c.dim(a, a), upath);
    for (std::size_t b = 0; b < n; ++b) {
      const std::string ab = c.objects[a] + "|" + c.objects[b];
      c.involution(a, b) = invol.contains(ab) ? matrix_from(invol[ab], c.dim(b, a), c.dim(a, b), path + "/invol/" + ab)
                                              : CMatrix(c.dim(b, a), c.dim(a, b));
      for (std::size_t k = 0; k < n; ++k) {
        const std::string abk = ab + "|" + c.objects[k];
        const std::size_t rows = c.dim(a, b) * c.dim(b, k), cols = c.dim(a, k);
        c.composition(a, b, k) = comp.contains(abk) ? matrix_from(comp[abk], rows, cols, path + "/comp/" + abk)
                                                    : CMatrix(rows, cols);
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// spaceoids

inline json to_json(const FiniteSpaceoid& e) {
  const std::size_t n = e.size();
  json j;
  j["kind"] = "spaceoid";
  j["objects"] = e.objects;
  j["base_sets"] = json::object();
  j["points"] = json::object();
  for (std::size_t a = 0; a < n; ++a) {
    j["base_sets"][e.objects[a]] = e.base_sets[a];
    for (std::size_t b = 0; b < n; ++b) {
      if (e.fiber(a, b).empty()) continue;
      json pts = json::array();
      for (const auto& pt : e.fiber(a, b)) {
        pts.push_back({{"id", pt.id},
                       {"t", e.base_sets[a][pt.target]},
                       {"s", e.base_sets[b][pt.source]},
                       {"nu", detail::to_json(pt.nu)}});
      }
      j["points"][e.objects[a] + "|" + e.objects[b]] = pts;
    }
  }
  json ph = json::array();
  for (const auto& [key, c] : e.phases)
    ph.push_back({{"p", e.point(key.first).id}, {"q", e.point(key.second).id}, {"c", detail::to_json(c)}});
  j["phases"] = ph;
  return j;
}

inline FiniteSpaceoid spaceoid_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  auto e = FiniteSpaceoid::with_objects(string_list(member(j, "objects", path), path + "/objects"));
  const std::size_t n = e.size();
  const json& bases = member(j, "base_sets", path);
  for (std::size_t a = 0; a < n; ++a) {
    e.base_sets[a] = string_list(member(bases, e.objects[a], path + "/base_sets"), path + "/base_sets/" + e.objects[a]);
  }
  std::map<std::string, PointRef> by_id;
  const json& points = member(j, "points", path);
  if (!points.is_object()) schema_error(path + "/points", "expected an object");
  for (const auto& [key, val] : points.items()) {
    const std::string kpath = path + "/points/" + key;
    const auto bar = key.find('|');
    if (bar == std::string::npos) schema_error(kpath, "key must be 'A|B'");
    const std::size_t a = lookup(e.objects, key.substr(0, bar), kpath);
    const std::size_t b = lookup(e.objects, key.substr(bar + 1), kpath);
    if (!val.is_array()) schema_error(kpath, "expected an array of points");
    for (std::size_t i = 0; i < val.size(); ++i) {
      const std::string ppath = kpath + "/" + std::to_string(i);
      SpaceoidPoint pt;
      pt.id = as_string(member(val[i], "id", ppath), ppath + "/id");
      pt.target = lookup(e.base_sets[a], as_string(member(val[i], "t", ppath), ppath + "/t"), ppath + "/t");
      pt.source = lookup(e.base_sets[b], as_string(member(val[i], "s", ppath), ppath + "/s"), ppath + "/s");
      pt.nu = val[i].contains("nu") ? as_complex(val[i]["nu"], ppath + "/nu") : cplx{1.0, 0.0};
      if (by_id.count(pt.id)) schema_error(ppath + "/id", "duplicate point id '" + pt.id + "'");
      by_id[pt.id] = PointRef{a, b, e.fiber(a, b).size()};
      e.fiber(a, b).push_back(std::move(pt));
    }
  }
  if (j.contains("phases")) {
    const json& ph = j["phases"];
    if (!ph.is_array()) schema_error(path + "/phases", "expected an array");
    for (std::size_t i = 0; i < ph.size(); ++i) {
      const std::string ppath = path + "/phases/" + std::to_string(i);
      const std::string p = as_string(member(ph[i], "p", ppath), ppath + "/p");
      const std::string q = as_string(member(ph[i], "q", ppath), ppath + "/q");
      if (!by_id.count(p)) schema_error(ppath + "/p", "unknown point '" + p + "'");
      if (!by_id.count(q)) schema_error(ppath + "/q", "unknown point '" + q + "'");
      e.set_phase(by_id[p], by_id[q], as_complex(member(ph[i], "c", ppath), ppath + "/c"));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// bimodules

inline json to_json(const HilbertBimodule& m) {
  json j;
  j["kind"] = "bimodule";
  j["alg_a"] = to_json(m.alg_a);
  j["alg_b"] = to_json(m.alg_b);
  j["module_dim"] = m.module_dim;
  j["left_action"] = detail::to_json(m.left_action);
  j["right_action"] = detail::to_json(m.right_action);
  j["ip_a"] = detail::to_json(m.ip_a);
  j["ip_b"] = detail::to_json(m.ip_b);
  if (!m.labels_a.empty()) j["labels_a"] = m.labels_a;
  if (!m.labels_b.empty()) j["labels_b"] = m.labels_b;
  return j;
}

inline HilbertBimodule bimodule_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  HilbertBimodule m;
  m.alg_a = category_from_json(member(j, "alg_a", path), path + "/alg_a");
  m.alg_b = category_from_json(member(j, "alg_b", path), path + "/alg_b");
  if (m.alg_a.size() != 1) schema_error(path + "/alg_a/objects", "expected exactly one object");
  if (m.alg_b.size() != 1) schema_error(path + "/alg_b/objects", "expected exactly one object");
  m.module_dim = as_index(member(j, "module_dim", path), path + "/module_dim");
  const std::size_t dm = m.module_dim, da = m.alg_a.dim(0, 0), db = m.alg_b.dim(0, 0);
  m.left_action = matrix_from(member(j, "left_action", path), da * dm, dm, path + "/left_action");
  m.right_action = matrix_from(member(j, "right_action", path), dm * db, dm, path + "/right_action");
  m.ip_a = matrix_from(member(j, "ip_a", path), dm * dm, da, path + "/ip_a");
  m.ip_b = matrix_from(member(j, "ip_b", path), dm * dm, db, path + "/ip_b");
  if (j.contains("labels_a")) m.labels_a = string_list(j["labels_a"], path + "/labels_a");
  if (j.contains("labels_b")) m.labels_b = string_list(j["labels_b"], path + "/labels_b");
  return m;
}

// ---------------------------------------------------------------------------
// functors and morphisms

inline json to_json(const StarFunctor& f) {
  const auto& c = *f.source;
  const auto& d = *f.target;
  const std::size_t n = c.size();
  json j;
  j["kind"] = "functor";
  j["source"] = to_json(c);
  j["target"] = to_json(d);
  j["obj_map"] = json::object();
  j["hom_maps"] = json::object();
  for (std::size_t a = 0; a < n; ++a) {
    j["obj_map"][c.objects[a]] = d.objects[f.obj_map[a]];
    for (std::size_t b = 0; b < n; ++b) j["hom_maps"][c.objects[a] + "|" + c.objects[b]] = detail::to_json(f.hom(a, b));
  }
  return j;
}

inline StarFunctor functor_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  StarFunctor f;
  f.source = std::make_shared<const FiniteCStarCategory>(category_from_json(member(j, "source", path), path + "/source"));
  f.target = std::make_shared<const FiniteCStarCategory>(category_from_json(member(j, "target", path), path + "/target"));
  const auto& c = *f.source;
  const auto& d = *f.target;
  const std::size_t n = c.size();
  if (d.size() != n) schema_error(path + "/target/objects", "object counts differ");
  const json& om = member(j, "obj_map", path);
  for (std::size_t a = 0; a < n; ++a) {
    const std::string opath = path + "/obj_map/" + c.objects[a];
    f.obj_map.push_back(lookup(d.objects, as_string(member(om, c.objects[a], path + "/obj_map"), opath), opath));
  }
  const json& hm = member(j, "hom_maps", path);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const std::string ab = c.objects[a] + "|" + c.objects[b];
      const std::size_t rows = d.dim(f.obj_map[a], f.obj_map[b]), cols = c.dim(a, b);
      f.hom_maps.push_back(hm.contains(ab) ? matrix_from(hm[ab], rows, cols, path + "/hom_maps/" + ab)
                                           : CMatrix(rows, cols));
    }
  return f;
}

inline json to_json(const SpaceoidMorphism& m) {
  const auto& e1 = *m.source;
  const auto& e2 = *m.target;
  const std::size_t n = e1.size();
  json j;
  j["kind"] = "morphism";
  j["source"] = to_json(e1);
  j["target"] = to_json(e2);
  j["obj_map"] = json::object();
  j["base_map"] = json::object();
  j["scalars"] = json::object();
  for (std::size_t a = 0; a < n; ++a) {
    j["obj_map"][e1.objects[a]] = e2.objects[m.obj_map[a]];
    json bm = json::object();
    for (std::size_t x = 0; x < e1.base_sets[a].size(); ++x)
      bm[e1.base_sets[a][x]] = e2.base_sets[m.obj_map[a]][m.base_map[a][x]];
    j["base_map"][e1.objects[a]] = bm;
  }
  e1.for_each_point([&](const PointRef& p) { j["scalars"][e1.point(p).id] = detail::to_json(m.scalar(p)); });
  return j;
}

inline SpaceoidMorphism morphism_from_json(const json& j, const std::string& path = "") {
  using namespace detail;
  auto e1 = std::make_shared<const FiniteSpaceoid>(spaceoid_from_json(member(j, "source", path), path + "/source"));
  auto e2 = std::make_shared<const FiniteSpaceoid>(spaceoid_from_json(member(j, "target", path), path + "/target"));
  const std::size_t n = e1->size();
  if (e2->size() != n) schema_error(path + "/target/objects", "object counts differ");
  std::vector<std::size_t> obj;
  std::vector<std::vector<std::size_t>> base(n);
  const json& om = member(j, "obj_map", path);
  const json& bm = member(j, "base_map", path);
  for (std::size_t a = 0; a < n; ++a) {
    const std::string opath = path + "/obj_map/" + e1->objects[a];
    obj.push_back(lookup(e2->objects, as_string(member(om, e1->objects[a], path + "/obj_map"), opath), opath));
    const json& ba = member(bm, e1->objects[a], path + "/base_map");
    for (const auto& x : e1->base_sets[a]) {
      const std::string xpath = path + "/base_map/" + e1->objects[a] + "/" + x;
      base[a].push_back(lookup(e2->base_sets[obj[a]], as_string(member(ba, x, path + "/base_map/" + e1->objects[a]), xpath), xpath));
    }
  }
  SpaceoidMorphism m;
  try {
    m = make_morphism(e1, e2, obj, base);
  } catch (const Error& err) {
    schema_error(path + "/base_map", err.what());
  }
  const json empty = json::object();
  const json& sc = j.contains("scalars") ? j["scalars"] : empty;
  e1->for_each_point([&](const PointRef& p) {
    const auto& id = e1->point(p).id;
    if (sc.contains(id)) m.scalars[p.a * n + p.b][p.index] = as_complex(sc[id], path + "/scalars/" + id);
  });
  return m;
}

// ---------------------------------------------------------------------------
// reports

inline json to_json(const ValidationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"check", x.check}, {"detail", x.detail}, {"witness", x.witness}});
  return {{"ok", r.ok()}, {"checks", r.checks}, {"violations", v}};
}

inline json to_json(const NaturalityReport& r, double eps) {
  return {{"ok", r.ok(eps)}, {"deviation", r.deviation}, {"tolerance", eps}, {"detail", r.detail}};
}

// ---------------------------------------------------------------------------
// files

/// Parses text; malformed input raises Schema with the byte offset.
inline json parse(const std::string& text, const std::string& source = "input") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ": malformed JSON at byte " << e.byte << ": " << e.what();
    throw Error(ErrorCode::Schema, os.str());
  }
}

inline json read_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Schema, "cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), file);
}

/// "category", "spaceoid", "bimodule", "functor" or "morphism"; inferred
/// from the fields when "kind" is absent.
inline std::string kind_of(const json& j) {
  if (!j.is_object()) detail::schema_error("", "expected an object");
  if (j.contains("kind")) return detail::as_string(j["kind"], "/kind");
  if (j.contains("module_dim")) return "bimodule";
  if (j.contains("hom_maps")) return "functor";
  if (j.contains("base_map")) return "morphism";
  if (j.contains("base_sets")) return "spaceoid";
  if (j.contains("comp") || j.contains("dims")) return "category";
  detail::schema_error("", "cannot tell what kind of instance this is");
}

}  // namespace gelfand::io
