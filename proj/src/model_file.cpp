#include "subfib/model_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>
#include <sstream>

#include "json.hpp"

namespace subfib {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) parse_error(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::string str(const json& j, const std::string& where) {
  if (!j.is_string()) parse_error(where + ": expected a string");
  return j.get<std::string>();
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const std::string& kind,
                                         const std::string& where) {
  auto it = m.find(name);
  if (it == m.end()) parse_error(where + ": unknown " + kind + " " + name);
  return it->second;
}

Obj obj_ref(const FinCategory& c, const std::string& name, const std::string& where) {
  auto x = c.find_object(name);
  if (!x) parse_error(where + ": unknown object " + name);
  return *x;
}

Mor mor_ref(const FinCategory& c, const std::string& name, const std::string& where) {
  auto m = c.find_morphism(name);
  if (!m) parse_error(where + ": unknown morphism " + name);
  return *m;
}

std::vector<std::vector<std::string>> rows(const json& j, std::size_t width, const std::string& where) {
  if (!j.is_array()) parse_error(where + ": expected a list");
  std::vector<std::vector<std::string>> out;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != width) parse_error(where + ": expected rows of " + std::to_string(width));
    std::vector<std::string> row;
    for (const auto& s : r) row.push_back(str(s, where));
    out.push_back(std::move(row));
  }
  return out;
}

json category_json(const FinCategory& c) {
  auto d = c.to_data();
  json j;
  j["objects"] = d.objects;
  j["morphisms"] = json::array();
  for (const auto& a : d.morphisms) j["morphisms"].push_back({a.name, a.dom, a.cod});
  j["identities"] = d.identities;
  j["compose"] = json::array();
  for (const auto& c2 : d.compose) j["compose"].push_back({c2.g, c2.f, c2.gf});
  return j;
}

CategoryPtr category_from(const json& j, const std::string& where) {
  CategoryData d;
  const auto& objs = field(j, "objects", where);
  if (!objs.is_array()) parse_error(where + ": objects must be a list");
  for (const auto& o : objs) d.objects.push_back(str(o, where));
  for (auto& r : rows(field(j, "morphisms", where), 3, where + ".morphisms")) d.morphisms.push_back({r[0], r[1], r[2]});
  const auto& ids = field(j, "identities", where);
  if (!ids.is_object()) parse_error(where + ": identities must be an object");
  for (const auto& [k, v] : ids.items()) d.identities[k] = str(v, where);
  for (auto& r : rows(field(j, "compose", where), 3, where + ".compose")) d.compose.push_back({r[0], r[1], r[2]});
  try {
    return FinCategory::from_data(d);
  } catch (const Error& e) {
    parse_error(where + ": " + e.what());
  }
}

bool is_scalar_row(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

// Objects indent, lists of scalars stay on one line, lists of rows get a line per row.
void write(std::ostream& os, const json& j, int indent) {
  std::string pad(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) os << ",\n";
      first = false;
      os << pad << json(k).dump() << ": ";
      write(os, v, indent + 2);
    }
    os << "\n" << std::string(indent, ' ') << "}";
  } else if (j.is_array() && !is_scalar_row(j)) {
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << pad;
      write(os, j[i], indent + 2);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << std::string(indent, ' ') << "]";
  } else {
    os << j.dump();
  }
}

template <class Map>
std::string fresh(const Map& m, const std::string& name) {
  if (!m.count(name)) return name;
  for (int i = 2;; ++i) {
    auto n = name + "#" + std::to_string(i);
    if (!m.count(n)) return n;
  }
}

}  // namespace

std::string ModelFile::add_category(const std::string& name, CategoryPtr c) {
  for (const auto& [n, p] : categories) {
    if (p == c) return n;
  }
  auto n = fresh(categories, name);
  categories[n] = std::move(c);
  return n;
}

std::string ModelFile::add_functor(const std::string& name, const FinFunctor& f) {
  for (const auto& [n, r] : functors) {
    if (r.functor.source == f.source && r.functor.target == f.target && r.functor == f) return n;
  }
  auto s = add_category(name + ".source", f.source);
  auto t = add_category(name + ".target", f.target);
  auto n = fresh(functors, name);
  functors[n] = {s, t, f};
  return n;
}

std::string ModelFile::add_transformation(const std::string& name, const NatTransformation& t) {
  auto s = add_functor(name + ".source", t.source);
  auto g = add_functor(name + ".target", t.target);
  for (const auto& [n, r] : transformations) {
    if (r.source == s && r.target == g && r.transformation.components == t.components) return n;
  }
  auto n = fresh(transformations, name);
  transformations[n] = {s, g, t};
  return n;
}

std::string ModelFile::add_fibration(const std::string& name, const Fibration& f) {
  auto fn = add_functor(name, f.functor());
  for (const auto& [n, r] : fibrations) {
    if (r.functor == fn && r.fibration.given_cleavage() == f.given_cleavage() &&
        r.fibration.marked_split() == f.marked_split()) {
      return n;
    }
  }
  auto n = fresh(fibrations, name);
  fibrations.emplace(n, FibrationRecord{fn, f});
  return n;
}

std::string ModelFile::add_gcwf(const std::string& name, const Gcwf& g) {
  for (const auto& [n, r] : gcwfs) {
    if (r.gcwf.base == g.base && r.gcwf.u.total_ptr() == g.u.total_ptr() &&
        r.gcwf.udot.total_ptr() == g.udot.total_ptr() && r.gcwf.sigma == g.sigma && r.gcwf.delta == g.delta) {
      return n;
    }
  }
  auto n = fresh(gcwfs, name);
  auto base = add_category(n + ".base", g.base);
  add_category(n + ".types", g.u.total_ptr());
  add_category(n + ".terms", g.udot.total_ptr());
  auto types = add_fibration(n + ".u", g.u);
  auto terms = add_fibration(n + ".udot", g.udot);
  auto sigma = add_functor(n + ".sigma", g.sigma);
  auto delta = add_functor(n + ".delta", g.delta);
  add_functor(n + ".id_terms", g.eta.source);
  add_functor(n + ".delta_sigma", g.eta.target);
  add_functor(n + ".sigma_delta", g.eps.source);
  add_functor(n + ".id_types", g.eps.target);
  auto eta = add_transformation(n + ".eta", g.eta);
  auto eps = add_transformation(n + ".eps", g.eps);
  gcwfs.emplace(n, GcwfRecord{base, types, terms, sigma, delta, eta, eps, g});
  return n;
}

std::string ModelFile::add_fun_structure(const std::string& name, const FunStructure& fs) {
  auto g = add_gcwf(name + ".gcwf", fs.owner);
  auto n = fresh(fun_structures, name);
  fun_structures[n] = {g, fs.fun_table, fs.lam_table};
  return n;
}

const Gcwf& ModelFile::gcwf(const std::string& name) const {
  auto it = gcwfs.find(name);
  if (it == gcwfs.end()) throw Error(ErrorCode::UnknownObject, "no gcwf named " + name);
  return it->second.gcwf;
}

const std::string& ModelFile::gcwf_name(const std::string& name) const {
  if (!name.empty()) {
    auto it = gcwfs.find(name);
    if (it == gcwfs.end()) throw Error(ErrorCode::UnknownObject, "no gcwf named " + name);
    return it->first;
  }
  if (gcwfs.size() != 1) {
    throw Error(ErrorCode::MalformedEntity, "model has " + std::to_string(gcwfs.size()) + " gcwfs; name one");
  }
  return gcwfs.begin()->first;
}

FunStructure ModelFile::fun_structure(const std::string& name) const {
  auto it = fun_structures.find(name);
  if (it == fun_structures.end()) throw Error(ErrorCode::UnknownObject, "no fun-structure named " + name);
  return make_fun_structure(gcwf(it->second.gcwf), it->second.fun, it->second.lam);
}

ModelFile parse_model(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) parse_error("top level must be an object");
  if (!root.contains("version") || root["version"] != 1) parse_error("unsupported or missing version");
  for (const auto& [k, v] : root.items()) {
    static const std::set<std::string> known{"version",     "categories", "functors",      "transformations",
                                             "fibrations",  "gcwfs",      "fun_structures"};
    if (!known.count(k)) parse_error("unknown section " + k);
    if (k != "version" && !v.is_object()) parse_error("section " + k + " must be an object");
  }
  auto section = [&](const char* key) { return root.contains(key) ? root[key] : json::object(); };

  ModelFile m;
  const json sec_categories = section("categories");
  for (const auto& [name, j] : sec_categories.items()) {
    m.categories[name] = category_from(j, "category " + name);
  }
  const json sec_functors = section("functors");
  for (const auto& [name, j] : sec_functors.items()) {
    auto where = "functor " + name;
    FunctorRecord r;
    r.source = str(field(j, "source", where), where);
    r.target = str(field(j, "target", where), where);
    const auto& src = lookup(m.categories, r.source, "category", where);
    const auto& tgt = lookup(m.categories, r.target, "category", where);
    r.functor = FinFunctor{src, tgt, std::vector<Obj>(src->object_count()), std::vector<Mor>(src->morphism_count())};
    const auto& objs = field(j, "objects", where);
    const auto& mors = field(j, "morphisms", where);
    if (!objs.is_object() || !mors.is_object()) parse_error(where + ": maps must be objects");
    for (const auto& [k, v] : objs.items()) r.functor.objects[obj_ref(*src, k, where).index] = obj_ref(*tgt, str(v, where), where);
    for (const auto& [k, v] : mors.items()) {
      r.functor.morphisms[mor_ref(*src, k, where).index] = mor_ref(*tgt, str(v, where), where);
    }
    for (Obj x : src->objects()) {
      if (!r.functor(x).valid()) parse_error(where + ": object " + src->name(x) + " is unmapped");
    }
    for (Mor f : src->morphisms()) {
      if (!r.functor(f).valid()) parse_error(where + ": morphism " + src->name(f) + " is unmapped");
    }
    m.functors[name] = std::move(r);
  }
  const json sec_transformations = section("transformations");
  for (const auto& [name, j] : sec_transformations.items()) {
    auto where = "transformation " + name;
    TransformationRecord r;
    r.source = str(field(j, "source", where), where);
    r.target = str(field(j, "target", where), where);
    const auto& s = lookup(m.functors, r.source, "functor", where).functor;
    const auto& t = lookup(m.functors, r.target, "functor", where).functor;
    if (s.source != t.source || s.target != t.target) parse_error(where + ": functors are not parallel");
    r.transformation = NatTransformation{s, t, std::vector<Mor>(s.source->object_count())};
    const auto& comps = field(j, "components", where);
    if (!comps.is_object()) parse_error(where + ": components must be an object");
    for (const auto& [k, v] : comps.items()) {
      r.transformation.components[obj_ref(*s.source, k, where).index] = mor_ref(*s.target, str(v, where), where);
    }
    for (Obj x : s.source->objects()) {
      if (!r.transformation[x].valid()) parse_error(where + ": no component at " + s.source->name(x));
    }
    m.transformations[name] = std::move(r);
  }
  const json sec_fibrations = section("fibrations");
  for (const auto& [name, j] : sec_fibrations.items()) {
    auto where = "fibration " + name;
    auto fn = str(field(j, "functor", where), where);
    const auto& f = lookup(m.functors, fn, "functor", where).functor;
    std::vector<CleavageEntry> cleavage;
    for (auto& r : rows(field(j, "cleavage", where), 3, where + ".cleavage")) {
      cleavage.push_back({obj_ref(*f.source, r[0], where), mor_ref(*f.target, r[1], where), mor_ref(*f.source, r[2], where)});
    }
    const auto& split = field(j, "split", where);
    if (!split.is_boolean()) parse_error(where + ": split must be a boolean");
    try {
      m.fibrations.emplace(name, FibrationRecord{fn, Fibration(f, std::move(cleavage), split.get<bool>())});
    } catch (const Error& e) {
      parse_error(where + ": " + e.what());
    }
  }
  const json sec_gcwfs = section("gcwfs");
  for (const auto& [name, j] : sec_gcwfs.items()) {
    auto where = "gcwf " + name;
    auto get = [&](const char* k) { return str(field(j, k, where), where); };
    GcwfRecord r{get("base"), get("types"), get("terms"), get("sigma"), get("delta"), get("eta"), get("eps"),
                 Gcwf{nullptr, lookup(m.fibrations, get("types"), "fibration", where).fibration,
                      lookup(m.fibrations, get("terms"), "fibration", where).fibration,
                      lookup(m.functors, get("sigma"), "functor", where).functor,
                      lookup(m.functors, get("delta"), "functor", where).functor,
                      lookup(m.transformations, get("eta"), "transformation", where).transformation,
                      lookup(m.transformations, get("eps"), "transformation", where).transformation}};
    r.gcwf.base = lookup(m.categories, r.base, "category", where);
    m.gcwfs.emplace(name, std::move(r));
  }
  const json sec_fun_structures = section("fun_structures");
  for (const auto& [name, j] : sec_fun_structures.items()) {
    auto where = "fun-structure " + name;
    FunStructureRecord r;
    r.gcwf = str(field(j, "gcwf", where), where);
    const auto& g = lookup(m.gcwfs, r.gcwf, "gcwf", where).gcwf;
    const auto& U = g.types();
    const auto& T = g.terms();
    for (auto& row : rows(field(j, "fun", where), 3, where + ".fun")) {
      r.fun.push_back({obj_ref(U, row[0], where), obj_ref(U, row[1], where), obj_ref(U, row[2], where)});
    }
    for (auto& row : rows(field(j, "lam", where), 4, where + ".lam")) {
      r.lam.push_back({obj_ref(U, row[0], where), obj_ref(U, row[1], where), obj_ref(T, row[2], where),
                       obj_ref(T, row[3], where)});
    }
    m.fun_structures[name] = std::move(r);
  }

  auto bad = validate(m);
  if (!bad.empty()) {
    std::string msg = std::to_string(bad.size()) + " violation(s)";
    for (std::size_t i = 0; i < bad.size() && i < 5; ++i) msg += "\n  " + bad[i].check + " " + bad[i].detail;
    throw Error(ErrorCode::ValidationError, msg);
  }
  return m;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

Violations validate(const ModelFile& m) {
  Violations out;
  for (const auto& [n, c] : m.categories) append(out, validate(*c), "category " + n);
  for (const auto& [n, r] : m.functors) append(out, validate(r.functor), "functor " + n);
  for (const auto& [n, r] : m.transformations) append(out, validate(r.transformation), "transformation " + n);
  for (const auto& [n, r] : m.fibrations) append(out, validate(r.fibration), "fibration " + n);
  for (const auto& [n, r] : m.gcwfs) {
    const auto& g = r.gcwf;
    auto same = [](const CategoryPtr& a, const CategoryPtr& b) { return a == b || *a == *b; };
    auto expect = [&](bool ok, const std::string& what) {
      if (!ok) out.push_back({"gcwf " + n + ".shape", what});
    };
    expect(same(g.u.base_ptr(), g.base), "types are not over the base");
    expect(same(g.udot.base_ptr(), g.base), "terms are not over the base");
    expect(same(g.sigma.source, g.udot.total_ptr()) && same(g.sigma.target, g.u.total_ptr()), "sigma: terms → types");
    expect(same(g.delta.source, g.u.total_ptr()) && same(g.delta.target, g.udot.total_ptr()), "delta: types → terms");
    expect(g.eta.source == FinFunctor::identity(g.udot.total_ptr()) && g.eta.target == compose(g.delta, g.sigma),
           "eta: id → ΔΣ");
    expect(g.eps.source == compose(g.sigma, g.delta) && g.eps.target == FinFunctor::identity(g.u.total_ptr()),
           "eps: ΣΔ → id");
  }
  return out;
}

std::string serialize(const ModelFile& m) {
  json root;
  root["version"] = 1;
  json cats = json::object(), funs = json::object(), trans = json::object(), fibs = json::object(),
       gcwfs = json::object(), fsj = json::object();
  for (const auto& [n, c] : m.categories) cats[n] = category_json(*c);
  for (const auto& [n, r] : m.functors) {
    const auto& f = r.functor;
    json j{{"source", r.source}, {"target", r.target}, {"objects", json::object()}, {"morphisms", json::object()}};
    for (Obj x : f.source->objects()) j["objects"][f.source->name(x)] = f.target->name(f(x));
    for (Mor a : f.source->morphisms()) j["morphisms"][f.source->name(a)] = f.target->name(f(a));
    funs[n] = std::move(j);
  }
  for (const auto& [n, r] : m.transformations) {
    const auto& t = r.transformation;
    json j{{"source", r.source}, {"target", r.target}, {"components", json::object()}};
    for (Obj x : t.source.source->objects()) j["components"][t.source.source->name(x)] = t.source.target->name(t[x]);
    trans[n] = std::move(j);
  }
  for (const auto& [n, r] : m.fibrations) {
    const auto& f = r.fibration;
    auto given = f.given_cleavage();
    std::sort(given.begin(), given.end(), [](const CleavageEntry& a, const CleavageEntry& b) {
      return std::tie(a.object, a.over, a.lift) < std::tie(b.object, b.over, b.lift);
    });
    json cl = json::array();
    for (const auto& e : given) cl.push_back({f.total().name(e.object), f.base().name(e.over), f.total().name(e.lift)});
    fibs[n] = json{{"functor", r.functor}, {"cleavage", std::move(cl)}, {"split", f.marked_split()}};
  }
  for (const auto& [n, r] : m.gcwfs) {
    gcwfs[n] = json{{"base", r.base},   {"types", r.types}, {"terms", r.terms}, {"sigma", r.sigma},
                    {"delta", r.delta}, {"eta", r.eta},     {"eps", r.eps}};
  }
  for (const auto& [n, r] : m.fun_structures) {
    const auto& g = m.gcwf(r.gcwf);
    const auto& U = g.types();
    const auto& T = g.terms();
    std::vector<std::array<std::string, 3>> fun;
    for (const auto& e : r.fun) fun.push_back({U.name(e.a), U.name(e.b), U.name(e.result)});
    std::vector<std::array<std::string, 4>> lam;
    for (const auto& e : r.lam) lam.push_back({U.name(e.a), U.name(e.b), T.name(e.term), T.name(e.result)});
    std::sort(fun.begin(), fun.end());
    std::sort(lam.begin(), lam.end());
    fsj[n] = json{{"gcwf", r.gcwf}, {"fun", fun}, {"lam", lam}};
  }
  root["categories"] = std::move(cats);
  root["functors"] = std::move(funs);
  root["transformations"] = std::move(trans);
  root["fibrations"] = std::move(fibs);
  root["gcwfs"] = std::move(gcwfs);
  root["fun_structures"] = std::move(fsj);
  std::ostringstream os;
  write(os, root, 0);
  os << "\n";
  return os.str();
}

void save_model(const ModelFile& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << serialize(m);
}

}  // namespace subfib
