#include "subfib/fincat.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "subfib/names.hpp"

namespace subfib {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedEntity: return "MalformedEntity";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownMorphism: return "UnknownMorphism";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::NoPullback: return "NoPullback";
    case ErrorCode::NoTerminal: return "NoTerminal";
    case ErrorCode::MissingBase: return "MissingBase";
    case ErrorCode::NoLift: return "NoLift";
    case ErrorCode::NonStrict: return "NonStrict";
    case ErrorCode::NonSplitCleavage: return "NonSplitCleavage";
    case ErrorCode::MismatchedBase: return "MismatchedBase";
    case ErrorCode::MismatchedJudgements: return "MismatchedJudgements";
    case ErrorCode::NotFaithful: return "NotFaithful";
    case ErrorCode::NotAFibration: return "NotAFibration";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::StageTwoUnavailable: return "StageTwoUnavailable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Error";
}

// ---------------------------------------------------------------------------
// FinCategory

namespace {

template <class Names>
std::optional<int> find_sorted(const Names& names, std::string_view key) {
  auto it = std::lower_bound(names.begin(), names.end(), key,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == names.end() || *it != key) return std::nullopt;
  return static_cast<int>(it - names.begin());
}

}  // namespace

std::optional<Obj> FinCategory::find_object(std::string_view n) const {
  if (auto i = find_sorted(obj_names_, n)) return Obj{*i};
  return std::nullopt;
}

std::optional<Mor> FinCategory::find_morphism(std::string_view n) const {
  if (auto i = find_sorted(mor_names_, n)) return Mor{*i};
  return std::nullopt;
}

Obj FinCategory::object(std::string_view n) const {
  if (auto x = find_object(n)) return *x;
  throw Error(ErrorCode::UnknownObject, std::string(n));
}

Mor FinCategory::morphism(std::string_view n) const {
  if (auto m = find_morphism(n)) return *m;
  throw Error(ErrorCode::UnknownMorphism, std::string(n));
}

std::optional<Mor> FinCategory::try_compose(Mor g, Mor f) const {
  if (cod_[f.index] != dom_[g.index]) return std::nullopt;
  int r = comp_[f.index][outpos_[g.index]];
  if (r < 0) return std::nullopt;
  return Mor{r};
}

Mor FinCategory::compose(Mor g, Mor f) const {
  if (auto r = try_compose(g, f)) return *r;
  throw Error(ErrorCode::MalformedEntity,
              "composite undefined for (" + name(g) + ", " + name(f) + ")");
}

std::span<const Mor> FinCategory::hom(Obj x, Obj y) const {
  const auto& o = out_[x.index];
  auto lo = std::lower_bound(o.begin(), o.end(), y.index,
                             [this](Mor m, int c) { return cod_[m.index] < c; });
  auto hi = std::upper_bound(lo, o.end(), y.index,
                             [this](int c, Mor m) { return c < cod_[m.index]; });
  return {lo, hi};
}

bool FinCategory::is_isomorphism(Mor m) const {
  for (Mor inv : hom(cod(m), dom(m))) {
    if (try_compose(inv, m) == identity(dom(m)) && try_compose(m, inv) == identity(cod(m))) {
      return true;
    }
  }
  return false;
}

std::string FinCategory::describe(Mor m) const {
  return name(m) + ": " + name(dom(m)) + " -> " + name(cod(m));
}

bool operator==(const FinCategory& a, const FinCategory& b) {
  return a.obj_names_ == b.obj_names_ && a.mor_names_ == b.mor_names_ && a.dom_ == b.dom_ &&
         a.cod_ == b.cod_ && a.identity_ == b.identity_ && a.comp_ == b.comp_;
}

CategoryData FinCategory::to_data() const {
  CategoryData d;
  d.objects = obj_names_;
  for (Mor m : morphisms()) d.morphisms.push_back({name(m), name(dom(m)), name(cod(m))});
  for (Obj x : objects()) d.identities[name(x)] = name(identity(x));
  // Ordered by g, then f, in identifier order.
  for (Mor g : morphisms()) {
    for (Mor f : in(dom(g))) {
      if (auto gf = try_compose(g, f)) d.compose.push_back({name(g), name(f), name(*gf)});
    }
  }
  return d;
}

std::shared_ptr<const FinCategory> FinCategory::from_data(const CategoryData& data) {
  CategoryBuilder b;
  std::unordered_map<std::string, int> obj, mor;
  for (const auto& o : data.objects) {
    if (!obj.emplace(o, b.object_count()).second) {
      throw Error(ErrorCode::MalformedEntity, "duplicate object " + o);
    }
    b.add_object(o);
  }
  for (const auto& a : data.morphisms) {
    auto d = obj.find(a.dom), c = obj.find(a.cod);
    if (d == obj.end()) throw Error(ErrorCode::MalformedEntity, "morphism " + a.name + " has unknown domain " + a.dom);
    if (c == obj.end()) throw Error(ErrorCode::MalformedEntity, "morphism " + a.name + " has unknown codomain " + a.cod);
    if (!mor.emplace(a.name, b.morphism_count()).second) {
      throw Error(ErrorCode::MalformedEntity, "duplicate morphism " + a.name);
    }
    b.add_morphism(a.name, d->second, c->second);
  }
  std::vector<bool> has_identity(data.objects.size(), false);
  for (const auto& [o, m] : data.identities) {
    auto x = obj.find(o);
    if (x == obj.end()) throw Error(ErrorCode::MalformedEntity, "identity for unknown object " + o);
    auto i = mor.find(m);
    if (i == mor.end()) throw Error(ErrorCode::MalformedEntity, "identity of " + o + " is unknown morphism " + m);
    b.set_identity(x->second, i->second);
    has_identity[x->second] = true;
  }
  for (std::size_t i = 0; i < has_identity.size(); ++i) {
    if (!has_identity[i]) throw Error(ErrorCode::MalformedEntity, "object " + data.objects[i] + " has no identity");
  }
  std::unordered_map<long long, int> table;
  const long long n = static_cast<long long>(data.morphisms.size());
  for (const auto& c : data.compose) {
    auto g = mor.find(c.g), f = mor.find(c.f), gf = mor.find(c.gf);
    if (g == mor.end()) throw Error(ErrorCode::MalformedEntity, "composite references unknown morphism " + c.g);
    if (f == mor.end()) throw Error(ErrorCode::MalformedEntity, "composite references unknown morphism " + c.f);
    if (gf == mor.end()) throw Error(ErrorCode::MalformedEntity, "composite references unknown morphism " + c.gf);
    if (b.cod(f->second) != b.dom(g->second)) {
      throw Error(ErrorCode::MalformedEntity, "composite given for non-composable pair (" + c.g + ", " + c.f + ")");
    }
    auto [it, fresh] = table.emplace(g->second * n + f->second, gf->second);
    if (!fresh && it->second != gf->second) {
      throw Error(ErrorCode::MalformedEntity, "conflicting composites for (" + c.g + ", " + c.f + ")");
    }
  }
  return b.build([&](int g, int f) {
           auto it = table.find(g * n + f);
           return it == table.end() ? -1 : it->second;
         })
      .category;
}

// ---------------------------------------------------------------------------
// CategoryBuilder

int CategoryBuilder::add_object(std::string name) {
  objects_.push_back(std::move(name));
  identity_.push_back(-1);
  out_.emplace_back();
  return static_cast<int>(objects_.size()) - 1;
}

int CategoryBuilder::add_morphism(std::string name, int dom, int cod) {
  morphisms_.push_back({std::move(name), dom, cod});
  int m = static_cast<int>(morphisms_.size()) - 1;
  out_[dom].push_back(m);
  return m;
}

void CategoryBuilder::set_identity(int object, int morphism) { identity_[object] = morphism; }

CategoryBuilder::Result CategoryBuilder::build(const std::function<int(int, int)>& compose) const {
  const int no = object_count(), nm = morphism_count();
  std::vector<int> oord(no), mord(nm);
  std::iota(oord.begin(), oord.end(), 0);
  std::iota(mord.begin(), mord.end(), 0);
  std::sort(oord.begin(), oord.end(), [&](int a, int b) { return objects_[a] < objects_[b]; });
  std::sort(mord.begin(), mord.end(),
            [&](int a, int b) { return morphisms_[a].name < morphisms_[b].name; });
  for (int i = 1; i < no; ++i) {
    if (objects_[oord[i]] == objects_[oord[i - 1]]) {
      throw Error(ErrorCode::MalformedEntity, "duplicate object " + objects_[oord[i]]);
    }
  }
  for (int i = 1; i < nm; ++i) {
    if (morphisms_[mord[i]].name == morphisms_[mord[i - 1]].name) {
      throw Error(ErrorCode::MalformedEntity, "duplicate morphism " + morphisms_[mord[i]].name);
    }
  }
  Result r;
  r.object.resize(no);
  r.morphism.resize(nm);
  for (int i = 0; i < no; ++i) r.object[oord[i]] = Obj{i};
  for (int i = 0; i < nm; ++i) r.morphism[mord[i]] = Mor{i};

  auto c = std::shared_ptr<FinCategory>(new FinCategory());
  c->obj_names_.resize(no);
  c->identity_.resize(no);
  c->out_.resize(no);
  c->in_.resize(no);
  for (int i = 0; i < no; ++i) {
    c->obj_names_[i] = objects_[oord[i]];
    int id = identity_[oord[i]];
    if (id < 0) throw Error(ErrorCode::MalformedEntity, "object " + objects_[oord[i]] + " has no identity");
    c->identity_[i] = r.morphism[id].index;
  }
  c->mor_names_.resize(nm);
  c->dom_.resize(nm);
  c->cod_.resize(nm);
  for (int i = 0; i < nm; ++i) {
    const auto& a = morphisms_[mord[i]];
    c->mor_names_[i] = a.name;
    c->dom_[i] = r.object[a.dom].index;
    c->cod_[i] = r.object[a.cod].index;
    c->out_[c->dom_[i]].push_back(Mor{i});
    c->in_[c->cod_[i]].push_back(Mor{i});
  }
  auto by_cod = [&](Mor a, Mor b) {
    return std::pair(c->cod_[a.index], a.index) < std::pair(c->cod_[b.index], b.index);
  };
  auto by_dom = [&](Mor a, Mor b) {
    return std::pair(c->dom_[a.index], a.index) < std::pair(c->dom_[b.index], b.index);
  };
  for (int i = 0; i < no; ++i) {
    std::sort(c->out_[i].begin(), c->out_[i].end(), by_cod);
    std::sort(c->in_[i].begin(), c->in_[i].end(), by_dom);
  }
  c->outpos_.resize(nm);
  for (int i = 0; i < no; ++i) {
    for (std::size_t k = 0; k < c->out_[i].size(); ++k) c->outpos_[c->out_[i][k].index] = static_cast<int>(k);
  }
  c->comp_.resize(nm);
  for (int f = 0; f < nm; ++f) {
    const auto& gs = c->out_[c->cod_[f]];
    auto& row = c->comp_[f];
    row.assign(gs.size(), -1);
    for (std::size_t k = 0; k < gs.size(); ++k) {
      int g = gs[k].index;
      int bg = mord[g], bf = mord[f];
      int gf = compose(bg, bf);
      row[k] = gf < 0 ? -1 : r.morphism[gf].index;
    }
  }
  r.category = std::move(c);
  return r;
}

// ---------------------------------------------------------------------------
// Functors and transformations

FinFunctor FinFunctor::identity(CategoryPtr c) {
  FinFunctor f{c, c, {}, {}};
  for (Obj x : c->objects()) f.objects.push_back(x);
  for (Mor m : c->morphisms()) f.morphisms.push_back(m);
  return f;
}

FinFunctor compose(const FinFunctor& g, const FinFunctor& f) {
  FinFunctor h{f.source, g.target, {}, {}};
  h.objects.reserve(f.objects.size());
  for (Obj x : f.objects) h.objects.push_back(g(x));
  h.morphisms.reserve(f.morphisms.size());
  for (Mor m : f.morphisms) h.morphisms.push_back(g(m));
  return h;
}

Violations validate(const FinCategory& c) {
  Violations out;
  auto pair = [&](Mor g, Mor f) { return "(" + c.name(g) + ", " + c.name(f) + ")"; };
  for (Obj x : c.objects()) {
    Mor id = c.identity(x);
    if (c.dom(id) != x || c.cod(id) != x) out.push_back({"identity.typing", c.name(x)});
  }
  for (Mor f : c.morphisms()) {
    for (Mor g : c.out(c.cod(f))) {
      auto gf = c.try_compose(g, f);
      if (!gf) {
        out.push_back({"compose.total", pair(g, f)});
      } else if (c.dom(*gf) != c.dom(f) || c.cod(*gf) != c.cod(g)) {
        out.push_back({"compose.typing", pair(g, f)});
      }
    }
  }
  for (Mor f : c.morphisms()) {
    Mor idc = c.identity(c.cod(f)), idd = c.identity(c.dom(f));
    if (c.try_compose(idc, f) != f) out.push_back({"identity.left", pair(idc, f)});
    if (c.try_compose(f, idd) != f) out.push_back({"identity.right", pair(f, idd)});
  }
  for (Mor f : c.morphisms()) {
    for (Mor g : c.out(c.cod(f))) {
      auto gf = c.try_compose(g, f);
      for (Mor h : c.out(c.cod(g))) {
        auto hg = c.try_compose(h, g);
        std::optional<Mor> l, r;
        if (gf) l = c.try_compose(h, *gf);
        if (hg) r = c.try_compose(*hg, f);
        if (!l || !r || *l != *r) {
          out.push_back({"associativity", "(" + c.name(h) + ", " + c.name(g) + ", " + c.name(f) + ")"});
        }
      }
    }
  }
  return out;
}

Violations validate(const FinFunctor& F) {
  Violations out;
  const auto& s = *F.source;
  const auto& t = *F.target;
  if (F.objects.size() != s.object_count() || F.morphisms.size() != s.morphism_count()) {
    throw Error(ErrorCode::MalformedEntity, "functor maps are not total");
  }
  for (Mor m : s.morphisms()) {
    Mor fm = F(m);
    if (t.dom(fm) != F(s.dom(m)) || t.cod(fm) != F(s.cod(m))) {
      out.push_back({"functor.typing", s.name(m) + " |-> " + t.name(fm)});
    }
  }
  for (Obj x : s.objects()) {
    if (F(s.identity(x)) != t.identity(F(x))) out.push_back({"functor.identity", s.name(x)});
  }
  for (Mor f : s.morphisms()) {
    for (Mor g : s.out(s.cod(f))) {
      auto gf = s.try_compose(g, f);
      if (!gf) continue;
      auto image = t.try_compose(F(g), F(f));
      if (!image || *image != F(*gf)) {
        out.push_back({"functor.composition", "(" + s.name(g) + ", " + s.name(f) + ")"});
      }
    }
  }
  return out;
}

Violations validate(const NatTransformation& a) {
  Violations out;
  if (a.source.source != a.target.source && !(*a.source.source == *a.target.source)) {
    throw Error(ErrorCode::MalformedEntity, "transformation between functors with different sources");
  }
  const auto& s = *a.source.source;
  const auto& t = *a.source.target;
  if (a.components.size() != s.object_count()) {
    throw Error(ErrorCode::MalformedEntity, "transformation components are not total");
  }
  for (Obj x : s.objects()) {
    Mor c = a[x];
    if (t.dom(c) != a.source(x) || t.cod(c) != a.target(x)) {
      out.push_back({"transformation.typing", s.name(x) + " |-> " + t.name(c)});
    }
  }
  for (Mor m : s.morphisms()) {
    auto l = t.try_compose(a.target(m), a[s.dom(m)]);
    auto r = t.try_compose(a[s.cod(m)], a.source(m));
    if (!l || !r || *l != *r) out.push_back({"naturality", s.name(m)});
  }
  return out;
}

CategoryPtr opposite(const FinCategory& c) {
  CategoryBuilder b;
  for (Obj x : c.objects()) b.add_object(c.name(x));
  for (Mor m : c.morphisms()) b.add_morphism(c.name(m), c.cod(m).index, c.dom(m).index);
  for (Obj x : c.objects()) b.set_identity(x.index, c.identity(x).index);
  return b.build([&](int g, int f) {
           auto r = c.try_compose(Mor{f}, Mor{g});
           return r ? r->index : -1;
         })
      .category;
}

// ---------------------------------------------------------------------------
// Limits

namespace {

// Number of cones (a, b) over the cospan (f, g) with vertex q.
std::size_t cone_count(const FinCategory& c, Mor f, Mor g, Obj q) {
  std::size_t n = 0;
  for (Mor a : c.hom(q, c.dom(f))) {
    Mor fa = c.compose(f, a);
    for (Mor b : c.hom(q, c.dom(g))) {
      if (c.compose(g, b) == fa) ++n;
    }
  }
  return n;
}

bool is_universal(const FinCategory& c, Mor p, Mor q, const std::vector<std::size_t>& cones) {
  Obj apex = c.dom(p);
  for (Obj x : c.objects()) {
    auto ms = c.hom(x, apex);
    if (ms.size() != cones[x.index]) return false;
    std::set<std::pair<int, int>> seen;
    for (Mor m : ms) {
      if (!seen.emplace(c.compose(p, m).index, c.compose(q, m).index).second) return false;
    }
  }
  return true;
}

std::optional<std::pair<Mor, Mor>> find_pullback(const FinCategory& c, Mor f, Mor g) {
  if (c.cod(f) != c.cod(g)) {
    throw Error(ErrorCode::MalformedEntity, "pullback of non-cospan (" + c.name(f) + ", " + c.name(g) + ")");
  }
  std::vector<std::size_t> cones(c.object_count());
  for (Obj x : c.objects()) cones[x.index] = cone_count(c, f, g, x);
  for (Obj apex : c.objects()) {
    // A pullback apex receives exactly as many arrows from itself as it has cones.
    if (c.hom(apex, apex).size() != cones[apex.index]) continue;
    for (Mor p : c.hom(apex, c.dom(f))) {
      Mor fp = c.compose(f, p);
      for (Mor q : c.hom(apex, c.dom(g))) {
        if (c.compose(g, q) != fp) continue;
        if (is_universal(c, p, q, cones)) return std::pair(p, q);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

PullbackResult pullback(const FinCategory& c, Mor f, Mor g) {
  auto found = find_pullback(c, f, g);
  if (!found) {
    throw Error(ErrorCode::NoPullback, "(" + c.name(f) + ", " + c.name(g) + ")");
  }
  PullbackResult r{c.dom(found->first), found->first, found->second, {}};
  for (Obj x : c.objects()) {
    for (Mor m : c.hom(x, r.apex)) {
      r.mediators.push_back({c.compose(r.first, m), c.compose(r.second, m), m});
    }
  }
  return r;
}

std::optional<std::pair<Mor, Mor>> missing_pullback(const FinCategory& c) {
  for (Mor f : c.morphisms()) {
    for (Mor g : c.in(c.cod(f))) {
      if (g < f) continue;  // symmetric
      if (!find_pullback(c, f, g)) return std::pair(f, g);
    }
  }
  return std::nullopt;
}

Obj terminal_object(const FinCategory& c) {
  for (Obj t : c.objects()) {
    bool ok = true;
    for (Obj x : c.objects()) {
      if (c.hom(x, t).size() != 1) {
        ok = false;
        break;
      }
    }
    if (ok) return t;
  }
  throw Error(ErrorCode::NoTerminal, "no object receives a unique arrow from every object");
}

// ---------------------------------------------------------------------------
// Derived categories

std::optional<Mor> ArrowCategory::square(Obj x, Obj y, Mor t, Mor b) const {
  auto it = lookup_.find({x.index, y.index, t.index, b.index});
  if (it == lookup_.end()) return std::nullopt;
  return Mor{it->second};
}

ArrowCategory arrow_category(CategoryPtr cp) {
  const auto& c = *cp;
  CategoryBuilder b;
  for (Mor f : c.morphisms()) b.add_object(c.name(f));
  struct Square {
    int x, y;
    Mor top, bottom;
  };
  std::vector<Square> squares;
  std::map<std::array<int, 4>, int> lookup;
  for (Mor f : c.morphisms()) {
    for (Mor g : c.morphisms()) {
      for (Mor t : c.hom(c.dom(f), c.dom(g))) {
        Mor gt = c.compose(g, t);
        for (Mor bt : c.hom(c.cod(f), c.cod(g))) {
          if (c.compose(bt, f) != gt) continue;
          int m = b.add_morphism(names::tuple("sq", {c.name(f), c.name(g), c.name(t), c.name(bt)}),
                                 f.index, g.index);
          squares.push_back({f.index, g.index, t, bt});
          lookup[{f.index, g.index, t.index, bt.index}] = m;
          if (f == g && c.is_identity(t) && c.is_identity(bt)) b.set_identity(f.index, m);
        }
      }
    }
  }
  auto built = b.build([&](int g, int f) {
    const auto& sf = squares[f];
    const auto& sg = squares[g];
    return lookup.at({sf.x, sg.y, c.compose(sg.top, sf.top).index, c.compose(sg.bottom, sf.bottom).index});
  });
  ArrowCategory a;
  a.base = cp;
  a.category = built.category;
  const auto& ac = *a.category;
  a.arrow.resize(ac.object_count());
  a.object_of.resize(c.morphism_count());
  for (Mor f : c.morphisms()) {
    Obj o = built.object[f.index];
    a.arrow[o.index] = f;
    a.object_of[f.index] = o;
  }
  a.top.resize(ac.morphism_count());
  a.bottom.resize(ac.morphism_count());
  for (std::size_t i = 0; i < squares.size(); ++i) {
    Mor m = built.morphism[i];
    a.top[m.index] = squares[i].top;
    a.bottom[m.index] = squares[i].bottom;
    a.lookup_[{built.object[squares[i].x].index, built.object[squares[i].y].index, squares[i].top.index,
               squares[i].bottom.index}] = m.index;
  }
  a.dom = FinFunctor{a.category, cp, {}, {}};
  a.cod = FinFunctor{a.category, cp, {}, {}};
  for (Obj o : ac.objects()) {
    a.dom.objects.push_back(c.dom(a.arrow[o.index]));
    a.cod.objects.push_back(c.cod(a.arrow[o.index]));
  }
  for (Mor m : ac.morphisms()) {
    a.dom.morphisms.push_back(a.top[m.index]);
    a.cod.morphisms.push_back(a.bottom[m.index]);
  }
  return a;
}

std::optional<Obj> SectionsCategory::object_for(Mor s, Mor f) const {
  auto it = objects_.find({s.index, f.index});
  if (it == objects_.end()) return std::nullopt;
  return Obj{it->second};
}

std::optional<Mor> SectionsCategory::morphism(Obj x, Obj y, Mor t, Mor b) const {
  auto it = lookup_.find({x.index, y.index, t.index, b.index});
  if (it == lookup_.end()) return std::nullopt;
  return Mor{it->second};
}

SectionsCategory sections_category(CategoryPtr cp) {
  const auto& c = *cp;
  CategoryBuilder b;
  std::vector<std::pair<Mor, Mor>> objs;  // (s, f)
  for (Mor f : c.morphisms()) {
    for (Mor s : c.hom(c.cod(f), c.dom(f))) {
      if (c.compose(f, s) != c.identity(c.cod(f))) continue;
      b.add_object(names::tuple("sec", {c.name(s), c.name(f)}));
      objs.emplace_back(s, f);
    }
  }
  struct Arrow {
    int x, y;
    Mor top, bottom;
  };
  std::vector<Arrow> arrows;
  std::map<std::array<int, 4>, int> lookup;
  for (int x = 0; x < static_cast<int>(objs.size()); ++x) {
    auto [s, f] = objs[x];
    for (int y = 0; y < static_cast<int>(objs.size()); ++y) {
      auto [s2, f2] = objs[y];
      for (Mor t : c.hom(c.dom(f), c.dom(f2))) {
        for (Mor bt : c.hom(c.cod(f), c.cod(f2))) {
          if (c.compose(f2, t) != c.compose(bt, f)) continue;
          if (c.compose(t, s) != c.compose(s2, bt)) continue;
          int m = b.add_morphism(
              names::tuple("sm", {c.name(s), c.name(f), c.name(s2), c.name(f2), c.name(t), c.name(bt)}), x, y);
          arrows.push_back({x, y, t, bt});
          lookup[{x, y, t.index, bt.index}] = m;
          if (x == y && c.is_identity(t) && c.is_identity(bt)) b.set_identity(x, m);
        }
      }
    }
  }
  auto built = b.build([&](int g, int f) {
    const auto& af = arrows[f];
    const auto& ag = arrows[g];
    return lookup.at({af.x, ag.y, c.compose(ag.top, af.top).index, c.compose(ag.bottom, af.bottom).index});
  });
  SectionsCategory sc;
  sc.base = cp;
  sc.category = built.category;
  const auto& cat = *sc.category;
  sc.section.resize(cat.object_count());
  sc.arrow.resize(cat.object_count());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    Obj o = built.object[i];
    sc.section[o.index] = objs[i].first;
    sc.arrow[o.index] = objs[i].second;
    sc.objects_[{objs[i].first.index, objs[i].second.index}] = o.index;
  }
  sc.top.resize(cat.morphism_count());
  sc.bottom.resize(cat.morphism_count());
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    Mor m = built.morphism[i];
    sc.top[m.index] = arrows[i].top;
    sc.bottom[m.index] = arrows[i].bottom;
    sc.lookup_[{built.object[arrows[i].x].index, built.object[arrows[i].y].index, arrows[i].top.index,
                arrows[i].bottom.index}] = m.index;
  }
  sc.cod = FinFunctor{sc.category, cp, {}, {}};
  for (Obj o : cat.objects()) sc.cod.objects.push_back(c.cod(sc.arrow[o.index]));
  for (Mor m : cat.morphisms()) sc.cod.morphisms.push_back(sc.bottom[m.index]);
  return sc;
}

std::optional<Mor> SliceCategory::triangle(Obj x, Obj y, Mor a) const {
  auto it = lookup_.find({x.index, y.index, a.index});
  if (it == lookup_.end()) return std::nullopt;
  return Mor{it->second};
}

SliceCategory slice_category(CategoryPtr cp, Obj over) {
  const auto& c = *cp;
  CategoryBuilder b;
  std::vector<Mor> objs;
  for (Mor x : c.in(over)) {
    b.add_object(c.name(x));
    objs.push_back(x);
  }
  struct Tri {
    int x, y;
    Mor a;
  };
  std::vector<Tri> tris;
  std::map<std::array<int, 3>, int> lookup;
  for (int i = 0; i < static_cast<int>(objs.size()); ++i) {
    for (int j = 0; j < static_cast<int>(objs.size()); ++j) {
      for (Mor a : c.hom(c.dom(objs[i]), c.dom(objs[j]))) {
        if (c.compose(objs[j], a) != objs[i]) continue;
        int m = b.add_morphism(names::tuple("tri", {c.name(objs[i]), c.name(a), c.name(objs[j])}), i, j);
        tris.push_back({i, j, a});
        lookup[{i, j, a.index}] = m;
        if (i == j && c.is_identity(a)) b.set_identity(i, m);
      }
    }
  }
  auto built = b.build([&](int g, int f) {
    return lookup.at({tris[f].x, tris[g].y, c.compose(tris[g].a, tris[f].a).index});
  });
  SliceCategory s;
  s.base = cp;
  s.over = over;
  s.category = built.category;
  const auto& cat = *s.category;
  s.arrow.resize(cat.object_count());
  s.object_of.assign(c.morphism_count(), Obj{});
  for (std::size_t i = 0; i < objs.size(); ++i) {
    s.arrow[built.object[i].index] = objs[i];
    s.object_of[objs[i].index] = built.object[i];
  }
  s.map.resize(cat.morphism_count());
  for (std::size_t i = 0; i < tris.size(); ++i) {
    Mor m = built.morphism[i];
    s.map[m.index] = tris[i].a;
    s.lookup_[{built.object[tris[i].x].index, built.object[tris[i].y].index, tris[i].a.index}] = m.index;
  }
  s.dom = FinFunctor{s.category, cp, {}, {}};
  for (Obj o : cat.objects()) s.dom.objects.push_back(c.dom(s.arrow[o.index]));
  for (Mor m : cat.morphisms()) s.dom.morphisms.push_back(s.map[m.index]);
  return s;
}

DerivedCategory derived_category(DerivedKind kind, CategoryPtr c, std::optional<Obj> base) {
  switch (kind) {
    case DerivedKind::Arrow: {
      auto a = arrow_category(c);
      return {a.category, a.cod};
    }
    case DerivedKind::Sections: {
      auto s = sections_category(c);
      return {s.category, s.cod};
    }
    case DerivedKind::Slice: {
      if (!base) throw Error(ErrorCode::MissingBase, "slice category needs a base object");
      auto s = slice_category(c, *base);
      return {s.category, s.dom};
    }
  }
  throw Error(ErrorCode::MalformedEntity, "unknown derived category kind");
}

}  // namespace subfib
