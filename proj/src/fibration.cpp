#include "subfib/fibration.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "subfib/names.hpp"

namespace subfib {

Fibration::Fibration(FinFunctor p, std::vector<CleavageEntry> cleavage, bool marked_split)
    : state_(std::make_shared<State>()) {
  auto& s = *state_;
  s.p = std::move(p);
  s.marked_split = marked_split;
  const auto& e = *s.p.source;
  const auto& b = *s.p.target;
  if (s.p.objects.size() != e.object_count() || s.p.morphisms.size() != e.morphism_count()) {
    throw Error(ErrorCode::MalformedEntity, "fibration functor maps are not total");
  }
  s.slot_offset.resize(e.object_count() + 1);
  int total = 0;
  for (Obj a : e.objects()) {
    s.slot_offset[a.index] = total;
    total += static_cast<int>(b.in(s.p(a)).size());
  }
  s.slot_offset[e.object_count()] = total;
  s.lift = std::vector<std::atomic<int>>(total);
  s.cart = std::vector<std::atomic<signed char>>(e.morphism_count());
  s.over.resize(b.object_count());
  for (Obj a : e.objects()) s.over[s.p(a).index].push_back(a);
  for (const auto& c : cleavage) {
    if (e.cod(c.lift) != c.object || s.p(c.lift) != c.over) {
      throw Error(ErrorCode::MalformedEntity,
                  "cleavage entry " + e.name(c.lift) + " does not lie over " + b.name(c.over) + " into " +
                      e.name(c.object));
    }
    s.lift[slot(c.object, c.over)].store(c.lift.index + 2);
  }
  s.given = std::move(cleavage);
  std::sort(s.given.begin(), s.given.end(), [](const CleavageEntry& x, const CleavageEntry& y) {
    return std::pair(x.object, x.over) < std::pair(y.object, y.over);
  });
}

std::size_t Fibration::slot(Obj a, Mor sigma) const {
  const auto& b = base();
  Obj pa = state_->p(a);
  if (b.cod(sigma) != pa) {
    throw Error(ErrorCode::MalformedEntity, b.name(sigma) + " does not end at p(" + total().name(a) + ")");
  }
  auto in = b.in(pa);
  auto it = std::lower_bound(in.begin(), in.end(), sigma, [&](Mor x, Mor y) {
    return std::pair(b.dom(x), x) < std::pair(b.dom(y), y);
  });
  return static_cast<std::size_t>(state_->slot_offset[a.index] + (it - in.begin()));
}

bool Fibration::decide_cartesian(Mor s) const {
  const auto& e = total();
  const auto& b = base();
  const auto& p = state_->p;
  Obj x = e.dom(s), y = e.cod(s);
  Mor sigma = p(s);
  Obj i = b.dom(sigma);
  // For each Z, count fillers t: Z → X grouped by (s∘t, p(t)); every (r, τ)
  // with σ∘τ = p(r) needs exactly one.
  std::map<std::pair<int, int>, int> count;
  for (Obj z : e.objects()) {
    auto rs = e.hom(z, y);
    if (rs.empty()) continue;
    count.clear();
    for (Mor t : e.hom(z, x)) ++count[{e.compose(s, t).index, p(t).index}];
    for (Mor r : rs) {
      Mor pr = p(r);
      for (Mor tau : b.hom(p(z), i)) {
        if (b.compose(sigma, tau) != pr) continue;
        auto it = count.find({r.index, tau.index});
        if (it == count.end() || it->second != 1) return false;
      }
    }
  }
  return true;
}

bool Fibration::is_cartesian(Mor s) const {
  if (!s.valid() || static_cast<std::size_t>(s.index) >= total().morphism_count()) {
    throw Error(ErrorCode::UnknownMorphism, "index " + std::to_string(s.index));
  }
  auto& flag = state_->cart[s.index];
  signed char v = flag.load(std::memory_order_acquire);
  if (v == 0) {
    v = decide_cartesian(s) ? 2 : 1;
    flag.store(v, std::memory_order_release);
  }
  return v == 2;
}

std::optional<Mor> Fibration::try_lift(Obj a, Mor sigma) const {
  auto& cell = state_->lift[slot(a, sigma)];
  int v = cell.load(std::memory_order_acquire);
  if (v == 0) {
    v = 1;
    const auto& e = total();
    for (Mor m : e.in(a)) {
      // in(a) is sorted by domain, not by name; keep the smallest id.
      if (state_->p(m) != sigma || (v >= 2 && m.index >= v - 2)) continue;
      if (is_cartesian(m)) v = m.index + 2;
    }
    int expected = 0;
    if (!cell.compare_exchange_strong(expected, v, std::memory_order_acq_rel)) v = expected;
  }
  if (v == 1) return std::nullopt;
  return Mor{v - 2};
}

Mor Fibration::cartesian_lift(Obj a, Mor sigma) const {
  if (auto m = try_lift(a, sigma)) return *m;
  throw Error(ErrorCode::NoLift, "(" + total().name(a) + ", " + base().name(sigma) + ")");
}

Factorization Fibration::factorize(Mor r) const {
  const auto& e = total();
  Mor c = cartesian_lift(e.cod(r), state_->p(r));
  Mor id = base().identity(state_->p(e.dom(r)));
  for (Mor t : e.hom(e.dom(r), e.dom(c))) {
    if (state_->p(t) == id && e.compose(c, t) == r) return {t, c};
  }
  throw Error(ErrorCode::NoLift, "no vertical filler for " + e.name(r));
}

Mor Fibration::reindex_vertical(Mor f, Mor sigma) const {
  const auto& e = total();
  if (!is_vertical(f)) throw Error(ErrorCode::MalformedEntity, e.name(f) + " is not vertical");
  Mor c = cartesian_lift(e.cod(f), sigma);
  Mor c2 = cartesian_lift(e.dom(f), sigma);
  Mor fc2 = e.compose(f, c2);
  Mor id = base().identity(base().dom(sigma));
  for (Mor v : e.hom(e.dom(c2), e.dom(c))) {
    if (state_->p(v) == id && e.compose(c, v) == fc2) return v;
  }
  throw Error(ErrorCode::NoLift, "no reindexing of " + e.name(f) + " along " + base().name(sigma));
}

std::vector<Obj> Fibration::objects_over(Obj gamma) const { return state_->over[gamma.index]; }

Fiber Fibration::fiber(Obj gamma) const {
  if (!gamma.valid() || static_cast<std::size_t>(gamma.index) >= base().object_count()) {
    throw Error(ErrorCode::UnknownObject, "index " + std::to_string(gamma.index));
  }
  const auto& e = total();
  Mor id = base().identity(gamma);
  CategoryBuilder b;
  Fiber f;
  std::vector<int> local(e.object_count(), -1);
  for (Obj a : state_->over[gamma.index]) {
    local[a.index] = b.add_object(e.name(a));
    f.object.push_back(a);
  }
  std::vector<int> local_mor(e.morphism_count(), -1);
  for (Obj a : f.object) {
    for (Mor m : e.out(a)) {
      if (state_->p(m) != id) continue;
      local_mor[m.index] = b.add_morphism(e.name(m), local[a.index], local[e.cod(m).index]);
      f.morphism.push_back(m);
    }
  }
  for (Obj a : f.object) b.set_identity(local[a.index], local_mor[e.identity(a).index]);
  auto built = b.build([&](int g, int h) {
    return local_mor[e.compose(f.morphism[g], f.morphism[h]).index];
  });
  // Builder order is total-index order restricted, which is also name order.
  f.category = built.category;
  return f;
}

// ---------------------------------------------------------------------------
// Indexed categories

Violations validate(const IndexedCategory& f) {
  Violations out;
  const auto& b = *f.base;
  if (f.fiber.size() != b.object_count() || f.reindex.size() != b.morphism_count()) {
    throw Error(ErrorCode::MalformedEntity, "indexed category is not total over its base");
  }
  for (Obj x : b.objects()) append(out, validate(*f.fiber[x.index]), "fiber." + b.name(x));
  for (Mor s : b.morphisms()) {
    const auto& r = f.reindex[s.index];
    if (!(*r.source == *f.fiber[b.cod(s).index]) || !(*r.target == *f.fiber[b.dom(s).index])) {
      out.push_back({"reindex.typing", b.name(s)});
      continue;
    }
    append(out, validate(r), "reindex." + b.name(s));
  }
  if (!out.empty()) return out;
  for (Obj x : b.objects()) {
    if (!(f.reindex[b.identity(x).index] == FinFunctor::identity(f.fiber[x.index]))) {
      out.push_back({"reindex.identity", b.name(x)});
    }
  }
  for (Mor t : b.morphisms()) {
    for (Mor s : b.out(b.cod(t))) {
      Mor st = b.compose(s, t);
      if (!(f.reindex[st.index] == compose(f.reindex[t.index], f.reindex[s.index]))) {
        out.push_back({"reindex.composition", "(" + b.name(s) + ", " + b.name(t) + ")"});
      }
    }
  }
  return out;
}

Fibration grothendieck(const IndexedCategory& f) {
  auto bad = validate(f);
  if (!bad.empty()) throw Error(ErrorCode::NonStrict, bad.front().check + " " + bad.front().detail);
  const auto& b = *f.base;
  CategoryBuilder cb;
  std::vector<std::vector<int>> obj(b.object_count());  // [Γ][A] -> builder id
  std::vector<Obj> obj_base;
  for (Obj g : b.objects()) {
    const auto& fc = *f.fiber[g.index];
    for (Obj a : fc.objects()) {
      obj[g.index].push_back(cb.add_object(names::tuple("", {b.name(g), fc.name(a)})));
      obj_base.push_back(g);
    }
  }
  struct Arrow {
    Mor sigma;
    Mor v;  // in fiber(dom σ)
    Obj a;  // in fiber(cod σ)
  };
  std::vector<Arrow> arrows;
  std::map<std::array<int, 3>, int> lookup;
  std::vector<CleavageEntry> pending;  // builder indices for object/lift
  std::vector<int> lift_of;
  for (Mor s : b.morphisms()) {
    Obj d = b.dom(s), c = b.cod(s);
    const auto& fd = *f.fiber[d.index];
    const auto& fc = *f.fiber[c.index];
    const auto& r = f.reindex[s.index];
    for (Obj a : fc.objects()) {
      Obj sa = r(a);
      for (Mor v : fd.in(sa)) {
        int m = cb.add_morphism(names::tuple("", {b.name(s), fd.name(v), fc.name(a)}), obj[d.index][fd.dom(v).index],
                                obj[c.index][a.index]);
        arrows.push_back({s, v, a});
        lookup[{s.index, v.index, a.index}] = m;
        if (fd.is_identity(v)) {
          pending.push_back({Obj{obj[c.index][a.index]}, s, Mor{m}});
        }
        if (b.is_identity(s) && fd.is_identity(v)) cb.set_identity(obj[c.index][a.index], m);
      }
    }
  }
  auto built = cb.build([&](int g, int h) {
    // (σ, v; A) ∘ (τ, w; A') = (σ∘τ, τ*(v)∘w; A)
    const auto& x = arrows[g];
    const auto& y = arrows[h];
    Mor st = b.compose(x.sigma, y.sigma);
    const auto& ft = *f.fiber[b.dom(y.sigma).index];
    Mor tv = f.reindex[y.sigma.index](x.v);
    Mor w = ft.compose(tv, y.v);
    return lookup.at({st.index, w.index, x.a.index});
  });
  FinFunctor p{built.category, f.base, {}, {}};
  p.objects.resize(built.category->object_count());
  p.morphisms.resize(built.category->morphism_count());
  for (std::size_t i = 0; i < obj_base.size(); ++i) p.objects[built.object[i].index] = obj_base[i];
  for (std::size_t i = 0; i < arrows.size(); ++i) p.morphisms[built.morphism[i].index] = arrows[i].sigma;
  std::vector<CleavageEntry> cleavage;
  for (const auto& c : pending) {
    cleavage.push_back({built.object[c.object.index], c.over, built.morphism[c.lift.index]});
  }
  return Fibration(std::move(p), std::move(cleavage), true);
}

Violations check_split(const Fibration& f) {
  Violations out;
  const auto& e = f.total();
  const auto& b = f.base();
  for (Obj a : e.objects()) {
    for (Mor s : b.in(f(a))) {
      if (!f.try_lift(a, s)) out.push_back({"lift.exists", "(" + e.name(a) + ", " + b.name(s) + ")"});
    }
  }
  if (!out.empty()) return out;
  for (Obj a : e.objects()) {
    Mor id = f.cartesian_lift(a, b.identity(f(a)));
    if (id != e.identity(a)) out.push_back({"split.identity", e.name(a)});
    for (Mor s : b.in(f(a))) {
      Mor ls = f.cartesian_lift(a, s);
      Obj sa = e.dom(ls);
      for (Mor t : b.in(b.dom(s))) {
        Mor lt = f.cartesian_lift(sa, t);
        Mor lst = f.cartesian_lift(a, b.compose(s, t));
        if (e.compose(ls, lt) != lst) {
          out.push_back({"split.composition", "(" + e.name(a) + ", " + b.name(s) + ", " + b.name(t) + ")"});
        }
      }
    }
  }
  return out;
}

Classification classify(const Fibration& f) {
  Classification c;
  const auto& e = f.total();
  const auto& b = f.base();
  c.is_fibration = true;
  for (Obj a : e.objects()) {
    for (Mor s : b.in(f(a))) {
      if (!f.try_lift(a, s)) c.is_fibration = false;
    }
  }
  c.split = c.is_fibration && check_split(f).empty();
  c.faithful = true;
  c.discrete = true;
  for (Mor m : e.morphisms()) {
    if (!f.is_vertical(m)) continue;
    if (!e.is_identity(m)) c.discrete = false;
    if (e.hom(e.dom(m), e.cod(m)).size() > 1) {
      std::size_t vertical = 0;
      for (Mor n : e.hom(e.dom(m), e.cod(m))) vertical += f.is_vertical(n);
      if (vertical > 1) c.faithful = false;
    }
  }
  return c;
}

Violations validate(const Fibration& f) {
  Violations out;
  append(out, validate(f.functor()), "functor");
  if (!out.empty()) return out;
  const auto& e = f.total();
  for (const auto& c : f.given_cleavage()) {
    if (!f.is_cartesian(c.lift)) out.push_back({"cleavage.cartesian", e.name(c.lift)});
  }
  if (f.marked_split()) append(out, check_split(f));
  return out;
}

IndexedCategory indexed_of(const Fibration& f) {
  auto bad = check_split(f);
  if (!bad.empty()) throw Error(ErrorCode::NonSplitCleavage, bad.front().check + " " + bad.front().detail);
  const auto& e = f.total();
  const auto& b = f.base();
  IndexedCategory ic{f.base_ptr(), {}, {}};
  std::vector<Fiber> fibers;
  for (Obj g : b.objects()) {
    fibers.push_back(f.fiber(g));
    ic.fiber.push_back(fibers.back().category);
  }
  for (Mor s : b.morphisms()) {
    const auto& src = fibers[b.cod(s).index];
    const auto& dst = fibers[b.dom(s).index];
    FinFunctor r{src.category, dst.category, {}, {}};
    for (Obj a : src.category->objects()) {
      r.objects.push_back(dst.category->object(e.name(f.reindex(src.object[a.index], s))));
    }
    for (Mor m : src.category->morphisms()) {
      r.morphisms.push_back(dst.category->morphism(e.name(f.reindex_vertical(src.morphism[m.index], s))));
    }
    ic.reindex.push_back(std::move(r));
  }
  return ic;
}

Fibration vertical_opposite(const Fibration& f) {
  auto ic = indexed_of(f);
  for (auto& c : ic.fiber) c = opposite(*c);
  // opposite() keeps identifiers, so the reindexing maps carry over verbatim.
  for (std::size_t i = 0; i < ic.reindex.size(); ++i) {
    const auto& b = *ic.base;
    ic.reindex[i].source = ic.fiber[b.cod(Mor{static_cast<int>(i)}).index];
    ic.reindex[i].target = ic.fiber[b.dom(Mor{static_cast<int>(i)}).index];
  }
  return grothendieck(ic);
}

// ---------------------------------------------------------------------------
// Products and morphisms

FibredProduct fibred_product(const FinFunctor& h1, const FinFunctor& h2) {
  if (h1.target != h2.target && !(*h1.target == *h2.target)) {
    throw Error(ErrorCode::MismatchedBase, "cospan legs have different targets");
  }
  const auto& a = *h1.source;
  const auto& c = *h2.source;
  const auto& k = *h1.target;
  CategoryBuilder b;
  std::map<std::pair<int, int>, int> obj;
  std::vector<std::pair<Obj, Obj>> objs;
  for (Obj x : a.objects()) {
    for (Obj y : c.objects()) {
      if (h1(x) != h2(y)) continue;
      obj[{x.index, y.index}] = b.add_object(names::tuple("pr", {a.name(x), c.name(y)}));
      objs.emplace_back(x, y);
    }
  }
  // Group the second category's morphisms by their image to avoid a full square scan.
  std::vector<std::vector<Mor>> by_image(k.morphism_count());
  for (Mor n : c.morphisms()) by_image[h2(n).index].push_back(n);
  std::vector<std::pair<Mor, Mor>> mors;
  std::map<std::pair<int, int>, int> mor;
  for (Mor m : a.morphisms()) {
    for (Mor n : by_image[h1(m).index]) {
      int dom = obj.at({a.dom(m).index, c.dom(n).index});
      int cod = obj.at({a.cod(m).index, c.cod(n).index});
      int id = b.add_morphism(names::tuple("pr", {a.name(m), c.name(n)}), dom, cod);
      mor[{m.index, n.index}] = id;
      mors.emplace_back(m, n);
      if (a.is_identity(m) && c.is_identity(n)) b.set_identity(dom, id);
    }
  }
  auto built = b.build([&](int g, int f) {
    return mor.at({a.compose(mors[g].first, mors[f].first).index, c.compose(mors[g].second, mors[f].second).index});
  });
  FibredProduct r{built.category, {built.category, h1.source, {}, {}}, {built.category, h2.source, {}, {}}};
  r.first.objects.resize(objs.size());
  r.second.objects.resize(objs.size());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    r.first.objects[built.object[i].index] = objs[i].first;
    r.second.objects[built.object[i].index] = objs[i].second;
  }
  r.first.morphisms.resize(mors.size());
  r.second.morphisms.resize(mors.size());
  for (std::size_t i = 0; i < mors.size(); ++i) {
    r.first.morphisms[built.morphism[i].index] = mors[i].first;
    r.second.morphisms[built.morphism[i].index] = mors[i].second;
  }
  return r;
}

ProductFibration fibred_product(const Fibration& f, const Fibration& g) {
  if (f.base_ptr() != g.base_ptr() && !(f.base() == g.base())) {
    throw Error(ErrorCode::MismatchedBase, "fibrations over different bases");
  }
  auto prod = fibred_product(f.functor(), g.functor());
  const auto& pc = *prod.category;
  FinFunctor p = compose(f.functor(), prod.first);
  std::vector<CleavageEntry> cleavage;
  for (Obj x : pc.objects()) {
    Obj a = prod.first(x), c = prod.second(x);
    for (Mor s : f.base().in(p(x))) {
      auto la = f.try_lift(a, s);
      auto lc = g.try_lift(c, s);
      if (!la || !lc) continue;
      auto name = names::tuple("pr", {f.total().name(*la), g.total().name(*lc)});
      cleavage.push_back({x, s, pc.morphism(name)});
    }
  }
  bool split = f.marked_split() && g.marked_split();
  return {prod, Fibration(std::move(p), std::move(cleavage), split)};
}

Violations check_fibration_morphism(const Fibration& f, const Fibration& g, const FinFunctor& h) {
  Violations out;
  append(out, validate(h), "functor");
  const auto& e = f.total();
  for (Obj x : e.objects()) {
    if (g(h(x)) != f(x)) out.push_back({"over_base.object", e.name(x)});
  }
  for (Mor m : e.morphisms()) {
    if (g(h(m)) != f(m)) out.push_back({"over_base.morphism", e.name(m)});
  }
  for (Mor m : e.morphisms()) {
    if (f.is_cartesian(m) && !g.is_cartesian(h(m))) out.push_back({"preserves_cartesian", e.name(m)});
  }
  return out;
}

bool is_isomorphism(const FinFunctor& h) {
  const auto& s = *h.source;
  const auto& t = *h.target;
  if (s.object_count() != t.object_count() || s.morphism_count() != t.morphism_count()) return false;
  std::vector<bool> seen_o(t.object_count()), seen_m(t.morphism_count());
  for (Obj x : h.objects) {
    if (seen_o[x.index]) return false;
    seen_o[x.index] = true;
  }
  for (Mor m : h.morphisms) {
    if (seen_m[m.index]) return false;
    seen_m[m.index] = true;
  }
  return validate(h).empty();
}

}  // namespace subfib
