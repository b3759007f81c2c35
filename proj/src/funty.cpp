#include "subfib/funty.hpp"

#include <map>
#include <set>

#include "subfib/names.hpp"

namespace subfib {

namespace {

// All arrows x → y lying over σ.
std::vector<Mor> arrows_over(const Fibration& p, Obj x, Obj y, Mor sigma) {
  std::vector<Mor> out;
  for (Mor m : p.total().hom(x, y)) {
    if (p(m) == sigma) out.push_back(m);
  }
  return out;
}

std::optional<Mor> inverse(const FinCategory& c, Mor m) {
  for (Mor i : c.hom(c.cod(m), c.dom(m))) {
    if (c.compose(m, i) == c.identity(c.cod(m)) && c.compose(i, m) == c.identity(c.dom(m))) return i;
  }
  return std::nullopt;
}

Obj context_of(const Gcwf& g, Obj type) { return context_extension(g, type).context; }

void build_corners(FunStructure& fs) {
  const Gcwf& g = fs.owner;
  const auto& U = g.types();
  const auto& B = *g.base;
  fs.vop = vertical_opposite(g.u);
  const auto& V = fs.vop.total();
  for (Obj x : V.objects()) fs.vop_type.push_back(U.object(names::decode(V.name(x)).parts.at(1)));

  fs.ext = FinFunctor{fs.vop.total_ptr(), g.base, {}, {}};
  for (Obj x : V.objects()) fs.ext.objects.push_back(context_of(g, fs.vop_type[x.index]));
  for (Mor m : V.morphisms()) {
    auto parts = names::decode(V.name(m)).parts;
    Mor sigma = B.morphism(parts.at(0));
    Mor v = U.morphism(parts.at(1));  // σ*A → A' in U
    Obj a = U.object(parts.at(2));
    Mor s = g.u.cartesian_lift(a, sigma);
    Mor dv = g.udot(g.delta(v));
    auto inv = inverse(B, dv);
    if (!inv) {
      throw Error(ErrorCode::MalformedEntity,
                  "context extension is not invariant under the vertical arrow " + U.name(v));
    }
    fs.ext.morphisms.push_back(B.compose(g.udot(g.delta(s)), *inv));
  }
  Violations bad = validate(fs.ext);
  if (!bad.empty()) throw Error(ErrorCode::MalformedEntity, "extension on u^vop: " + bad.front().check);

  fs.pairs = fibred_product(fs.vop, g.u);
  fs.weakened = fibred_product(fs.ext, g.u.functor());
  fs.typed_terms = fibred_product(fs.ext, g.udot.functor());

  const auto& D = *fs.pairs.product.category;
  const auto& W = *fs.weakened.category;
  const auto& X = *fs.typed_terms.category;
  const auto& d1 = fs.pairs.product.first;
  const auto& d2 = fs.pairs.product.second;

  fs.w = FinFunctor{fs.pairs.product.category, fs.weakened.category, {}, {}};
  for (Obj d : D.objects()) {
    Obj x = d1(d);
    Obj b = g.u.reindex(d2(d), context_extension(g, fs.vop_type[x.index]).projection);
    fs.w.objects.push_back(W.object(names::tuple("pr", {V.name(x), U.name(b)})));
  }
  for (Mor m : D.morphisms()) {
    Mor alpha = d1(m), beta = d2(m);
    Obj src = D.dom(m), tgt = D.cod(m);
    Mor p_src = context_extension(g, fs.vop_type[d1(src).index]).projection;
    Mor p_tgt = context_extension(g, fs.vop_type[d1(tgt).index]).projection;
    Mor l_src = g.u.cartesian_lift(d2(src), p_src);
    Mor l_tgt = g.u.cartesian_lift(d2(tgt), p_tgt);
    Mor target = U.compose(beta, l_src);
    std::optional<Mor> filler;
    for (Mor k : arrows_over(g.u, U.dom(l_src), U.dom(l_tgt), fs.ext(alpha))) {
      if (U.compose(l_tgt, k) == target) {
        filler = k;
        break;
      }
    }
    if (!filler) {
      throw Error(ErrorCode::MalformedEntity, "weakening undefined on " + D.name(m));
    }
    fs.w.morphisms.push_back(W.morphism(names::tuple("pr", {V.name(alpha), U.name(*filler)})));
  }

  const auto& t1 = fs.typed_terms.first;
  const auto& t2 = fs.typed_terms.second;
  fs.id_sigma = FinFunctor{fs.typed_terms.category, fs.weakened.category, {}, {}};
  for (Obj x : X.objects()) {
    fs.id_sigma.objects.push_back(W.object(names::tuple("pr", {V.name(t1(x)), U.name(g.sigma(t2(x)))})));
  }
  for (Mor m : X.morphisms()) {
    fs.id_sigma.morphisms.push_back(W.morphism(names::tuple("pr", {V.name(t1(m)), U.name(g.sigma(t2(m)))})));
  }
  fs.abstraction = fibred_product(fs.w, fs.id_sigma);
}

void build_fun(FunStructure& fs) {
  const Gcwf& g = fs.owner;
  const auto& U = g.types();
  const auto& D = *fs.pairs.product.category;
  std::map<std::pair<int, int>, Obj> table;
  for (const auto& e : fs.fun_table) table[{e.a.index, e.b.index}] = e.result;

  fs.fun = FinFunctor{fs.pairs.product.category, g.u.total_ptr(), {}, {}};
  for (Obj d : D.objects()) {
    Obj a = fs.vop_type[fs.pairs.product.first(d).index];
    Obj b = fs.pairs.product.second(d);
    auto it = table.find({a.index, b.index});
    if (it == table.end()) {
      fs.construction.push_back({"fun.object", "Fun(" + U.name(a) + ", " + U.name(b) + ") is not given"});
      fs.fun.objects.push_back(Obj{});
    } else {
      fs.fun.objects.push_back(it->second);
    }
  }
  for (Mor m : D.morphisms()) {
    Obj x = fs.fun(D.dom(m)), y = fs.fun(D.cod(m));
    if (!x.valid() || !y.valid()) {
      fs.fun.morphisms.push_back(Mor{});
      continue;
    }
    auto c = arrows_over(g.u, x, y, fs.pairs.fibration(m));
    if (c.size() != 1) {
      fs.construction.push_back({"fun.morphism", D.name(m) + " has " + std::to_string(c.size()) + " candidates"});
      fs.fun.morphisms.push_back(Mor{});
    } else {
      fs.fun.morphisms.push_back(c.front());
    }
  }
}

void build_lam(FunStructure& fs, const LamFunction& lam) {
  const Gcwf& g = fs.owner;
  const auto& U = g.types();
  const auto& P = *fs.abstraction.category;
  const auto& pd = fs.abstraction.first;
  const auto& px = fs.abstraction.second;
  fs.lam = FinFunctor{fs.abstraction.category, g.udot.total_ptr(), {}, {}};
  fs.lam_table.clear();
  for (Obj p : P.objects()) {
    Obj d = pd(p);
    Obj a = fs.vop_type[fs.pairs.product.first(d).index];
    Obj b = fs.pairs.product.second(d);
    Obj term = fs.typed_terms.second(px(p));
    auto r = lam(a, b, term);
    if (!r) {
      fs.construction.push_back(
          {"lam.object", "λ undefined at (" + U.name(a) + ", " + U.name(b) + ", " + g.terms().name(term) + ")"});
      fs.lam.objects.push_back(Obj{});
    } else {
      fs.lam.objects.push_back(*r);
      fs.lam_table.push_back({a, b, term, *r});
    }
  }
  for (Mor m : P.morphisms()) {
    Obj x = fs.lam(P.dom(m)), y = fs.lam(P.cod(m));
    if (!x.valid() || !y.valid()) {
      fs.lam.morphisms.push_back(Mor{});
      continue;
    }
    auto c = arrows_over(g.udot, x, y, fs.pairs.fibration(pd(m)));
    if (c.size() != 1) {
      fs.construction.push_back({"lam.morphism", P.name(m) + " has " + std::to_string(c.size()) + " candidates"});
      fs.lam.morphisms.push_back(Mor{});
    } else {
      fs.lam.morphisms.push_back(c.front());
    }
  }
}

bool complete(const FinFunctor& f) {
  for (Obj x : f.objects) {
    if (!x.valid()) return false;
  }
  for (Mor m : f.morphisms) {
    if (!m.valid()) return false;
  }
  return true;
}

// Fiberwise order of a faithful fibration: x ≤ y iff a vertical x → y exists.
struct FiberOrder {
  const Fibration& p;
  bool leq(Obj x, Obj y) const {
    return p(x) == p(y) && !arrows_over(p, x, y, p.base().identity(p(x))).empty();
  }
  std::optional<Obj> greatest(Obj gamma, const std::function<bool(Obj)>& pred) const {
    std::optional<Obj> best;
    for (Obj z : p.objects_over(gamma)) {
      if (!pred(z)) continue;
      if (!best || leq(*best, z)) best = z;
    }
    if (!best) return std::nullopt;
    for (Obj z : p.objects_over(gamma)) {
      if (pred(z) && !leq(z, *best)) return std::nullopt;
    }
    return best;
  }
};

}  // namespace

WeakeningData weakening_functor(const Gcwf& g) {
  const auto& U = g.types();
  FinFunctor ext = compose(g.udot.functor(), g.delta);
  WeakeningData wd{fibred_product(g.u.functor(), g.u.functor()), fibred_product(ext, g.u.functor()), {}};
  const auto& D = *wd.pairs.category;
  const auto& W = *wd.weakened.category;
  const auto& d1 = wd.pairs.first;
  const auto& d2 = wd.pairs.second;
  wd.w = FinFunctor{wd.pairs.category, wd.weakened.category, {}, {}};
  for (Obj d : D.objects()) {
    Obj b = g.u.reindex(d2(d), context_extension(g, d1(d)).projection);
    wd.w.objects.push_back(W.object(names::tuple("pr", {U.name(d1(d)), U.name(b)})));
  }
  for (Mor m : D.morphisms()) {
    Obj src = D.dom(m), tgt = D.cod(m);
    Mor l_src = g.u.cartesian_lift(d2(src), context_extension(g, d1(src)).projection);
    Mor l_tgt = g.u.cartesian_lift(d2(tgt), context_extension(g, d1(tgt)).projection);
    Mor target = U.compose(d2(m), l_src);
    std::optional<Mor> filler;
    for (Mor k : arrows_over(g.u, U.dom(l_src), U.dom(l_tgt), ext(d1(m)))) {
      if (U.compose(l_tgt, k) == target) {
        filler = k;
        break;
      }
    }
    if (!filler) throw Error(ErrorCode::NoLift, "weakening undefined on " + D.name(m));
    wd.w.morphisms.push_back(W.morphism(names::tuple("pr", {U.name(d1(m)), U.name(*filler)})));
  }
  return wd;
}

FunStructure make_fun_structure(const Gcwf& g, std::vector<FunEntry> fun, const LamFunction& lam) {
  FunStructure fs{.owner = g,
                  .vop = g.u,
                  .vop_type = {},
                  .ext = {},
                  .pairs = {{}, g.u},
                  .weakened = {},
                  .typed_terms = {},
                  .w = {},
                  .id_sigma = {},
                  .abstraction = {},
                  .fun = {},
                  .lam = {},
                  .fun_table = std::move(fun),
                  .lam_table = {},
                  .construction = {}};
  build_corners(fs);
  build_fun(fs);
  build_lam(fs, lam);
  return fs;
}

FunStructure make_fun_structure(const Gcwf& g, std::vector<FunEntry> fun, const std::vector<LamEntry>& lam) {
  std::map<std::array<int, 3>, Obj> table;
  for (const auto& e : lam) table[{e.a.index, e.b.index, e.term.index}] = e.result;
  return make_fun_structure(g, std::move(fun), [&](Obj a, Obj b, Obj t) -> std::optional<Obj> {
    auto it = table.find({a.index, b.index, t.index});
    if (it == table.end()) return std::nullopt;
    return it->second;
  });
}

FunStructure doctrine_fun_structure(const Gcwf& g) {
  const auto& U = g.types();
  const auto& B = *g.base;
  FiberOrder ord{g.u};
  std::vector<FunEntry> fun;
  std::map<std::pair<int, int>, Obj> imp;
  for (Obj gamma : B.objects()) {
    auto over = g.u.objects_over(gamma);
    for (Obj a : over) {
      for (Obj b : over) {
        auto r = ord.greatest(gamma, [&](Obj c) {
          auto m = ord.greatest(gamma, [&](Obj z) { return ord.leq(z, c) && ord.leq(z, a); });
          return m && ord.leq(*m, b);
        });
        if (!r) throw Error(ErrorCode::MalformedEntity, "no implication " + U.name(a) + " => " + U.name(b));
        fun.push_back({a, b, *r});
        imp[{a.index, b.index}] = *r;
      }
    }
  }
  const auto& T = g.terms();
  return make_fun_structure(g, std::move(fun), [&](Obj a, Obj b, Obj t) -> std::optional<Obj> {
    Obj gamma = g.u(a);
    if (context_of(g, a) != gamma) return std::nullopt;
    // a term is a vertical arrow ψ → χ, named as that arrow
    Mor v = U.morphism(T.name(t));
    auto c = arrows_over(g.u, U.dom(v), imp.at({a.index, b.index}), B.identity(gamma));
    if (c.size() != 1) return std::nullopt;
    return T.find_object(U.name(c.front()));
  });
}

FunStructure subobject_fun_structure(const Gcwf& g) {
  const auto& U = g.types();
  std::vector<FunEntry> fun;
  auto values = [&](Obj x) {
    const auto& n = U.name(x);
    auto open = n.find('[');
    return n.substr(open + 1, n.size() - open - 2);
  };
  for (Obj gamma : g.base->objects()) {
    auto over = g.u.objects_over(gamma);
    int m = std::stoi(g.base->name(gamma));
    for (Obj a : over) {
      for (Obj b : over) {
        auto va = values(a), vb = values(b);
        std::vector<int> r;
        for (int i = 0; i < m; ++i) r.push_back(va[i] == '1' && vb[i] == '0' ? 0 : 1);
        auto name = std::to_string(m) + "->2[";
        for (int x : r) name += std::to_string(x);
        fun.push_back({a, b, U.object(name + "]")});
      }
    }
  }
  // terms are the contexts themselves
  return make_fun_structure(g, std::move(fun), [&](Obj a, Obj, Obj) -> std::optional<Obj> {
    return g.terms().find_object(g.base->name(g.u(a)));
  });
}

FunReport check_fun_structure(const FunStructure& fs) {
  FunReport r;
  const Gcwf& g = fs.owner;
  const auto& D = *fs.pairs.product.category;
  for (const auto& v : fs.construction) {
    if (v.check.starts_with("fun.")) r.stage1.push_back(v);
  }
  if (complete(fs.fun)) {
    append(r.stage1, validate(fs.fun), "fun");
    for (Obj d : D.objects()) {
      if (g.u(fs.fun(d)) != fs.pairs.fibration(d)) r.stage1.push_back({"fun.over_base", D.name(d)});
    }
    for (Mor m : D.morphisms()) {
      if (g.u(fs.fun(m)) != fs.pairs.fibration(m)) r.stage1.push_back({"fun.over_base", D.name(m)});
    }
  }
  if (!r.stage1.empty()) {
    r.stage2.push_back({"stage2.blocked", "Fun is not a functor over the base"});
    return r;
  }

  for (const auto& v : fs.construction) {
    if (v.check.starts_with("lam.")) r.stage2.push_back(v);
  }
  if (!complete(fs.lam)) return r;
  const auto& P = *fs.abstraction.category;
  const auto& pd = fs.abstraction.first;
  append(r.stage2, validate(fs.lam), "lam");
  for (Obj p : P.objects()) {
    if (g.udot(fs.lam(p)) != fs.pairs.fibration(pd(p))) r.stage2.push_back({"lam.over_base", P.name(p)});
    if (g.sigma(fs.lam(p)) != fs.fun(pd(p))) r.stage2.push_back({"square.commutes", P.name(p)});
  }
  for (Mor m : P.morphisms()) {
    if (g.udot(fs.lam(m)) != fs.pairs.fibration(pd(m))) r.stage2.push_back({"lam.over_base", P.name(m)});
    if (g.sigma(fs.lam(m)) != fs.fun(pd(m))) r.stage2.push_back({"square.commutes", P.name(m)});
  }
  if (!r.stage2.empty()) return r;

  // The comparison P → D ×_{Fun, Σ} U̇ must be bijective on objects and arrows.
  auto q = fibred_product(fs.fun, g.sigma);
  const auto& Q = *q.category;
  const auto& T = g.terms();
  std::vector<int> hit_obj(Q.object_count(), 0), hit_mor(Q.morphism_count(), 0);
  for (Obj p : P.objects()) {
    auto x = Q.find_object(names::tuple("pr", {D.name(pd(p)), T.name(fs.lam(p))}));
    if (x) ++hit_obj[x->index];
  }
  for (Mor m : P.morphisms()) {
    auto x = Q.find_morphism(names::tuple("pr", {D.name(pd(m)), T.name(fs.lam(m))}));
    if (x) ++hit_mor[x->index];
  }
  for (Obj x : Q.objects()) {
    if (hit_obj[x.index] == 0) {
      r.stage2.push_back({"pullback.surjective", Q.name(x)});
    } else if (hit_obj[x.index] > 1) {
      r.stage2.push_back({"pullback.injective", Q.name(x)});
    }
  }
  for (Mor m : Q.morphisms()) {
    if (hit_mor[m.index] == 0) {
      r.stage2.push_back({"pullback.surjective", Q.name(m)});
    } else if (hit_mor[m.index] > 1) {
      r.stage2.push_back({"pullback.injective", Q.name(m)});
    }
  }
  return r;
}

SubtypeJ derive_fun_subtyping(const FunStructure& fs, const SubtypeJ& st1, const SubtypeJ& st2) {
  const Gcwf& g = fs.owner;
  if (!check_judgement(g, st1).empty() || !check_judgement(g, st2).empty()) {
    throw Error(ErrorCode::MismatchedJudgements, "premise is not derivable");
  }
  if (st1.ctx != st2.ctx) throw Error(ErrorCode::MismatchedJudgements, "premises in different contexts");
  const auto& U = g.types();
  const auto& B = *g.base;
  // f: A' → A seen in u^vop as an arrow A → A' over the identity
  auto alpha = fs.vop.total().find_morphism(
      names::tuple("", {B.name(B.identity(st1.ctx)), U.name(st1.witness), U.name(st1.sub)}));
  if (!alpha) throw Error(ErrorCode::MalformedEntity, "no vertical-opposite arrow for " + U.name(st1.witness));
  Mor m = fs.pairs.product.category->morphism(
      names::tuple("pr", {fs.vop.total().name(*alpha), U.name(st2.witness)}));
  Mor w = fs.fun(m);
  if (!w.valid()) throw Error(ErrorCode::MalformedEntity, "Fun undefined on " + fs.pairs.product.category->name(m));
  const auto& D = *fs.pairs.product.category;
  return SubtypeJ{st1.ctx, w, fs.fun(D.dom(m)), fs.fun(D.cod(m))};
}

CoercedTermJ derive_lam_typing(const FunStructure& fs, Obj a, const CoercedTermJ& bt, Obj b) {
  const Gcwf& g = fs.owner;
  auto report = check_fun_structure(fs);
  if (!report.stage1.empty() || !report.stage2.empty()) {
    throw Error(ErrorCode::StageTwoUnavailable, "λ-abstraction needs the pullback property");
  }
  const auto& U = g.types();
  const auto& B = *g.base;
  Obj gamma = g.u(a);
  if (g.u(b) != gamma) throw Error(ErrorCode::MismatchedJudgements, "A and B live in different contexts");
  auto ext = context_extension(g, a);
  if (!check_judgement(g, bt).empty()) throw Error(ErrorCode::MismatchedJudgements, "premise is not derivable");
  if (bt.ctx != ext.context || bt.type != g.u.reindex(b, ext.projection)) {
    throw Error(ErrorCode::MismatchedJudgements, "premise is not over the extension by A");
  }
  Obj sb = g.sigma(bt.term);
  const auto& V = fs.vop.total();
  const auto& D = *fs.pairs.product.category;
  const auto& P = *fs.abstraction.category;
  const auto& X = *fs.typed_terms.category;
  Obj va = V.object(names::tuple("", {B.name(gamma), U.name(a)}));
  for (Obj c : g.u.objects_over(gamma)) {
    if (g.u.reindex(c, ext.projection) != sb) continue;
    for (Mor f0 : arrows_over(g.u, c, b, B.identity(gamma))) {
      if (g.u.reindex_vertical(f0, ext.projection) != bt.witness) continue;
      Obj d = D.object(names::tuple("pr", {V.name(va), U.name(c)}));
      Obj x = X.object(names::tuple("pr", {V.name(va), g.terms().name(bt.term)}));
      Obj p = P.object(names::tuple("pr", {D.name(d), X.name(x)}));
      Mor dm = D.morphism(names::tuple("pr", {V.name(V.identity(va)), U.name(f0)}));
      Obj fun_b = fs.fun(D.object(names::tuple("pr", {V.name(va), U.name(b)})));
      return CoercedTermJ{gamma, fs.lam(p), fs.fun(dm), fun_b};
    }
  }
  throw Error(ErrorCode::MismatchedJudgements, "coercion is not a weakened vertical arrow");
}

}  // namespace subfib
