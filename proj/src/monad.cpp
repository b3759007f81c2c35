#include "subfib/monad.hpp"

#include <cstdlib>
#include <set>

#include "subfib/names.hpp"

namespace subfib {

std::optional<Obj> CommaFibration::object_of(Obj c, Mor g) const {
  auto it = object_index.find({c.index, g.index});
  if (it == object_index.end()) return std::nullopt;
  return Obj{it->second};
}

std::optional<Mor> CommaFibration::square(Obj x, Obj y, Mor m, Mor n) const {
  auto it = square_index.find({x.index, y.index, m.index, n.index});
  if (it == square_index.end()) return std::nullopt;
  return Mor{it->second};
}

namespace {

Obj must(std::optional<Obj> x, const char* what) {
  if (!x) throw Error(ErrorCode::MalformedEntity, std::string("missing object: ") + what);
  return *x;
}

Mor must(std::optional<Mor> m, const char* what) {
  if (!m) throw Error(ErrorCode::MalformedEntity, std::string("missing morphism: ") + what);
  return *m;
}

}  // namespace

CommaFibration comma(const Fibration& source, const FinFunctor& along, const Fibration& p, std::size_t max_objects) {
  const auto& C = source.total();
  const auto& E = p.total();
  const bool plain = source.total_ptr() == p.total_ptr() && along == FinFunctor::identity(p.total_ptr());

  struct Triple {
    Obj c;
    Mor g;
  };
  std::vector<Triple> objs;
  for (Obj c : C.objects()) {
    for (Mor g : E.out(along(c))) {
      if (p.is_vertical(g)) objs.push_back({c, g});
    }
  }
  if (max_objects && objs.size() > max_objects) {
    throw Error(ErrorCode::TooLarge, "comma category would have " + std::to_string(objs.size()) + " objects (bound " +
                                         std::to_string(max_objects) + ")");
  }
  CategoryBuilder b;
  std::vector<std::string> obj_names;
  std::vector<std::vector<int>> by_source(C.object_count());
  for (int i = 0; i < static_cast<int>(objs.size()); ++i) {
    const auto& t = objs[i];
    obj_names.push_back(plain ? E.name(t.g) : names::tuple("ct", {C.name(t.c), E.name(t.g)}));
    b.add_object(obj_names.back());
    by_source[t.c.index].push_back(i);
  }
  struct Sq {
    int x, y;
    Mor m, n;
  };
  std::vector<Sq> sqs;
  std::map<std::array<int, 4>, int> lookup;
  for (int x = 0; x < static_cast<int>(objs.size()); ++x) {
    const auto& X = objs[x];
    for (Mor m : C.out(X.c)) {
      Mor fm = along(m);
      for (int y : by_source[C.cod(m).index]) {
        const auto& Y = objs[y];
        Mor gfm = E.compose(Y.g, fm);
        for (Mor n : E.hom(E.cod(X.g), E.cod(Y.g))) {
          if (E.compose(n, X.g) != gfm) continue;
          int id = b.add_morphism(names::tuple("sq", {obj_names[x], obj_names[y], C.name(m), E.name(n)}), x, y);
          sqs.push_back({x, y, m, n});
          lookup[{x, y, m.index, n.index}] = id;
          if (x == y && C.is_identity(m) && E.is_identity(n)) b.set_identity(x, id);
        }
      }
    }
  }
  auto built = b.build([&](int g, int f) {
    const auto& F = sqs[f];
    const auto& G = sqs[g];
    return lookup.at({F.x, G.y, C.compose(G.m, F.m).index, E.compose(G.n, F.n).index});
  });
  const auto& K = *built.category;

  FinFunctor proj{built.category, source.base_ptr(), {}, {}};
  FinFunctor first{built.category, source.total_ptr(), {}, {}};
  FinFunctor second{built.category, p.total_ptr(), {}, {}};
  proj.objects.resize(K.object_count());
  first.objects.resize(K.object_count());
  second.objects.resize(K.object_count());
  std::vector<Mor> arrow(K.object_count());
  std::map<std::array<int, 2>, int> object_index;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    Obj o = built.object[i];
    proj.objects[o.index] = source(objs[i].c);
    first.objects[o.index] = objs[i].c;
    second.objects[o.index] = E.cod(objs[i].g);
    arrow[o.index] = objs[i].g;
    object_index[{objs[i].c.index, objs[i].g.index}] = o.index;
  }
  proj.morphisms.resize(K.morphism_count());
  first.morphisms.resize(K.morphism_count());
  second.morphisms.resize(K.morphism_count());
  std::map<std::array<int, 4>, int> square_index;
  for (std::size_t i = 0; i < sqs.size(); ++i) {
    Mor k = built.morphism[i];
    proj.morphisms[k.index] = source(sqs[i].m);
    first.morphisms[k.index] = sqs[i].m;
    second.morphisms[k.index] = sqs[i].n;
    square_index[{built.object[sqs[i].x].index, built.object[sqs[i].y].index, sqs[i].m.index, sqs[i].n.index}] =
        k.index;
  }

  // Chosen lifts, pairwise: (l_c, l_A) from (g', σ*c, σ*A) with l_A ∘ g' = g ∘ F(l_c).
  std::vector<CleavageEntry> cleavage;
  const auto& B = source.base();
  for (Obj x : K.objects()) {
    Obj c = first(x);
    Obj a = second(x);
    Mor g = arrow[x.index];
    for (Mor s : B.in(proj(x))) {
      auto lc = source.try_lift(c, s);
      auto la = p.try_lift(a, s);
      if (!lc || !la) continue;
      Mor target = E.compose(g, along(*lc));
      std::optional<Mor> g2;
      for (Mor v : E.hom(along(C.dom(*lc)), E.dom(*la))) {
        if (p.is_vertical(v) && E.compose(*la, v) == target) {
          g2 = v;
          break;
        }
      }
      if (!g2) continue;
      auto y = object_index.find({C.dom(*lc).index, g2->index});
      auto sq = square_index.find({y->second, x.index, lc->index, la->index});
      cleavage.push_back({x, s, Mor{sq->second}});
    }
  }
  bool split = source.marked_split() && p.marked_split();
  CommaFibration r{source, p, along, Fibration(std::move(proj), std::move(cleavage), split), std::move(first),
                   std::move(second), std::move(arrow), std::move(object_index), std::move(square_index)};
  return r;
}

CommaFibration T_fib(const Fibration& p, std::size_t max_objects) {
  return comma(p, FinFunctor::identity(p.total_ptr()), p, max_objects);
}

namespace {

// The functor between comma categories induced by maps on both legs.
FinFunctor comma_map(const CommaFibration& a, const CommaFibration& b, const FinFunctor& on_source,
                     const FinFunctor& on_target) {
  const auto& K = a.category();
  FinFunctor h{a.fibration.total_ptr(), b.fibration.total_ptr(), {}, {}};
  for (Obj x : K.objects()) {
    h.objects.push_back(must(b.object_of(on_source(a.first(x)), on_target(a.arrow[x.index])), "comma image"));
  }
  for (Mor m : K.morphisms()) {
    h.morphisms.push_back(must(b.square(h(K.dom(m)), h(K.cod(m)), on_source(a.first(m)), on_target(a.second(m))),
                               "comma square image"));
  }
  return h;
}

void compare_functors(Violations& out, const std::string& law, const FinFunctor& l, const FinFunctor& r) {
  const auto& S = *l.source;
  const auto& T = *l.target;
  for (Obj x : S.objects()) {
    if (l(x) != r(x)) out.push_back({law, S.name(x) + ": " + T.name(l(x)) + " vs " + T.name(r(x))});
  }
  for (Mor m : S.morphisms()) {
    if (l(m) != r(m)) out.push_back({law, S.name(m) + ": " + T.name(l(m)) + " vs " + T.name(r(m))});
  }
}

}  // namespace

FinFunctor T_fib(const CommaFibration& tp, const CommaFibration& tq, const FinFunctor& h) {
  return comma_map(tp, tq, h, h);
}

FinFunctor monad_unit(const CommaFibration& tp) {
  const auto& E = tp.target.total();
  FinFunctor h{tp.target.total_ptr(), tp.fibration.total_ptr(), {}, {}};
  for (Obj a : E.objects()) h.objects.push_back(must(tp.object_of(a, E.identity(a)), "identity arrow"));
  for (Mor m : E.morphisms()) {
    h.morphisms.push_back(must(tp.square(h(E.dom(m)), h(E.cod(m)), m, m), "identity square"));
  }
  return h;
}

FinFunctor monad_mult(const CommaFibration& ttp, const CommaFibration& tp) {
  const auto& E = tp.target.total();
  const auto& TT = ttp.category();
  FinFunctor h{ttp.fibration.total_ptr(), tp.fibration.total_ptr(), {}, {}};
  for (Obj x : TT.objects()) {
    Mor sq = ttp.arrow[x.index];  // vertical square in Tp from f to f'
    Mor f = tp.arrow[ttp.first(x).index];
    Mor diag = E.compose(tp.second(sq), f);
    h.objects.push_back(must(tp.object_of(E.dom(diag), diag), "composite arrow"));
  }
  for (Mor m : TT.morphisms()) {
    Mor top = tp.first(ttp.first(m));
    Mor bottom = tp.second(ttp.second(m));
    h.morphisms.push_back(must(tp.square(h(TT.dom(m)), h(TT.cod(m)), top, bottom), "composite square"));
  }
  return h;
}

Violations check_monad_laws_fib(const Fibration& p, std::size_t max_objects) {
  Violations out;
  if (!classify(p).is_fibration) throw Error(ErrorCode::NotAFibration, "functor has missing cartesian lifts");
  auto tp = T_fib(p, max_objects);
  auto ttp = T_fib(tp.fibration, max_objects);
  auto tttp = T_fib(ttp.fibration, max_objects);
  auto eta = monad_unit(tp);
  auto mu = monad_mult(ttp, tp);
  append(out, check_fibration_morphism(p, tp.fibration, eta), "unit");
  append(out, check_fibration_morphism(ttp.fibration, tp.fibration, mu), "mult");
  auto id = FinFunctor::identity(tp.fibration.total_ptr());
  compare_functors(out, "unit.left", compose(mu, T_fib(tp, ttp, eta)), id);
  compare_functors(out, "unit.right", compose(mu, monad_unit(ttp)), id);
  compare_functors(out, "associativity", compose(mu, T_fib(tttp, ttp, mu)), compose(mu, monad_mult(tttp, ttp)));
  return out;
}

// ---------------------------------------------------------------------------
// Lifting to gcwfs

GcwfMonadData T_gcwf(const Gcwf& g, TGcwfOptions options) {
  const auto& U = g.types();
  const auto& T = g.terms();
  auto types = T_fib(g.u, options.max_objects);
  auto terms = comma(g.udot, g.sigma, g.u, options.max_objects);
  const auto& TU = types.category();
  const auto& TT = terms.category();

  FinFunctor sbar{terms.fibration.total_ptr(), types.fibration.total_ptr(), {}, {}};
  for (Obj x : TT.objects()) {
    Mor a = terms.arrow[x.index];
    sbar.objects.push_back(must(types.object_of(U.dom(a), a), "sigma-bar object"));
  }
  for (Mor m : TT.morphisms()) {
    sbar.morphisms.push_back(must(
        types.square(sbar(TT.dom(m)), sbar(TT.cod(m)), g.sigma(terms.first(m)), terms.second(m)), "sigma-bar square"));
  }

  GcwfMorphism unit;
  unit.h = monad_unit(types);
  unit.hdot = FinFunctor{g.udot.total_ptr(), terms.fibration.total_ptr(), {}, {}};
  for (Obj a : T.objects()) {
    unit.hdot.objects.push_back(must(terms.object_of(a, U.identity(g.sigma(a))), "unit term"));
  }
  for (Mor m : T.morphisms()) {
    unit.hdot.morphisms.push_back(
        must(terms.square(unit.hdot(T.dom(m)), unit.hdot(T.cod(m)), m, g.sigma(m)), "unit term square"));
  }

  Gcwf result{g.base, types.fibration, terms.fibration, sbar, {}, {}, {}};
  if (options.structure_only) return {std::move(result), std::move(types), std::move(terms), std::move(unit)};

  // Δ̄(f) = (Σ(Δf)^v, ΔA', Σ a_f).
  std::vector<Factorization> fac(TU.object_count());
  FinFunctor dbar{types.fibration.total_ptr(), terms.fibration.total_ptr(), {}, {}};
  for (Obj x : TU.objects()) {
    Mor f = types.arrow[x.index];
    fac[x.index] = g.udot.factorize(g.delta(f));
    Mor v = fac[x.index].vertical;
    dbar.objects.push_back(must(terms.object_of(T.dom(v), g.sigma(v)), "delta-bar object"));
  }
  for (Mor q : TU.morphisms()) {
    Obj x = TU.dom(q), y = TU.cod(q);
    Mor dx = g.delta(types.first(q));
    Mor dy = g.delta(types.second(q));
    Mor c1 = fac[x.index].cartesian, c2 = fac[y.index].cartesian;
    Mor target = T.compose(dy, c1);
    std::optional<Mor> k;
    for (Mor cand : T.hom(T.dom(c1), T.dom(c2))) {
      if (g.udot(cand) == g.udot(dx) && T.compose(c2, cand) == target) {
        k = cand;
        break;
      }
    }
    if (!k) throw Error(ErrorCode::NoLift, "no cartesian filler for " + TU.name(q));
    dbar.morphisms.push_back(must(terms.square(dbar(x), dbar(y), dx, g.sigma(*k)), "delta-bar square"));
  }

  NatTransformation eps{compose(sbar, dbar), FinFunctor::identity(types.fibration.total_ptr()), {}};
  for (Obj x : TU.objects()) {
    Mor f = types.arrow[x.index];
    Mor bottom = U.compose(g.eps[U.cod(f)], g.sigma(fac[x.index].cartesian));
    eps.components.push_back(must(types.square(sbar(dbar(x)), x, g.eps[U.dom(f)], bottom), "counit square"));
  }

  NatTransformation eta{FinFunctor::identity(terms.fibration.total_ptr()), compose(dbar, sbar), {}};
  for (Obj t : TT.objects()) {
    Obj a = terms.first(t);
    Obj A = terms.second(t);
    Obj target = dbar(sbar(t));
    Obj sa_g = terms.second(target);
    Mor cart = U.compose(g.eps[A], g.sigma(fac[sbar(t).index].cartesian));
    Mor over = g.udot(g.eta[a]);
    std::optional<Mor> n;
    for (Mor cand : U.hom(A, sa_g)) {
      if (g.u(cand) == over && U.compose(cart, cand) == U.identity(A)) {
        n = cand;
        break;
      }
    }
    if (!n) throw Error(ErrorCode::NoLift, "no unit filler for " + TT.name(t));
    eta.components.push_back(must(terms.square(t, target, g.eta[a], *n), "unit square"));
  }
  result.delta = std::move(dbar);
  result.eta = std::move(eta);
  result.eps = std::move(eps);
  return {std::move(result), std::move(types), std::move(terms), std::move(unit)};
}

GcwfMorphism monad_mult(const GcwfMonadData& ttg, const GcwfMonadData& tg) {
  GcwfMorphism mu;
  mu.h = monad_mult(ttg.types, tg.types);
  const auto& U = tg.types.target.total();
  const auto& K = ttg.terms.category();
  mu.hdot = FinFunctor{ttg.terms.fibration.total_ptr(), tg.terms.fibration.total_ptr(), {}, {}};
  for (Obj x : K.objects()) {
    Obj t = ttg.terms.first(x);
    Mor sq = ttg.terms.arrow[x.index];  // vertical square from Σ̄t = g to f
    Mor f = tg.types.arrow[ttg.terms.second(x).index];
    Mor diag = U.compose(f, tg.types.first(sq));
    mu.hdot.objects.push_back(must(tg.terms.object_of(tg.terms.first(t), diag), "composite term"));
  }
  for (Mor m : K.morphisms()) {
    Mor top = tg.terms.first(ttg.terms.first(m));
    Mor bottom = tg.types.second(ttg.terms.second(m));
    mu.hdot.morphisms.push_back(
        must(tg.terms.square(mu.hdot(K.dom(m)), mu.hdot(K.cod(m)), top, bottom), "composite term square"));
  }
  return mu;
}

GcwfMorphism T_morphism(const GcwfMonadData& tg, const GcwfMonadData& tg2, const GcwfMorphism& m) {
  return {comma_map(tg.types, tg2.types, m.h, m.h), comma_map(tg.terms, tg2.terms, m.hdot, m.h)};
}

Violations check_counit_universal(const GcwfMonadData& tg) {
  Violations out;
  const auto& g = tg.result;
  const auto& TU = g.types();
  const auto& TT = g.terms();
  for (Obj t : TT.objects()) {
    for (Obj f : TU.objects()) {
      auto tests = TU.hom(g.sigma(t), f);
      std::set<int> reached;
      std::size_t mediators = 0;
      for (Mor mn : TT.hom(t, g.delta(f))) {
        ++mediators;
        Mor img = TU.compose(g.eps[f], g.sigma(mn));
        if (!reached.insert(img.index).second) {
          out.push_back({"counit.unique", TT.name(t) + " -> " + TU.name(f) + " via " + TU.name(img)});
        }
      }
      if (reached.size() != tests.size()) {
        out.push_back({"counit.exists", TT.name(t) + " -> " + TU.name(f) + ": " + std::to_string(tests.size()) +
                                            " test pairs, " + std::to_string(reached.size()) + " mediated"});
      }
      (void)mediators;
    }
  }
  return out;
}

Violations check_monad_laws_gcwf(const Gcwf& g, std::size_t max_objects) {
  Violations out;
  auto tg = T_gcwf(g, {.structure_only = false, .max_objects = max_objects});
  auto ttg = T_gcwf(tg.result, {.structure_only = true, .max_objects = max_objects});
  auto tttg = T_gcwf(ttg.result, {.structure_only = true, .max_objects = max_objects});
  auto mu = monad_mult(ttg, tg);
  append(out, check_gcwf_morphism(g, tg.result, tg.unit), "unit");
  append(out, check_gcwf_morphism(ttg.result, tg.result, mu), "mult");
  auto t_eta = T_morphism(tg, ttg, tg.unit);
  auto t_mu = T_morphism(tttg, ttg, mu);
  auto mu_t = monad_mult(tttg, ttg);
  auto id_types = FinFunctor::identity(tg.result.u.total_ptr());
  auto id_terms = FinFunctor::identity(tg.result.udot.total_ptr());
  compare_functors(out, "unit.left.types", compose(mu.h, t_eta.h), id_types);
  compare_functors(out, "unit.left.terms", compose(mu.hdot, t_eta.hdot), id_terms);
  compare_functors(out, "unit.right.types", compose(mu.h, ttg.unit.h), id_types);
  compare_functors(out, "unit.right.terms", compose(mu.hdot, ttg.unit.hdot), id_terms);
  compare_functors(out, "associativity.types", compose(mu.h, t_mu.h), compose(mu.h, mu_t.h));
  compare_functors(out, "associativity.terms", compose(mu.hdot, t_mu.hdot), compose(mu.hdot, mu_t.hdot));
  return out;
}

std::size_t default_max_objects() {
  if (const char* env = std::getenv("SUBFIB_MAX_OBJECTS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 512;
}

Gcwf iterate(const Gcwf& g, int n, std::size_t max_objects) {
  if (n < 0) throw Error(ErrorCode::MalformedEntity, "negative iteration count");
  if (n > 2) throw Error(ErrorCode::TooLarge, "iteration is capped at 2");
  Gcwf cur = g;
  for (int i = 0; i < n; ++i) cur = T_gcwf(cur, {.structure_only = false, .max_objects = max_objects}).result;
  return cur;
}

}  // namespace subfib
