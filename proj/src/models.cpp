#include "subfib/models.hpp"

#include <algorithm>
#include <map>

#include "subfib/monad.hpp"

namespace subfib {

std::string finset_arrow(int m, int k, const std::vector<int>& values) {
  std::string s = std::to_string(m) + "->" + std::to_string(k) + "[";
  for (int v : values) s += static_cast<char>('0' + v);
  return s + "]";
}

CategoryPtr finset_skeleton(int n) {
  if (n < 0) throw Error(ErrorCode::MalformedEntity, "negative size");
  if (n > 4) throw Error(ErrorCode::TooLarge, "finset_skeleton is limited to n <= 4");
  CategoryBuilder b;
  for (int i = 0; i <= n; ++i) b.add_object(std::to_string(i));
  struct Fn {
    int m, k;
    std::vector<int> v;
  };
  std::vector<Fn> fns;
  std::map<std::tuple<int, int, std::vector<int>>, int> index;
  for (int m = 0; m <= n; ++m) {
    for (int k = 0; k <= n; ++k) {
      long count = 1;
      for (int i = 0; i < m; ++i) count *= k;
      for (long code = 0; code < count; ++code) {
        std::vector<int> v(m);
        long c = code;
        for (int i = m - 1; i >= 0; --i) {
          v[i] = static_cast<int>(c % k);
          c /= k;
        }
        int id = b.add_morphism(finset_arrow(m, k, v), m, k);
        index[{m, k, v}] = id;
        bool identity = m == k;
        for (int i = 0; i < m && identity; ++i) identity = v[i] == i;
        if (identity) b.set_identity(m, id);
        fns.push_back({m, k, std::move(v)});
      }
    }
  }
  return b.build([&](int g, int f) {
           std::vector<int> v(fns[f].m);
           for (int i = 0; i < fns[f].m; ++i) v[i] = fns[g].v[fns[f].v[i]];
           return index.at({fns[f].m, fns[g].k, v});
         })
      .category;
}

// ---------------------------------------------------------------------------

Gcwf kernel_pair_gcwf(CategoryPtr cp) {
  const auto& C = *cp;
  if (auto missing = missing_pullback(C)) {
    throw Error(ErrorCode::NoPullback, "(" + C.name(missing->first) + ", " + C.name(missing->second) + ")");
  }
  auto arr = arrow_category(cp);
  auto sec = sections_category(cp);
  const auto& U = *arr.category;
  const auto& T = *sec.category;
  Fibration u(arr.cod);
  FinFunctor sigma{sec.category, arr.category, {}, {}};
  for (Obj x : T.objects()) sigma.objects.push_back(arr.object_of[sec.arrow[x.index].index]);
  for (Mor m : T.morphisms()) {
    sigma.morphisms.push_back(
        *arr.square(sigma(T.dom(m)), sigma(T.cod(m)), sec.top[m.index], sec.bottom[m.index]));
  }
  Fibration udot(compose(arr.cod, sigma));

  // K_f with f^+ the first projection and d(f) the mediator of (id, id).
  struct Kernel {
    PullbackResult pb;
    Mor diagonal;
    Obj object;
  };
  std::vector<Kernel> kernel;
  for (Obj x : U.objects()) {
    Mor f = arr.arrow[x.index];
    auto pb = pullback(C, f, f);
    Mor id = C.identity(C.dom(f));
    Mor d;
    for (const auto& med : pb.mediators) {
      if (med.to_first == id && med.to_second == id) d = med.mediator;
    }
    Obj obj = *sec.object_for(d, pb.first);
    kernel.push_back({std::move(pb), d, obj});
  }
  auto mediate = [&](const PullbackResult& pb, Mor a, Mor b) {
    for (const auto& med : pb.mediators) {
      if (med.to_first == a && med.to_second == b) return med.mediator;
    }
    throw Error(ErrorCode::NoPullback, "missing mediator");
  };
  FinFunctor delta{arr.category, sec.category, {}, {}};
  for (Obj x : U.objects()) delta.objects.push_back(kernel[x.index].object);
  for (Mor m : U.morphisms()) {
    Obj x = U.dom(m), y = U.cod(m);
    Mor t = arr.top[m.index];
    const auto& kx = kernel[x.index].pb;
    const auto& ky = kernel[y.index].pb;
    Mor k = mediate(ky, C.compose(t, kx.first), C.compose(t, kx.second));
    delta.morphisms.push_back(*sec.morphism(delta(x), delta(y), k, t));
  }
  NatTransformation eta{FinFunctor::identity(sec.category), compose(delta, sigma), {}};
  for (Obj x : T.objects()) {
    Mor s = sec.section[x.index], f = sec.arrow[x.index];
    const auto& kf = kernel[arr.object_of[f.index].index];
    Mor top = mediate(kf.pb, C.compose(s, f), C.identity(C.dom(f)));
    eta.components.push_back(*sec.morphism(x, kf.object, top, s));
  }
  NatTransformation eps{compose(sigma, delta), FinFunctor::identity(arr.category), {}};
  for (Obj x : U.objects()) {
    Mor f = arr.arrow[x.index];
    const auto& kf = kernel[x.index].pb;
    eps.components.push_back(*arr.square(arr.object_of[kf.first.index], x, kf.second, f));
  }
  return Gcwf{cp, std::move(u), std::move(udot), std::move(sigma), std::move(delta), std::move(eta), std::move(eps)};
}

// ---------------------------------------------------------------------------

Gcwf subobject_gcwf(int n) {
  if (n > 4) throw Error(ErrorCode::TooLarge, "subobject_gcwf is limited to n <= 4");
  auto cp = finset_skeleton(std::max(n, 2));
  const auto& C = *cp;
  Obj omega = C.object("2");
  Mor truth = C.morphism(finset_arrow(1, 2, {1}));
  auto slice = slice_category(cp, omega);
  const auto& U = *slice.category;
  Fibration u(slice.dom);
  Fibration udot(FinFunctor::identity(cp));

  auto bang = [&](Obj a) { return C.morphism(finset_arrow(std::stoi(C.name(a)), 1, std::vector<int>(std::stoi(C.name(a)), 0))); };
  FinFunctor sigma{cp, slice.category, {}, {}};
  for (Obj a : C.objects()) sigma.objects.push_back(slice.object_of[C.compose(truth, bang(a)).index]);
  for (Mor m : C.morphisms()) {
    sigma.morphisms.push_back(*slice.triangle(sigma(C.dom(m)), sigma(C.cod(m)), m));
  }
  std::vector<PullbackResult> pb;
  for (Obj x : U.objects()) pb.push_back(pullback(C, slice.arrow[x.index], truth));
  auto mediate = [&](const PullbackResult& p, Mor a, Mor b) {
    for (const auto& med : p.mediators) {
      if (med.to_first == a && med.to_second == b) return med.mediator;
    }
    throw Error(ErrorCode::NoPullback, "missing mediator");
  };
  FinFunctor delta{slice.category, cp, {}, {}};
  for (Obj x : U.objects()) delta.objects.push_back(pb[x.index].apex);
  for (Mor m : U.morphisms()) {
    const auto& px = pb[U.dom(m).index];
    const auto& py = pb[U.cod(m).index];
    delta.morphisms.push_back(mediate(py, C.compose(slice.map[m.index], px.first), px.second));
  }
  NatTransformation eta{FinFunctor::identity(cp), compose(delta, sigma), {}};
  for (Obj a : C.objects()) eta.components.push_back(mediate(pb[sigma(a).index], C.identity(a), bang(a)));
  NatTransformation eps{compose(sigma, delta), FinFunctor::identity(slice.category), {}};
  for (Obj x : U.objects()) {
    eps.components.push_back(*slice.triangle(sigma(delta(x)), x, pb[x.index].first));
  }
  return Gcwf{cp, std::move(u), std::move(udot), std::move(sigma), std::move(delta), std::move(eta), std::move(eps)};
}

// ---------------------------------------------------------------------------

Gcwf doctrine_gcwf(const Fibration& p) {
  if (!classify(p).faithful) throw Error(ErrorCode::NotFaithful, "fibers are not preorders");
  const auto& E = p.total();
  auto t = T_fib(p);
  const auto& V = t.category();
  FinFunctor delta = monad_unit(t);
  NatTransformation eta{FinFunctor::identity(t.fibration.total_ptr()), compose(delta, t.second), {}};
  for (Obj x : V.objects()) {
    Mor f = t.arrow[x.index];
    eta.components.push_back(*t.square(x, delta(E.cod(f)), f, E.identity(E.cod(f))));
  }
  NatTransformation eps{compose(t.second, delta), FinFunctor::identity(p.total_ptr()), {}};
  for (Obj a : E.objects()) eps.components.push_back(E.identity(a));
  return Gcwf{p.base_ptr(), p, t.fibration, t.second, std::move(delta), std::move(eta), std::move(eps)};
}

// ---------------------------------------------------------------------------
// Heyting fibers

int HeytingAlgebra::index(std::string_view name) const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] == name) return static_cast<int>(i);
  }
  throw Error(ErrorCode::UnknownObject, std::string(name));
}

HeytingAlgebra heyting_from_order(std::vector<std::string> elements, std::vector<std::vector<bool>> leq) {
  const int n = static_cast<int>(elements.size());
  HeytingAlgebra h{std::move(elements), std::move(leq), {}, {}, -1};
  auto greatest = [&](auto&& pred) {
    int best = -1;
    for (int c = 0; c < n; ++c) {
      if (!pred(c)) continue;
      bool above_all = true;
      for (int d = 0; d < n && above_all; ++d) {
        if (pred(d) && !h.leq[d][c]) above_all = false;
      }
      if (above_all) best = c;
    }
    return best;
  };
  h.top = greatest([](int) { return true; });
  if (h.top < 0) throw Error(ErrorCode::MalformedEntity, "order has no top element");
  h.meet.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      h.meet[a][b] = greatest([&](int c) { return h.leq[c][a] && h.leq[c][b]; });
      if (h.meet[a][b] < 0) throw Error(ErrorCode::MalformedEntity, "missing meet");
    }
  }
  h.imp.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      h.imp[a][b] = greatest([&](int c) { return h.leq[h.meet[c][a]][b]; });
      if (h.imp[a][b] < 0) throw Error(ErrorCode::MalformedEntity, "missing implication");
    }
  }
  return h;
}

Violations validate(const HeytingFiberSpec& spec) {
  Violations out;
  const auto& B = *spec.base;
  for (Obj x : B.objects()) {
    const auto& h = spec.fiber[x.index];
    const int n = static_cast<int>(h.elements.size());
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          if (h.leq[c][h.imp[a][b]] != h.leq[h.meet[c][a]][b]) {
            out.push_back({"implication", B.name(x) + ": " + h.elements[a] + " => " + h.elements[b]});
          }
        }
      }
    }
  }
  for (Mor s : B.morphisms()) {
    const auto& from = spec.fiber[B.cod(s).index];
    const auto& to = spec.fiber[B.dom(s).index];
    const auto& r = spec.reindex[s.index];
    const int n = static_cast<int>(from.elements.size());
    if (r[from.top] != to.top) out.push_back({"reindex.top", B.name(s)});
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (from.leq[a][b] && !to.leq[r[a]][r[b]]) out.push_back({"reindex.monotone", B.name(s)});
        if (r[from.meet[a][b]] != to.meet[r[a]][r[b]]) out.push_back({"reindex.meet", B.name(s)});
        if (r[from.imp[a][b]] != to.imp[r[a]][r[b]]) out.push_back({"reindex.implication", B.name(s)});
      }
    }
  }
  return out;
}

CategoryPtr poset_category(const HeytingAlgebra& h) {
  CategoryBuilder b;
  const int n = static_cast<int>(h.elements.size());
  for (const auto& e : h.elements) b.add_object(e);
  std::vector<std::vector<int>> mor(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      if (!h.leq[a][c]) continue;
      mor[a][c] = b.add_morphism(h.elements[a] + "<=" + h.elements[c], a, c);
    }
    b.set_identity(a, mor[a][a]);
  }
  std::vector<std::pair<int, int>> ends;
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      if (mor[a][c] >= 0) ends.emplace_back(a, c);
    }
  }
  std::vector<std::pair<int, int>> by_id(ends.size());
  for (auto [a, c] : ends) by_id[mor[a][c]] = {a, c};
  return b.build([&](int g, int f) { return mor[by_id[f].first][by_id[g].second]; }).category;
}

IndexedCategory to_indexed(const HeytingFiberSpec& spec) {
  const auto& B = *spec.base;
  IndexedCategory ic{spec.base, {}, {}};
  for (Obj x : B.objects()) ic.fiber.push_back(poset_category(spec.fiber[x.index]));
  for (Mor s : B.morphisms()) {
    const auto& from = spec.fiber[B.cod(s).index];
    const auto& to = spec.fiber[B.dom(s).index];
    const auto& src = *ic.fiber[B.cod(s).index];
    const auto& dst = *ic.fiber[B.dom(s).index];
    const auto& r = spec.reindex[s.index];
    FinFunctor f{ic.fiber[B.cod(s).index], ic.fiber[B.dom(s).index], {}, {}};
    for (Obj a : src.objects()) f.objects.push_back(dst.object(to.elements[r[from.index(src.name(a))]]));
    for (Mor m : src.morphisms()) {
      f.morphisms.push_back(dst.hom(f(src.dom(m)), f(src.cod(m))).front());
    }
    ic.reindex.push_back(std::move(f));
  }
  return ic;
}

namespace {

HeytingAlgebra chain(std::vector<std::string> names) {
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) leq[a][b] = true;
  }
  return heyting_from_order(std::move(names), std::move(leq));
}

HeytingAlgebra diamond() {
  // 0 < a, b < 1
  std::vector<std::vector<bool>> leq = {
      {true, true, true, true},
      {false, true, false, true},
      {false, false, true, true},
      {false, false, false, true},
  };
  return heyting_from_order({"0", "a", "b", "1"}, std::move(leq));
}

CategoryPtr context_chain() {
  CategoryBuilder b;
  for (const char* c : {"c0", "c1", "c2"}) b.add_object(c);
  // i -> j exists when i >= j (dropping variables).
  int mor[3][3];
  std::vector<std::pair<int, int>> ends;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      mor[i][j] = b.add_morphism("c" + std::to_string(i) + "->c" + std::to_string(j), i, j);
      ends.emplace_back(i, j);
    }
    b.set_identity(i, mor[i][i]);
  }
  return b.build([&](int g, int f) { return mor[ends[f].first][ends[g].second]; }).category;
}

}  // namespace

HeytingSample heyting_sample() {
  HeytingFiberSpec spec;
  spec.base = context_chain();
  const auto& B = *spec.base;
  spec.fiber.resize(3);
  spec.fiber[B.object("c0").index] = diamond();
  spec.fiber[B.object("c1").index] = chain({"0", "m", "1"});
  spec.fiber[B.object("c2").index] = chain({"0", "m", "1"});
  spec.reindex.resize(B.morphism_count());
  // Along c1 -> c0: 0, a, b, 1 go to 0, 1, 0, 1. Along c2 -> c1: 0, m, 1 go to 0, 1, 1.
  const std::vector<int> from_c0 = {0, 2, 0, 2};
  const std::vector<int> from_c1 = {0, 2, 2};
  for (Mor s : B.morphisms()) {
    const auto& name = B.name(s);
    if (B.is_identity(s)) {
      std::vector<int> id(spec.fiber[B.cod(s).index].elements.size());
      for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
      spec.reindex[s.index] = id;
    } else if (name == "c1->c0") {
      spec.reindex[s.index] = from_c0;
    } else if (name == "c2->c1") {
      spec.reindex[s.index] = from_c1;
    } else {
      std::vector<int> r(4);
      for (int i = 0; i < 4; ++i) r[i] = from_c1[from_c0[i]];
      spec.reindex[s.index] = r;
    }
  }
  auto bad = validate(spec);
  if (!bad.empty()) throw Error(ErrorCode::MalformedEntity, bad.front().check + " " + bad.front().detail);
  return {grothendieck(to_indexed(spec)), std::move(spec)};
}

Fibration chain_doctrine(const std::vector<std::string>& elements) {
  HeytingFiberSpec spec;
  CategoryBuilder b;
  b.add_object("*");
  b.set_identity(0, b.add_morphism("*->*", 0, 0));
  spec.base = b.build([](int, int) { return 0; }).category;
  spec.fiber = {chain(elements)};
  std::vector<int> id(elements.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
  spec.reindex = {id};
  return grothendieck(to_indexed(spec));
}

Fibration chain2_doctrine() { return chain_doctrine({"0", "1"}); }

Fibration chain3_doctrine() { return chain_doctrine({"0", "m", "1"}); }

}  // namespace subfib
