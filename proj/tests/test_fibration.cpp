#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <thread>

#include "oracles.hpp"
#include "subfib/models.hpp"

using namespace subfib;

namespace {

// The cyclic group of order n as a one-object category; it has all pullbacks.
CategoryPtr cyclic_group(int n) {
  CategoryData d;
  d.objects = {"*"};
  for (int i = 0; i < n; ++i) d.morphisms.push_back({"g" + std::to_string(i), "*", "*"});
  d.identities = {{"*", "g0"}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d.compose.push_back({"g" + std::to_string(i), "g" + std::to_string(j), "g" + std::to_string((i + j) % n)});
    }
  }
  return FinCategory::from_data(d);
}

Fibration cod_fibration(CategoryPtr c) { return Fibration(arrow_category(std::move(c)).cod); }

}  // namespace

TEST_CASE("cartesian decisions agree with the definition on cod over finset 1") {
  auto f = cod_fibration(finset_skeleton(1));
  int cartesian = 0;
  for (Mor m : f.total().morphisms()) {
    bool expected = oracle::is_cartesian(f.functor(), m);
    CHECK(f.is_cartesian(m) == expected);
    cartesian += expected;
  }
  CHECK(cartesian > 0);
}

TEST_CASE("cartesian decisions agree with the definition on the Heyting sample") {
  auto s = heyting_sample();
  const auto& f = s.fibration;
  for (Mor m : f.total().morphisms()) CHECK(f.is_cartesian(m) == oracle::is_cartesian(f.functor(), m));
}

TEST_CASE("cartesian decisions agree with the definition on a cyclic group") {
  auto f = cod_fibration(cyclic_group(3));
  for (Mor m : f.total().morphisms()) CHECK(f.is_cartesian(m) == oracle::is_cartesian(f.functor(), m));
}

TEST_CASE("every square over finset 1 factors uniquely as vertical then cartesian") {
  auto f = cod_fibration(finset_skeleton(1));
  const auto& e = f.total();
  for (Mor r : e.morphisms()) {
    auto fac = f.factorize(r);
    CHECK(e.compose(fac.cartesian, fac.vertical) == r);
    CHECK(f.is_vertical(fac.vertical));
    CHECK(oracle::is_cartesian(f.functor(), fac.cartesian));
    auto all = oracle::factorizations(f.functor(), r);
    REQUIRE(all.size() == 1);
    CHECK(all[0].first == fac.vertical);
    CHECK(all[0].second == fac.cartesian);
  }
}

TEST_CASE("cod over finset 2 is not a fibration") {
  auto f = cod_fibration(finset_skeleton(2));
  auto c = classify(f);
  CHECK_FALSE(c.is_fibration);
  // 2->1[00] has no lift along itself: its pullback would have four elements
  const auto& e = f.total();
  const auto& b = f.base();
  Obj a = e.object(finset_arrow(2, 1, {0, 0}));
  Mor s = b.morphism(finset_arrow(2, 1, {0, 0}));
  CHECK_FALSE(f.try_lift(a, s).has_value());
  try {
    f.cartesian_lift(a, s);
    FAIL("expected NoLift");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NoLift);
  }
}

TEST_CASE("fiber of cod over 2 is the slice over 2") {
  auto c = finset_skeleton(2);
  auto f = cod_fibration(c);
  auto fib = f.fiber(c->object("2"));
  CHECK(validate(*fib.category).empty());
  CHECK(fib.category->object_count() == 7);
  auto slice = slice_category(c, c->object("2"));
  CHECK(fib.category->morphism_count() == slice.category->morphism_count());
  for (Mor m : fib.category->morphisms()) CHECK(f.is_vertical(fib.morphism[m.index]));
}

TEST_CASE("classification") {
  CHECK(classify(cod_fibration(finset_skeleton(0))) == Classification{true, true, true, true});
  CHECK(classify(cod_fibration(finset_skeleton(1))) == Classification{true, true, true, false});
  CHECK(classify(heyting_sample().fibration) == Classification{true, true, true, false});
  CHECK(classify(cod_fibration(cyclic_group(2))) == Classification{true, false, true, false});
}

TEST_CASE("a non-split cleavage cannot be turned into an indexed category") {
  auto f = cod_fibration(cyclic_group(2));
  CHECK_FALSE(check_split(f).empty());
  try {
    indexed_of(f);
    FAIL("expected NonSplitCleavage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonSplitCleavage);
  }
}

TEST_CASE("split lifts compose") {
  auto s = heyting_sample();
  const auto& f = s.fibration;
  CHECK(check_split(f).empty());
  const auto& b = f.base();
  const auto& e = f.total();
  for (Obj a : e.objects()) {
    CHECK(f.cartesian_lift(a, b.identity(f(a))) == e.identity(a));
    for (Mor sg : b.in(f(a))) {
      for (Mor t : b.in(b.dom(sg))) {
        CHECK(f.reindex(f.reindex(a, sg), t) == f.reindex(a, b.compose(sg, t)));
      }
    }
  }
}

TEST_CASE("grothendieck and indexed_of are inverse up to names") {
  auto s = heyting_sample();
  auto ic = to_indexed(s.spec);
  CHECK(validate(ic).empty());
  auto g = grothendieck(ic);
  CHECK(validate(g).empty());
  auto back = indexed_of(g);
  REQUIRE(back.fiber.size() == ic.fiber.size());
  for (std::size_t i = 0; i < ic.fiber.size(); ++i) {
    CHECK(back.fiber[i]->object_count() == ic.fiber[i]->object_count());
    CHECK(back.fiber[i]->morphism_count() == ic.fiber[i]->morphism_count());
  }
  // identifiers nest one level deeper on the second pass
  auto g2 = grothendieck(back);
  CHECK(g2.total().object_count() == g.total().object_count());
  CHECK(g2.total().morphism_count() == g.total().morphism_count());
  CHECK(g2.total().object_count() > 0);
  CHECK(g2.total().name(Obj{0}).rfind("{", 0) == 0);
}

TEST_CASE("grothendieck total category size") {
  auto s = heyting_sample();
  auto ic = to_indexed(s.spec);
  auto g = grothendieck(ic);
  const auto& b = *ic.base;
  std::size_t objects = 0, morphisms = 0;
  for (Obj x : b.objects()) objects += ic.fiber[x.index]->object_count();
  // one morphism {σ;v;A} per σ: Γ' → Γ, A over Γ and fiber arrow v: A' → σ*A
  for (Mor sg : b.morphisms()) {
    const auto& src = *ic.fiber[b.cod(sg).index];
    const auto& dst = *ic.fiber[b.dom(sg).index];
    for (Obj a : src.objects()) {
      Obj target = ic.reindex[sg.index](a);
      for (Obj a2 : dst.objects()) morphisms += oracle::scan_hom(dst, a2, target).size();
    }
  }
  CHECK(g.total().object_count() == objects);
  CHECK(g.total().morphism_count() == morphisms);
}

TEST_CASE("vertical opposite reverses fibers") {
  auto p = chain3_doctrine();
  auto v = vertical_opposite(p);
  CHECK(validate(v).empty());
  CHECK(classify(v).split);
  const auto& e = p.total();
  const auto& ev = v.total();
  for (Mor m : e.morphisms()) {
    if (!p.is_vertical(m)) continue;
    Obj d = ev.object("{*;" + e.name(e.dom(m)) + "}");
    Obj c = ev.object("{*;" + e.name(e.cod(m)) + "}");
    CHECK(oracle::scan_hom(ev, c, d).size() == 1);
  }
  Obj bottom = ev.object("{*;{*;0}}"), top = ev.object("{*;{*;1}}");
  CHECK(oracle::scan_hom(ev, bottom, top).empty());
  CHECK(oracle::scan_hom(ev, top, bottom).size() == 1);
}

TEST_CASE("fibred product sizes") {
  auto p = chain3_doctrine();
  auto prod = fibred_product(p, p);
  const auto& e = p.total();
  std::size_t objects = 0, morphisms = 0;
  for (Obj x : e.objects()) {
    for (Obj y : e.objects()) objects += p(x) == p(y);
  }
  for (Mor m : e.morphisms()) {
    for (Mor n : e.morphisms()) morphisms += p(m) == p(n);
  }
  CHECK(prod.product.category->object_count() == objects);
  CHECK(prod.product.category->morphism_count() == morphisms);
  CHECK(objects == 9);
  CHECK(morphisms == 36);
  CHECK(validate(prod.fibration).empty());
  CHECK(validate(prod.product.first).empty());
  CHECK(check_fibration_morphism(prod.fibration, p, prod.product.first).empty());
}

TEST_CASE("fibred product over different bases is rejected") {
  auto a = chain3_doctrine();
  auto b = cod_fibration(finset_skeleton(1));
  CHECK_THROWS_AS(fibred_product(a, b), Error);
}

TEST_CASE("a bogus cleavage entry is reported") {
  auto s = heyting_sample();
  const auto& f = s.fibration;
  const auto& e = f.total();
  std::vector<CleavageEntry> bad;
  for (Mor m : e.morphisms()) {
    if (f.is_vertical(m) && !e.is_isomorphism(m)) {
      bad.push_back({e.cod(m), f.base().identity(f(e.cod(m))), m});
      break;
    }
  }
  REQUIRE(bad.size() == 1);
  Fibration g(f.functor(), bad, false);
  auto v = validate(g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].check == "cleavage.cartesian");
}

TEST_CASE("identity is a fibration morphism; non-cartesian images are caught") {
  auto f = cod_fibration(finset_skeleton(1));
  CHECK(check_fibration_morphism(f, f, FinFunctor::identity(f.total_ptr())).empty());
  CHECK(is_isomorphism(FinFunctor::identity(f.total_ptr())));
}

TEST_CASE("property: concurrent queries see the same cartesian flags and lifts") {
  auto c = finset_skeleton(1);
  auto reference = cod_fibration(c);
  std::vector<char> expected;
  for (Mor m : reference.total().morphisms()) expected.push_back(reference.is_cartesian(m));

  auto shared = cod_fibration(c);
  std::vector<std::vector<char>> seen(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      Fibration copy = shared;
      const auto& e = copy.total();
      for (int k = 0; k < static_cast<int>(e.morphism_count()); ++k) {
        Mor m{(k * (t + 1) * 7) % static_cast<int>(e.morphism_count())};
        copy.try_lift(e.cod(m), copy(m));
      }
      for (Mor m : e.morphisms()) seen[t].push_back(copy.is_cartesian(m));
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& s : seen) CHECK(s == expected);
}

TEST_CASE("property: vertical opposite keeps the classification") {
  for (const auto& p : {chain3_doctrine(), heyting_sample().fibration, Fibration(arrow_category(finset_skeleton(1)).cod)}) {
    CHECK(classify(vertical_opposite(p)) == classify(p));
  }
}

TEST_CASE("property: split reindexing of vertical arrows composes") {
  auto s = heyting_sample();
  const auto& f = s.fibration;
  const auto& e = f.total();
  const auto& b = f.base();
  int checked = 0;
  for (Mor v : e.morphisms()) {
    if (!f.is_vertical(v)) continue;
    for (Mor sg : b.in(f(e.cod(v)))) {
      for (Mor t : b.in(b.dom(sg))) {
        CHECK(f.reindex_vertical(v, b.compose(sg, t)) == f.reindex_vertical(f.reindex_vertical(v, sg), t));
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("two posets over the walking arrow give a faithful split fibration") {
  CategoryData w;
  w.objects = {"a", "b"};
  w.morphisms = {{"1a", "a", "a"}, {"1b", "b", "b"}, {"f", "a", "b"}};
  w.identities = {{"a", "1a"}, {"b", "1b"}};
  w.compose = {{"1a", "1a", "1a"}, {"1b", "1b", "1b"}, {"f", "1a", "f"}, {"1b", "f", "f"}};
  auto base = FinCategory::from_data(w);
  auto two = heyting_from_order({"0", "1"}, {{true, true}, {false, true}});
  auto three = heyting_from_order({"0", "m", "1"}, {{true, true, true}, {false, true, true}, {false, false, true}});
  HeytingFiberSpec spec{base, {}, {}};
  spec.fiber.resize(2);
  spec.fiber[base->object("a").index] = three;
  spec.fiber[base->object("b").index] = two;
  spec.reindex.resize(3);
  spec.reindex[base->morphism("1a").index] = {0, 1, 2};
  spec.reindex[base->morphism("1b").index] = {0, 1};
  spec.reindex[base->morphism("f").index] = {0, 2};
  auto g = grothendieck(to_indexed(spec));
  CHECK(classify(g) == Classification{true, true, true, false});
}

TEST_CASE("fibers of finite subsets give a discrete split fibration") {
  // fiber over n: the subsets of n as a discrete category; reindexing is preimage
  auto base = finset_skeleton(2);
  IndexedCategory ic{base, {}, {}};
  auto subsets = [](int n) {
    CategoryData d;
    for (int s = 0; s < (1 << n); ++s) {
      std::string name = "s" + std::to_string(s);
      d.objects.push_back(name);
      d.morphisms.push_back({"id" + name, name, name});
      d.identities[name] = "id" + name;
      d.compose.push_back({"id" + name, "id" + name, "id" + name});
    }
    return FinCategory::from_data(d);
  };
  for (Obj x : base->objects()) ic.fiber.push_back(subsets(std::stoi(base->name(x))));
  for (Mor m : base->morphisms()) {
    auto fn = oracle::parse_function(base->name(m));
    const auto& src = ic.fiber[base->cod(m).index];
    const auto& dst = ic.fiber[base->dom(m).index];
    FinFunctor r{src, dst, {}, {}};
    for (Obj s : src->objects()) {
      int bits = std::stoi(src->name(s).substr(1)), pre = 0;
      for (int i = 0; i < fn.m; ++i) pre |= ((bits >> fn.values[i]) & 1) << i;
      r.objects.push_back(dst->object("s" + std::to_string(pre)));
    }
    for (Mor v : src->morphisms()) r.morphisms.push_back(dst->identity(r(src->dom(v))));
    ic.reindex.push_back(r);
  }
  CHECK(validate(ic).empty());
  CHECK(classify(grothendieck(ic)) == Classification{true, true, true, true});
}
