#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "subfib/funty.hpp"
#include "subfib/models.hpp"
#include "subfib/names.hpp"

using namespace subfib;

namespace {

std::set<std::string> checks_of(const Violations& v) {
  std::set<std::string> out;
  for (const auto& x : v) out.insert(x.check);
  return out;
}

// "{c;x}" -> x
std::string element(const std::string& type) { return names::decode(type).parts.at(1); }

SubtypeJ subtype(const Gcwf& g, const std::string& witness) {
  Mor w = g.types().morphism(witness);
  return {g.u(g.types().dom(w)), w, g.types().dom(w), g.types().cod(w)};
}

}  // namespace

TEST_CASE("doctrine Fun is the fiberwise Heyting implication") {
  auto s = heyting_sample();
  auto g = doctrine_gcwf(s.fibration);
  auto fs = doctrine_fun_structure(g);
  CHECK(fs.construction.empty());
  const auto& U = g.types();
  std::map<std::string, oracle::Poset> fibers = {
      {"c0", oracle::diamond()}, {"c1", oracle::chain({"0", "m", "1"})}, {"c2", oracle::chain({"0", "m", "1"})}};
  std::size_t expected_rows = 0;
  for (const auto& [ctx, p] : fibers) expected_rows += static_cast<std::size_t>(p.size() * p.size());
  CHECK(fs.fun_table.size() == expected_rows);
  for (const auto& row : fs.fun_table) {
    std::string ctx = g.base->name(g.u(row.a));
    const auto& p = fibers.at(ctx);
    int a = p.index(element(U.name(row.a)));
    int b = p.index(element(U.name(row.b)));
    CHECK(element(U.name(row.result)) == p.names[p.implies(a, b)]);
    CHECK(g.u(row.result) == g.u(row.a));
  }
}

TEST_CASE("doctrine: stage 1 holds, the pullback of stage 2 does not") {
  auto g = doctrine_gcwf(heyting_sample().fibration);
  auto fs = doctrine_fun_structure(g);
  auto r = check_fun_structure(fs);
  CHECK(r.stage1.empty());
  CHECK_FALSE(r.stage2.empty());
  CHECK(checks_of(r.stage2) == std::set<std::string>{"pullback.surjective"});
  CHECK(validate(fs.fun).empty());
}

TEST_CASE("subobject: both stages hold and Fun is pointwise implication") {
  for (int n : {1, 2}) {
    auto g = subobject_gcwf(n);
    auto fs = subobject_fun_structure(g);
    auto r = check_fun_structure(fs);
    CHECK(r.stage1.empty());
    CHECK(r.stage2.empty());
    const auto& U = g.types();
    for (const auto& row : fs.fun_table) {
      auto a = oracle::parse_function(U.name(row.a));
      auto b = oracle::parse_function(U.name(row.b));
      auto c = oracle::parse_function(U.name(row.result));
      REQUIRE(c.values.size() == a.values.size());
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        int expected = (!a.values[i] || b.values[i]) ? 1 : 0;
        CHECK(c.values[i] == expected);
      }
    }
  }
}

TEST_CASE("the comparison into the pullback is an isomorphism for subobjects") {
  auto g = subobject_gcwf(2);
  auto fs = subobject_fun_structure(g);
  auto sq = fibred_product(fs.fun, g.sigma);
  CHECK(sq.category->object_count() == fs.abstraction.category->object_count());
  CHECK(sq.category->morphism_count() == fs.abstraction.category->morphism_count());
}

TEST_CASE("Fun is contravariant in its first argument") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto fs = doctrine_fun_structure(g);
  const auto& U = g.types();
  auto fun = [&](const char* a, const char* b) {
    for (const auto& row : fs.fun_table) {
      if (U.name(row.a) == a && U.name(row.b) == b) return U.name(row.result);
    }
    return std::string("?");
  };
  CHECK(fun("{*;1}", "{*;m}") == "{*;m}");
  CHECK(fun("{*;m}", "{*;1}") == "{*;1}");
  CHECK(fun("{*;m}", "{*;0}") == "{*;0}");
  CHECK(fun("{*;m}", "{*;m}") == "{*;1}");

  // m <= 1 in both places: Fun(1, m) <= Fun(m, 1)
  auto st = subtype(g, "{*->*;m<=1;1}");
  auto d = derive_fun_subtyping(fs, st, st);
  CHECK(check_judgement(g, d).empty());
  CHECK(U.name(d.sub) == "{*;m}");
  CHECK(U.name(d.super) == "{*;1}");
  CHECK(U.name(d.witness) == "{*->*;m<=1;1}");
}

TEST_CASE("a Fun that is covariant in the first argument is rejected") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto order = oracle::chain({"0", "m", "1"});
  const auto& U = g.types();
  std::vector<FunEntry> meet;
  for (Obj a : U.objects()) {
    for (Obj b : U.objects()) {
      int m = order.meet(order.index(element(U.name(a))), order.index(element(U.name(b))));
      meet.push_back({a, b, U.object("{*;" + order.names[m] + "}")});
    }
  }
  auto fs = make_fun_structure(g, meet, [](Obj, Obj, Obj) { return std::optional<Obj>{}; });
  auto r = check_fun_structure(fs);
  bool accepted = fs.construction.empty() && r.stage1.empty();
  CHECK_FALSE(accepted);
}

TEST_CASE("λ needs stage 2") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto fs = doctrine_fun_structure(g);
  Obj one = g.types().object("{*;1}");
  Obj t = g.terms().object("{*->*;1<=1;1}");
  CoercedTermJ bt{g.u(one), t, g.types().identity(one), one};
  try {
    derive_lam_typing(fs, one, bt, one);
    FAIL("expected StageTwoUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StageTwoUnavailable);
  }
}

TEST_CASE("λ in the subobject model") {
  auto g = subobject_gcwf(2);
  auto fs = subobject_fun_structure(g);
  const auto& U = g.types();
  Obj a = U.object("2->2[01]");
  Obj b = U.object("2->2[01]");
  auto ext = context_extension(g, a);
  CHECK(g.base->name(ext.context) == "1");
  Obj t = g.terms().object("1");
  Obj bw = g.u.reindex(b, ext.projection);
  CHECK(U.name(bw) == "1->2[1]");
  CoercedTermJ bt{ext.context, t, U.identity(g.sigma(t)), bw};
  REQUIRE(check_judgement(g, bt).empty());
  auto lam = derive_lam_typing(fs, a, bt, b);
  CHECK(check_judgement(g, lam).empty());
  CHECK(g.base->name(lam.ctx) == "2");
  CHECK(U.name(lam.type) == "2->2[11]");
  CHECK(g.terms().name(lam.term) == "2");

  CoercedTermJ wrong{g.base->object("2"), g.terms().object("2"), U.identity(U.object("2->2[11]")), U.object("2->2[11]")};
  CHECK_THROWS_AS(derive_lam_typing(fs, a, wrong, b), Error);
}

TEST_CASE("covariant weakening functor") {
  for (const auto& g : {subobject_gcwf(2), kernel_pair_gcwf(finset_skeleton(1))}) {
    auto w = weakening_functor(g);
    CHECK(validate(w.w).empty());
    const auto& P = *w.pairs.category;
    for (Obj x : P.objects()) {
      Obj a = w.pairs.first(x);
      Obj b = w.pairs.second(x);
      Obj y = w.w(x);
      auto ext = context_extension(g, a);
      CHECK(w.weakened.second(y) == g.u.reindex(b, ext.projection));
    }
  }
}

TEST_CASE("λ table rows produce terms of the function type") {
  auto g = subobject_gcwf(2);
  auto fs = subobject_fun_structure(g);
  CHECK_FALSE(fs.lam_table.empty());
  std::map<std::pair<int, int>, Obj> fun;
  for (const auto& row : fs.fun_table) fun[{row.a.index, row.b.index}] = row.result;
  for (const auto& row : fs.lam_table) {
    CHECK(g.sigma(row.result) == fun.at({row.a.index, row.b.index}));
  }
}
