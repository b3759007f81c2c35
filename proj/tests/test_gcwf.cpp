#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "subfib/models.hpp"

using namespace subfib;

namespace {

std::set<std::string> checks_of(const Violations& v) {
  std::set<std::string> out;
  for (const auto& x : v) out.insert(x.check);
  return out;
}

SubtypeJ subtype(const Gcwf& g, const std::string& witness) {
  Mor w = g.types().morphism(witness);
  return {g.u(g.types().dom(w)), w, g.types().dom(w), g.types().cod(w)};
}

CoercedTermJ exact(const Gcwf& g, const std::string& term) {
  Obj t = g.terms().object(term);
  Obj a = g.sigma(t);
  return {g.udot(t), t, g.types().identity(a), a};
}

}  // namespace

TEST_CASE("kernel-pair and subobject models satisfy every axiom") {
  CHECK(check_gcwf(kernel_pair_gcwf(finset_skeleton(1))).empty());
  CHECK(check_gcwf(kernel_pair_gcwf(finset_skeleton(0))).empty());
  CHECK(check_gcwf(subobject_gcwf(2)).empty());
  CHECK(check_sigma_faithful(subobject_gcwf(2)).empty());
  CHECK(check_sigma_faithful(kernel_pair_gcwf(finset_skeleton(1))).empty());
}

TEST_CASE("kernel pairs need pullbacks") {
  try {
    kernel_pair_gcwf(finset_skeleton(2));
    FAIL("expected NoPullback");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPullback);
  }
}

TEST_CASE("doctrine unit is cartesian exactly at invertible terms") {
  auto s = heyting_sample();
  auto g = doctrine_gcwf(s.fibration);
  auto bad = check_gcwf(g);
  CHECK(checks_of(bad) == std::set<std::string>{"eta.cartesian"});
  std::size_t non_iso = 0;
  const auto& e = s.fibration.total();
  for (Mor m : e.morphisms()) non_iso += s.fibration.is_vertical(m) && !e.is_isomorphism(m);
  CHECK(bad.size() == non_iso);
  for (Obj t : g.terms().objects()) {
    CHECK(g.udot.is_cartesian(g.eta[t]) == oracle::is_cartesian(g.udot.functor(), g.eta[t]));
  }
}

TEST_CASE("discrete chain: the doctrine axioms hold") {
  auto g = doctrine_gcwf(chain_doctrine({"0"}));
  CHECK(check_gcwf(g).empty());
}

TEST_CASE("a broken counit is reported") {
  auto g = subobject_gcwf(2);
  // send every counit component to the one at the first type
  for (Obj x : g.types().objects()) g.eps.components[x.index] = g.eps.components[0];
  CHECK_FALSE(check_gcwf(g).empty());
}

TEST_CASE("context extension in the subobject model is the preimage of true") {
  auto g = subobject_gcwf(2);
  for (Obj a : g.types().objects()) {
    auto f = oracle::parse_function(g.types().name(a));
    auto ext = context_extension(g, a);
    int trues = static_cast<int>(std::count(f.values.begin(), f.values.end(), 1));
    CHECK(g.base->name(ext.context) == std::to_string(trues));
    CHECK(g.base->cod(ext.projection) == g.u(a));
    auto p = oracle::parse_function(g.base->name(ext.projection));
    for (int v : p.values) CHECK(f.values[v] == 1);
  }
  CHECK_THROWS_AS(context_extension(g, Obj{1000}), Error);
}

TEST_CASE("context extension in the kernel-pair model is the domain") {
  auto g = kernel_pair_gcwf(finset_skeleton(1));
  auto arr = arrow_category(g.base);
  for (Obj a : g.types().objects()) {
    Mor f = arr.arrow[arr.category->object(g.types().name(a)).index];
    CHECK(context_extension(g, a).context == g.base->dom(f));
  }
}

TEST_CASE("enumeration counts in the three-element chain") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto order = oracle::chain({"0", "m", "1"});
  Obj star = g.base->object("*");
  CHECK(enumerate_types(g, star).size() == 3);
  std::size_t pairs = 0, coerced = 0;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      if (!order.leq(x, y)) continue;
      ++pairs;
      for (int z = 0; z < 3; ++z) coerced += order.leq(y, z);
    }
  }
  CHECK(enumerate_subtypes(g, star).size() == pairs);
  CHECK(enumerate_terms(g, star).size() == pairs);
  CHECK(enumerate_coerced_terms(g, star).size() == coerced);
  CHECK(coerced == 10);
  CHECK(enumerate_terms(g, star, g.types().object("{*;1}")).size() == 3);
  CHECK(enumerate_judgements(g, JudgementForm::Subtype, star).size() == pairs);
  for (const auto& j : enumerate_judgements(g, JudgementForm::CoercedTerm, star)) CHECK(check_judgement(g, j).empty());
}

TEST_CASE("the subobject types are discrete: only reflexive subtypes") {
  auto g = subobject_gcwf(2);
  for (Obj ctx : g.base->objects()) {
    int n = std::stoi(g.base->name(ctx));
    auto sts = enumerate_subtypes(g, ctx);
    CHECK(sts.size() == static_cast<std::size_t>(oracle::power(2, n)));
    for (const auto& st : sts) CHECK(g.types().is_identity(st.witness));
  }
}

TEST_CASE("judgement checks") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto st = subtype(g, "{*->*;0<=m;m}");
  CHECK(check_judgement(g, st).empty());
  auto wrong = st;
  wrong.super = wrong.sub;
  CHECK(checks_of(check_judgement(g, wrong)) == std::set<std::string>{"subtype.typing"});
  auto ct = exact(g, "{*->*;0<=m;m}");
  CHECK(check_judgement(g, ct).empty());
  TermJ tj{ct.ctx, ct.term, g.types().object("{*;1}")};
  CHECK(checks_of(check_judgement(g, tj)) == std::set<std::string>{"term.type"});
}

TEST_CASE("transitivity and subsumption") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto lower = subtype(g, "{*->*;0<=m;m}");
  auto upper = subtype(g, "{*->*;m<=1;1}");
  auto t = rule_trans(g, upper, lower);
  CHECK(format_judgement(g, t) == "* |- {*;0} <= {*;1} [witness={*->*;0<=1;1}]");
  CHECK(check_judgement(g, t).empty());
  try {
    rule_trans(g, lower, upper);
    FAIL("expected MismatchedJudgements");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedJudgements);
  }

  auto ct = exact(g, "{*->*;0<=m;m}");
  auto up = rule_sbsm(g, ct, upper);
  CHECK(check_judgement(g, up).empty());
  CHECK(g.types().name(up.type) == "{*;1}");
  CHECK(g.types().name(up.witness) == "{*->*;m<=1;1}");
  CHECK_THROWS_AS(rule_sbsm(g, ct, lower), Error);
}

TEST_CASE("invalid premises are rejected") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto st = subtype(g, "{*->*;0<=m;m}");
  st.super = st.sub;
  CHECK_THROWS_AS(rule_wkn(g, st, g.types().object("{*;1}")), Error);
}

TEST_CASE("weakening in the subobject model precomposes with the projection") {
  auto g = subobject_gcwf(2);
  Obj two = g.base->object("2");
  int checked = 0;
  for (const auto& st : enumerate_subtypes(g, two)) {
    for (const auto& b : enumerate_types(g, two)) {
      auto w = rule_wkn(g, st, b.type);
      CHECK(check_judgement(g, w).empty());
      auto ext = context_extension(g, b.type);
      CHECK(w.ctx == ext.context);
      auto p = oracle::parse_function(g.base->name(ext.projection));
      auto sub = oracle::parse_function(g.types().name(st.sub));
      auto got = oracle::parse_function(g.types().name(w.sub));
      REQUIRE(got.values.size() == p.values.size());
      for (std::size_t i = 0; i < p.values.size(); ++i) CHECK(got.values[i] == sub.values[p.values[i]]);
      ++checked;
    }
  }
  CHECK(checked == 4 * 4);
}

TEST_CASE("weakening in a doctrine keeps the context") {
  auto g = doctrine_gcwf(chain3_doctrine());
  auto st = subtype(g, "{*->*;0<=m;m}");
  auto w = rule_wkn(g, st, g.types().object("{*;m}"));
  CHECK(w == st);
}

TEST_CASE("substitution of an exact term in the subobject model") {
  auto g = subobject_gcwf(2);
  auto tm = exact(g, "2");
  CHECK(g.types().name(tm.type) == "2->2[11]");
  for (const auto& st : enumerate_subtypes(g, g.base->object("2"))) {
    auto s = rule_sbst_detailed(g, st, tm);
    CHECK(check_judgement(g, s.result).empty());
    CHECK(g.base->is_identity(s.sigma));
    CHECK(s.result == st);
    CHECK(g.types().compose(g.eps[tm.type], s.filler) == g.types().identity(tm.type));
  }
}

TEST_CASE("substitution along a term of a one-point type") {
  auto g = subobject_gcwf(2);
  // 1 ⊢ 1 : 1->2[1], then anything over the extension 1.A = 1
  auto tm = exact(g, "1");
  auto st = subtype(g, "tri{1->2[0];1->1[0];1->2[0]}");
  auto r = rule_sbst(g, st, tm);
  CHECK(check_judgement(g, r).empty());
  CHECK(g.base->name(r.ctx) == "1");
  CHECK(g.types().name(r.sub) == "1->2[0]");
}

TEST_CASE("substitution over the wrong context is rejected") {
  auto g = subobject_gcwf(2);
  auto tm = exact(g, "1");
  auto st = subtype(g, "tri{2->2[00];2->2[01];2->2[00]}");
  CHECK_THROWS_AS(rule_sbst(g, st, tm), Error);
}

TEST_CASE("identity gcwf morphism") {
  auto g = kernel_pair_gcwf(finset_skeleton(1));
  GcwfMorphism id{FinFunctor::identity(g.u.total_ptr()), FinFunctor::identity(g.udot.total_ptr())};
  CHECK(check_gcwf_morphism(g, g, id).empty());
}

TEST_CASE("property: weakening then substituting recovers the premise") {
  for (const auto& g : {doctrine_gcwf(heyting_sample().fibration), subobject_gcwf(2)}) {
    int checked = 0;
    for (Obj ctx : g.base->objects()) {
      for (const auto& st : enumerate_subtypes(g, ctx)) {
        for (const auto& tm : enumerate_coerced_terms(g, ctx)) {
          auto w = rule_wkn(g, st, tm.type);
          CHECK(rule_sbst(g, w, tm) == st);
          ++checked;
        }
      }
    }
    CHECK(checked > 0);
  }
}
