#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "subfib/models.hpp"
#include "subfib/monad.hpp"

using namespace subfib;

namespace {

// Vertical arrows of p and the commuting squares between them.
std::pair<std::size_t, std::size_t> square_counts(const FinFunctor& p) {
  const auto& e = *p.source;
  std::vector<Mor> vertical;
  for (Mor m : e.morphisms()) {
    if (oracle::is_vertical(p, m)) vertical.push_back(m);
  }
  std::size_t squares = 0;
  for (Mor g : vertical) {
    for (Mor h : vertical) {
      for (Mor m : oracle::scan_hom(e, e.dom(g), e.dom(h))) {
        for (Mor n : oracle::scan_hom(e, e.cod(g), e.cod(h))) squares += e.compose(n, g) == e.compose(h, m);
      }
    }
  }
  return {vertical.size(), squares};
}

Fibration cod1() { return Fibration(arrow_category(finset_skeleton(1)).cod); }

}  // namespace

TEST_CASE("T on the codomain fibration of finset 1") {
  auto p = cod1();
  auto t = T_fib(p);
  auto [objects, squares] = square_counts(p.functor());
  CHECK(t.category().object_count() == objects);
  CHECK(t.category().morphism_count() == squares);
  CHECK(objects == 4);
  CHECK(validate(t.fibration).empty());
  CHECK(check_fibration_morphism(t.fibration, p, t.second).empty());
}

TEST_CASE("T on doctrines counts intervals and their squares") {
  for (auto p : {chain2_doctrine(), chain3_doctrine(), heyting_sample().fibration}) {
    auto t = T_fib(p);
    auto [objects, squares] = square_counts(p.functor());
    CHECK(t.category().object_count() == objects);
    CHECK(t.category().morphism_count() == squares);
  }
}

TEST_CASE("unit sends an object to its identity") {
  auto p = chain3_doctrine();
  auto t = T_fib(p);
  auto unit = monad_unit(t);
  CHECK(validate(unit).empty());
  for (Obj a : p.total().objects()) CHECK(t.arrow[unit(a).index] == p.total().identity(a));
  CHECK(check_fibration_morphism(p, t.fibration, unit).empty());
}

TEST_CASE("multiplication composes the vertical legs") {
  auto p = chain3_doctrine();
  auto t = T_fib(p);
  auto tt = T_fib(t.fibration);
  auto mu = monad_mult(tt, t);
  CHECK(validate(mu).empty());
  const auto& e = p.total();
  for (Obj x : tt.category().objects()) {
    // x is a square from g to h with vertical legs m, n; μ gives n∘g = h∘m
    Mor sq = tt.arrow[x.index];
    Obj g = t.category().dom(sq);
    Obj h = t.category().cod(sq);
    Mor composite = t.arrow[mu(x).index];
    CHECK(e.dom(composite) == e.dom(t.arrow[g.index]));
    CHECK(e.cod(composite) == e.cod(t.arrow[h.index]));
  }
}

TEST_CASE("fibration monad laws") {
  CHECK(check_monad_laws_fib(chain3_doctrine()).empty());
  CHECK(check_monad_laws_fib(cod1()).empty());
  CHECK(check_monad_laws_fib(heyting_sample().fibration).empty());
  try {
    check_monad_laws_fib(Fibration(arrow_category(finset_skeleton(2)).cod));
    FAIL("expected NotAFibration");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAFibration);
  }
}

TEST_CASE("object bound") {
  try {
    T_fib(heyting_sample().fibration, 5);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("T on the kernel-pair gcwf is a gcwf") {
  auto g = kernel_pair_gcwf(finset_skeleton(1));
  auto t = T_gcwf(g);
  CHECK(check_gcwf(t.result).empty());
  CHECK(check_counit_universal(t).empty());
  CHECK(check_gcwf_morphism(g, t.result, t.unit).empty());
  auto [objects, squares] = square_counts(g.u.functor());
  CHECK(t.result.types().object_count() == objects);
  CHECK(t.result.types().morphism_count() == squares);
}

TEST_CASE("structure-only T skips the adjunction") {
  auto g = kernel_pair_gcwf(finset_skeleton(1));
  auto t = T_gcwf(g, {.structure_only = true});
  CHECK(t.result.delta.objects.empty());
  CHECK(t.result.sigma.objects.size() == t.result.terms().object_count());
}

TEST_CASE("gcwf monad laws") {
  CHECK(check_monad_laws_gcwf(kernel_pair_gcwf(finset_skeleton(1))).empty());
  CHECK(check_monad_laws_gcwf(doctrine_gcwf(heyting_sample().fibration)).empty());
}

TEST_CASE("identity morphism is preserved by T") {
  auto g = kernel_pair_gcwf(finset_skeleton(1));
  auto t = T_gcwf(g);
  GcwfMorphism id{FinFunctor::identity(g.u.total_ptr()), FinFunctor::identity(g.udot.total_ptr())};
  auto tid = T_morphism(t, t, id);
  CHECK(tid.h == FinFunctor::identity(t.result.u.total_ptr()));
  CHECK(tid.hdot == FinFunctor::identity(t.result.udot.total_ptr()));
}

TEST_CASE("iteration sizes follow the square counts") {
  auto g = doctrine_gcwf(chain2_doctrine());
  auto g1 = iterate(g, 1, default_max_objects());
  auto g2 = iterate(g, 2, default_max_objects());
  CHECK(iterate(g, 0, default_max_objects()).types() == g.types());
  auto c1 = square_counts(g.u.functor());
  auto c2 = square_counts(g1.u.functor());
  CHECK(g1.types().object_count() == c1.first);
  CHECK(g1.types().morphism_count() == c1.second);
  CHECK(g2.types().object_count() == c2.first);
  CHECK(g2.types().morphism_count() == c2.second);
  // pairs of intervals in 0 < 1 ordered endpointwise
  CHECK(g2.types().object_count() == 6);
}

TEST_CASE("deep iteration is refused") {
  auto g = doctrine_gcwf(chain2_doctrine());
  try {
    iterate(g, 3, default_max_objects());
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
  CHECK_THROWS_AS(iterate(doctrine_gcwf(heyting_sample().fibration), 2, 8), Error);
}
