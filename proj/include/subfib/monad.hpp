#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "subfib/gcwf.hpp"

namespace subfib {

/// Comma fibration (F / p) over a common base: objects are triples (g, c, A)
/// with g: F(c) → A vertical in p, morphisms (m, n) with n∘g = g'∘F(m).
/// With F the identity of p this is (p/p).
struct CommaFibration {
  Fibration source;  // fibration of the c's
  Fibration target;  // p
  FinFunctor along;  // F: source total → target total
  Fibration fibration;
  FinFunctor first;   // (g, c, A) ↦ c
  FinFunctor second;  // (g, c, A) ↦ A
  std::vector<Mor> arrow;  // per object: g

  std::optional<Obj> object_of(Obj c, Mor g) const;
  std::optional<Mor> square(Obj x, Obj y, Mor m, Mor n) const;
  const FinCategory& category() const { return fibration.total(); }

  std::map<std::array<int, 2>, int> object_index;  // (c, g) -> object
  std::map<std::array<int, 4>, int> square_index;  // (x, y, m, n) -> morphism
};

/// (F / p) with lifts taken pairwise from the chosen lifts of both fibrations.
/// Throws TooLarge when there would be more than `max_objects` objects
/// (0 means unbounded).
CommaFibration comma(const Fibration& source, const FinFunctor& along, const Fibration& p,
                     std::size_t max_objects = 0);

/// (p/p): vertical arrows of p and commuting squares. Objects are named by
/// the arrow they stand for, morphisms sq{f;g;x;y}.
CommaFibration T_fib(const Fibration& p, std::size_t max_objects = 0);

/// T on a fibration morphism h: p → q, acting on both legs.
FinFunctor T_fib(const CommaFibration& tp, const CommaFibration& tq, const FinFunctor& h);

/// η_p: p → (p/p), A ↦ id_A.
FinFunctor monad_unit(const CommaFibration& tp);
/// μ_p: TTp → Tp, composing the two vertical legs of a square.
FinFunctor monad_mult(const CommaFibration& ttp, const CommaFibration& tp);

/// Builds T p, T²p and T³p; TooLarge when one of them would exceed
/// `max_objects` objects.
Violations check_monad_laws_fib(const Fibration& p, std::size_t max_objects = 2048);

/// The gcwf (u/u, Σ/u, Σ̄ ⊣ Δ̄) together with the monad structure maps.
struct GcwfMonadData {
  Gcwf result;
  CommaFibration types;  // (u/u)
  CommaFibration terms;  // (Σ/u)
  GcwfMorphism unit;     // G → T G
};

struct TGcwfOptions {
  /// Skip building Δ̄, η̄ and ε̄; the result then only carries u, u̇ and Σ̄.
  bool structure_only = false;
  std::size_t max_objects = 0;
};

GcwfMonadData T_gcwf(const Gcwf& g, TGcwfOptions options = {});

/// μ: T T G → T G for data built by T_gcwf(T_gcwf(G).result).
GcwfMorphism monad_mult(const GcwfMonadData& ttg, const GcwfMonadData& tg);

/// T on a gcwf morphism m: G → G', acting as m on every component.
GcwfMorphism T_morphism(const GcwfMonadData& tg, const GcwfMonadData& tg2, const GcwfMorphism& m);

/// Universal property of ε̄ by enumeration of test triples.
Violations check_counit_universal(const GcwfMonadData& tg);

Violations check_monad_laws_gcwf(const Gcwf& g, std::size_t max_objects = 2048);

/// n-fold application of T_gcwf; TooLarge when a total category would
/// exceed `max_objects` objects.
Gcwf iterate(const Gcwf& g, int n, std::size_t max_objects);
std::size_t default_max_objects();

}  // namespace subfib
