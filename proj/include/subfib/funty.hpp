#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "subfib/gcwf.hpp"

namespace subfib {

/// Pairs (A, B) of types in one context, and pairs (A, B') with B' over Γ.A.
struct WeakeningData {
  FibredProduct pairs;      // u ×_B u
  FibredProduct weakened;   // u ×_{u̇Δ, u} u
  FinFunctor w;             // (A, B) ↦ (A, (uε_A)*B)
};

/// Weakening of the second type by the first, on covariant same-context pairs.
WeakeningData weakening_functor(const Gcwf& g);

struct FunEntry {
  Obj a, b;    // types over one context
  Obj result;  // Fun(A, B)
};

/// λ on one object (A, B, b) of the abstraction corner: b is a term over Γ.A
/// whose type is the weakening of B.
struct LamEntry {
  Obj a, b, term;
  Obj result;  // a term of type Fun(A, B)
};

using LamFunction = std::function<std::optional<Obj>(Obj a, Obj b, Obj term)>;

struct FunStructure {
  Gcwf owner;
  Fibration vop;              // u^vop
  std::vector<Obj> vop_type;  // vop object -> type
  FinFunctor ext;             // u^vop total → base, A ↦ Γ.A
  ProductFibration pairs;     // u^vop ×_B u
  FibredProduct weakened;     // u^vop ×_{ext, u} u
  FibredProduct typed_terms;  // u^vop ×_{ext, u̇} u̇
  FinFunctor w;               // pairs → weakened
  FinFunctor id_sigma;        // typed_terms → weakened
  FibredProduct abstraction;  // W*(typed_terms)
  FinFunctor fun;             // pairs → types; unset entries are invalid
  FinFunctor lam;             // abstraction → terms; unset entries are invalid
  std::vector<FunEntry> fun_table;
  std::vector<LamEntry> lam_table;
  Violations construction;  // Fun or λ arrows that could not be determined
};

/// Fun on arrows is the unique arrow over the same base arrow, and likewise
/// for λ; both fibrations must therefore be faithful where it matters.
FunStructure make_fun_structure(const Gcwf& g, std::vector<FunEntry> fun, const LamFunction& lam);
FunStructure make_fun_structure(const Gcwf& g, std::vector<FunEntry> fun, const std::vector<LamEntry>& lam);

/// Fiberwise Heyting implication, for a doctrine gcwf.
FunStructure doctrine_fun_structure(const Gcwf& doctrine);
/// Pointwise Boolean implication of predicates, for a subobject gcwf.
FunStructure subobject_fun_structure(const Gcwf& subobject);

struct FunReport {
  Violations stage1;  // Fun is a functor over the base on the mixed-variance corner
  Violations stage2;  // λ exists, the squares commute and the right square is a pullback
};
FunReport check_fun_structure(const FunStructure& fs);

SubtypeJ derive_fun_subtyping(const FunStructure& fs, const SubtypeJ& st1, const SubtypeJ& st2);

/// Γ.A ⊢ b :_f B  gives  Γ ⊢ λ(A, b) :_{Fun(id_A, f)} Fun(A, B).
CoercedTermJ derive_lam_typing(const FunStructure& fs, Obj a, const CoercedTermJ& bt, Obj b);

}  // namespace subfib
