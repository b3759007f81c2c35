#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subfib/fibration.hpp"

namespace subfib {

/// Types u: U → B, terms u̇: U̇ → B, and Σ ⊣ Δ between the total categories.
struct Gcwf {
  CategoryPtr base;
  Fibration u;     // types
  Fibration udot;  // terms
  FinFunctor sigma;  // U̇ → U
  FinFunctor delta;  // U → U̇
  NatTransformation eta;  // id → ΔΣ, indexed by terms
  NatTransformation eps;  // ΣΔ → id, indexed by types

  const FinCategory& types() const { return u.total(); }
  const FinCategory& terms() const { return udot.total(); }
};

Violations check_gcwf(const Gcwf& g);

/// Γ.A = dom(u ε_A) and the projection u ε_A: Γ.A → Γ.
struct Extension {
  Obj context;
  Mor projection;
};
Extension context_extension(const Gcwf& g, Obj type);

struct TypeJ {
  Obj ctx, type;
  friend bool operator==(const TypeJ&, const TypeJ&) = default;
};
struct TermJ {
  Obj ctx, term, type;
  friend bool operator==(const TermJ&, const TermJ&) = default;
};
/// Γ ⊢ A' ≤_f A with f: A' → A vertical.
struct SubtypeJ {
  Obj ctx;
  Mor witness;
  Obj sub, super;
  friend bool operator==(const SubtypeJ&, const SubtypeJ&) = default;
};
/// Γ ⊢ a :_g A with g: Σa → A vertical.
struct CoercedTermJ {
  Obj ctx, term;
  Mor witness;
  Obj type;
  friend bool operator==(const CoercedTermJ&, const CoercedTermJ&) = default;
};

using Judgement = std::variant<TypeJ, TermJ, SubtypeJ, CoercedTermJ>;

enum class JudgementForm { Type, Term, Subtype, CoercedTerm };

Violations check_judgement(const Gcwf& g, const Judgement& j);

/// One transcript line, e.g. `Γ |- A' <= A [witness=f]`.
std::string format_judgement(const Gcwf& g, const Judgement& j);

std::vector<TypeJ> enumerate_types(const Gcwf& g, Obj ctx);
std::vector<TermJ> enumerate_terms(const Gcwf& g, Obj ctx, std::optional<Obj> type = {});
std::vector<SubtypeJ> enumerate_subtypes(const Gcwf& g, Obj ctx, std::optional<Obj> sub = {},
                                         std::optional<Obj> super = {});
std::vector<CoercedTermJ> enumerate_coerced_terms(const Gcwf& g, Obj ctx, std::optional<Obj> term = {},
                                                  std::optional<Obj> type = {});
std::vector<Judgement> enumerate_judgements(const Gcwf& g, JudgementForm form, Obj ctx);

CoercedTermJ rule_sbsm(const Gcwf& g, const CoercedTermJ& ct, const SubtypeJ& st);
SubtypeJ rule_trans(const Gcwf& g, const SubtypeJ& st1, const SubtypeJ& st2);
SubtypeJ rule_wkn(const Gcwf& g, const SubtypeJ& st, Obj b);

/// The result of substitution together with the intermediate data.
struct Substitution {
  SubtypeJ result;
  Mor sigma;   // Γ → Γ.A in the base
  Mor filler;  // A → ΣΔA over sigma with ε_A ∘ filler = id_A
};
Substitution rule_sbst_detailed(const Gcwf& g, const SubtypeJ& st, const CoercedTermJ& tm);
SubtypeJ rule_sbst(const Gcwf& g, const SubtypeJ& st, const CoercedTermJ& tm);

Violations check_sigma_faithful(const Gcwf& g);

struct GcwfMorphism {
  FinFunctor h;     // types
  FinFunctor hdot;  // terms
};
Violations check_gcwf_morphism(const Gcwf& g, const Gcwf& g2, const GcwfMorphism& m);

}  // namespace subfib
