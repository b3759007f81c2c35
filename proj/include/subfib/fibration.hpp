#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <vector>

#include "subfib/fincat.hpp"

namespace subfib {

struct CleavageEntry {
  Obj object;  // A in the total category
  Mor over;    // σ in the base, cod σ = p(A)
  Mor lift;    // s_{A,σ}: σ*A → A

  friend bool operator==(const CleavageEntry&, const CleavageEntry&) = default;
};

struct Factorization {
  Mor vertical;
  Mor cartesian;
};

struct Classification {
  bool is_fibration = false;
  bool split = false;
  bool faithful = false;
  bool discrete = false;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// The category over one base object, with maps back into the total category.
struct Fiber {
  CategoryPtr category;
  std::vector<Obj> object;    // fiber object -> total object
  std::vector<Mor> morphism;  // fiber morphism -> total morphism
};

/// A functor p: E → B with lazily decided cartesianness and a cleavage.
///
/// Copies share one cache. Cartesian flags and searched lifts are memoized
/// in write-once atomic slots, so a Fibration can be queried from several
/// threads.
class Fibration {
 public:
  explicit Fibration(FinFunctor p, std::vector<CleavageEntry> cleavage = {}, bool marked_split = false);

  const FinFunctor& functor() const { return state_->p; }
  const FinCategory& total() const { return *state_->p.source; }
  const FinCategory& base() const { return *state_->p.target; }
  CategoryPtr total_ptr() const { return state_->p.source; }
  CategoryPtr base_ptr() const { return state_->p.target; }
  Obj operator()(Obj x) const { return state_->p(x); }
  Mor operator()(Mor m) const { return state_->p(m); }

  /// The cleavage as supplied at construction (searched lifts excluded).
  const std::vector<CleavageEntry>& given_cleavage() const { return state_->given; }
  bool marked_split() const { return state_->marked_split; }

  bool is_vertical(Mor m) const { return base().is_identity(state_->p(m)); }
  bool is_cartesian(Mor s) const;
  std::optional<Mor> try_lift(Obj a, Mor sigma) const;
  Mor cartesian_lift(Obj a, Mor sigma) const;
  /// σ*A, the domain of the chosen lift.
  Obj reindex(Obj a, Mor sigma) const { return total().dom(cartesian_lift(a, sigma)); }

  Factorization factorize(Mor r) const;
  Mor reindex_vertical(Mor f, Mor sigma) const;
  Fiber fiber(Obj gamma) const;

  /// Objects of the total category over Γ, in index order.
  std::vector<Obj> objects_over(Obj gamma) const;

 private:
  struct State {
    FinFunctor p;
    std::vector<CleavageEntry> given;
    bool marked_split;
    std::vector<int> slot_offset;                // per total object
    std::vector<std::atomic<int>> lift;          // 0 unknown, 1 none, m + 2
    std::vector<std::atomic<signed char>> cart;  // 0 unknown, 1 no, 2 yes
    std::vector<std::vector<Obj>> over;          // per base object
  };
  std::size_t slot(Obj a, Mor sigma) const;
  bool decide_cartesian(Mor s) const;

  std::shared_ptr<State> state_;
};

/// Strict functor B^op → Cat as finite data.
struct IndexedCategory {
  CategoryPtr base;
  std::vector<CategoryPtr> fiber;  // per base object
  std::vector<FinFunctor> reindex;  // per base morphism σ: fiber(cod σ) → fiber(dom σ)
};

Violations validate(const IndexedCategory& f);

/// Total category of pairs {Γ;A}, morphisms {σ;v;A} with v: A' → σ*A.
Fibration grothendieck(const IndexedCategory& f);
IndexedCategory indexed_of(const Fibration& f);

/// Violations of the split cleavage laws, or of lift existence.
Violations check_split(const Fibration& f);
Classification classify(const Fibration& f);

/// Cleavage entries and the cartesian flags of `f`, checked by brute force.
Violations validate(const Fibration& f);

Fibration vertical_opposite(const Fibration& f);

struct FibredProduct {
  CategoryPtr category;
  FinFunctor first, second;
};

/// Strict pullback of categories along h1 and h2 (common target).
FibredProduct fibred_product(const FinFunctor& h1, const FinFunctor& h2);

/// The fibred product of two fibrations over one base, itself a fibration
/// with componentwise lifts.
struct ProductFibration {
  FibredProduct product;
  Fibration fibration;
};
ProductFibration fibred_product(const Fibration& f, const Fibration& g);

/// H is a fibration morphism from f to g: g∘H = f and H preserves cartesian maps.
Violations check_fibration_morphism(const Fibration& f, const Fibration& g, const FinFunctor& h);

/// True iff the functor is bijective on objects and morphisms.
bool is_isomorphism(const FinFunctor& h);

}  // namespace subfib
