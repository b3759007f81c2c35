#pragma once

#include <string>
#include <vector>

#include "subfib/gcwf.hpp"

namespace subfib {

/// Objects "0".."n", all functions between them. Morphisms are named
/// "m->k[v0v1...]" listing the image of each element.
CategoryPtr finset_skeleton(int n);

/// Name of the function m → k with the given values.
std::string finset_arrow(int m, int k, const std::vector<int>& values);

/// Types are arrows (u = cod), terms are sections (u̇ = cod∘U), Σ = U, Δ = K.
Gcwf kernel_pair_gcwf(CategoryPtr c);

/// Predicates A → 2 over finset_skeleton(max(n, 2)); terms are the sets
/// themselves, Σ = ⊤∘!, Δ = pullback along ⊤.
Gcwf subobject_gcwf(int n);

/// Types from a faithful fibration p, terms its vertical arrows, Σ = Cod, Δ = Diag.
Gcwf doctrine_gcwf(const Fibration& p);

/// A finite poset with meets, top and implication, elements 0..size-1.
struct HeytingAlgebra {
  std::vector<std::string> elements;
  std::vector<std::vector<bool>> leq;
  std::vector<std::vector<int>> meet, imp;
  int top = 0;

  int index(std::string_view name) const;
};

/// Builds meet, top and implication from the order; throws MalformedEntity
/// if the order is not a finite Heyting algebra.
HeytingAlgebra heyting_from_order(std::vector<std::string> elements, std::vector<std::vector<bool>> leq);

struct HeytingFiberSpec {
  CategoryPtr base;
  std::vector<HeytingAlgebra> fiber;          // per base object
  std::vector<std::vector<int>> reindex;      // per base morphism σ: fiber(cod σ) → fiber(dom σ)
};

Violations validate(const HeytingFiberSpec& spec);

/// The thin category of a poset; morphisms are named "x<=y".
CategoryPtr poset_category(const HeytingAlgebra& h);
IndexedCategory to_indexed(const HeytingFiberSpec& spec);

struct HeytingSample {
  Fibration fibration;
  HeytingFiberSpec spec;
};

/// Contexts c2 → c1 → c0 (two, one and no variables); the fiber over c0 is
/// the four-element Boolean algebra {0, a, b, 1}, over c1 and c2 the chain
/// 0 < m < 1.
HeytingSample heyting_sample();

/// A finite chain, listed bottom first, over the terminal category "*".
Fibration chain_doctrine(const std::vector<std::string>& elements);
Fibration chain2_doctrine();
/// 0 < m < 1.
Fibration chain3_doctrine();

}  // namespace subfib
