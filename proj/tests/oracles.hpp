#pragma once

// Test-side reference computations. They only use the raw category API
// (names, dom/cod, hom, compose) and never call the library's searches.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "subfib/fibration.hpp"

namespace oracle {

using subfib::FinCategory;
using subfib::FinFunctor;
using subfib::Mor;
using subfib::Obj;

struct Function {
  int m = 0, k = 0;
  std::vector<int> values;
};

// "m->k[v0v1...]"
inline Function parse_function(const std::string& name) {
  Function f;
  auto arrow = name.find("->");
  auto open = name.find('[');
  f.m = std::stoi(name.substr(0, arrow));
  f.k = std::stoi(name.substr(arrow + 2, open - arrow - 2));
  for (std::size_t i = open + 1; i + 1 < name.size(); ++i) f.values.push_back(name[i] - '0');
  return f;
}

inline long long power(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// |{(i, j) : f(i) = g(j)}|, the size of the set-theoretic pullback.
inline int pullback_size(const Function& f, const Function& g) {
  int n = 0;
  for (int a : f.values) {
    for (int b : g.values) n += a == b;
  }
  return n;
}

// All morphisms of C from x to y, by a full scan rather than hom().
inline std::vector<Mor> scan_hom(const FinCategory& c, Obj x, Obj y) {
  std::vector<Mor> out;
  for (Mor m : c.morphisms()) {
    if (c.dom(m) == x && c.cod(m) == y) out.push_back(m);
  }
  return out;
}

// Cartesianness straight from the definition: every r into cod s with
// p(r) = p(s)∘τ factors uniquely as s∘t with p(t) = τ.
inline bool is_cartesian(const FinFunctor& p, Mor s) {
  const auto& e = *p.source;
  const auto& b = *p.target;
  for (Mor r : e.morphisms()) {
    if (e.cod(r) != e.cod(s)) continue;
    for (Mor tau : scan_hom(b, p(e.dom(r)), p(e.dom(s)))) {
      if (b.compose(p(s), tau) != p(r)) continue;
      int count = 0;
      for (Mor t : scan_hom(e, e.dom(r), e.dom(s))) {
        if (p(t) == tau && e.compose(s, t) == r) ++count;
      }
      if (count != 1) return false;
    }
  }
  return true;
}

inline bool is_vertical(const FinFunctor& p, Mor m) { return p.target->is_identity(p(m)); }

// All (v, c) with v vertical, c cartesian and c∘v = r.
inline std::vector<std::pair<Mor, Mor>> factorizations(const FinFunctor& p, Mor r) {
  const auto& e = *p.source;
  std::vector<std::pair<Mor, Mor>> out;
  for (Mor c : e.morphisms()) {
    if (e.cod(c) != e.cod(r) || p(c) != p(r) || !is_cartesian(p, c)) continue;
    for (Mor v : scan_hom(e, e.dom(r), e.dom(c))) {
      if (is_vertical(p, v) && e.compose(c, v) == r) out.emplace_back(v, c);
    }
  }
  return out;
}

// Finite poset given by its order relation; meets and implication by search.
struct Poset {
  std::vector<std::string> names;
  std::function<bool(int, int)> leq;

  int size() const { return static_cast<int>(names.size()); }

  int greatest(const std::function<bool(int)>& pred) const {
    int best = -1;
    for (int c = 0; c < size(); ++c) {
      if (!pred(c)) continue;
      bool above_all = true;
      for (int d = 0; d < size(); ++d) {
        if (pred(d) && !leq(d, c)) above_all = false;
      }
      if (above_all) best = c;
    }
    return best;
  }
  int meet(int a, int b) const {
    return greatest([&](int c) { return leq(c, a) && leq(c, b); });
  }
  // a ⇒ b = max{c : c ∧ a ≤ b}
  int implies(int a, int b) const {
    return greatest([&](int c) { return leq(meet(c, a), b); });
  }
  int index(const std::string& n) const {
    return static_cast<int>(std::find(names.begin(), names.end(), n) - names.begin());
  }
};

inline Poset chain(std::vector<std::string> names) {
  return {std::move(names), [](int a, int b) { return a <= b; }};
}

// {0, a, b, 1} with a, b incomparable.
inline Poset diamond() {
  return {{"0", "a", "b", "1"}, [](int x, int y) { return x == y || x == 0 || y == 3; }};
}

}  // namespace oracle
