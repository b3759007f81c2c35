#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subfib/error.hpp"

namespace subfib {

/// Index of an object inside one FinCategory. Indices follow identifier order.
struct Obj {
  int index = -1;
  bool valid() const { return index >= 0; }
  friend auto operator<=>(Obj, Obj) = default;
};

/// Index of a morphism inside one FinCategory.
struct Mor {
  int index = -1;
  bool valid() const { return index >= 0; }
  friend auto operator<=>(Mor, Mor) = default;
};

template <class Id>
class IdRange {
 public:
  struct iterator {
    int i;
    Id operator*() const { return Id{i}; }
    iterator& operator++() {
      ++i;
      return *this;
    }
    friend bool operator==(iterator, iterator) = default;
  };

  explicit IdRange(std::size_t n) : n_(static_cast<int>(n)) {}
  iterator begin() const { return {0}; }
  iterator end() const { return {n_}; }
  std::size_t size() const { return static_cast<std::size_t>(n_); }

 private:
  int n_;
};

/// Name-keyed description of a finite category; the interchange form.
struct CategoryData {
  struct Arrow {
    std::string name, dom, cod;
  };
  struct Composite {
    std::string g, f, gf;
  };
  std::vector<std::string> objects;
  std::vector<Arrow> morphisms;
  std::map<std::string, std::string> identities;
  std::vector<Composite> compose;
};

/// A finite category with a fully materialized composition table.
///
/// Objects and morphisms are opaque string identifiers; internally both are
/// kept sorted by identifier so that index order is identifier order, which
/// every deterministic tie-break in the library relies on. The composition
/// table may have holes when built from untrusted data; `validate` reports
/// them.
class FinCategory {
 public:
  static std::shared_ptr<const FinCategory> from_data(const CategoryData& data);
  CategoryData to_data() const;

  std::size_t object_count() const { return obj_names_.size(); }
  std::size_t morphism_count() const { return mor_names_.size(); }
  IdRange<Obj> objects() const { return IdRange<Obj>(object_count()); }
  IdRange<Mor> morphisms() const { return IdRange<Mor>(morphism_count()); }

  const std::string& name(Obj x) const { return obj_names_[x.index]; }
  const std::string& name(Mor m) const { return mor_names_[m.index]; }
  std::optional<Obj> find_object(std::string_view name) const;
  std::optional<Mor> find_morphism(std::string_view name) const;
  Obj object(std::string_view name) const;
  Mor morphism(std::string_view name) const;

  Obj dom(Mor m) const { return Obj{dom_[m.index]}; }
  Obj cod(Mor m) const { return Obj{cod_[m.index]}; }
  Mor identity(Obj x) const { return Mor{identity_[x.index]}; }
  bool is_identity(Mor m) const { return identity_[dom_[m.index]] == m.index; }

  /// g∘f, or nullopt when the pair is not composable or the table has a hole.
  std::optional<Mor> try_compose(Mor g, Mor f) const;
  /// g∘f; throws MalformedEntity when undefined.
  Mor compose(Mor g, Mor f) const;

  std::span<const Mor> out(Obj x) const { return out_[x.index]; }
  std::span<const Mor> in(Obj y) const { return in_[y.index]; }
  std::span<const Mor> hom(Obj x, Obj y) const;

  bool is_isomorphism(Mor m) const;
  std::string describe(Mor m) const;

  friend bool operator==(const FinCategory& a, const FinCategory& b);

 private:
  friend class CategoryBuilder;
  FinCategory() = default;

  std::vector<std::string> obj_names_, mor_names_;
  std::vector<int> dom_, cod_, identity_;
  std::vector<std::vector<Mor>> out_, in_;
  std::vector<int> outpos_;
  std::vector<std::vector<int>> comp_;
};

using CategoryPtr = std::shared_ptr<const FinCategory>;

/// Accumulates a category in construction order, then sorts identifiers.
class CategoryBuilder {
 public:
  struct Result {
    CategoryPtr category;
    std::vector<Obj> object;    // builder index -> final object
    std::vector<Mor> morphism;  // builder index -> final morphism
  };

  int add_object(std::string name);
  int add_morphism(std::string name, int dom, int cod);
  void set_identity(int object, int morphism);

  int object_count() const { return static_cast<int>(objects_.size()); }
  int morphism_count() const { return static_cast<int>(morphisms_.size()); }
  int dom(int m) const { return morphisms_[m].dom; }
  int cod(int m) const { return morphisms_[m].cod; }
  const std::vector<int>& out(int x) const { return out_[x]; }

  /// `compose(g, f)` receives builder indices with cod f == dom g and
  /// returns the builder index of g∘f, or -1 to leave the entry undefined.
  Result build(const std::function<int(int g, int f)>& compose) const;

 private:
  struct Arrow {
    std::string name;
    int dom, cod;
  };
  std::vector<std::string> objects_;
  std::vector<Arrow> morphisms_;
  std::vector<int> identity_;
  std::vector<std::vector<int>> out_;
};

struct FinFunctor {
  CategoryPtr source, target;
  std::vector<Obj> objects;
  std::vector<Mor> morphisms;

  Obj operator()(Obj x) const { return objects[x.index]; }
  Mor operator()(Mor m) const { return morphisms[m.index]; }

  static FinFunctor identity(CategoryPtr c);
  friend bool operator==(const FinFunctor& a, const FinFunctor& b) {
    return a.objects == b.objects && a.morphisms == b.morphisms;
  }
};

/// g∘f as functors.
FinFunctor compose(const FinFunctor& g, const FinFunctor& f);

struct NatTransformation {
  FinFunctor source, target;
  std::vector<Mor> components;  // indexed by objects of the source category

  Mor operator[](Obj x) const { return components[x.index]; }
};

Violations validate(const FinCategory& c);
Violations validate(const FinFunctor& f);
Violations validate(const NatTransformation& t);

CategoryPtr opposite(const FinCategory& c);

struct PullbackResult {
  struct Mediator {
    Mor to_first, to_second, mediator;
  };
  Obj apex;
  Mor first, second;  // projections to dom f and dom g
  std::vector<Mediator> mediators;
};

/// Pullback of the cospan f, g found by exhaustive cone enumeration.
/// Ties break by smallest apex, then lexicographically smallest projections.
PullbackResult pullback(const FinCategory& c, Mor f, Mor g);

/// First cospan (in index order) that has no pullback, if any.
std::optional<std::pair<Mor, Mor>> missing_pullback(const FinCategory& c);

/// Smallest object receiving exactly one arrow from every object.
Obj terminal_object(const FinCategory& c);

/// The arrow category: objects are morphisms of C, morphisms are commuting squares.
struct ArrowCategory {
  CategoryPtr base;
  CategoryPtr category;
  FinFunctor dom, cod;
  std::vector<Mor> arrow;      // object -> morphism of C
  std::vector<Obj> object_of;  // morphism of C -> object
  std::vector<Mor> top, bottom;

  /// The square (top, bottom) from x to y, if it commutes.
  std::optional<Mor> square(Obj x, Obj y, Mor top, Mor bottom) const;

 private:
  friend ArrowCategory arrow_category(CategoryPtr c);
  std::map<std::array<int, 4>, int> lookup_;
};

/// Pairs (s, f) with f∘s = id; morphisms are pairs of arrows commuting with
/// both the arrows and their sections.
struct SectionsCategory {
  CategoryPtr base;
  CategoryPtr category;
  FinFunctor cod;
  std::vector<Mor> section, arrow;  // per object
  std::vector<Mor> top, bottom;     // per morphism

  std::optional<Obj> object_for(Mor section, Mor arrow) const;
  std::optional<Mor> morphism(Obj x, Obj y, Mor top, Mor bottom) const;

 private:
  friend SectionsCategory sections_category(CategoryPtr c);
  std::map<std::array<int, 2>, int> objects_;
  std::map<std::array<int, 4>, int> lookup_;
};

/// Objects are morphisms into `over`, morphisms are commuting triangles.
struct SliceCategory {
  CategoryPtr base;
  Obj over;
  CategoryPtr category;
  FinFunctor dom;
  std::vector<Mor> arrow;      // object -> morphism of C into `over`
  std::vector<Obj> object_of;  // morphism of C -> object, or invalid
  std::vector<Mor> map;        // morphism -> underlying arrow of C

  std::optional<Mor> triangle(Obj x, Obj y, Mor a) const;

 private:
  friend SliceCategory slice_category(CategoryPtr c, Obj over);
  std::map<std::array<int, 3>, int> lookup_;
};

ArrowCategory arrow_category(CategoryPtr c);
SectionsCategory sections_category(CategoryPtr c);
SliceCategory slice_category(CategoryPtr c, Obj over);

enum class DerivedKind { Arrow, Sections, Slice };

struct DerivedCategory {
  CategoryPtr category;
  FinFunctor forget;
};

DerivedCategory derived_category(DerivedKind kind, CategoryPtr c, std::optional<Obj> base = {});

/// Hash for small fixed-size integer keys.
struct ArrayHash {
  template <std::size_t N>
  std::size_t operator()(const std::array<int, N>& a) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int v : a) h = (h ^ static_cast<std::size_t>(v + 0x9e3779b9)) * 1099511628211ull;
    return h;
  }
};

}  // namespace subfib
