#include "subfib/gcwf.hpp"

#include <set>

namespace subfib {

namespace {

bool same_category(const CategoryPtr& a, const CategoryPtr& b) { return a == b || *a == *b; }

std::string pair_name(const std::string& a, const std::string& b) { return "(" + a + ", " + b + ")"; }

}  // namespace

Violations check_gcwf(const Gcwf& g) {
  Violations out;
  const auto& U = g.types();
  const auto& T = g.terms();
  const auto& B = *g.base;
  if (!same_category(g.u.base_ptr(), g.base) || !same_category(g.udot.base_ptr(), g.base)) {
    out.push_back({"base", "u and udot are not over the same base"});
    return out;
  }
  try {
    terminal_object(B);
  } catch (const Error&) {
    out.push_back({"base.terminal", "no terminal object"});
  }
  append(out, validate(g.u.functor()), "u");
  append(out, validate(g.udot.functor()), "udot");
  append(out, validate(g.sigma), "sigma");
  append(out, validate(g.delta), "delta");
  if (!out.empty()) return out;

  for (const auto* f : {&g.u, &g.udot}) {
    const char* which = f == &g.u ? "u" : "udot";
    const auto& E = f->total();
    for (Obj a : E.objects()) {
      for (Mor s : B.in((*f)(a))) {
        if (!f->try_lift(a, s)) out.push_back({std::string(which) + ".fibration", pair_name(E.name(a), B.name(s))});
      }
    }
  }
  for (Obj a : T.objects()) {
    if (g.u(g.sigma(a)) != g.udot(a)) out.push_back({"sigma.over_base", T.name(a)});
  }
  for (Mor m : T.morphisms()) {
    if (g.u(g.sigma(m)) != g.udot(m)) out.push_back({"sigma.over_base", T.name(m)});
  }
  for (Mor m : T.morphisms()) {
    if (g.udot.is_cartesian(m) && !g.u.is_cartesian(g.sigma(m))) {
      out.push_back({"sigma.preserves_cartesian", T.name(m)});
    }
  }

  // eta: id → ΔΣ on terms; eps: ΣΔ → id on types.
  if (g.eta.components.size() != T.object_count() || g.eps.components.size() != U.object_count()) {
    out.push_back({"unit_counit.total", "component maps are not total"});
    return out;
  }
  for (Obj a : T.objects()) {
    Mor e = g.eta[a];
    if (T.dom(e) != a || T.cod(e) != g.delta(g.sigma(a))) out.push_back({"eta.typing", T.name(a)});
  }
  for (Obj x : U.objects()) {
    Mor e = g.eps[x];
    if (U.dom(e) != g.sigma(g.delta(x)) || U.cod(e) != x) out.push_back({"eps.typing", U.name(x)});
  }
  if (!out.empty()) return out;
  for (Mor m : T.morphisms()) {
    Mor l = T.compose(g.delta(g.sigma(m)), g.eta[T.dom(m)]);
    Mor r = T.compose(g.eta[T.cod(m)], m);
    if (l != r) out.push_back({"eta.naturality", T.name(m)});
  }
  for (Mor m : U.morphisms()) {
    Mor l = U.compose(m, g.eps[U.dom(m)]);
    Mor r = U.compose(g.eps[U.cod(m)], g.sigma(g.delta(m)));
    if (l != r) out.push_back({"eps.naturality", U.name(m)});
  }
  for (Obj a : T.objects()) {
    Obj sa = g.sigma(a);
    if (U.compose(g.eps[sa], g.sigma(g.eta[a])) != U.identity(sa)) out.push_back({"triangle.sigma", T.name(a)});
  }
  for (Obj x : U.objects()) {
    Obj dx = g.delta(x);
    if (T.compose(g.delta(g.eps[x]), g.eta[dx]) != T.identity(dx)) out.push_back({"triangle.delta", U.name(x)});
  }
  // hom(Σa, A) ≅ hom(a, ΔA) via f ↦ Δf ∘ η_a, for every pair (a, A).
  for (Obj a : T.objects()) {
    Obj sa = g.sigma(a);
    for (Obj x : U.objects()) {
      auto maps = U.hom(sa, x);
      std::set<int> images;
      for (Mor f : maps) {
        if (!images.insert(T.compose(g.delta(f), g.eta[a]).index).second) {
          out.push_back({"adjunction.injective", pair_name(T.name(a), U.name(f))});
        }
      }
      std::size_t expected = T.hom(a, g.delta(x)).size();
      if (images.size() != expected) {
        out.push_back({"adjunction.surjective", pair_name(T.name(a), U.name(x)) + ": " + std::to_string(expected) +
                                                    " maps into the right adjoint, " + std::to_string(images.size()) +
                                                    " reached"});
      }
    }
  }
  for (Obj a : T.objects()) {
    if (!g.udot.is_cartesian(g.eta[a])) out.push_back({"eta.cartesian", T.name(a) + " -> " + T.name(g.eta[a])});
  }
  for (Obj x : U.objects()) {
    if (!g.u.is_cartesian(g.eps[x])) out.push_back({"eps.cartesian", U.name(x) + " -> " + U.name(g.eps[x])});
  }
  return out;
}

Extension context_extension(const Gcwf& g, Obj type) {
  if (!type.valid() || static_cast<std::size_t>(type.index) >= g.types().object_count()) {
    throw Error(ErrorCode::UnknownType, "index " + std::to_string(type.index));
  }
  Mor p = g.u(g.eps[type]);
  return {g.base->dom(p), p};
}

// ---------------------------------------------------------------------------
// Judgements

Violations check_judgement(const Gcwf& g, const Judgement& j) {
  Violations out;
  const auto& U = g.types();
  const auto& T = g.terms();
  const auto& B = *g.base;
  std::visit(
      [&](const auto& x) {
        using J = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<J, TypeJ>) {
          if (g.u(x.type) != x.ctx) out.push_back({"type.context", U.name(x.type)});
        } else if constexpr (std::is_same_v<J, TermJ>) {
          if (g.udot(x.term) != x.ctx) out.push_back({"term.context", T.name(x.term)});
          if (g.sigma(x.term) != x.type) out.push_back({"term.type", T.name(x.term)});
        } else if constexpr (std::is_same_v<J, SubtypeJ>) {
          if (U.dom(x.witness) != x.sub || U.cod(x.witness) != x.super) {
            out.push_back({"subtype.typing", U.name(x.witness)});
          }
          if (g.u(x.witness) != B.identity(x.ctx)) out.push_back({"subtype.vertical", U.name(x.witness)});
        } else {
          if (g.udot(x.term) != x.ctx) out.push_back({"coerced.context", T.name(x.term)});
          if (U.dom(x.witness) != g.sigma(x.term) || U.cod(x.witness) != x.type) {
            out.push_back({"coerced.typing", U.name(x.witness)});
          }
          if (g.u(x.witness) != B.identity(x.ctx)) out.push_back({"coerced.vertical", U.name(x.witness)});
        }
      },
      j);
  return out;
}

std::string format_judgement(const Gcwf& g, const Judgement& j) {
  const auto& U = g.types();
  const auto& T = g.terms();
  const auto& B = *g.base;
  return std::visit(
      [&](const auto& x) -> std::string {
        using J = std::decay_t<decltype(x)>;
        std::string ctx = B.name(x.ctx) + " |- ";
        if constexpr (std::is_same_v<J, TypeJ>) {
          return ctx + U.name(x.type) + " type";
        } else if constexpr (std::is_same_v<J, TermJ>) {
          return ctx + T.name(x.term) + " : " + U.name(x.type);
        } else if constexpr (std::is_same_v<J, SubtypeJ>) {
          return ctx + U.name(x.sub) + " <= " + U.name(x.super) + " [witness=" + U.name(x.witness) + "]";
        } else {
          return ctx + T.name(x.term) + " : " + U.name(x.type) + " [witness=" + U.name(x.witness) + "]";
        }
      },
      j);
}

std::vector<TypeJ> enumerate_types(const Gcwf& g, Obj ctx) {
  std::vector<TypeJ> out;
  for (Obj a : g.u.objects_over(ctx)) out.push_back({ctx, a});
  return out;
}

std::vector<TermJ> enumerate_terms(const Gcwf& g, Obj ctx, std::optional<Obj> type) {
  std::vector<TermJ> out;
  for (Obj a : g.udot.objects_over(ctx)) {
    Obj t = g.sigma(a);
    if (type && t != *type) continue;
    out.push_back({ctx, a, t});
  }
  return out;
}

std::vector<SubtypeJ> enumerate_subtypes(const Gcwf& g, Obj ctx, std::optional<Obj> sub, std::optional<Obj> super) {
  std::vector<SubtypeJ> out;
  const auto& U = g.types();
  Mor id = g.base->identity(ctx);
  for (Obj x : g.u.objects_over(ctx)) {
    if (sub && x != *sub) continue;
    for (Mor f : U.out(x)) {
      if (g.u(f) != id) continue;
      if (super && U.cod(f) != *super) continue;
      out.push_back({ctx, f, x, U.cod(f)});
    }
  }
  return out;
}

std::vector<CoercedTermJ> enumerate_coerced_terms(const Gcwf& g, Obj ctx, std::optional<Obj> term,
                                                  std::optional<Obj> type) {
  std::vector<CoercedTermJ> out;
  const auto& U = g.types();
  Mor id = g.base->identity(ctx);
  for (Obj a : g.udot.objects_over(ctx)) {
    if (term && a != *term) continue;
    for (Mor f : U.out(g.sigma(a))) {
      if (g.u(f) != id) continue;
      if (type && U.cod(f) != *type) continue;
      out.push_back({ctx, a, f, U.cod(f)});
    }
  }
  return out;
}

std::vector<Judgement> enumerate_judgements(const Gcwf& g, JudgementForm form, Obj ctx) {
  std::vector<Judgement> out;
  switch (form) {
    case JudgementForm::Type:
      for (auto& j : enumerate_types(g, ctx)) out.emplace_back(j);
      break;
    case JudgementForm::Term:
      for (auto& j : enumerate_terms(g, ctx)) out.emplace_back(j);
      break;
    case JudgementForm::Subtype:
      for (auto& j : enumerate_subtypes(g, ctx)) out.emplace_back(j);
      break;
    case JudgementForm::CoercedTerm:
      for (auto& j : enumerate_coerced_terms(g, ctx)) out.emplace_back(j);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rules

namespace {

void require_valid(const Gcwf& g, const Judgement& j, const char* role) {
  auto bad = check_judgement(g, j);
  if (!bad.empty()) {
    throw Error(ErrorCode::MismatchedJudgements,
                std::string(role) + " premise is not a valid judgement: " + bad.front().check + " " + bad.front().detail);
  }
}

}  // namespace

CoercedTermJ rule_sbsm(const Gcwf& g, const CoercedTermJ& ct, const SubtypeJ& st) {
  require_valid(g, ct, "term");
  require_valid(g, st, "subtype");
  if (ct.ctx != st.ctx || ct.type != st.sub) {
    throw Error(ErrorCode::MismatchedJudgements, "coerced term type " + g.types().name(ct.type) +
                                                     " does not match subtype " + g.types().name(st.sub));
  }
  return {ct.ctx, ct.term, g.types().compose(st.witness, ct.witness), st.super};
}

SubtypeJ rule_trans(const Gcwf& g, const SubtypeJ& st1, const SubtypeJ& st2) {
  require_valid(g, st1, "first");
  require_valid(g, st2, "second");
  if (st1.ctx != st2.ctx || st2.super != st1.sub) {
    throw Error(ErrorCode::MismatchedJudgements,
                "middle types differ: " + g.types().name(st2.super) + " and " + g.types().name(st1.sub));
  }
  return {st1.ctx, g.types().compose(st1.witness, st2.witness), st2.sub, st1.super};
}

SubtypeJ rule_wkn(const Gcwf& g, const SubtypeJ& st, Obj b) {
  require_valid(g, st, "subtype");
  require_valid(g, TypeJ{st.ctx, b}, "type");
  auto ext = context_extension(g, b);
  Mor w = g.u.reindex_vertical(st.witness, ext.projection);
  const auto& U = g.types();
  return {ext.context, w, U.dom(w), U.cod(w)};
}

Substitution rule_sbst_detailed(const Gcwf& g, const SubtypeJ& st, const CoercedTermJ& tm) {
  require_valid(g, st, "subtype");
  require_valid(g, tm, "term");
  const auto& U = g.types();
  const auto& T = g.terms();
  const auto& B = *g.base;
  auto ext = context_extension(g, tm.type);
  if (ext.context != st.ctx || B.cod(ext.projection) != tm.ctx) {
    throw Error(ErrorCode::MismatchedJudgements, "subtype judgement does not live over the extension " +
                                                     B.name(ext.context) + " of " + B.name(tm.ctx) + " by " +
                                                     U.name(tm.type));
  }
  Mor dg_eta = T.compose(g.delta(tm.witness), g.eta[tm.term]);
  Mor sigma = g.udot(dg_eta);
  // The unique d: A → ΣΔA over σ with ε_A ∘ d = id_A, by cartesianness of ε_A.
  Obj a = tm.type;
  Mor eps = g.eps[a];
  std::optional<Mor> filler;
  for (Mor d : U.hom(a, U.dom(eps))) {
    if (g.u(d) != sigma || U.compose(eps, d) != U.identity(a)) continue;
    if (filler) throw Error(ErrorCode::NoLift, "counit filler is not unique at " + U.name(a));
    filler = d;
  }
  if (!filler) throw Error(ErrorCode::NoLift, "no counit filler at " + U.name(a));
  if (U.compose(*filler, tm.witness) != g.sigma(dg_eta)) {
    throw Error(ErrorCode::NoLift, "counit filler does not factor the coerced term at " + U.name(a));
  }
  Mor w = g.u.reindex_vertical(st.witness, sigma);
  return {{tm.ctx, w, U.dom(w), U.cod(w)}, sigma, *filler};
}

SubtypeJ rule_sbst(const Gcwf& g, const SubtypeJ& st, const CoercedTermJ& tm) {
  return rule_sbst_detailed(g, st, tm).result;
}

// ---------------------------------------------------------------------------

Violations check_sigma_faithful(const Gcwf& g) {
  Violations out;
  const auto& U = g.types();
  const auto& T = g.terms();
  for (Obj b : T.objects()) {
    Mor eb = g.eta[b];
    for (Obj x : T.objects()) {
      std::set<int> seen;
      for (Mor f : T.hom(x, b)) {
        if (!seen.insert(T.compose(eb, f).index).second) out.push_back({"eta.monic", T.name(eb) + " at " + T.name(f)});
      }
    }
  }
  for (Obj a : T.objects()) {
    for (Obj b : T.objects()) {
      auto hom = T.hom(a, b);
      std::set<int> image;
      for (Mor f : hom) {
        if (!image.insert(g.sigma(f).index).second) out.push_back({"sigma.injective", T.name(f)});
      }
      // The compatible subset {f | Ση_b ∘ f = ΣΔf ∘ Ση_a}.
      Obj sa = g.sigma(a), sb = g.sigma(b);
      Mor seb = g.sigma(g.eta[b]), sea = g.sigma(g.eta[a]);
      std::set<int> compatible;
      for (Mor f : U.hom(sa, sb)) {
        if (U.compose(seb, f) == U.compose(g.sigma(g.delta(f)), sea)) compatible.insert(f.index);
      }
      if (compatible != image) {
        out.push_back({"sigma.bijection", pair_name(T.name(a), T.name(b)) + ": " + std::to_string(image.size()) +
                                              " images, " + std::to_string(compatible.size()) + " compatible"});
        continue;
      }
      // Inverse through cartesianness of η_b: the unique h over u f with η_b h = Δf η_a.
      for (int fi : compatible) {
        Mor f{fi};
        Mor target = T.compose(g.delta(f), g.eta[a]);
        std::optional<Mor> pre;
        int count = 0;
        for (Mor h : hom) {
          if (g.udot(h) == g.u(f) && T.compose(g.eta[b], h) == target) {
            pre = h;
            ++count;
          }
        }
        if (count != 1 || g.sigma(*pre) != f) out.push_back({"sigma.inverse", U.name(f)});
      }
    }
  }
  return out;
}

Violations check_gcwf_morphism(const Gcwf& g, const Gcwf& g2, const GcwfMorphism& m) {
  Violations out;
  if (!same_category(g.base, g2.base)) {
    out.push_back({"base", "gcwfs over different bases"});
    return out;
  }
  append(out, check_fibration_morphism(g.u, g2.u, m.h), "types");
  append(out, check_fibration_morphism(g.udot, g2.udot, m.hdot), "terms");
  if (!out.empty()) return out;
  const auto& T = g.terms();
  for (Obj a : T.objects()) {
    if (m.h(g.sigma(a)) != g2.sigma(m.hdot(a))) out.push_back({"sigma.commutes", T.name(a)});
  }
  for (Mor f : T.morphisms()) {
    if (m.h(g.sigma(f)) != g2.sigma(m.hdot(f))) out.push_back({"sigma.commutes", T.name(f)});
  }
  return out;
}

}  // namespace subfib
