#include "subfib/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "subfib/model_file.hpp"
#include "subfib/models.hpp"
#include "subfib/monad.hpp"

namespace subfib {

namespace {

struct Line {
  std::string check;
  bool pass;
  std::string detail;
};

struct Report {
  std::string suite;
  std::vector<Line> lines;

  bool ok() const {
    return std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.pass; });
  }
};

// Each violation is filed under the longest listed id that prefixes it.
Report make_report(std::string suite, const std::vector<std::string>& ids, const Violations& v) {
  std::map<std::string, std::vector<const Violation*>> by_id;
  std::vector<std::string> order = ids;
  for (const auto& x : v) {
    std::string best;
    for (const auto& id : ids) {
      bool match = x.check == id || x.check.starts_with(id + ".");
      if (match && id.size() > best.size()) best = id;
    }
    if (best.empty()) {
      best = x.check;
      if (std::find(order.begin(), order.end(), best) == order.end()) order.push_back(best);
    }
    by_id[best].push_back(&x);
  }
  Report r{std::move(suite), {}};
  for (const auto& id : order) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      r.lines.push_back({id, true, ""});
      continue;
    }
    for (const auto* x : it->second) r.lines.push_back({id, false, x->check == id ? x->detail : x->check + " " + x->detail});
  }
  return r;
}

void print(const Report& r, std::ostream& out) {
  out << "suite " << r.suite << "\n";
  std::set<std::string> ids, failed;
  std::size_t violations = 0;
  for (const auto& l : r.lines) {
    ids.insert(l.check);
    if (!l.pass) {
      failed.insert(l.check);
      ++violations;
    }
    out << (l.pass ? "pass " : "fail ") << l.check;
    if (!l.detail.empty()) out << " " << l.detail;
    out << "\n";
  }
  out << "summary " << ids.size() << " checks, " << ids.size() - failed.size() << " passed, " << failed.size()
      << " failed, " << violations << " violations\n";
}

const std::vector<std::string> kGcwfChecks{
    "base",           "base.terminal",  "types",          "terms",          "u",
    "udot",           "sigma",          "delta",          "sigma.over_base", "sigma.preserves_cartesian",
    "eta.typing",     "eps.typing",     "eta.naturality", "eps.naturality", "triangle.sigma",
    "triangle.delta", "unit_counit.total", "adjunction.injective", "adjunction.surjective", "eta.cartesian",
    "eps.cartesian"};
const std::vector<std::string> kFaithfulChecks{"eta.monic", "sigma.injective", "sigma.bijection", "sigma.inverse",
                                               "sigma.commutes"};
const std::vector<std::string> kFibMonadChecks{"fib.unit", "fib.mult", "fib.unit.left", "fib.unit.right",
                                               "fib.associativity"};
const std::vector<std::string> kGcwfMonadChecks{
    "gcwf.unit",           "gcwf.mult",           "gcwf.unit.left.types",   "gcwf.unit.left.terms",
    "gcwf.unit.right.types", "gcwf.unit.right.terms", "gcwf.associativity.types", "gcwf.associativity.terms"};

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownObject:
    case ErrorCode::UnknownMorphism:
    case ErrorCode::UnknownType:
      return 2;
    default:
      return 1;
  }
}

const FibrationRecord& pick_fibration(const ModelFile& m, const std::string& name) {
  if (!name.empty()) {
    auto it = m.fibrations.find(name);
    if (it == m.fibrations.end()) throw Error(ErrorCode::UnknownObject, "no fibration named " + name);
    return it->second;
  }
  if (m.fibrations.size() != 1) {
    throw Error(ErrorCode::ParseError, "model has " + std::to_string(m.fibrations.size()) + " fibrations; use --fibration");
  }
  return m.fibrations.begin()->second;
}

std::string pick_fun(const ModelFile& m, const std::string& name) {
  if (!name.empty()) return name;
  if (m.fun_structures.size() != 1) {
    throw Error(ErrorCode::ParseError,
                "model has " + std::to_string(m.fun_structures.size()) + " fun-structures; use --fun");
  }
  return m.fun_structures.begin()->first;
}

Fibration sample_doctrine(const std::string& name) {
  if (name == "heyting") return heyting_sample().fibration;
  if (name == "chain2") return chain2_doctrine();
  if (name == "chain3") return chain3_doctrine();
  throw Error(ErrorCode::ParseError, "unknown doctrine sample " + name + " (heyting, chain2, chain3)");
}

// Premise ids: ty:<type>, st:<vertical witness>, ct:<term>@<witness>.
Judgement parse_premise(const Gcwf& g, const std::string& id) {
  auto colon = id.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "premise id needs a kind prefix: " + id);
  auto kind = id.substr(0, colon);
  auto rest = id.substr(colon + 1);
  const auto& U = g.types();
  const auto& T = g.terms();
  auto type = [&](const std::string& n) {
    auto x = U.find_object(n);
    if (!x) throw Error(ErrorCode::UnknownType, n);
    return *x;
  };
  auto arrow = [&](const std::string& n) {
    auto f = U.find_morphism(n);
    if (!f) throw Error(ErrorCode::UnknownMorphism, n);
    return *f;
  };
  if (kind == "ty") {
    Obj a = type(rest);
    return TypeJ{g.u(a), a};
  }
  if (kind == "st") {
    Mor f = arrow(rest);
    return SubtypeJ{g.u(U.dom(f)), f, U.dom(f), U.cod(f)};
  }
  if (kind == "ct") {
    auto at = rest.rfind('@');
    if (at == std::string::npos) throw Error(ErrorCode::ParseError, "coerced term id is ct:<term>@<witness>: " + id);
    auto t = T.find_object(rest.substr(0, at));
    if (!t) throw Error(ErrorCode::UnknownObject, rest.substr(0, at));
    Mor f = arrow(rest.substr(at + 1));
    return CoercedTermJ{g.udot(*t), *t, f, U.cod(f)};
  }
  throw Error(ErrorCode::ParseError, "unknown premise kind " + kind);
}

template <class J>
J as(const Judgement& j, const char* what) {
  if (!std::holds_alternative<J>(j)) throw Error(ErrorCode::MismatchedJudgements, std::string("expected ") + what);
  return std::get<J>(j);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write_dot(std::ostream& os, const FinCategory& c, const Fibration* p) {
  os << "digraph G {\n";
  for (Obj x : c.objects()) os << "  " << quote(c.name(x)) << ";\n";
  for (Mor m : c.morphisms()) {
    if (c.is_identity(m)) continue;
    os << "  " << quote(c.name(c.dom(m))) << " -> " << quote(c.name(c.cod(m))) << " [label=" << quote(c.name(m));
    if (p && p->is_vertical(m)) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  out << text;
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + path);
  f << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite fibrations, generalized categories with families and subtyping judgements", "subfib"};
  app.require_subcommand(1);

  std::string file, output, model, gcwf_name, fun_name, fib_name, cat_name, sample;
  int n = 0;
  bool require_stage2 = false, structure_only = false;
  std::vector<std::string> premises;

  auto* validate_cmd = app.add_subcommand("validate", "Load a model file and validate every entity");
  validate_cmd->add_option("file", file, "Model file")->required();

  auto* build = app.add_subcommand("build", "Build a model and write it as JSON");
  build->require_subcommand(1);
  auto add_output = [&](CLI::App* c) { c->add_option("-o,--output", output, "Output file")->required(); };
  auto add_model = [&](CLI::App* c) { c->add_option("--model", model, "Model file")->required(); };
  for (const char* kind : {"finset", "kernel-pair", "subobject"}) {
    auto* c = build->add_subcommand(kind);
    c->add_option("n", n, "Size of the finite-set skeleton")->required()->check(CLI::Range(0, 4));
    add_output(c);
  }
  auto* bdoc = build->add_subcommand("doctrine", "Doctrine gcwf of a sample Heyting fibration");
  bdoc->add_option("sample", sample, "heyting, chain2 or chain3")->required();
  add_output(bdoc);
  for (const char* kind : {"comma", "vop"}) {
    auto* c = build->add_subcommand(kind);
    add_model(c);
    c->add_option("--fibration", fib_name, "Fibration in the model");
    add_output(c);
  }
  auto* btg = build->add_subcommand("t-gcwf", "Apply the gcwf monad to a gcwf");
  add_model(btg);
  btg->add_option("--gcwf", gcwf_name, "Gcwf in the model");
  btg->add_flag("--structure-only", structure_only, "Skip validation of the result");
  add_output(btg);

  auto* derive = app.add_subcommand("derive", "Apply a structural rule and print the conclusion");
  derive->require_subcommand(1);
  for (const char* rule : {"sbsm", "trans", "wkn", "sbst", "fun-sub", "lam"}) {
    auto* c = derive->add_subcommand(rule);
    add_model(c);
    c->add_option("--premises", premises, "Premise ids: ty:<type>, st:<witness>, ct:<term>@<witness>")
        ->required()
        ->expected(1, 3);
    c->add_option("--gcwf", gcwf_name, "Gcwf in the model");
    c->add_option("--fun", fun_name, "Fun-structure in the model");
    c->add_option("-o,--output", output, "Also write the transcript here");
  }

  auto* check = app.add_subcommand("check", "Run a check suite and print a report");
  check->require_subcommand(1);
  for (const char* suite : {"gcwf", "faithful", "monad-laws", "fun-structure"}) {
    auto* c = check->add_subcommand(suite);
    add_model(c);
    c->add_option("--gcwf", gcwf_name, "Gcwf in the model");
    c->add_option("--fibration", fib_name, "Fibration in the model (monad-laws)");
    c->add_option("--fun", fun_name, "Fun-structure in the model");
    c->add_flag("--require-stage2", require_stage2, "Fail when stage 2 fails");
  }

  auto* graph = app.add_subcommand("graph", "Write a category as a dot digraph");
  graph->add_option("file", file, "Model file")->required();
  add_output(graph);
  graph->add_option("--category", cat_name, "Category in the model");
  graph->add_option("--fibration", fib_name, "Draw the total category, vertical arrows dashed");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate_cmd->parsed()) {
      auto m = load_model(file);
      out << "valid " << m.categories.size() << " categories, " << m.functors.size() << " functors, "
          << m.transformations.size() << " transformations, " << m.fibrations.size() << " fibrations, "
          << m.gcwfs.size() << " gcwfs, " << m.fun_structures.size() << " fun-structures\n";
      return 0;
    }

    if (build->parsed()) {
      ModelFile m;
      auto* c = build->get_subcommands().front();
      std::string kind = c->get_name();
      if (kind == "finset") {
        m.add_category("finset" + std::to_string(n), finset_skeleton(n));
      } else if (kind == "kernel-pair") {
        m.add_gcwf("kernel_pair", kernel_pair_gcwf(finset_skeleton(n)));
      } else if (kind == "subobject") {
        auto g = subobject_gcwf(n);
        m.add_gcwf("subobject", g);
        m.add_fun_structure("subobject.fun", subobject_fun_structure(g));
      } else if (kind == "doctrine") {
        auto g = doctrine_gcwf(sample_doctrine(sample));
        m.add_gcwf("doctrine", g);
        m.add_fun_structure("doctrine.fun", doctrine_fun_structure(g));
      } else if (kind == "comma") {
        m = load_model(model);
        auto p = pick_fibration(m, fib_name).fibration;
        m.add_fibration("comma", T_fib(p).fibration);
      } else if (kind == "vop") {
        m = load_model(model);
        auto p = pick_fibration(m, fib_name).fibration;
        m.add_fibration("vop", vertical_opposite(p));
      } else {
        m = load_model(model);
        auto data = T_gcwf(m.gcwf(m.gcwf_name(gcwf_name)),
                           {.structure_only = structure_only, .max_objects = default_max_objects()});
        auto name = m.add_gcwf("t_gcwf", data.result);
        m.add_functor(name + ".unit.types", data.unit.h);
        m.add_functor(name + ".unit.terms", data.unit.hdot);
      }
      save_model(m, output);
      out << "wrote " << output << "\n";
      return 0;
    }

    if (derive->parsed()) {
      auto* c = derive->get_subcommands().front();
      std::string rule = c->get_name();
      auto m = load_model(model);
      std::string gname = gcwf_name;
      std::optional<FunStructure> fs;
      if (rule == "fun-sub" || rule == "lam") {
        auto fname = pick_fun(m, fun_name);
        fs = m.fun_structure(fname);
        gname = m.fun_structures.at(fname).gcwf;
      }
      const Gcwf& g = m.gcwf(m.gcwf_name(gname));
      std::vector<Judgement> ps;
      for (const auto& p : premises) ps.push_back(parse_premise(g, p));
      auto need = [&](std::size_t k) {
        if (ps.size() != k) {
          throw Error(ErrorCode::ParseError, rule + " takes " + std::to_string(k) + " premises");
        }
      };
      Judgement result;
      if (rule == "sbsm") {
        need(2);
        result = rule_sbsm(g, as<CoercedTermJ>(ps[0], "a coerced term"), as<SubtypeJ>(ps[1], "a subtype"));
      } else if (rule == "trans") {
        need(2);
        // premises in chain order: A'' <= A' first, then A' <= A
        result = rule_trans(g, as<SubtypeJ>(ps[1], "a subtype"), as<SubtypeJ>(ps[0], "a subtype"));
      } else if (rule == "wkn") {
        need(2);
        result = rule_wkn(g, as<SubtypeJ>(ps[0], "a subtype"), as<TypeJ>(ps[1], "a type").type);
      } else if (rule == "sbst") {
        need(2);
        result = rule_sbst(g, as<SubtypeJ>(ps[0], "a subtype"), as<CoercedTermJ>(ps[1], "a coerced term"));
      } else if (rule == "fun-sub") {
        need(2);
        result = derive_fun_subtyping(*fs, as<SubtypeJ>(ps[0], "a subtype"), as<SubtypeJ>(ps[1], "a subtype"));
      } else {
        need(3);
        result = derive_lam_typing(*fs, as<TypeJ>(ps[0], "a type").type, as<CoercedTermJ>(ps[1], "a coerced term"),
                                   as<TypeJ>(ps[2], "a type").type);
      }
      emit(format_judgement(g, result) + "\n", output, out);
      return 0;
    }

    if (check->parsed()) {
      auto* c = check->get_subcommands().front();
      std::string suite = c->get_name();
      auto m = load_model(model);
      if (suite == "fun-structure") {
        auto fname = pick_fun(m, fun_name);
        auto report = check_fun_structure(m.fun_structure(fname));
        auto r1 = make_report("fun-structure/" + fname + " stage 1", {"fun"}, report.stage1);
        auto r2 = make_report("fun-structure/" + fname + " stage 2", {"lam", "square.commutes", "pullback"},
                              report.stage2);
        print(r1, out);
        print(r2, out);
        out << "stage 1 " << (r1.ok() ? "pass" : "fail") << "\n";
        out << "stage 2 " << (r2.ok() ? "pass" : "fail") << (require_stage2 ? " (required)" : " (not required)")
            << "\n";
        return r1.ok() && (r2.ok() || !require_stage2) ? 0 : 1;
      }
      if (suite == "monad-laws" && (!fib_name.empty() || m.gcwfs.empty())) {
        Violations v;
        append(v, check_monad_laws_fib(pick_fibration(m, fib_name).fibration), "fib");
        auto r = make_report("monad-laws", kFibMonadChecks, v);
        print(r, out);
        return r.ok() ? 0 : 1;
      }
      auto gname = m.gcwf_name(gcwf_name);
      const Gcwf& g = m.gcwf(gname);
      Report r;
      if (suite == "gcwf") {
        r = make_report("gcwf/" + gname, kGcwfChecks, check_gcwf(g));
      } else if (suite == "faithful") {
        r = make_report("faithful/" + gname, kFaithfulChecks, check_sigma_faithful(g));
      } else {
        Violations v;
        append(v, check_monad_laws_fib(g.u), "fib");
        append(v, check_monad_laws_gcwf(g), "gcwf");
        auto ids = kFibMonadChecks;
        ids.insert(ids.end(), kGcwfMonadChecks.begin(), kGcwfMonadChecks.end());
        r = make_report("monad-laws/" + gname, ids, v);
      }
      print(r, out);
      return r.ok() ? 0 : 1;
    }

    if (graph->parsed()) {
      auto m = load_model(file);
      std::ostringstream dot;
      if (!cat_name.empty()) {
        auto it = m.categories.find(cat_name);
        if (it == m.categories.end()) throw Error(ErrorCode::UnknownObject, "no category named " + cat_name);
        write_dot(dot, *it->second, nullptr);
      } else if (!fib_name.empty() || !m.fibrations.empty()) {
        const auto& p = pick_fibration(m, fib_name.empty() && m.fibrations.size() > 1 ? m.fibrations.begin()->first
                                                                                       : fib_name)
                            .fibration;
        write_dot(dot, p.total(), &p);
      } else if (!m.categories.empty()) {
        write_dot(dot, *m.categories.begin()->second, nullptr);
      } else {
        throw Error(ErrorCode::ParseError, "model has no categories");
      }
      std::ofstream f(output, std::ios::binary);
      if (!f) throw Error(ErrorCode::ParseError, "cannot write " + output);
      f << dot.str();
      out << "wrote " << output << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 2;
}

}  // namespace subfib
