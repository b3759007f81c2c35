#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "subfib/funty.hpp"

namespace subfib {

struct FunctorRecord {
  std::string source, target;
  FinFunctor functor;
};

struct TransformationRecord {
  std::string source, target;  // functor names
  NatTransformation transformation;
};

struct FibrationRecord {
  std::string functor;
  Fibration fibration;
};

struct GcwfRecord {
  std::string base, types, terms, sigma, delta, eta, eps;
  Gcwf gcwf;
};

struct FunStructureRecord {
  std::string gcwf;
  std::vector<FunEntry> fun;
  std::vector<LamEntry> lam;
};

/// Named entities with cross-references by name. Serialization is canonical:
/// keys sorted, lists in identifier order.
class ModelFile {
 public:
  std::map<std::string, CategoryPtr> categories;
  std::map<std::string, FunctorRecord> functors;
  std::map<std::string, TransformationRecord> transformations;
  std::map<std::string, FibrationRecord> fibrations;
  std::map<std::string, GcwfRecord> gcwfs;
  std::map<std::string, FunStructureRecord> fun_structures;

  // Each add_* registers dependencies under derived names and reuses an
  // entry that is already present; the name actually used is returned.
  std::string add_category(const std::string& name, CategoryPtr c);
  std::string add_functor(const std::string& name, const FinFunctor& f);
  std::string add_transformation(const std::string& name, const NatTransformation& t);
  std::string add_fibration(const std::string& name, const Fibration& f);
  std::string add_gcwf(const std::string& name, const Gcwf& g);
  std::string add_fun_structure(const std::string& name, const FunStructure& fs);

  const Gcwf& gcwf(const std::string& name) const;
  /// The single gcwf, or the named one.
  const std::string& gcwf_name(const std::string& name = {}) const;
  FunStructure fun_structure(const std::string& name) const;
};

/// Throws ParseError for malformed JSON or dangling references, and
/// ValidationError when an entity breaks its laws.
ModelFile parse_model(const std::string& text);
ModelFile load_model(const std::filesystem::path& path);
Violations validate(const ModelFile& m);

std::string serialize(const ModelFile& m);
void save_model(const ModelFile& m, const std::filesystem::path& path);

}  // namespace subfib
