#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subfib {

enum class ErrorCode {
  MalformedEntity,
  UnknownObject,
  UnknownMorphism,
  UnknownType,
  NoPullback,
  NoTerminal,
  MissingBase,
  NoLift,
  NonStrict,
  NonSplitCleavage,
  MismatchedBase,
  MismatchedJudgements,
  NotFaithful,
  NotAFibration,
  TooLarge,
  StageTwoUnavailable,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One violated law or failed check, e.g. {"identity.left", "(f, id_A)"}.
struct Violation {
  std::string check;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using Violations = std::vector<Violation>;

inline void append(Violations& into, const Violations& more, std::string_view prefix = {}) {
  for (const auto& v : more) {
    into.push_back({prefix.empty() ? v.check : std::string(prefix) + "." + v.check, v.detail});
  }
}

}  // namespace subfib
