#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzkit/model.hpp"

namespace fuzzkit {

/// 1-based line/column of a token in FCL source. Columns count bytes.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
  bool operator==(const SourceSpan&) const = default;
};

enum class FclErrorCode {
  Syntax,
  MissingMethod,
  DegenerateRange,
  DuplicateDefinition,
  MissingDefinition,
  WrongSection,
  Validation,  // a model invariant; see FclDiagnostic::violation
};

/// One parse or semantic error. The message is rebuilt from the fields.
struct FclDiagnostic {
  FclErrorCode code = FclErrorCode::Syntax;
  std::optional<ViolationCode> violation;
  SourceSpan span;
  std::string expected;
  std::string found;

  /// "Syntax", "MissingMethod", ... or the violation code for Validation.
  std::string_view code_name() const noexcept;
  /// "<line>:<column>: <code>: expected <expected>, found <found>"
  std::string message() const;
};

/// Thrown by parse_fcl. Syntax errors carry exactly one diagnostic (the
/// first error); semantic errors carry every problem found.
class FclError : public std::runtime_error {
 public:
  explicit FclError(std::vector<FclDiagnostic> diagnostics);

  const std::vector<FclDiagnostic>& diagnostics() const noexcept { return diagnostics_; }
  const FclDiagnostic& first() const noexcept { return diagnostics_.front(); }

 private:
  std::vector<FclDiagnostic> diagnostics_;
};

/// Parses one FUNCTION_BLOCK. The result always passes validate().
FunctionBlock parse_fcl(std::string_view source);

class RangeInferenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hull of all x-parameters of `terms`, used when a variable declares no
/// RANGE. Throws RangeInferenceError when the hull is empty or a point.
Range infer_range(std::span<const Term> terms);

/// Thrown by emit_fcl for systems FCL cannot express.
class UnrepresentableError : public std::runtime_error {
 public:
  UnrepresentableError(std::string variable, std::string term, const std::string& message);
  const std::string& variable() const noexcept { return variable_; }
  const std::string& term() const noexcept { return term_; }

 private:
  std::string variable_;
  std::string term_;
};

/// Canonical FCL text: one declaration per line, two-space indent, the
/// default rule block first. Linear-family membership functions only.
std::string emit_fcl(const FunctionBlock& fb);

}  // namespace fuzzkit
