#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzkit/engine.hpp"
#include "fuzzkit/model.hpp"

namespace fuzzkit {

inline constexpr int kSchemaVersion = 1;

enum class SchemaErrorCode {
  MalformedJson,
  UnsupportedVersion,
  MissingField,
  UnknownField,
  WrongType,
  InvalidValue,
  ValidationFailed,
};

std::string_view to_string(SchemaErrorCode code) noexcept;

/// Rejection of a JSON system document. `path` is a JSON pointer into the
/// document ("" for the root). ValidationFailed carries the violations,
/// with paths rooted at the document.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(SchemaErrorCode code, std::string path, const std::string& message,
              std::vector<Violation> violations = {});

  SchemaErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  SchemaErrorCode code_;
  std::string path_;
  std::vector<Violation> violations_;
};

/// Canonical document: fixed key order, two-space indent, trailing newline.
std::string to_json(const FunctionBlock& fb);

/// Strict reader. Unknown, missing and ill-typed fields are errors; the
/// result always passes validate().
FunctionBlock from_json(std::string_view text);

/// Full-precision trace document, used by `fuzzkit eval --json` and the
/// HTTP service.
std::string trace_to_json(const EvaluationTrace& trace);

}  // namespace fuzzkit
