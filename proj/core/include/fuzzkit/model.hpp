#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzkit/fuzzy_math.hpp"
#include "fuzzkit/membership.hpp"

namespace fuzzkit {

enum class Activation { Min, Prod };
enum class Accumulation { Max, BSum, NSum };
enum class DefuzzMethod { COG, COGS, COA, MOM, RM, LM };
enum class VariableKind { Input, Output };

std::string_view to_string(TNorm m) noexcept;
std::string_view to_string(TConorm m) noexcept;
std::string_view to_string(Activation m) noexcept;
std::string_view to_string(Accumulation m) noexcept;
std::string_view to_string(DefuzzMethod m) noexcept;
std::string_view to_string(VariableKind k) noexcept;

// Case-insensitive lookups of the names produced by to_string.
std::optional<TNorm> parse_tnorm(std::string_view s);
std::optional<TConorm> parse_tconorm(std::string_view s);
std::optional<Activation> parse_activation(std::string_view s);
std::optional<Accumulation> parse_accumulation(std::string_view s);
std::optional<DefuzzMethod> parse_defuzz_method(std::string_view s);

constexpr TConorm as_tconorm(Accumulation m) noexcept {
  switch (m) {
    case Accumulation::Max: return TConorm::Max;
    case Accumulation::BSum: return TConorm::BSum;
    case Accumulation::NSum: return TConorm::NSum;
  }
  return TConorm::Max;
}

struct Term {
  std::string name;
  MembershipFunction mf;
  bool operator==(const Term&) const = default;
};

struct Range {
  double min = 0.0;
  double max = 1.0;
  double width() const noexcept { return max - min; }
  double clamp(double x) const noexcept { return x < min ? min : (x > max ? max : x); }
  bool operator==(const Range&) const = default;
};

struct LinguisticVariable {
  std::string name;
  Range range;
  std::vector<Term> terms;
  VariableKind kind = VariableKind::Input;
  // Meaningful for outputs only; inputs keep the defaults.
  double default_value = 0.0;
  DefuzzMethod defuzzifier = DefuzzMethod::COG;

  const Term* find_term(std::string_view term) const noexcept;
  bool operator==(const LinguisticVariable&) const = default;
};

/// Antecedent expression tree.
struct Condition {
  enum class Kind { Is, Not, And, Or };

  Kind kind = Kind::Is;
  std::string variable;  // Is only
  std::string term;      // Is only
  bool negated = false;  // Is only: "variable IS NOT term"
  std::vector<Condition> children;

  static Condition is(std::string variable, std::string term, bool negated = false);
  static Condition negation(Condition child);
  static Condition all_of(std::vector<Condition> children);
  static Condition any_of(std::vector<Condition> children);

  bool operator==(const Condition&) const = default;
};

struct Consequent {
  std::string variable;
  std::string term;
  bool operator==(const Consequent&) const = default;
};

struct Rule {
  std::string label;
  Condition antecedent;
  std::vector<Consequent> consequents;
  double weight = 1.0;
  bool operator==(const Rule&) const = default;
};

struct RuleBlock {
  std::string name;
  TNorm and_method = TNorm::Min;
  TConorm or_method = TConorm::Max;
  Activation activation = Activation::Min;
  Accumulation accumulation = Accumulation::Max;
  std::vector<Rule> rules;
  bool operator==(const RuleBlock&) const = default;
};

struct FunctionBlock {
  std::string name;
  std::vector<LinguisticVariable> inputs;
  std::vector<LinguisticVariable> outputs;
  std::vector<RuleBlock> rule_blocks;
  std::string default_rule_block;

  const LinguisticVariable* find_input(std::string_view name) const noexcept;
  const LinguisticVariable* find_output(std::string_view name) const noexcept;
  const RuleBlock* find_rule_block(std::string_view name) const noexcept;
  std::vector<std::string> rule_block_names() const;
  bool operator==(const FunctionBlock&) const = default;
};

enum class ViolationCode {
  EmptyName,
  InvalidRange,
  DuplicateVariable,
  DuplicateTerm,
  WrongVariableKind,
  DefaultOutOfRange,
  InvalidMembershipParameters,
  CogsRequiresSingletons,
  SpikeOutOfRange,
  NoRuleBlocks,
  DuplicateRuleBlock,
  UnknownDefaultRuleBlock,
  DeMorganPairViolation,
  DuplicateRuleLabel,
  MalformedCondition,
  UnknownVariable,
  UnknownTerm,
  NotAnInput,
  NotAnOutput,
  EmptyConsequents,
  WeightOutOfRange,
};

std::string_view to_string(ViolationCode code) noexcept;

/// A broken invariant. `path` is a JSON-pointer into the function block
/// using the field names of the JSON exchange format, e.g.
/// "/rule_blocks/0/rules/2/antecedent/operands/1".
struct Violation {
  ViolationCode code;
  std::string path;
  std::string message;
  bool operator==(const Violation&) const = default;
};

/// Checks every structural invariant of `fb`. Pure; an empty result means
/// the engine accepts the system for any in-range input.
std::vector<Violation> validate(const FunctionBlock& fb);

/// One line per violation: "<code> at <path>: <message>".
std::string format_violations(const std::vector<Violation>& violations);

}  // namespace fuzzkit
