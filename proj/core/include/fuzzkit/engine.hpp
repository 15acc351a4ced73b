#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fuzzkit/model.hpp"

namespace fuzzkit {

struct EngineConfig {
  /// Uniform samples per output range used for the continuous defuzzifiers.
  std::size_t resolution = 1001;
  /// Relative tolerance against the surface maximum for MOM/RM/LM plateaus.
  double plateau_tolerance = 1e-9;
};

struct Sample {
  double x = 0.0;
  Degree mu = 0.0;
  bool operator==(const Sample&) const = default;
};

/// Accumulated fuzzy output of one variable, sampled on a uniform grid.
/// Singleton consequents contribute spikes instead of samples.
struct OutputSurface {
  std::string variable;
  std::vector<double> xs;
  std::vector<Degree> mus;
  std::vector<Sample> spikes;
  bool operator==(const OutputSurface&) const = default;
};

/// One activated consequent term: sampled curve on the output grid plus
/// the spike a singleton term emits.
struct ActivatedTerm {
  std::vector<Degree> mus;
  std::vector<Sample> spikes;
};

struct NamedValue {
  std::string name;
  double value = 0.0;
  bool operator==(const NamedValue&) const = default;
};

struct TermDegree {
  std::string variable;
  std::string term;
  Degree degree = 0.0;
  bool operator==(const TermDegree&) const = default;
};

struct RuleFiring {
  std::string label;
  Degree strength = 0.0;           // antecedent value
  Degree weighted_strength = 0.0;  // after the rule weight
  bool operator==(const RuleFiring&) const = default;
};

/// Everything one evaluation computed, in model order.
struct EvaluationTrace {
  std::vector<NamedValue> inputs;
  std::vector<TermDegree> term_degrees;
  std::vector<RuleFiring> rule_firings;
  std::vector<OutputSurface> output_surfaces;
  std::vector<NamedValue> outputs;
  std::string rule_block_used;

  /// Crisp value of an output; throws std::out_of_range if absent.
  double output(std::string_view name) const;
  const OutputSurface* surface(std::string_view name) const noexcept;
  bool operator==(const EvaluationTrace&) const = default;
};

class EngineError : public std::runtime_error {
 public:
  enum class Code {
    UnknownRuleBlock,
    MissingInput,
    UnknownInput,
    NonFiniteInput,
    InvalidConfig,
    CogsWithoutSpikes,
    Inconsistent,
  };

  EngineError(Code code, std::string subject, std::string message,
              std::vector<std::string> available = {});

  Code code() const noexcept { return code_; }
  /// Name of the offending variable or rule block.
  const std::string& subject() const noexcept { return subject_; }
  /// Valid alternatives (rule block names, required inputs), when relevant.
  const std::vector<std::string>& available() const noexcept { return available_; }

 private:
  Code code_;
  std::string subject_;
  std::vector<std::string> available_;
};

std::string_view to_string(EngineError::Code code) noexcept;

using InputMap = std::map<std::string, double, std::less<>>;
using TermDegrees = std::vector<std::pair<std::string, Degree>>;
using DegreeTable = std::map<std::pair<std::string, std::string>, Degree>;

/// `n` uniform samples spanning `range`, both ends included. The grid is
/// mirror-symmetric: xs[i] - min == max - xs[n-1-i] in exact arithmetic of
/// the construction.
std::vector<double> sample_grid(const Range& range, std::size_t n);

/// Per-term degrees of a crisp input, in term order. Out-of-range values
/// clamp to the nearer bound; non-finite values throw NonFiniteInput.
TermDegrees fuzzify(const LinguisticVariable& lv, double x);

Degree eval_condition(const Condition& cond, const DegreeTable& degrees, const RuleBlock& block);

ActivatedTerm activate(Degree strength, double weight, const MembershipFunction& term_mf,
                       Activation method, std::span<const double> xs);

OutputSurface accumulate(std::span<const ActivatedTerm> terms, Accumulation method,
                         std::span<const double> xs, std::string variable = {});

double defuzzify(const OutputSurface& surface, DefuzzMethod method, double default_value,
                 double plateau_tolerance = EngineConfig{}.plateau_tolerance);

/// Full pipeline. `rule_block` defaults to fb.default_rule_block. Pure and
/// deterministic; `fb` must pass validate().
EvaluationTrace evaluate(const FunctionBlock& fb, const InputMap& inputs,
                         const std::optional<std::string>& rule_block = std::nullopt,
                         const EngineConfig& config = {});

/// Single-owner evaluation context over a shared immutable system: tracks
/// the active rule block and the last trace. Not safe for concurrent
/// mutation.
class Session {
 public:
  explicit Session(std::shared_ptr<const FunctionBlock> fb, EngineConfig config = {});

  const FunctionBlock& function_block() const noexcept { return *fb_; }
  std::shared_ptr<const FunctionBlock> shared_function_block() const noexcept { return fb_; }
  const EngineConfig& config() const noexcept { return config_; }
  const std::string& active_rule_block() const noexcept { return active_; }

  /// Throws EngineError(UnknownRuleBlock) listing the available blocks.
  void set_active_rule_block(std::string_view name);

  const EvaluationTrace& evaluate(const InputMap& inputs,
                                  const std::optional<std::string>& rule_block = std::nullopt);

  const std::optional<EvaluationTrace>& last_trace() const noexcept { return last_; }

 private:
  std::shared_ptr<const FunctionBlock> fb_;
  EngineConfig config_;
  std::string active_;
  std::optional<EvaluationTrace> last_;
};

}  // namespace fuzzkit
