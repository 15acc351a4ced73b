#include "fuzzkit/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace fuzzkit {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) ==
                  std::toupper(static_cast<unsigned char>(y));
         });
}

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<E, N>& all) {
  for (E e : all) {
    if (iequals(s, to_string(e))) return e;
  }
  return std::nullopt;
}

const LinguisticVariable* find_in(const std::vector<LinguisticVariable>& vars,
                                  std::string_view name) noexcept {
  auto it = std::find_if(vars.begin(), vars.end(),
                         [&](const LinguisticVariable& v) { return v.name == name; });
  return it == vars.end() ? nullptr : &*it;
}

std::string fmt_path(std::string_view base, std::string_view field, std::size_t index) {
  std::string out(base);
  out += '/';
  out += field;
  out += '/';
  out += std::to_string(index);
  return out;
}

class Validator {
 public:
  explicit Validator(const FunctionBlock& fb) : fb_(fb) {}

  std::vector<Violation> run() {
    if (fb_.name.empty()) add(ViolationCode::EmptyName, "/name", "function block name is empty");

    std::set<std::string> names;
    check_variables(fb_.inputs, "inputs", VariableKind::Input, names);
    check_variables(fb_.outputs, "outputs", VariableKind::Output, names);

    if (fb_.rule_blocks.empty()) {
      add(ViolationCode::NoRuleBlocks, "/rule_blocks", "at least one rule block is required");
    }
    std::set<std::string> blocks;
    for (std::size_t i = 0; i < fb_.rule_blocks.size(); ++i) {
      const auto& rb = fb_.rule_blocks[i];
      const std::string path = fmt_path("", "rule_blocks", i);
      if (rb.name.empty()) add(ViolationCode::EmptyName, path + "/name", "rule block name is empty");
      if (!blocks.insert(rb.name).second) {
        add(ViolationCode::DuplicateRuleBlock, path + "/name", "duplicate rule block '" + rb.name + "'");
      }
      check_rule_block(rb, path);
    }
    if (!fb_.rule_blocks.empty() && !fb_.find_rule_block(fb_.default_rule_block)) {
      add(ViolationCode::UnknownDefaultRuleBlock, "/default_rule_block",
          "default rule block '" + fb_.default_rule_block + "' does not exist");
    }
    return std::move(out_);
  }

 private:
  void add(ViolationCode code, std::string path, std::string message) {
    out_.push_back(Violation{code, std::move(path), std::move(message)});
  }

  void check_variables(const std::vector<LinguisticVariable>& vars, std::string_view field,
                       VariableKind kind, std::set<std::string>& names) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& v = vars[i];
      const std::string path = fmt_path("", field, i);
      if (v.name.empty()) add(ViolationCode::EmptyName, path + "/name", "variable name is empty");
      if (!names.insert(v.name).second) {
        add(ViolationCode::DuplicateVariable, path + "/name", "duplicate variable '" + v.name + "'");
      }
      if (v.kind != kind) {
        add(ViolationCode::WrongVariableKind, path,
            "variable '" + v.name + "' is listed as " + std::string(field) + " but has kind " +
                std::string(to_string(v.kind)));
      }
      const bool range_ok =
          std::isfinite(v.range.min) && std::isfinite(v.range.max) && v.range.min < v.range.max;
      if (!range_ok) {
        add(ViolationCode::InvalidRange, path + "/range",
            "range of '" + v.name + "' must satisfy min < max");
      }
      std::set<std::string> terms;
      bool all_singletons = true;
      for (std::size_t t = 0; t < v.terms.size(); ++t) {
        const auto& term = v.terms[t];
        const std::string tpath = fmt_path(path, "terms", t);
        if (term.name.empty()) add(ViolationCode::EmptyName, tpath + "/name", "term name is empty");
        if (!terms.insert(term.name).second) {
          add(ViolationCode::DuplicateTerm, tpath + "/name",
              "duplicate term '" + term.name + "' in variable '" + v.name + "'");
        }
        if (const auto* s = std::get_if<shape::Singleton>(&term.mf.shape())) {
          if (kind == VariableKind::Output && range_ok && (s->c < v.range.min || s->c > v.range.max)) {
            add(ViolationCode::SpikeOutOfRange, tpath + "/mf",
                "singleton '" + term.name + "' lies outside the range of '" + v.name + "'");
          }
        } else {
          all_singletons = false;
        }
      }
      if (kind == VariableKind::Output) {
        if (range_ok && !(v.default_value >= v.range.min && v.default_value <= v.range.max)) {
          add(ViolationCode::DefaultOutOfRange, path + "/default_value",
              "default value of '" + v.name + "' lies outside its range");
        }
        if (v.defuzzifier == DefuzzMethod::COGS && !all_singletons) {
          add(ViolationCode::CogsRequiresSingletons, path + "/defuzzifier",
              "COGS on '" + v.name + "' requires every term to be a singleton");
        }
      }
    }
  }

  void check_rule_block(const RuleBlock& rb, const std::string& path) {
    if (!is_de_morgan_pair(rb.and_method, rb.or_method)) {
      add(ViolationCode::DeMorganPairViolation, path,
          "rule block '" + rb.name + "' pairs AND " + std::string(to_string(rb.and_method)) +
              " with OR " + std::string(to_string(rb.or_method)) + "; expected OR " +
              std::string(to_string(de_morgan_dual(rb.and_method))));
    }
    std::set<std::string> labels;
    for (std::size_t r = 0; r < rb.rules.size(); ++r) {
      const auto& rule = rb.rules[r];
      const std::string rpath = fmt_path(path, "rules", r);
      if (rule.label.empty()) add(ViolationCode::EmptyName, rpath + "/label", "rule label is empty");
      if (!labels.insert(rule.label).second) {
        add(ViolationCode::DuplicateRuleLabel, rpath + "/label",
            "duplicate rule label '" + rule.label + "' in rule block '" + rb.name + "'");
      }
      check_condition(rule.antecedent, rpath + "/antecedent");
      if (rule.consequents.empty()) {
        add(ViolationCode::EmptyConsequents, rpath + "/consequents", "rule has no consequents");
      }
      for (std::size_t c = 0; c < rule.consequents.size(); ++c) {
        const auto& cons = rule.consequents[c];
        const std::string cpath = fmt_path(rpath, "consequents", c);
        const auto* out = fb_.find_output(cons.variable);
        if (!out) {
          if (fb_.find_input(cons.variable)) {
            add(ViolationCode::NotAnOutput, cpath + "/variable",
                "consequent variable '" + cons.variable + "' is an input");
          } else {
            add(ViolationCode::UnknownVariable, cpath + "/variable",
                "unknown variable '" + cons.variable + "'");
          }
        } else if (!out->find_term(cons.term)) {
          add(ViolationCode::UnknownTerm, cpath + "/term",
              "unknown term '" + cons.term + "' of variable '" + cons.variable + "'");
        }
      }
      if (!(rule.weight >= 0.0 && rule.weight <= 1.0)) {
        add(ViolationCode::WeightOutOfRange, rpath + "/weight", "rule weight must lie in [0, 1]");
      }
    }
  }

  void check_condition(const Condition& c, const std::string& path) {
    switch (c.kind) {
      case Condition::Kind::Is: {
        const auto* in = fb_.find_input(c.variable);
        if (!in) {
          if (fb_.find_output(c.variable)) {
            add(ViolationCode::NotAnInput, path,
                "antecedent variable '" + c.variable + "' is an output");
          } else {
            add(ViolationCode::UnknownVariable, path, "unknown variable '" + c.variable + "'");
          }
        } else if (!in->find_term(c.term)) {
          add(ViolationCode::UnknownTerm, path,
              "unknown term '" + c.term + "' of variable '" + c.variable + "'");
        }
        if (!c.children.empty()) {
          add(ViolationCode::MalformedCondition, path, "IS node must not have operands");
        }
        return;
      }
      case Condition::Kind::Not:
        if (c.children.size() != 1) {
          add(ViolationCode::MalformedCondition, path, "NOT takes exactly one operand");
        }
        break;
      case Condition::Kind::And:
      case Condition::Kind::Or:
        if (c.children.size() < 2) {
          add(ViolationCode::MalformedCondition, path, "AND/OR need at least two operands");
        }
        break;
    }
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      check_condition(c.children[i], fmt_path(path, "operands", i));
    }
  }

  const FunctionBlock& fb_;
  std::vector<Violation> out_;
};

}  // namespace

std::string_view to_string(TNorm m) noexcept {
  switch (m) {
    case TNorm::Min: return "MIN";
    case TNorm::Prod: return "PROD";
    case TNorm::BDif: return "BDIF";
  }
  return "?";
}

std::string_view to_string(TConorm m) noexcept {
  switch (m) {
    case TConorm::Max: return "MAX";
    case TConorm::ASum: return "ASUM";
    case TConorm::BSum: return "BSUM";
    case TConorm::NSum: return "NSUM";
  }
  return "?";
}

std::string_view to_string(Activation m) noexcept {
  switch (m) {
    case Activation::Min: return "MIN";
    case Activation::Prod: return "PROD";
  }
  return "?";
}

std::string_view to_string(Accumulation m) noexcept {
  switch (m) {
    case Accumulation::Max: return "MAX";
    case Accumulation::BSum: return "BSUM";
    case Accumulation::NSum: return "NSUM";
  }
  return "?";
}

std::string_view to_string(DefuzzMethod m) noexcept {
  switch (m) {
    case DefuzzMethod::COG: return "COG";
    case DefuzzMethod::COGS: return "COGS";
    case DefuzzMethod::COA: return "COA";
    case DefuzzMethod::MOM: return "MOM";
    case DefuzzMethod::RM: return "RM";
    case DefuzzMethod::LM: return "LM";
  }
  return "?";
}

std::string_view to_string(VariableKind k) noexcept {
  return k == VariableKind::Input ? "input" : "output";
}

std::optional<TNorm> parse_tnorm(std::string_view s) {
  return lookup(s, std::array{TNorm::Min, TNorm::Prod, TNorm::BDif});
}
std::optional<TConorm> parse_tconorm(std::string_view s) {
  return lookup(s, std::array{TConorm::Max, TConorm::ASum, TConorm::BSum, TConorm::NSum});
}
std::optional<Activation> parse_activation(std::string_view s) {
  return lookup(s, std::array{Activation::Min, Activation::Prod});
}
std::optional<Accumulation> parse_accumulation(std::string_view s) {
  return lookup(s, std::array{Accumulation::Max, Accumulation::BSum, Accumulation::NSum});
}
std::optional<DefuzzMethod> parse_defuzz_method(std::string_view s) {
  return lookup(s, std::array{DefuzzMethod::COG, DefuzzMethod::COGS, DefuzzMethod::COA,
                              DefuzzMethod::MOM, DefuzzMethod::RM, DefuzzMethod::LM});
}

std::string_view to_string(ViolationCode code) noexcept {
  switch (code) {
    case ViolationCode::EmptyName: return "EmptyName";
    case ViolationCode::InvalidRange: return "InvalidRange";
    case ViolationCode::DuplicateVariable: return "DuplicateVariable";
    case ViolationCode::DuplicateTerm: return "DuplicateTerm";
    case ViolationCode::WrongVariableKind: return "WrongVariableKind";
    case ViolationCode::DefaultOutOfRange: return "DefaultOutOfRange";
    case ViolationCode::InvalidMembershipParameters: return "InvalidMembershipParameters";
    case ViolationCode::CogsRequiresSingletons: return "CogsRequiresSingletons";
    case ViolationCode::SpikeOutOfRange: return "SpikeOutOfRange";
    case ViolationCode::NoRuleBlocks: return "NoRuleBlocks";
    case ViolationCode::DuplicateRuleBlock: return "DuplicateRuleBlock";
    case ViolationCode::UnknownDefaultRuleBlock: return "UnknownDefaultRuleBlock";
    case ViolationCode::DeMorganPairViolation: return "DeMorganPairViolation";
    case ViolationCode::DuplicateRuleLabel: return "DuplicateRuleLabel";
    case ViolationCode::MalformedCondition: return "MalformedCondition";
    case ViolationCode::UnknownVariable: return "UnknownVariable";
    case ViolationCode::UnknownTerm: return "UnknownTerm";
    case ViolationCode::NotAnInput: return "NotAnInput";
    case ViolationCode::NotAnOutput: return "NotAnOutput";
    case ViolationCode::EmptyConsequents: return "EmptyConsequents";
    case ViolationCode::WeightOutOfRange: return "WeightOutOfRange";
  }
  return "?";
}

const Term* LinguisticVariable::find_term(std::string_view term) const noexcept {
  auto it = std::find_if(terms.begin(), terms.end(), [&](const Term& t) { return t.name == term; });
  return it == terms.end() ? nullptr : &*it;
}

Condition Condition::is(std::string variable, std::string term, bool negated) {
  Condition c;
  c.kind = Kind::Is;
  c.variable = std::move(variable);
  c.term = std::move(term);
  c.negated = negated;
  return c;
}

Condition Condition::negation(Condition child) {
  Condition c;
  c.kind = Kind::Not;
  c.children.push_back(std::move(child));
  return c;
}

Condition Condition::all_of(std::vector<Condition> children) {
  Condition c;
  c.kind = Kind::And;
  c.children = std::move(children);
  return c;
}

Condition Condition::any_of(std::vector<Condition> children) {
  Condition c;
  c.kind = Kind::Or;
  c.children = std::move(children);
  return c;
}

const LinguisticVariable* FunctionBlock::find_input(std::string_view n) const noexcept {
  return find_in(inputs, n);
}

const LinguisticVariable* FunctionBlock::find_output(std::string_view n) const noexcept {
  return find_in(outputs, n);
}

const RuleBlock* FunctionBlock::find_rule_block(std::string_view n) const noexcept {
  auto it = std::find_if(rule_blocks.begin(), rule_blocks.end(),
                         [&](const RuleBlock& rb) { return rb.name == n; });
  return it == rule_blocks.end() ? nullptr : &*it;
}

std::vector<std::string> FunctionBlock::rule_block_names() const {
  std::vector<std::string> names;
  names.reserve(rule_blocks.size());
  for (const auto& rb : rule_blocks) names.push_back(rb.name);
  return names;
}

std::vector<Violation> validate(const FunctionBlock& fb) { return Validator(fb).run(); }

std::string format_violations(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << to_string(v.code) << " at " << (v.path.empty() ? "/" : v.path) << ": " << v.message
       << '\n';
  }
  return os.str();
}

}  // namespace fuzzkit
