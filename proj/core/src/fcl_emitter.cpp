#include <algorithm>
#include <charconv>
#include <sstream>

#include "fcl_lexer.hpp"
#include "fuzzkit/fcl.hpp"

namespace fuzzkit {

UnrepresentableError::UnrepresentableError(std::string variable, std::string term,
                                           const std::string& message)
    : std::runtime_error(message), variable_(std::move(variable)), term_(std::move(term)) {}

namespace {

std::string num(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

class Emitter {
 public:
  explicit Emitter(const FunctionBlock& fb) : fb_(fb) {}

  std::string run() {
    check_identifier(fb_.name, "", "function block name");
    out_ << "FUNCTION_BLOCK " << fb_.name << "\n\n";
    declarations("VAR_INPUT", fb_.inputs);
    declarations("VAR_OUTPUT", fb_.outputs);
    for (const auto& v : fb_.inputs) variable(v, false);
    for (const auto& v : fb_.outputs) variable(v, true);

    std::vector<const RuleBlock*> order;
    for (const auto& rb : fb_.rule_blocks) {
      if (rb.name == fb_.default_rule_block) order.insert(order.begin(), &rb);
      else order.push_back(&rb);
    }
    for (const auto* rb : order) rule_block(*rb);
    out_ << "END_FUNCTION_BLOCK\n";
    return out_.str();
  }

 private:
  [[noreturn]] static void unrepresentable(const std::string& variable, const std::string& term,
                                           const std::string& why) {
    std::string where = variable.empty() ? std::string() : "variable '" + variable + "'";
    if (!term.empty()) where += (where.empty() ? "" : ", ") + std::string("term '") + term + "'";
    throw UnrepresentableError(variable, term,
                               "cannot express in FCL (" + where + "): " + why + "; use JSON");
  }

  static void check_identifier(const std::string& name, const std::string& variable,
                               const char* what) {
    if (!fcl::is_identifier(name)) {
      unrepresentable(variable, "", std::string(what) + " '" + name + "' is not an FCL identifier");
    }
  }

  void declarations(const char* section, const std::vector<LinguisticVariable>& vars) {
    out_ << section << '\n';
    for (const auto& v : vars) {
      check_identifier(v.name, v.name, "variable name");
      out_ << "  " << v.name << " : REAL;\n";
    }
    out_ << "END_VAR\n\n";
  }

  static std::string points(std::initializer_list<Point> pts) {
    return points(std::vector<Point>(pts));
  }

  static std::string points(const std::vector<Point>& pts) {
    std::string s;
    for (const auto& p : pts) {
      if (!s.empty()) s += ' ';
      s += "(" + num(p.x) + ", " + num(p.mu) + ")";
    }
    return s;
  }

  static std::string term_value(const LinguisticVariable& v, const Term& t) {
    auto strict = [&](std::initializer_list<double> xs) {
      if (std::adjacent_find(xs.begin(), xs.end(), std::greater_equal<>()) != xs.end()) {
        unrepresentable(v.name, t.name, "coincident break points have no FCL point-list form");
      }
    };
    return std::visit(
        [&](const auto& s) -> std::string {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, shape::Singleton>) {
            return num(s.c);
          } else if constexpr (std::is_same_v<S, shape::Piecewise>) {
            return points(s.points);
          } else if constexpr (std::is_same_v<S, shape::Triangle>) {
            strict({s.a, s.b, s.c});
            return points({{s.a, 0}, {s.b, 1}, {s.c, 0}});
          } else if constexpr (std::is_same_v<S, shape::Trapezoid>) {
            strict({s.a, s.b, s.c, s.d});
            return points({{s.a, 0}, {s.b, 1}, {s.c, 1}, {s.d, 0}});
          } else if constexpr (std::is_same_v<S, shape::Grade>) {
            return points({{s.a, 0}, {s.b, 1}});
          } else if constexpr (std::is_same_v<S, shape::ReverseGrade>) {
            return points({{s.a, 1}, {s.b, 0}});
          } else {
            unrepresentable(v.name, t.name,
                            std::string(kind_name(t.mf.shape())) + " is not a linear membership function");
          }
        },
        t.mf.shape());
  }

  void variable(const LinguisticVariable& v, bool output) {
    out_ << (output ? "DEFUZZIFY " : "FUZZIFY ") << v.name << '\n';
    for (const auto& t : v.terms) {
      if (!fcl::is_identifier(t.name)) {
        unrepresentable(v.name, t.name, "term name is not an FCL identifier");
      }
      out_ << "  TERM " << t.name << " := " << term_value(v, t) << ";\n";
    }
    out_ << "  RANGE := (" << num(v.range.min) << " .. " << num(v.range.max) << ");\n";
    if (output) {
      out_ << "  METHOD : " << to_string(v.defuzzifier) << ";\n";
      out_ << "  DEFAULT := " << num(v.default_value) << ";\n";
      out_ << "END_DEFUZZIFY\n\n";
    } else {
      out_ << "END_FUZZIFY\n\n";
    }
  }

  static std::string condition(const Condition& c) {
    switch (c.kind) {
      case Condition::Kind::Is:
        return c.variable + (c.negated ? " IS NOT " : " IS ") + c.term;
      case Condition::Kind::Not: {
        const auto& child = c.children.front();
        const bool group = child.kind == Condition::Kind::And || child.kind == Condition::Kind::Or;
        return "NOT " + (group ? "(" + condition(child) + ")" : condition(child));
      }
      case Condition::Kind::And:
      case Condition::Kind::Or: {
        const bool is_and = c.kind == Condition::Kind::And;
        std::string s;
        for (const auto& child : c.children) {
          if (!s.empty()) s += is_and ? " AND " : " OR ";
          // Nested And/Or nodes came from parentheses; keep them.
          const bool group = child.kind == c.kind || (is_and && child.kind == Condition::Kind::Or);
          s += group ? "(" + condition(child) + ")" : condition(child);
        }
        return s;
      }
    }
    return {};
  }

  static bool valid_label(const std::string& label) {
    if (fcl::is_identifier(label)) return true;
    return !label.empty() && std::all_of(label.begin(), label.end(),
                                         [](char ch) { return ch >= '0' && ch <= '9'; });
  }

  void rule_block(const RuleBlock& rb) {
    check_identifier(rb.name, "", "rule block name");
    out_ << "RULEBLOCK " << rb.name << '\n';
    out_ << "  AND : " << to_string(rb.and_method) << ";\n";
    out_ << "  OR : " << to_string(rb.or_method) << ";\n";
    out_ << "  ACT : " << to_string(rb.activation) << ";\n";
    out_ << "  ACCU : " << to_string(rb.accumulation) << ";\n";
    for (const auto& r : rb.rules) {
      if (!valid_label(r.label)) {
        unrepresentable("", "", "rule label '" + r.label + "' is neither an integer nor an identifier");
      }
      out_ << "  RULE " << r.label << " : IF " << condition(r.antecedent) << " THEN ";
      for (std::size_t i = 0; i < r.consequents.size(); ++i) {
        if (i) out_ << ", ";
        out_ << r.consequents[i].variable << " IS " << r.consequents[i].term;
      }
      if (r.weight != 1.0) out_ << " WITH " << num(r.weight);
      out_ << ";\n";
    }
    out_ << "END_RULEBLOCK\n\n";
  }

  const FunctionBlock& fb_;
  std::ostringstream out_;
};

}  // namespace

std::string emit_fcl(const FunctionBlock& fb) { return Emitter(fb).run(); }

}  // namespace fuzzkit
