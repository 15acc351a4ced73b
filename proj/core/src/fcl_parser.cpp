#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "fcl_lexer.hpp"
#include "fuzzkit/fcl.hpp"

namespace fuzzkit {
namespace fcl {
namespace {

template <typename T>
struct Located {
  T value;
  SourceSpan span;
};

struct VarDecl {
  std::string name;
  VariableKind kind;
  SourceSpan span;
};

struct TermDecl {
  std::string name;
  SourceSpan span;
  SourceSpan value_span;
  std::optional<double> singleton;
  std::vector<Point> points;
};

struct VariableBlock {
  std::string variable;
  SourceSpan span;
  bool defuzzify = false;
  std::vector<TermDecl> terms;
  std::optional<Located<Range>> range;
  std::optional<Located<DefuzzMethod>> method;
  std::optional<Located<double>> default_value;
};

// Spans mirroring the shape of a parsed Condition tree.
struct ConditionSpans {
  SourceSpan span;
  std::vector<ConditionSpans> children;
};

struct RuleDecl {
  std::string label;
  SourceSpan span;
  Condition antecedent;
  ConditionSpans antecedent_spans;
  std::vector<Consequent> consequents;
  std::vector<SourceSpan> consequent_spans;
  double weight = 1.0;
  SourceSpan weight_span;
};

struct BlockDecl {
  std::string name;
  SourceSpan span;
  std::optional<Located<TNorm>> and_method;
  std::optional<Located<TConorm>> or_method;
  std::optional<Located<Activation>> activation;
  std::optional<Located<Accumulation>> accumulation;
  std::vector<RuleDecl> rules;
};

struct Program {
  std::string name;
  SourceSpan name_span;
  std::vector<VarDecl> variables;
  std::vector<VariableBlock> variable_blocks;
  std::vector<BlockDecl> rule_blocks;
};

FclDiagnostic diagnostic(FclErrorCode code, SourceSpan span, std::string expected,
                         std::string found) {
  FclDiagnostic d;
  d.code = code;
  d.span = span;
  d.expected = std::move(expected);
  d.found = std::move(found);
  return d;
}

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

// ---------------------------------------------------------------------------
// Syntax: recursive descent, one token of lookahead.

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<FclDiagnostic>& semantic)
      : tokens_(std::move(tokens)), semantic_(semantic) {}

  Program parse() {
    Program p;
    expect_keyword("FUNCTION_BLOCK");
    const Token& name = expect_identifier("function block name");
    p.name = std::string(name.text);
    p.name_span = name.span;
    for (;;) {
      if (accept_keyword("VAR_INPUT")) {
        parse_declarations(VariableKind::Input, p.variables);
      } else if (accept_keyword("VAR_OUTPUT")) {
        parse_declarations(VariableKind::Output, p.variables);
      } else if (accept_keyword("FUZZIFY")) {
        p.variable_blocks.push_back(parse_variable_block(false));
      } else if (accept_keyword("DEFUZZIFY")) {
        p.variable_blocks.push_back(parse_variable_block(true));
      } else if (accept_keyword("RULEBLOCK")) {
        p.rule_blocks.push_back(parse_rule_block());
      } else {
        break;
      }
    }
    expect_keyword("END_FUNCTION_BLOCK");
    if (peek().kind != TokenKind::End) fail("end of input");
    return p;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::string expected) const {
    syntax_error(peek().span, std::move(expected), describe(peek()));
  }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == TokenKind::Identifier && iequals(peek().text, kw);
  }

  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    take();
    return true;
  }

  const Token& expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail(std::string(kw));
    return take();
  }

  const Token& expect(TokenKind kind, std::string_view what) {
    if (peek().kind != kind) fail(std::string(what));
    return take();
  }

  const Token& expect_identifier(std::string_view what) {
    if (peek().kind != TokenKind::Identifier || is_reserved(peek().text)) fail(std::string(what));
    return take();
  }

  double expect_number(std::string_view what = "a number") {
    return expect(TokenKind::Number, what).number;
  }

  template <typename T>
  void set_once(std::optional<Located<T>>& slot, T value, SourceSpan span, std::string_view what) {
    if (slot) {
      semantic_.push_back(diagnostic(FclErrorCode::DuplicateDefinition, span,
                                     "a single " + std::string(what) + " declaration",
                                     "a second " + std::string(what)));
      return;
    }
    slot = Located<T>{value, span};
  }

  void parse_declarations(VariableKind kind, std::vector<VarDecl>& out) {
    while (!at_keyword("END_VAR")) {
      const Token& name = expect_identifier("a variable name or END_VAR");
      expect(TokenKind::Colon, "':'");
      expect_keyword("REAL");
      expect(TokenKind::Semicolon, "';'");
      out.push_back(VarDecl{std::string(name.text), kind, name.span});
    }
    take();
  }

  VariableBlock parse_variable_block(bool defuzzify) {
    VariableBlock block;
    block.defuzzify = defuzzify;
    const Token& name = expect_identifier("a variable name");
    block.variable = std::string(name.text);
    block.span = name.span;
    const char* end = defuzzify ? "END_DEFUZZIFY" : "END_FUZZIFY";
    const char* items = defuzzify ? "TERM, METHOD, DEFAULT, RANGE or END_DEFUZZIFY"
                                  : "TERM, RANGE or END_FUZZIFY";
    for (;;) {
      if (accept_keyword(end)) return block;
      if (accept_keyword("TERM")) {
        block.terms.push_back(parse_term());
      } else if (at_keyword("RANGE")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Assign, "':='");
        expect(TokenKind::LParen, "'('");
        Range r;
        r.min = expect_number();
        expect(TokenKind::DotDot, "'..'");
        r.max = expect_number();
        expect(TokenKind::RParen, "')'");
        expect(TokenKind::Semicolon, "';'");
        set_once(block.range, r, span, "RANGE");
      } else if (defuzzify && at_keyword("METHOD")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Colon, "':'");
        const Token& m = peek();
        auto method = m.kind == TokenKind::Identifier ? parse_defuzz_method(m.text) : std::nullopt;
        if (!method) fail("COG, COGS, COA, MOM, RM or LM");
        take();
        expect(TokenKind::Semicolon, "';'");
        set_once(block.method, *method, span, "METHOD");
      } else if (defuzzify && at_keyword("DEFAULT")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Assign, "':='");
        const double v = expect_number();
        expect(TokenKind::Semicolon, "';'");
        set_once(block.default_value, v, span, "DEFAULT");
      } else {
        fail(items);
      }
    }
  }

  TermDecl parse_term() {
    TermDecl term;
    const Token& name = expect_identifier("a term name");
    term.name = std::string(name.text);
    term.span = name.span;
    expect(TokenKind::Assign, "':='");
    term.value_span = peek().span;
    if (peek().kind == TokenKind::Number) {
      term.singleton = take().number;
    } else if (peek().kind == TokenKind::LParen) {
      while (peek().kind == TokenKind::LParen) {
        take();
        Point pt;
        pt.x = expect_number();
        expect(TokenKind::Comma, "','");
        pt.mu = expect_number();
        expect(TokenKind::RParen, "')'");
        if (term.points.empty() || !(term.points.back().x == pt.x && term.points.back().mu == pt.mu)) {
          term.points.push_back(pt);
        }
      }
    } else {
      fail("a number or a point list '(x, mu)'");
    }
    expect(TokenKind::Semicolon, "';'");
    return term;
  }

  BlockDecl parse_rule_block() {
    BlockDecl block;
    const Token& name = expect_identifier("a rule block name");
    block.name = std::string(name.text);
    block.span = name.span;
    for (;;) {
      if (accept_keyword("END_RULEBLOCK")) return block;
      if (at_keyword("AND")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Colon, "':'");
        auto m = method_name(parse_tnorm, "MIN, PROD or BDIF");
        set_once(block.and_method, m, span, "AND");
      } else if (at_keyword("OR")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Colon, "':'");
        auto m = method_name(parse_or_method, "MAX, ASUM or BSUM");
        set_once(block.or_method, m, span, "OR");
      } else if (at_keyword("ACT")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Colon, "':'");
        auto m = method_name(parse_activation, "MIN or PROD");
        set_once(block.activation, m, span, "ACT");
      } else if (at_keyword("ACCU")) {
        const SourceSpan span = take().span;
        expect(TokenKind::Colon, "':'");
        auto m = method_name(parse_accumulation, "MAX, BSUM or NSUM");
        set_once(block.accumulation, m, span, "ACCU");
      } else if (accept_keyword("RULE")) {
        block.rules.push_back(parse_rule());
      } else {
        fail("AND, OR, ACT, ACCU, RULE or END_RULEBLOCK");
      }
    }
  }

  static std::optional<TConorm> parse_or_method(std::string_view s) {
    auto m = parse_tconorm(s);
    if (m == TConorm::NSum) return std::nullopt;  // NSUM is accumulation-only
    return m;
  }

  template <typename T>
  T method_name(std::optional<T> (*parse_fn)(std::string_view), std::string_view expected) {
    const Token& t = peek();
    auto value = t.kind == TokenKind::Identifier ? parse_fn(t.text) : std::nullopt;
    if (!value) fail(std::string(expected));
    take();
    expect(TokenKind::Semicolon, "';'");
    return *value;
  }

  RuleDecl parse_rule() {
    RuleDecl rule;
    const Token& label = peek();
    if (label.kind == TokenKind::Number || (label.kind == TokenKind::Identifier &&
                                            !is_reserved(label.text))) {
      rule.label = std::string(label.text);
      rule.span = label.span;
      take();
    } else {
      fail("a rule label");
    }
    expect(TokenKind::Colon, "':'");
    expect_keyword("IF");
    std::tie(rule.antecedent, rule.antecedent_spans) = parse_or();
    expect_keyword("THEN");
    for (;;) {
      const Token& var = expect_identifier("an output variable name");
      expect_keyword("IS");
      const Token& term = expect_identifier("a term name");
      rule.consequents.push_back(Consequent{std::string(var.text), std::string(term.text)});
      rule.consequent_spans.push_back(var.span);
      if (peek().kind != TokenKind::Comma) break;
      take();
    }
    if (at_keyword("WITH")) {
      take();
      rule.weight_span = peek().span;
      rule.weight = expect_number("a rule weight");
    }
    expect(TokenKind::Semicolon, "';', ',' or WITH");
    return rule;
  }

  using Parsed = std::pair<Condition, ConditionSpans>;

  Parsed parse_or() {
    Parsed first = parse_and();
    if (!at_keyword("OR")) return first;
    std::vector<Condition> children{std::move(first.first)};
    ConditionSpans spans{first.second.span, {std::move(first.second)}};
    while (accept_keyword("OR")) {
      Parsed next = parse_and();
      children.push_back(std::move(next.first));
      spans.children.push_back(std::move(next.second));
    }
    return {Condition::any_of(std::move(children)), std::move(spans)};
  }

  Parsed parse_and() {
    Parsed first = parse_unary();
    if (!at_keyword("AND")) return first;
    std::vector<Condition> children{std::move(first.first)};
    ConditionSpans spans{first.second.span, {std::move(first.second)}};
    while (accept_keyword("AND")) {
      Parsed next = parse_unary();
      children.push_back(std::move(next.first));
      spans.children.push_back(std::move(next.second));
    }
    return {Condition::all_of(std::move(children)), std::move(spans)};
  }

  Parsed parse_unary() {
    if (at_keyword("NOT")) {
      const SourceSpan span = take().span;
      Parsed inner = parse_unary();
      ConditionSpans spans{span, {std::move(inner.second)}};
      return {Condition::negation(std::move(inner.first)), std::move(spans)};
    }
    if (peek().kind == TokenKind::LParen) {
      take();
      Parsed inner = parse_or();
      expect(TokenKind::RParen, "')'");
      return inner;
    }
    const Token& var = expect_identifier("an input variable name, NOT or '('");
    expect_keyword("IS");
    const bool negated = accept_keyword("NOT");
    const Token& term = expect_identifier("a term name");
    return {Condition::is(std::string(var.text), std::string(term.text), negated),
            ConditionSpans{var.span, {}}};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<FclDiagnostic>& semantic_;
};

// ---------------------------------------------------------------------------
// Semantics: resolve names, build the model, validate, attach spans.

MembershipFunction classify(const TermDecl& term) {
  if (term.singleton) return shape::Singleton{*term.singleton};
  const auto& pts = term.points;
  bool increasing = true;
  for (std::size_t i = 1; i < pts.size(); ++i) increasing = increasing && pts[i - 1].x < pts[i].x;
  auto mus_are = [&](std::initializer_list<double> mus) {
    return pts.size() == mus.size() && std::equal(mus.begin(), mus.end(), pts.begin(),
                                                  [](double m, const Point& p) { return p.mu == m; });
  };
  if (increasing) {
    if (mus_are({0, 1})) return shape::Grade{pts[0].x, pts[1].x};
    if (mus_are({1, 0})) return shape::ReverseGrade{pts[0].x, pts[1].x};
    if (mus_are({0, 1, 0})) return shape::Triangle{pts[0].x, pts[1].x, pts[2].x};
    if (mus_are({0, 1, 1, 0})) return shape::Trapezoid{pts[0].x, pts[1].x, pts[2].x, pts[3].x};
  }
  return shape::Piecewise{pts};
}

class Builder {
 public:
  Builder(Program program, std::vector<FclDiagnostic> diags)
      : p_(std::move(program)), diags_(std::move(diags)) {}

  FunctionBlock build() {
    fb_.name = p_.name;
    spans_["/name"] = p_.name_span;
    spans_[""] = p_.name_span;
    declare_variables();
    attach_variable_blocks();
    build_rule_blocks();
    if (!diags_.empty()) throw FclError(std::move(diags_));

    for (const auto& v : validate(fb_)) {
      FclDiagnostic d;
      d.code = FclErrorCode::Validation;
      d.violation = v.code;
      d.span = span_for(v.path);
      d.expected = "a valid system";
      d.found = v.message;
      diags_.push_back(std::move(d));
    }
    if (!diags_.empty()) throw FclError(std::move(diags_));
    return std::move(fb_);
  }

 private:
  void add(FclErrorCode code, SourceSpan span, std::string expected, std::string found) {
    diags_.push_back(diagnostic(code, span, std::move(expected), std::move(found)));
  }

  SourceSpan span_for(std::string path) const {
    for (;;) {
      if (auto it = spans_.find(path); it != spans_.end()) return it->second;
      const auto slash = path.rfind('/');
      if (slash == std::string::npos) return p_.name_span;
      path.resize(slash);
    }
  }

  void declare_variables() {
    for (const auto& decl : p_.variables) {
      const bool taken =
          std::any_of(fb_.inputs.begin(), fb_.inputs.end(),
                      [&](const auto& v) { return v.name == decl.name; }) ||
          std::any_of(fb_.outputs.begin(), fb_.outputs.end(),
                      [&](const auto& v) { return v.name == decl.name; });
      if (taken) {
        add(FclErrorCode::Validation, decl.span, "a unique variable name",
            "second declaration of " + quote(decl.name));
        diags_.back().violation = ViolationCode::DuplicateVariable;
        continue;
      }
      LinguisticVariable lv;
      lv.name = decl.name;
      lv.kind = decl.kind;
      auto& list = decl.kind == VariableKind::Input ? fb_.inputs : fb_.outputs;
      const std::string path = (decl.kind == VariableKind::Input ? "/inputs/" : "/outputs/") +
                               std::to_string(list.size());
      spans_[path] = decl.span;
      list.push_back(std::move(lv));
    }
  }

  LinguisticVariable* lookup(std::vector<LinguisticVariable>& list, std::string_view name,
                             std::size_t& index) {
    for (index = 0; index < list.size(); ++index) {
      if (list[index].name == name) return &list[index];
    }
    return nullptr;
  }

  void attach_variable_blocks() {
    std::vector<bool> input_seen(fb_.inputs.size(), false);
    std::vector<bool> output_seen(fb_.outputs.size(), false);
    for (const auto& block : p_.variable_blocks) {
      const char* section = block.defuzzify ? "DEFUZZIFY" : "FUZZIFY";
      std::size_t index = 0;
      auto& own = block.defuzzify ? fb_.outputs : fb_.inputs;
      auto& other = block.defuzzify ? fb_.inputs : fb_.outputs;
      LinguisticVariable* lv = lookup(own, block.variable, index);
      if (!lv) {
        std::size_t ignored = 0;
        if (lookup(other, block.variable, ignored)) {
          add(FclErrorCode::WrongSection, block.span,
              std::string(block.defuzzify ? "an output variable" : "an input variable") +
                  " after " + section,
              quote(block.variable));
        } else {
          add(FclErrorCode::Validation, block.span, "a declared variable after " + std::string(section),
              "undeclared " + quote(block.variable));
          diags_.back().violation = ViolationCode::UnknownVariable;
        }
        continue;
      }
      auto& seen = block.defuzzify ? output_seen : input_seen;
      if (seen[index]) {
        add(FclErrorCode::DuplicateDefinition, block.span,
            "one " + std::string(section) + " block per variable",
            "second " + std::string(section) + " " + quote(block.variable));
        continue;
      }
      seen[index] = true;
      const std::string path =
          (block.defuzzify ? "/outputs/" : "/inputs/") + std::to_string(index);
      spans_[path] = block.span;
      fill_variable(*lv, block, path);
    }
    for (std::size_t i = 0; i < fb_.inputs.size(); ++i) {
      if (!input_seen[i]) {
        add(FclErrorCode::MissingDefinition, spans_["/inputs/" + std::to_string(i)],
            "a FUZZIFY block for " + quote(fb_.inputs[i].name), "none");
      }
    }
    for (std::size_t i = 0; i < fb_.outputs.size(); ++i) {
      if (!output_seen[i]) {
        add(FclErrorCode::MissingDefinition, spans_["/outputs/" + std::to_string(i)],
            "a DEFUZZIFY block for " + quote(fb_.outputs[i].name), "none");
      }
    }
  }

  void fill_variable(LinguisticVariable& lv, const VariableBlock& block, const std::string& path) {
    bool terms_ok = true;
    for (const auto& decl : block.terms) {
      const std::string tpath = path + "/terms/" + std::to_string(lv.terms.size());
      try {
        lv.terms.push_back(Term{decl.name, classify(decl)});
        spans_[tpath] = decl.span;
        spans_[tpath + "/mf"] = decl.value_span;
      } catch (const InvalidMembershipFunction& e) {
        terms_ok = false;
        add(FclErrorCode::Validation, decl.value_span, "valid membership points",
            quote(decl.name) + " (" + e.what() + ")");
        diags_.back().violation = ViolationCode::InvalidMembershipParameters;
      }
    }

    if (block.range) {
      lv.range = block.range->value;
      spans_[path + "/range"] = block.range->span;
    } else if (terms_ok) {
      try {
        lv.range = infer_range(lv.terms);
      } catch (const RangeInferenceError& e) {
        add(FclErrorCode::DegenerateRange, block.span, "a RANGE declaration", e.what());
      }
    }

    if (block.defuzzify) {
      if (block.method) {
        lv.defuzzifier = block.method->value;
        spans_[path + "/defuzzifier"] = block.method->span;
      } else {
        add(FclErrorCode::MissingMethod, block.span, "METHOD in DEFUZZIFY " + quote(lv.name),
            "END_DEFUZZIFY");
      }
      if (block.default_value) {
        lv.default_value = block.default_value->value;
        spans_[path + "/default_value"] = block.default_value->span;
      } else {
        lv.default_value = lv.range.clamp(0.0);
      }
    }
  }

  void build_rule_blocks() {
    for (auto& decl : p_.rule_blocks) {
      const std::string path = "/rule_blocks/" + std::to_string(fb_.rule_blocks.size());
      RuleBlock rb;
      rb.name = decl.name;
      spans_[path] = decl.or_method ? decl.or_method->span : decl.span;
      spans_[path + "/name"] = decl.span;

      auto missing = [&](const char* what) {
        add(FclErrorCode::MissingMethod, decl.span,
            std::string(what) + " in RULEBLOCK " + quote(decl.name), "END_RULEBLOCK");
      };
      if (decl.and_method) rb.and_method = decl.and_method->value;
      else missing("AND");
      rb.or_method = decl.or_method ? decl.or_method->value : de_morgan_dual(rb.and_method);
      if (decl.activation) rb.activation = decl.activation->value;
      else missing("ACT");
      if (decl.accumulation) rb.accumulation = decl.accumulation->value;
      else missing("ACCU");

      for (auto& rd : decl.rules) {
        const std::string rpath = path + "/rules/" + std::to_string(rb.rules.size());
        spans_[rpath] = rd.span;
        record_condition_spans(rd.antecedent_spans, rpath + "/antecedent");
        for (std::size_t c = 0; c < rd.consequent_spans.size(); ++c) {
          spans_[rpath + "/consequents/" + std::to_string(c)] = rd.consequent_spans[c];
        }
        if (rd.weight != 1.0) spans_[rpath + "/weight"] = rd.weight_span;
        rb.rules.push_back(
            Rule{std::move(rd.label), std::move(rd.antecedent), std::move(rd.consequents), rd.weight});
      }
      fb_.rule_blocks.push_back(std::move(rb));
    }
    if (!fb_.rule_blocks.empty()) fb_.default_rule_block = fb_.rule_blocks.front().name;
  }

  void record_condition_spans(const ConditionSpans& spans, const std::string& path) {
    spans_[path] = spans.span;
    for (std::size_t i = 0; i < spans.children.size(); ++i) {
      record_condition_spans(spans.children[i], path + "/operands/" + std::to_string(i));
    }
  }

  Program p_;
  std::vector<FclDiagnostic> diags_;
  FunctionBlock fb_;
  std::map<std::string, SourceSpan> spans_;
};

}  // namespace
}  // namespace fcl

std::string_view FclDiagnostic::code_name() const noexcept {
  switch (code) {
    case FclErrorCode::Syntax: return "Syntax";
    case FclErrorCode::MissingMethod: return "MissingMethod";
    case FclErrorCode::DegenerateRange: return "DegenerateRange";
    case FclErrorCode::DuplicateDefinition: return "DuplicateDefinition";
    case FclErrorCode::MissingDefinition: return "MissingDefinition";
    case FclErrorCode::WrongSection: return "WrongSection";
    case FclErrorCode::Validation: return violation ? to_string(*violation) : "Validation";
  }
  return "?";
}

std::string FclDiagnostic::message() const {
  std::ostringstream os;
  os << span.line << ':' << span.column << ": " << code_name() << ": expected " << expected
     << ", found " << found;
  return os.str();
}

namespace {
std::string join_messages(const std::vector<FclDiagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += d.message();
  }
  return out;
}
}  // namespace

FclError::FclError(std::vector<FclDiagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

Range infer_range(std::span<const Term> terms) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    for (double x : t.mf.x_parameters()) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!(lo < hi)) {
    throw RangeInferenceError(
        terms.empty() ? "variable has no terms to infer a range from; add RANGE := (min .. max);"
                      : "terms span a single point; add RANGE := (min .. max);");
  }
  return Range{lo, hi};
}

FunctionBlock parse_fcl(std::string_view source) {
  std::vector<FclDiagnostic> semantic;
  fcl::Parser parser(fcl::tokenize(source), semantic);
  fcl::Program program = parser.parse();
  return fcl::Builder(std::move(program), std::move(semantic)).build();
}

}  // namespace fuzzkit
