#pragma once

// Small hand-built systems shared by several test files.

#include <string>
#include <vector>

#include "fuzzkit/model.hpp"

namespace systems {

using namespace fuzzkit;

inline LinguisticVariable input(std::string name, Range r, std::vector<Term> terms) {
  LinguisticVariable lv;
  lv.name = std::move(name);
  lv.range = r;
  lv.terms = std::move(terms);
  lv.kind = VariableKind::Input;
  return lv;
}

inline LinguisticVariable output(std::string name, Range r, std::vector<Term> terms, DefuzzMethod m,
                                 double default_value = 0.0) {
  LinguisticVariable lv = input(std::move(name), r, std::move(terms));
  lv.kind = VariableKind::Output;
  lv.defuzzifier = m;
  lv.default_value = default_value;
  return lv;
}

inline Rule rule(std::string label, Condition c, std::vector<Consequent> then, double weight = 1.0) {
  return Rule{std::move(label), std::move(c), std::move(then), weight};
}

/// One input, one output, two rules: cold -> low, hot -> high.
inline FunctionBlock toy(DefuzzMethod m = DefuzzMethod::COG, Activation act = Activation::Min,
                         Accumulation accu = Accumulation::Max) {
  FunctionBlock fb;
  fb.name = "toy";
  fb.inputs.push_back(input("temp", {0, 40},
                            {{"cold", shape::ReverseGrade{10, 25}}, {"hot", shape::Grade{15, 30}}}));
  fb.outputs.push_back(output("fan", {0, 100},
                              {{"low", shape::Triangle{0, 20, 50}}, {"high", shape::Trapezoid{40, 70, 90, 100}}},
                              m, 50.0));
  RuleBlock rb;
  rb.name = "main";
  rb.activation = act;
  rb.accumulation = accu;
  rb.rules.push_back(rule("1", Condition::is("temp", "cold"), {{"fan", "low"}}));
  rb.rules.push_back(rule("2", Condition::is("temp", "hot"), {{"fan", "high"}}));
  fb.rule_blocks.push_back(rb);
  fb.default_rule_block = "main";
  return fb;
}

/// Triangles peaking at each center with feet on the neighbouring
/// centers (the outer ones extend past the range edge).
inline std::vector<Term> partition(const std::vector<double>& centers, const std::string& prefix) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double c = centers[i];
    const double lo = i > 0 ? centers[i - 1] : c - (centers[1] - c);
    const double hi = i + 1 < centers.size() ? centers[i + 1] : c + (c - centers[i - 1]);
    terms.push_back(Term{prefix + std::to_string(i), shape::Triangle{lo, c, hi}});
  }
  return terms;
}

/// Single-input chain t0 -> o0, t1 -> o1, ... over increasing partitions
/// of [0, 10] on both sides, with Min/Max/Min/Max methods. Centers must be
/// increasing, start at 0 and end at 10.
inline FunctionBlock monotone(const std::vector<double>& in_centers, const std::vector<double>& out_centers,
                              DefuzzMethod m = DefuzzMethod::COG) {
  FunctionBlock fb;
  fb.name = "monotone";
  fb.inputs.push_back(input("x", {0, 10}, partition(in_centers, "t")));
  fb.outputs.push_back(output("y", {0, 10}, partition(out_centers, "o"), m, 5.0));
  RuleBlock rb;
  rb.name = "main";
  for (std::size_t i = 0; i < in_centers.size(); ++i) {
    rb.rules.push_back(rule(std::to_string(i + 1), Condition::is("x", "t" + std::to_string(i)),
                            {{"y", "o" + std::to_string(i)}}));
  }
  fb.rule_blocks.push_back(rb);
  fb.default_rule_block = "main";
  return fb;
}

inline FunctionBlock monotone(int terms, DefuzzMethod m = DefuzzMethod::COG) {
  std::vector<double> c;
  for (int i = 0; i < terms; ++i) c.push_back(10.0 * i / (terms - 1));
  return monotone(c, c, m);
}

/// Same shapes as toy() but with rules guarded by a term that never fires
/// inside the range.
inline FunctionBlock silent(DefuzzMethod m = DefuzzMethod::COG, double default_value = 37.5) {
  FunctionBlock fb = toy(m);
  fb.inputs[0].terms.push_back(Term{"never", shape::Triangle{50, 60, 70}});
  fb.outputs[0].default_value = default_value;
  for (auto& r : fb.rule_blocks[0].rules) r.antecedent = Condition::is("temp", "never");
  return fb;
}

}  // namespace systems
