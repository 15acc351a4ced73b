#include "fuzzkit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fuzzkit {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::vector<std::string> input_names(const FunctionBlock& fb) {
  std::vector<std::string> names;
  for (const auto& v : fb.inputs) names.push_back(v.name);
  return names;
}

const RuleBlock& resolve_block(const FunctionBlock& fb, const std::string& name) {
  if (const auto* rb = fb.find_rule_block(name)) return *rb;
  auto names = fb.rule_block_names();
  throw EngineError(EngineError::Code::UnknownRuleBlock, name,
                    "unknown rule block '" + name + "'; available: " + join(names), names);
}

void check_inputs(const FunctionBlock& fb, const InputMap& inputs) {
  const auto required = input_names(fb);
  for (const auto& v : fb.inputs) {
    auto it = inputs.find(v.name);
    if (it == inputs.end()) {
      throw EngineError(EngineError::Code::MissingInput, v.name,
                        "missing input '" + v.name + "'; required: " + join(required), required);
    }
  }
  for (const auto& [name, value] : inputs) {
    if (!fb.find_input(name)) {
      throw EngineError(EngineError::Code::UnknownInput, name,
                        "unknown input '" + name + "'; required: " + join(required), required);
    }
  }
}

// Continuous mass of a surface under the trapezoidal rule.
double trapezoid_area(std::span<const double> xs, std::span<const Degree> mus) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    area += 0.5 * (mus[i] + mus[i + 1]) * (xs[i + 1] - xs[i]);
  }
  return area;
}

double centroid(const OutputSurface& s, double default_value) {
  const auto& xs = s.xs;
  const auto& mus = s.mus;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    num += 0.5 * h * (xs[i] * mus[i] + xs[i + 1] * mus[i + 1]);
    den += 0.5 * h * (mus[i] + mus[i + 1]);
  }
  if (!(den > 0.0)) return default_value;
  return num / den;
}

double bisector(const OutputSurface& s, double default_value) {
  const auto& xs = s.xs;
  const auto& mus = s.mus;
  const double total = trapezoid_area(xs, mus);
  if (!(total > 0.0)) return default_value;
  const double half = 0.5 * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    const double segment = 0.5 * (mus[i] + mus[i + 1]) * h;
    if (segment > 0.0 && cumulative + segment >= half) {
      // mu is linear across the segment, so the area from xs[i] to xs[i]+t
      // is mu_i t + slope t^2 / 2. Solve for the remaining half-area.
      const double remaining = half - cumulative;
      const double a = 0.5 * (mus[i + 1] - mus[i]) / h;
      const double b = mus[i];
      double t;
      if (a == 0.0) {
        t = remaining / b;
      } else {
        const double disc = std::max(0.0, b * b + 4.0 * a * remaining);
        t = 2.0 * remaining / (b + std::sqrt(disc));
      }
      return xs[i] + std::clamp(t, 0.0, h);
    }
    cumulative += segment;
  }
  return xs.back();
}

}  // namespace

EngineError::EngineError(Code code, std::string subject, std::string message,
                         std::vector<std::string> available)
    : std::runtime_error(std::move(message)),
      code_(code),
      subject_(std::move(subject)),
      available_(std::move(available)) {}

std::string_view to_string(EngineError::Code code) noexcept {
  switch (code) {
    case EngineError::Code::UnknownRuleBlock: return "UnknownRuleBlock";
    case EngineError::Code::MissingInput: return "MissingInput";
    case EngineError::Code::UnknownInput: return "UnknownInput";
    case EngineError::Code::NonFiniteInput: return "NonFiniteInput";
    case EngineError::Code::InvalidConfig: return "InvalidConfig";
    case EngineError::Code::CogsWithoutSpikes: return "CogsWithoutSpikes";
    case EngineError::Code::Inconsistent: return "Inconsistent";
  }
  return "?";
}

double EvaluationTrace::output(std::string_view name) const {
  for (const auto& o : outputs) {
    if (o.name == name) return o.value;
  }
  throw std::out_of_range("no output named '" + std::string(name) + "'");
}

const OutputSurface* EvaluationTrace::surface(std::string_view name) const noexcept {
  for (const auto& s : output_surfaces) {
    if (s.variable == name) return &s;
  }
  return nullptr;
}

std::vector<double> sample_grid(const Range& range, std::size_t n) {
  if (n < 2) {
    throw EngineError(EngineError::Code::InvalidConfig, "resolution",
                      "sample grid needs at least two points");
  }
  std::vector<double> xs(n);
  const double last = static_cast<double>(n - 1);
  const double width = range.max - range.min;
  for (std::size_t i = 0; i < n; ++i) {
    if (2 * i <= n - 1) {
      xs[i] = range.min + width * (static_cast<double>(i) / last);
    } else {
      xs[i] = range.max - width * (static_cast<double>(n - 1 - i) / last);
    }
  }
  return xs;
}

TermDegrees fuzzify(const LinguisticVariable& lv, double x) {
  if (!std::isfinite(x)) {
    throw EngineError(EngineError::Code::NonFiniteInput, lv.name,
                      "input '" + lv.name + "' is not a finite number");
  }
  const double clamped = lv.range.clamp(x);
  TermDegrees out;
  out.reserve(lv.terms.size());
  for (const auto& term : lv.terms) out.emplace_back(term.name, membership(term.mf, clamped));
  return out;
}

Degree eval_condition(const Condition& cond, const DegreeTable& degrees, const RuleBlock& block) {
  switch (cond.kind) {
    case Condition::Kind::Is: {
      auto it = degrees.find({cond.variable, cond.term});
      if (it == degrees.end()) {
        throw EngineError(EngineError::Code::Inconsistent, cond.variable,
                          "no degree for '" + cond.variable + " IS " + cond.term + "'");
      }
      return cond.negated ? complement(it->second) : it->second;
    }
    case Condition::Kind::Not:
      if (cond.children.size() != 1) {
        throw EngineError(EngineError::Code::Inconsistent, "", "NOT needs exactly one operand");
      }
      return complement(eval_condition(cond.children.front(), degrees, block));
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      if (cond.children.empty()) {
        throw EngineError(EngineError::Code::Inconsistent, "", "AND/OR without operands");
      }
      const bool is_and = cond.kind == Condition::Kind::And;
      Degree acc = eval_condition(cond.children.front(), degrees, block);
      for (std::size_t i = 1; i < cond.children.size(); ++i) {
        const Degree next = eval_condition(cond.children[i], degrees, block);
        acc = is_and ? t_norm(block.and_method, acc, next) : t_conorm(block.or_method, acc, next);
      }
      return acc;
    }
  }
  return 0.0;
}

ActivatedTerm activate(Degree strength, double weight, const MembershipFunction& term_mf,
                       Activation method, std::span<const double> xs) {
  const Degree s = clamp_degree(strength * weight);
  ActivatedTerm out;
  out.mus.assign(xs.size(), 0.0);
  if (const auto* single = std::get_if<shape::Singleton>(&term_mf.shape())) {
    out.spikes.push_back(Sample{single->c, s});
    return out;
  }
  if (s == 0.0) return out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Degree mu = membership(term_mf, xs[i]);
    out.mus[i] = method == Activation::Min ? std::min(s, mu) : clamp_degree(s * mu);
  }
  return out;
}

OutputSurface accumulate(std::span<const ActivatedTerm> terms, Accumulation method,
                         std::span<const double> xs, std::string variable) {
  OutputSurface surface;
  surface.variable = std::move(variable);
  surface.xs.assign(xs.begin(), xs.end());
  surface.mus.assign(xs.size(), 0.0);
  const TConorm op = as_tconorm(method);
  for (const auto& term : terms) {
    if (term.mus.size() != xs.size()) {
      throw EngineError(EngineError::Code::Inconsistent, surface.variable,
                        "activated term sampled on a different grid");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      surface.mus[i] = t_conorm(op, surface.mus[i], term.mus[i]);
    }
    for (const auto& spike : term.spikes) {
      auto it = std::find_if(surface.spikes.begin(), surface.spikes.end(),
                             [&](const Sample& s) { return s.x == spike.x; });
      if (it == surface.spikes.end()) {
        surface.spikes.push_back(spike);
      } else {
        it->mu = t_conorm(op, it->mu, spike.mu);
      }
    }
  }
  return surface;
}

double defuzzify(const OutputSurface& surface, DefuzzMethod method, double default_value,
                 double plateau_tolerance) {
  if (surface.xs.size() != surface.mus.size()) {
    throw EngineError(EngineError::Code::Inconsistent, surface.variable,
                      "surface has mismatched sample arrays");
  }
  if (method == DefuzzMethod::COGS) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : surface.spikes) {
      num += s.x * s.mu;
      den += s.mu;
    }
    if (surface.spikes.empty() &&
        std::any_of(surface.mus.begin(), surface.mus.end(), [](Degree m) { return m > 0.0; })) {
      throw EngineError(EngineError::Code::CogsWithoutSpikes, surface.variable,
                        "COGS applied to '" + surface.variable +
                            "' whose consequents are not singletons");
    }
    return den > 0.0 ? num / den : default_value;
  }
  if (surface.xs.empty()) return default_value;

  switch (method) {
    case DefuzzMethod::COG: return centroid(surface, default_value);
    case DefuzzMethod::COA: return bisector(surface, default_value);
    case DefuzzMethod::MOM:
    case DefuzzMethod::RM:
    case DefuzzMethod::LM: {
      const Degree peak = *std::max_element(surface.mus.begin(), surface.mus.end());
      if (!(peak > 0.0)) return default_value;
      const double threshold = (1.0 - plateau_tolerance) * peak;
      double sum = 0.0;
      std::size_t count = 0;
      double left = 0.0;
      double right = 0.0;
      for (std::size_t i = 0; i < surface.xs.size(); ++i) {
        if (surface.mus[i] >= threshold) {
          if (count == 0) left = surface.xs[i];
          right = surface.xs[i];
          sum += surface.xs[i];
          ++count;
        }
      }
      if (method == DefuzzMethod::LM) return left;
      if (method == DefuzzMethod::RM) return right;
      return sum / static_cast<double>(count);
    }
    case DefuzzMethod::COGS: break;
  }
  return default_value;
}

EvaluationTrace evaluate(const FunctionBlock& fb, const InputMap& inputs,
                         const std::optional<std::string>& rule_block,
                         const EngineConfig& config) {
  if (config.resolution < 3) {
    throw EngineError(EngineError::Code::InvalidConfig, "resolution",
                      "resolution must be at least 3");
  }
  const RuleBlock& block = resolve_block(fb, rule_block.value_or(fb.default_rule_block));
  check_inputs(fb, inputs);

  EvaluationTrace trace;
  trace.rule_block_used = block.name;

  DegreeTable table;
  for (const auto& lv : fb.inputs) {
    const double x = inputs.find(lv.name)->second;
    trace.inputs.push_back(NamedValue{lv.name, x});
    for (auto& [term, degree] : fuzzify(lv, x)) {
      trace.term_degrees.push_back(TermDegree{lv.name, term, degree});
      table.emplace(std::make_pair(lv.name, std::move(term)), degree);
    }
  }

  trace.rule_firings.reserve(block.rules.size());
  for (const auto& rule : block.rules) {
    const Degree strength = eval_condition(rule.antecedent, table, block);
    trace.rule_firings.push_back(
        RuleFiring{rule.label, strength, clamp_degree(strength * rule.weight)});
  }

  for (const auto& out : fb.outputs) {
    const auto xs = sample_grid(out.range, config.resolution);
    std::vector<ActivatedTerm> activated;
    for (std::size_t r = 0; r < block.rules.size(); ++r) {
      const auto& rule = block.rules[r];
      for (const auto& cons : rule.consequents) {
        if (cons.variable != out.name) continue;
        const Term* term = out.find_term(cons.term);
        if (!term) {
          throw EngineError(EngineError::Code::Inconsistent, out.name,
                            "unknown term '" + cons.term + "' of output '" + out.name + "'");
        }
        activated.push_back(
            activate(trace.rule_firings[r].strength, rule.weight, term->mf, block.activation, xs));
      }
    }
    OutputSurface surface = accumulate(activated, block.accumulation, xs, out.name);
    const double crisp =
        defuzzify(surface, out.defuzzifier, out.default_value, config.plateau_tolerance);
    trace.outputs.push_back(NamedValue{out.name, out.range.clamp(crisp)});
    trace.output_surfaces.push_back(std::move(surface));
  }
  return trace;
}

Session::Session(std::shared_ptr<const FunctionBlock> fb, EngineConfig config)
    : fb_(std::move(fb)), config_(config), active_(fb_->default_rule_block) {}

void Session::set_active_rule_block(std::string_view name) {
  resolve_block(*fb_, std::string(name));
  active_ = std::string(name);
}

const EvaluationTrace& Session::evaluate(const InputMap& inputs,
                                         const std::optional<std::string>& rule_block) {
  last_ = fuzzkit::evaluate(*fb_, inputs, rule_block ? *rule_block : active_, config_);
  return *last_;
}

}  // namespace fuzzkit
