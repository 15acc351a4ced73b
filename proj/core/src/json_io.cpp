#include "fuzzkit/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>

#include "json.hpp"

namespace fuzzkit {

using Json = nlohmann::ordered_json;

std::string_view to_string(SchemaErrorCode code) noexcept {
  switch (code) {
    case SchemaErrorCode::MalformedJson: return "MalformedJson";
    case SchemaErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case SchemaErrorCode::MissingField: return "MissingField";
    case SchemaErrorCode::UnknownField: return "UnknownField";
    case SchemaErrorCode::WrongType: return "WrongType";
    case SchemaErrorCode::InvalidValue: return "InvalidValue";
    case SchemaErrorCode::ValidationFailed: return "ValidationFailed";
  }
  return "?";
}

SchemaError::SchemaError(SchemaErrorCode code, std::string path, const std::string& message,
                         std::vector<Violation> violations)
    : std::runtime_error(std::string(to_string(code)) + " at " + (path.empty() ? "/" : path) +
                         ": " + message),
      code_(code),
      path_(std::move(path)),
      violations_(std::move(violations)) {}

namespace {

// ---------------------------------------------------------------------------
// Writing

Json mf_to_json(const MembershipFunction& mf) {
  Json j;
  j["type"] = std::string(mf.kind());
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, shape::Singleton>) {
          j["c"] = s.c;
        } else if constexpr (std::is_same_v<S, shape::Piecewise>) {
          Json pts = Json::array();
          for (const auto& p : s.points) pts.push_back(Json{{"x", p.x}, {"mu", p.mu}});
          j["points"] = std::move(pts);
        } else if constexpr (std::is_same_v<S, shape::Triangle>) {
          j["a"] = s.a, j["b"] = s.b, j["c"] = s.c;
        } else if constexpr (std::is_same_v<S, shape::Trapezoid>) {
          j["a"] = s.a, j["b"] = s.b, j["c"] = s.c, j["d"] = s.d;
        } else if constexpr (std::is_same_v<S, shape::Grade> ||
                             std::is_same_v<S, shape::ReverseGrade>) {
          j["a"] = s.a, j["b"] = s.b;
        } else if constexpr (std::is_same_v<S, shape::Gaussian>) {
          j["center"] = s.center, j["sigma"] = s.sigma;
        } else if constexpr (std::is_same_v<S, shape::DoubleGaussian>) {
          j["center1"] = s.center1, j["sigma1"] = s.sigma1;
          j["center2"] = s.center2, j["sigma2"] = s.sigma2;
        } else if constexpr (std::is_same_v<S, shape::Bell>) {
          j["a"] = s.a, j["b"] = s.b, j["c"] = s.c;
        } else if constexpr (std::is_same_v<S, shape::Cosine>) {
          j["center"] = s.center, j["width"] = s.width;
        } else if constexpr (std::is_same_v<S, shape::Sigmoidal>) {
          j["slope"] = s.slope, j["center"] = s.center;
        } else if constexpr (std::is_same_v<S, shape::SigmoidDifference>) {
          j["slope1"] = s.slope1, j["center1"] = s.center1;
          j["slope2"] = s.slope2, j["center2"] = s.center2;
        }
      },
      mf.shape());
  return j;
}

Json variable_to_json(const LinguisticVariable& v) {
  Json j;
  j["name"] = v.name;
  j["range"] = Json{{"min", v.range.min}, {"max", v.range.max}};
  if (v.kind == VariableKind::Output) {
    j["default_value"] = v.default_value;
    j["defuzzifier"] = std::string(to_string(v.defuzzifier));
  }
  Json terms = Json::array();
  for (const auto& t : v.terms) terms.push_back(Json{{"name", t.name}, {"mf", mf_to_json(t.mf)}});
  j["terms"] = std::move(terms);
  return j;
}

Json condition_to_json(const Condition& c) {
  switch (c.kind) {
    case Condition::Kind::Is:
      return Json{{"op", "is"}, {"variable", c.variable}, {"term", c.term}, {"negated", c.negated}};
    case Condition::Kind::Not:
      return Json{{"op", "not"}, {"operand", condition_to_json(c.children.front())}};
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      Json ops = Json::array();
      for (const auto& child : c.children) ops.push_back(condition_to_json(child));
      return Json{{"op", c.kind == Condition::Kind::And ? "and" : "or"}, {"operands", std::move(ops)}};
    }
  }
  return {};
}

Json rule_block_to_json(const RuleBlock& rb) {
  Json j;
  j["name"] = rb.name;
  j["and"] = std::string(to_string(rb.and_method));
  j["or"] = std::string(to_string(rb.or_method));
  j["activation"] = std::string(to_string(rb.activation));
  j["accumulation"] = std::string(to_string(rb.accumulation));
  Json rules = Json::array();
  for (const auto& r : rb.rules) {
    Json cons = Json::array();
    for (const auto& c : r.consequents) cons.push_back(Json{{"variable", c.variable}, {"term", c.term}});
    rules.push_back(Json{{"label", r.label},
                         {"antecedent", condition_to_json(r.antecedent)},
                         {"consequents", std::move(cons)},
                         {"weight", r.weight}});
  }
  j["rules"] = std::move(rules);
  return j;
}

// ---------------------------------------------------------------------------
// Reading

std::string pointer_escape(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + pointer_escape(key);
}
std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

const char* type_name(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::object: return "object";
    case Json::value_t::array: return "array";
    case Json::value_t::string: return "string";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::discarded: return "discarded";
    default: return "number";
  }
}

[[noreturn]] void wrong_type(const std::string& path, const char* expected, const Json& found) {
  throw SchemaError(SchemaErrorCode::WrongType, path,
                    std::string("expected ") + expected + ", found " + type_name(found));
}

/// Checks `j` is an object whose keys are exactly `required` plus any
/// subset of `optional`.
const Json& object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) wrong_type(path, "object", j);
  for (const auto& [key, value] : j.items()) {
    auto same = [&](const char* k) { return key == k; };
    if (std::none_of(required.begin(), required.end(), same) &&
        std::none_of(optional.begin(), optional.end(), same)) {
      throw SchemaError(SchemaErrorCode::UnknownField, child(path, key),
                        "unknown field '" + key + "'");
    }
  }
  for (const char* key : required) {
    if (!j.contains(key)) {
      throw SchemaError(SchemaErrorCode::MissingField, child(path, key),
                        std::string("missing field '") + key + "'");
    }
  }
  return j;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) wrong_type(path, "number", j);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(SchemaErrorCode::InvalidValue, path, "number is not finite");
  return v;
}

std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) wrong_type(path, "string", j);
  return j.get<std::string>();
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) wrong_type(path, "boolean", j);
  return j.get<bool>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) wrong_type(path, "array", j);
  return j;
}

template <typename T>
T enumerated(const Json& j, const std::string& path, std::optional<T> (*parse)(std::string_view),
             const char* allowed) {
  const std::string s = string(j, path);
  auto v = parse(s);
  if (!v) {
    throw SchemaError(SchemaErrorCode::InvalidValue, path,
                      "'" + s + "' is not one of " + allowed);
  }
  return *v;
}

std::optional<TConorm> parse_or(std::string_view s) {
  auto m = parse_tconorm(s);
  if (m == TConorm::NSum) return std::nullopt;
  return m;
}

class Reader {
 public:
  FunctionBlock read(const Json& doc) {
    object(doc, "", {"schema_version", "function_block"});
    const Json& version = doc["schema_version"];
    if (!version.is_number_integer() && !version.is_number_unsigned()) {
      wrong_type("/schema_version", "integer", version);
    }
    const auto v = version.get<long long>();
    if (v > kSchemaVersion) {
      throw SchemaError(SchemaErrorCode::UnsupportedVersion, "/schema_version",
                        "schema_version " + std::to_string(v) + " is newer than the supported " +
                            std::to_string(kSchemaVersion));
    }
    if (v < 1) {
      throw SchemaError(SchemaErrorCode::InvalidValue, "/schema_version",
                        "schema_version must be at least 1");
    }

    const std::string root = "/function_block";
    const Json& j = object(doc["function_block"], root,
                           {"name", "inputs", "outputs", "rule_blocks", "default_rule_block"});
    FunctionBlock fb;
    fb.name = string(j["name"], child(root, "name"));
    fb.inputs = variables(j["inputs"], child(root, "inputs"), VariableKind::Input);
    fb.outputs = variables(j["outputs"], child(root, "outputs"), VariableKind::Output);
    const std::string blocks_path = child(root, "rule_blocks");
    const Json& blocks = array(j["rule_blocks"], blocks_path);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      fb.rule_blocks.push_back(rule_block(blocks[i], child(blocks_path, i)));
    }
    fb.default_rule_block = string(j["default_rule_block"], child(root, "default_rule_block"));

    if (!mf_violations_.empty()) {
      throw SchemaError(SchemaErrorCode::ValidationFailed, mf_violations_.front().path,
                        format_violations(mf_violations_), mf_violations_);
    }
    auto violations = validate(fb);
    if (!violations.empty()) {
      for (auto& viol : violations) viol.path = root + viol.path;
      throw SchemaError(SchemaErrorCode::ValidationFailed, violations.front().path,
                        format_violations(violations), violations);
    }
    return fb;
  }

 private:
  std::vector<LinguisticVariable> variables(const Json& j, const std::string& path,
                                            VariableKind kind) {
    std::vector<LinguisticVariable> out;
    array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string vpath = child(path, i);
      const Json& v = kind == VariableKind::Output
                          ? object(j[i], vpath, {"name", "range", "default_value", "defuzzifier", "terms"})
                          : object(j[i], vpath, {"name", "range", "terms"});
      LinguisticVariable lv;
      lv.kind = kind;
      lv.name = string(v["name"], child(vpath, "name"));
      const std::string rpath = child(vpath, "range");
      const Json& r = object(v["range"], rpath, {"min", "max"});
      lv.range.min = number(r["min"], child(rpath, "min"));
      lv.range.max = number(r["max"], child(rpath, "max"));
      if (kind == VariableKind::Output) {
        lv.default_value = number(v["default_value"], child(vpath, "default_value"));
        lv.defuzzifier = enumerated<DefuzzMethod>(v["defuzzifier"], child(vpath, "defuzzifier"),
                                                  parse_defuzz_method, "COG, COGS, COA, MOM, RM, LM");
      }
      const std::string tpath = child(vpath, "terms");
      const Json& terms = array(v["terms"], tpath);
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string termpath = child(tpath, k);
        const Json& t = object(terms[k], termpath, {"name", "mf"});
        std::string name = string(t["name"], child(termpath, "name"));
        if (auto mf = membership(t["mf"], child(termpath, "mf"))) {
          lv.terms.push_back(Term{std::move(name), std::move(*mf)});
        }
      }
      out.push_back(std::move(lv));
    }
    return out;
  }

  std::optional<MembershipFunction> membership(const Json& j, const std::string& path) {
    if (!j.is_object()) wrong_type(path, "object", j);
    if (!j.contains("type")) {
      throw SchemaError(SchemaErrorCode::MissingField, child(path, "type"), "missing field 'type'");
    }
    const std::string type = string(j["type"], child(path, "type"));

    auto params = [&](std::initializer_list<const char*> names) {
      std::vector<const char*> required{"type"};
      required.insert(required.end(), names.begin(), names.end());
      // object() wants an initializer_list; check by hand instead.
      for (const auto& [key, value] : j.items()) {
        if (std::find_if(required.begin(), required.end(),
                         [&](const char* k) { return key == k; }) == required.end()) {
          throw SchemaError(SchemaErrorCode::UnknownField, child(path, key),
                            "unknown field '" + key + "' for " + type);
        }
      }
      std::vector<double> values;
      for (const char* name : names) {
        if (!j.contains(name)) {
          throw SchemaError(SchemaErrorCode::MissingField, child(path, name),
                            std::string("missing field '") + name + "' for " + type);
        }
        values.push_back(number(j[name], child(path, name)));
      }
      return values;
    };

    auto make = [&]() -> Shape {
      if (type == "singleton") {
        auto p = params({"c"});
        return shape::Singleton{p[0]};
      }
      if (type == "piecewise") {
        for (const auto& [key, value] : j.items()) {
          if (key != "type" && key != "points") {
            throw SchemaError(SchemaErrorCode::UnknownField, child(path, key),
                              "unknown field '" + key + "' for piecewise");
          }
        }
        if (!j.contains("points")) {
          throw SchemaError(SchemaErrorCode::MissingField, child(path, "points"),
                            "missing field 'points' for piecewise");
        }
        const std::string ppath = child(path, "points");
        const Json& pts = array(j["points"], ppath);
        shape::Piecewise pw;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const std::string pp = child(ppath, i);
          const Json& p = object(pts[i], pp, {"x", "mu"});
          pw.points.push_back(Point{number(p["x"], child(pp, "x")), number(p["mu"], child(pp, "mu"))});
        }
        return pw;
      }
      if (type == "triangle") {
        auto p = params({"a", "b", "c"});
        return shape::Triangle{p[0], p[1], p[2]};
      }
      if (type == "trapezoid") {
        auto p = params({"a", "b", "c", "d"});
        return shape::Trapezoid{p[0], p[1], p[2], p[3]};
      }
      if (type == "grade") {
        auto p = params({"a", "b"});
        return shape::Grade{p[0], p[1]};
      }
      if (type == "reverse_grade") {
        auto p = params({"a", "b"});
        return shape::ReverseGrade{p[0], p[1]};
      }
      if (type == "gaussian") {
        auto p = params({"center", "sigma"});
        return shape::Gaussian{p[0], p[1]};
      }
      if (type == "double_gaussian") {
        auto p = params({"center1", "sigma1", "center2", "sigma2"});
        return shape::DoubleGaussian{p[0], p[1], p[2], p[3]};
      }
      if (type == "bell") {
        auto p = params({"a", "b", "c"});
        return shape::Bell{p[0], p[1], p[2]};
      }
      if (type == "cosine") {
        auto p = params({"center", "width"});
        return shape::Cosine{p[0], p[1]};
      }
      if (type == "sigmoidal") {
        auto p = params({"slope", "center"});
        return shape::Sigmoidal{p[0], p[1]};
      }
      if (type == "sigmoid_difference") {
        auto p = params({"slope1", "center1", "slope2", "center2"});
        return shape::SigmoidDifference{p[0], p[1], p[2], p[3]};
      }
      throw SchemaError(SchemaErrorCode::InvalidValue, child(path, "type"),
                        "unknown membership function type '" + type + "'");
    };

    Shape s = make();
    if (auto problem = parameter_problem(s)) {
      mf_violations_.push_back(Violation{ViolationCode::InvalidMembershipParameters, path,
                                         std::string(kind_name(s)) + ": " + *problem});
      return std::nullopt;
    }
    return MembershipFunction(std::move(s));
  }

  Condition condition(const Json& j, const std::string& path) {
    if (!j.is_object()) wrong_type(path, "object", j);
    if (!j.contains("op")) {
      throw SchemaError(SchemaErrorCode::MissingField, child(path, "op"), "missing field 'op'");
    }
    const std::string op = string(j["op"], child(path, "op"));
    if (op == "is") {
      object(j, path, {"op", "variable", "term"}, {"negated"});
      const bool negated = j.contains("negated") && boolean(j["negated"], child(path, "negated"));
      return Condition::is(string(j["variable"], child(path, "variable")),
                           string(j["term"], child(path, "term")), negated);
    }
    if (op == "not") {
      object(j, path, {"op", "operand"});
      return Condition::negation(condition(j["operand"], child(path, "operand")));
    }
    if (op == "and" || op == "or") {
      object(j, path, {"op", "operands"});
      const std::string opath = child(path, "operands");
      const Json& ops = array(j["operands"], opath);
      std::vector<Condition> children;
      for (std::size_t i = 0; i < ops.size(); ++i) children.push_back(condition(ops[i], child(opath, i)));
      return op == "and" ? Condition::all_of(std::move(children))
                         : Condition::any_of(std::move(children));
    }
    throw SchemaError(SchemaErrorCode::InvalidValue, child(path, "op"),
                      "'" + op + "' is not one of is, not, and, or");
  }

  RuleBlock rule_block(const Json& j, const std::string& path) {
    object(j, path, {"name", "and", "or", "activation", "accumulation", "rules"});
    RuleBlock rb;
    rb.name = string(j["name"], child(path, "name"));
    rb.and_method = enumerated<TNorm>(j["and"], child(path, "and"), parse_tnorm, "MIN, PROD, BDIF");
    rb.or_method = enumerated<TConorm>(j["or"], child(path, "or"), parse_or, "MAX, ASUM, BSUM");
    rb.activation = enumerated<Activation>(j["activation"], child(path, "activation"),
                                           parse_activation, "MIN, PROD");
    rb.accumulation = enumerated<Accumulation>(j["accumulation"], child(path, "accumulation"),
                                               parse_accumulation, "MAX, BSUM, NSUM");
    const std::string rpath = child(path, "rules");
    const Json& rules = array(j["rules"], rpath);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const std::string p = child(rpath, i);
      const Json& r = object(rules[i], p, {"label", "antecedent", "consequents"}, {"weight"});
      Rule rule;
      rule.label = string(r["label"], child(p, "label"));
      rule.antecedent = condition(r["antecedent"], child(p, "antecedent"));
      const std::string cpath = child(p, "consequents");
      const Json& cons = array(r["consequents"], cpath);
      for (std::size_t k = 0; k < cons.size(); ++k) {
        const std::string cp = child(cpath, k);
        const Json& c = object(cons[k], cp, {"variable", "term"});
        rule.consequents.push_back(
            Consequent{string(c["variable"], child(cp, "variable")), string(c["term"], child(cp, "term"))});
      }
      if (r.contains("weight")) rule.weight = number(r["weight"], child(p, "weight"));
      rb.rules.push_back(std::move(rule));
    }
    return rb;
  }

  std::vector<Violation> mf_violations_;
};

}  // namespace

std::string to_json(const FunctionBlock& fb) {
  Json body;
  body["name"] = fb.name;
  body["inputs"] = Json::array();
  for (const auto& v : fb.inputs) body["inputs"].push_back(variable_to_json(v));
  body["outputs"] = Json::array();
  for (const auto& v : fb.outputs) body["outputs"].push_back(variable_to_json(v));
  body["rule_blocks"] = Json::array();
  for (const auto& rb : fb.rule_blocks) body["rule_blocks"].push_back(rule_block_to_json(rb));
  body["default_rule_block"] = fb.default_rule_block;

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["function_block"] = std::move(body);
  return doc.dump(2) + "\n";
}

FunctionBlock from_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw SchemaError(SchemaErrorCode::MalformedJson, "", e.what());
  }
  return Reader().read(doc);
}

std::string trace_to_json(const EvaluationTrace& trace) {
  Json j;
  j["rule_block"] = trace.rule_block_used;
  j["inputs"] = Json::object();
  for (const auto& in : trace.inputs) j["inputs"][in.name] = in.value;
  j["term_degrees"] = Json::array();
  for (const auto& d : trace.term_degrees) {
    j["term_degrees"].push_back(Json{{"variable", d.variable}, {"term", d.term}, {"degree", d.degree}});
  }
  j["rule_firings"] = Json::array();
  for (const auto& f : trace.rule_firings) {
    j["rule_firings"].push_back(
        Json{{"label", f.label}, {"strength", f.strength}, {"weighted_strength", f.weighted_strength}});
  }
  j["outputs"] = Json::object();
  for (const auto& out : trace.outputs) j["outputs"][out.name] = out.value;
  j["output_surfaces"] = Json::array();
  for (const auto& s : trace.output_surfaces) {
    Json spikes = Json::array();
    for (const auto& sp : s.spikes) spikes.push_back(Json{{"x", sp.x}, {"mu", sp.mu}});
    j["output_surfaces"].push_back(
        Json{{"variable", s.variable}, {"xs", s.xs}, {"mus", s.mus}, {"spikes", std::move(spikes)}});
  }
  return j.dump() + "\n";
}

}  // namespace fuzzkit
