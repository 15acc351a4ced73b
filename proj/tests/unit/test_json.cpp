#include <cmath>
#include <regex>

#include "doctest.h"
#include "fuzzkit/engine.hpp"
#include "fuzzkit/fcl.hpp"
#include "fuzzkit/json_io.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "paths.hpp"
#include "systems.hpp"

using namespace fuzzkit;
using Json = nlohmann::json;

namespace {

SchemaError schema_error(const std::string& text) {
  try {
    from_json(text);
  } catch (const SchemaError& e) {
    return e;
  }
  FAIL("expected a SchemaError");
  throw std::logic_error("unreachable");
}

const char* kMinimal = R"({
  "schema_version": 1,
  "function_block": {
    "name": "mini",
    "inputs": [{"name": "x", "range": {"min": 0, "max": 1},
                "terms": [{"name": "hi", "mf": {"type": "grade", "a": 0, "b": 1}}]}],
    "outputs": [{"name": "y", "range": {"min": 0, "max": 1}, "default_value": 0, "defuzzifier": "COG",
                 "terms": [{"name": "on", "mf": {"type": "triangle", "a": 0, "b": 0.5, "c": 1}}]}],
    "rule_blocks": [{"name": "b", "and": "MIN", "or": "MAX", "activation": "MIN", "accumulation": "MAX",
                     "rules": [{"label": "1", "antecedent": {"op": "is", "variable": "x", "term": "hi"},
                                "consequents": [{"variable": "y", "term": "on"}]}]}],
    "default_rule_block": "b"
  }
})";

}  // namespace

TEST_CASE("hand-written minimal document") {
  const auto fb = from_json(kMinimal);
  CHECK(fb.inputs.size() == 1);
  CHECK(fb.outputs.size() == 1);
  CHECK(fb.rule_blocks[0].rules[0].weight == 1.0);
  CHECK(fb.rule_blocks[0].rules[0].antecedent.negated == false);
  CHECK(from_json(to_json(fb)) == fb);
}

TEST_CASE("crane document shape") {
  const auto fb = parse_fcl(testing_paths::read_file(testing_paths::assets() / "fcl/valid/crane.fcl"));
  const std::string text = to_json(fb);
  CHECK(text.back() == '\n');
  CHECK(text == to_json(fb));
  const Json j = Json::parse(text);
  CHECK(j["schema_version"] == 1);
  CHECK(j["function_block"]["inputs"].size() == 2);
  CHECK(j["function_block"]["outputs"].size() == 1);
  CHECK(j["function_block"]["rule_blocks"][0]["rules"].size() == 6);
  CHECK(testing_paths::read_file(testing_paths::assets() / "systems/crane.json") == text);
}

TEST_CASE("a misspelled shape tag is rejected at the term's mf path") {
  const std::string text = std::regex_replace(kMinimal, std::regex("\"triangle\""), "\"trangle\"");
  const auto e = schema_error(text);
  CHECK(e.code() == SchemaErrorCode::InvalidValue);
  CHECK(e.path() == "/function_block/outputs/0/terms/0/mf/type");
  CHECK(std::string(e.what()).find("trangle") != std::string::npos);
}

TEST_CASE("broken triangle order is a validation violation at the triangle") {
  const std::string text = std::regex_replace(kMinimal, std::regex("\"b\": 0.5"), "\"b\": 1.5");
  const auto e = schema_error(text);
  CHECK(e.code() == SchemaErrorCode::ValidationFailed);
  CHECK(e.path() == "/function_block/outputs/0/terms/0/mf");
  REQUIRE(e.violations().size() == 1);
  CHECK(e.violations()[0].code == ViolationCode::InvalidMembershipParameters);
}

TEST_CASE("model violations carry document paths") {
  const std::string text = std::regex_replace(kMinimal, std::regex("\"or\": \"MAX\""), "\"or\": \"ASUM\"");
  const auto e = schema_error(text);
  CHECK(e.code() == SchemaErrorCode::ValidationFailed);
  REQUIRE(e.violations().size() == 1);
  CHECK(e.violations()[0].code == ViolationCode::DeMorganPairViolation);
  CHECK(e.violations()[0].path == "/function_block/rule_blocks/0");
}

TEST_CASE("strict schema errors") {
  struct Case {
    std::string from, to;
    SchemaErrorCode code;
    std::string path;
  };
  const std::vector<Case> cases = {
      {"\"schema_version\": 1", "\"schema_version\": 2", SchemaErrorCode::UnsupportedVersion, "/schema_version"},
      {"\"default_value\": 0,", "", SchemaErrorCode::MissingField, "/function_block/outputs/0/default_value"},
      {"\"name\": \"mini\",", "\"name\": \"mini\", \"author\": \"me\",", SchemaErrorCode::UnknownField,
       "/function_block/author"},
      {"\"min\": 0, \"max\": 1}, \"default_value\"", "\"min\": \"0\", \"max\": 1}, \"default_value\"",
       SchemaErrorCode::WrongType, "/function_block/outputs/0/range/min"},
      {"\"defuzzifier\": \"COG\"", "\"defuzzifier\": \"CENTER\"", SchemaErrorCode::InvalidValue,
       "/function_block/outputs/0/defuzzifier"},
      {"\"op\": \"is\"", "\"op\": \"xor\"", SchemaErrorCode::InvalidValue,
       "/function_block/rule_blocks/0/rules/0/antecedent/op"},
      {"\"a\": 0, \"b\": 1}", "\"a\": 0, \"b\": 1, \"c\": 2}", SchemaErrorCode::UnknownField,
       "/function_block/inputs/0/terms/0/mf/c"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.to);
    std::string text = kMinimal;
    const auto at = text.find(c.from);
    REQUIRE(at != std::string::npos);
    text.replace(at, c.from.size(), c.to);
    const auto e = schema_error(text);
    CHECK(e.code() == c.code);
    CHECK(e.path() == c.path);
  }
  CHECK(schema_error("{").code() == SchemaErrorCode::MalformedJson);
  CHECK(schema_error("[]").code() == SchemaErrorCode::WrongType);
  CHECK(std::string(schema_error("{}").what()).rfind("MissingField at /schema_version", 0) == 0);
}

TEST_CASE("every shape survives the round trip") {
  auto fb = systems::toy();
  const std::vector<MembershipFunction> shapes = {
      shape::Piecewise{{{0, 0.25}, {10, 1}, {20, 0}}}, shape::Trapezoid{1, 2, 3, 4}, shape::Grade{1, 2},
      shape::ReverseGrade{1, 2}, shape::Gaussian{20, 3}, shape::DoubleGaussian{10, 1, 20, 2},
      shape::Bell{5, 2, 20}, shape::Cosine{20, 8}, shape::Sigmoidal{-0.5, 20},
      shape::SigmoidDifference{1, 10, 1, 30}};
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    fb.inputs[0].terms.push_back(Term{"s" + std::to_string(i), shapes[i]});
  }
  fb.rule_blocks[0].rules[0].weight = 0.1 + 0.2;
  fb.rule_blocks[0].rules[1].antecedent = Condition::negation(
      Condition::any_of({Condition::is("temp", "s3", true), Condition::all_of({Condition::is("temp", "s4"),
                                                                               Condition::is("temp", "s9")})}));
  const auto back = from_json(to_json(fb));
  CHECK(back == fb);
  CHECK(back.rule_blocks[0].rules[0].weight == 0.1 + 0.2);
}

TEST_CASE("property: random systems round trip exactly and deterministically") {
  gen::Rng rng(51);
  for (int i = 0; i < 500; ++i) {
    const auto fb = gen::system(rng);
    const std::string text = to_json(fb);
    REQUIRE(to_json(fb) == text);
    const auto back = from_json(text);
    REQUIRE(back == fb);
    REQUIRE(to_json(back) == text);
  }
}

TEST_CASE("property: FCL and JSON forms of the corpus evaluate identically") {
  gen::Rng rng(52);
  for (const char* name : {"crane", "car", "tipper_prod_asum", "heater_bdif_nsum", "extremes_rm_lm",
                           "guard_two_blocks"}) {
    CAPTURE(name);
    const auto fb = parse_fcl(testing_paths::read_file(testing_paths::assets() / "fcl/valid" / (std::string(name) + ".fcl")));
    const auto via_json = from_json(to_json(fb));
    for (int i = 0; i < 100; ++i) {
      const auto in = gen::inputs(rng, fb);
      const auto a = evaluate(fb, in);
      const auto b = evaluate(via_json, in);
      for (const auto& o : fb.outputs) REQUIRE(std::fabs(a.output(o.name) - b.output(o.name)) <= 1e-12);
    }
  }
}

TEST_CASE("trace document") {
  const auto fb = systems::toy();
  const auto trace = evaluate(fb, {{"temp", 22}});
  const std::string text = trace_to_json(trace);
  CHECK(text.back() == '\n');
  const Json j = Json::parse(text);
  CHECK(j["rule_block"] == "main");
  CHECK(j["inputs"]["temp"] == 22.0);
  CHECK(j["outputs"]["fan"].get<double>() == trace.output("fan"));
  CHECK(j["rule_firings"].size() == 2);
  CHECK(j["term_degrees"].size() == 2);
  CHECK(j["output_surfaces"][0]["xs"].size() == 1001);
  CHECK(j["output_surfaces"][0]["mus"].size() == 1001);
}

TEST_CASE("bundled JSON systems load") {
  const auto tipper = from_json(testing_paths::read_file(testing_paths::assets() / "systems/smooth_tipper.json"));
  CHECK(validate(tipper).empty());
  CHECK_THROWS_AS(emit_fcl(tipper), UnrepresentableError);
  const double tip = evaluate(tipper, {{"service", 7}, {"food", 8}}).output("tip");
  CHECK(tip > 15.0);
  CHECK(tip < 30.0);
}

TEST_CASE("the documented example loads and is canonical") {
  const std::string md = testing_paths::read_file(testing_paths::assets().parent_path() / "docs/schema.md");
  const std::string open = "```json\n";
  const auto begin = md.find(open);
  REQUIRE(begin != std::string::npos);
  const auto end = md.find("```", begin + open.size());
  REQUIRE(end != std::string::npos);
  const std::string doc = md.substr(begin + open.size(), end - begin - open.size());
  const FunctionBlock fb = from_json(doc);
  CHECK(validate(fb).empty());
  CHECK(to_json(fb) == doc);
  CHECK(fb.rule_blocks.size() == 2);
  const auto t = evaluate(fb, {{"temperature", 20.0}, {"humidity", 50.0}});
  CHECK(t.output("heater") > 0.0);
  CHECK(t.output("vent") > 0.0);
}
