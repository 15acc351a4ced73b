#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fuzzkit/fuzzy_math.hpp"
#include "oracle.hpp"

using namespace fuzzkit;

namespace {

constexpr std::array kTNorms = {TNorm::Min, TNorm::Prod, TNorm::BDif};
constexpr std::array kTConorms = {TConorm::Max, TConorm::ASum, TConorm::BSum, TConorm::NSum};

std::vector<double> grid() {
  std::vector<double> v;
  for (int i = 0; i <= 20; ++i) v.push_back(i / 20.0);
  return v;
}

}  // namespace

TEST_CASE("t-norm examples") {
  CHECK(t_norm(TNorm::Min, 0.3, 0.7) == 0.3);
  CHECK(t_norm(TNorm::BDif, 0.7, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
  for (double x : grid()) CHECK(t_norm(TNorm::Prod, x, 1.0) == x);
}

TEST_CASE("t-conorm examples") {
  CHECK(t_conorm(TConorm::Max, 0.3, 0.7) == 0.7);
  CHECK(t_conorm(TConorm::ASum, 0.5, 0.5) == 0.75);
  CHECK(t_conorm(TConorm::NSum, 0.3, 0.4) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(t_conorm(TConorm::NSum, 0.7, 0.5) == 1.0);
}

TEST_CASE("complement examples") {
  CHECK(complement(0.0) == 1.0);
  CHECK(complement(1.0) == 0.0);
  CHECK(complement(0.25) == 0.75);
}

TEST_CASE("nsum accumulation on a two-rule surface matches the oracle") {
  // Two overlapping activations folded pointwise, engine vs long double.
  for (double a : grid()) {
    for (double b : grid()) {
      const double expected = static_cast<double>(oracle::t_conorm(TConorm::NSum, a, b));
      REQUIRE(std::fabs(t_conorm(TConorm::NSum, a, b) - expected) <= 1e-15);
    }
  }
}

TEST_CASE("property: t-norm axioms") {
  const auto g = grid();
  for (TNorm m : kTNorms) {
    CAPTURE(to_string(m));
    for (double a : g) {
      REQUIRE(t_norm(m, a, 1.0) == doctest::Approx(a).epsilon(1e-15));
      REQUIRE(t_norm(m, a, 0.0) == 0.0);
      for (double b : g) {
        REQUIRE(t_norm(m, a, b) == t_norm(m, b, a));
        const double v = t_norm(m, a, b);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        for (double c : g) {
          if (b <= c) REQUIRE(t_norm(m, a, b) <= t_norm(m, a, c));
        }
      }
    }
  }
}

TEST_CASE("property: t-conorm axioms") {
  const auto g = grid();
  for (TConorm m : kTConorms) {
    CAPTURE(to_string(m));
    for (double a : g) {
      REQUIRE(t_conorm(m, a, 0.0) == doctest::Approx(a).epsilon(1e-15));
      REQUIRE(t_conorm(m, a, 1.0) == 1.0);
      for (double b : g) {
        REQUIRE(t_conorm(m, a, b) == t_conorm(m, b, a));
        const double v = t_conorm(m, a, b);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        for (double c : g) {
          if (b <= c) REQUIRE(t_conorm(m, a, b) <= t_conorm(m, a, c));
        }
      }
    }
  }
}

TEST_CASE("property: De Morgan duality under the standard complement") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (TNorm t : kTNorms) {
    const TConorm s = de_morgan_dual(t);
    CHECK(is_de_morgan_pair(t, s));
    for (int i = 0; i < 10000; ++i) {
      const double a = u(rng), b = u(rng);
      REQUIRE(std::fabs((1.0 - t_norm(t, a, b)) - t_conorm(s, 1.0 - a, 1.0 - b)) <= 1e-12);
    }
  }
  CHECK_FALSE(is_de_morgan_pair(TNorm::Prod, TConorm::Max));
  CHECK_FALSE(is_de_morgan_pair(TNorm::Min, TConorm::ASum));
  CHECK_FALSE(is_de_morgan_pair(TNorm::Min, TConorm::NSum));
}
