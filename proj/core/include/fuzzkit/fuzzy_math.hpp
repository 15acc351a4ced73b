#pragma once

#include "fuzzkit/membership.hpp"

namespace fuzzkit {

/// Degree of truth. Always within [0, 1]; every operation that could leave
/// the interval through rounding clamps its result.
using Degree = double;

enum class TNorm { Min, Prod, BDif };
enum class TConorm { Max, ASum, BSum, NSum };

constexpr Degree clamp_degree(double v) noexcept {
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

Degree membership(const MembershipFunction& mf, double x) noexcept;

Degree t_norm(TNorm method, Degree a, Degree b) noexcept;
Degree t_conorm(TConorm method, Degree a, Degree b) noexcept;

constexpr Degree complement(Degree a) noexcept { return clamp_degree(1.0 - a); }

/// The t-conorm that is the De Morgan dual of `method` under 1 - x.
constexpr TConorm de_morgan_dual(TNorm method) noexcept {
  switch (method) {
    case TNorm::Min: return TConorm::Max;
    case TNorm::Prod: return TConorm::ASum;
    case TNorm::BDif: return TConorm::BSum;
  }
  return TConorm::Max;
}

constexpr bool is_de_morgan_pair(TNorm t, TConorm s) noexcept { return de_morgan_dual(t) == s; }

}  // namespace fuzzkit
