#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace fuzzkit {

/// A (x, mu) breakpoint of a piecewise-linear membership curve.
struct Point {
  double x = 0.0;
  double mu = 0.0;
  bool operator==(const Point&) const = default;
};

/// Parameter sets for the twelve supported membership curves. All
/// x-parameters share the unit of the owning linguistic variable.
namespace shape {

struct Singleton {
  double c = 0.0;
  bool operator==(const Singleton&) const = default;
};

/// Linear interpolation between points; the first and last mu extend
/// outside the point span.
struct Piecewise {
  std::vector<Point> points;
  bool operator==(const Piecewise&) const = default;
};

struct Triangle {
  double a = 0.0, b = 0.0, c = 0.0;
  bool operator==(const Triangle&) const = default;
};

struct Trapezoid {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  bool operator==(const Trapezoid&) const = default;
};

/// Rising ramp: 0 up to a, 1 from b on.
struct Grade {
  double a = 0.0, b = 0.0;
  bool operator==(const Grade&) const = default;
};

/// Falling ramp: 1 up to a, 0 from b on.
struct ReverseGrade {
  double a = 0.0, b = 0.0;
  bool operator==(const ReverseGrade&) const = default;
};

struct Gaussian {
  double center = 0.0, sigma = 1.0;
  bool operator==(const Gaussian&) const = default;
};

/// Left Gaussian flank below center1, plateau of 1 on [center1, center2],
/// right Gaussian flank above center2.
struct DoubleGaussian {
  double center1 = 0.0, sigma1 = 1.0, center2 = 0.0, sigma2 = 1.0;
  bool operator==(const DoubleGaussian&) const = default;
};

/// Generalized bell 1 / (1 + |(x - c) / a|^(2b)).
struct Bell {
  double a = 1.0, b = 1.0, c = 0.0;
  bool operator==(const Bell&) const = default;
};

/// One raised-cosine period of the given width, zero outside it.
struct Cosine {
  double center = 0.0, width = 1.0;
  bool operator==(const Cosine&) const = default;
};

struct Sigmoidal {
  double slope = 1.0, center = 0.0;
  bool operator==(const Sigmoidal&) const = default;
};

/// sig(slope1, center1) - sig(slope2, center2), clamped into [0, 1].
struct SigmoidDifference {
  double slope1 = 1.0, center1 = 0.0, slope2 = 1.0, center2 = 0.0;
  bool operator==(const SigmoidDifference&) const = default;
};

}  // namespace shape

using Shape = std::variant<shape::Singleton, shape::Piecewise, shape::Triangle, shape::Trapezoid,
                           shape::Grade, shape::ReverseGrade, shape::Gaussian,
                           shape::DoubleGaussian, shape::Bell, shape::Cosine, shape::Sigmoidal,
                           shape::SigmoidDifference>;

class InvalidMembershipFunction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Returns a description of the first broken parameter invariant, if any.
std::optional<std::string> parameter_problem(const Shape& shape);

/// Stable lowercase tag for a shape ("triangle", "reverse_grade", ...).
std::string_view kind_name(const Shape& shape);

/// A membership curve whose parameters are known to be valid. Construction
/// from an invalid parameter set throws InvalidMembershipFunction, so
/// evaluation never has to deal with malformed curves.
class MembershipFunction {
 public:
  template <typename S>
    requires std::is_constructible_v<Shape, S&&>
  MembershipFunction(S&& s)  // NOLINT(google-explicit-constructor)
      : shape_(std::forward<S>(s)) {
    if (auto problem = parameter_problem(shape_)) {
      throw InvalidMembershipFunction(std::string(kind_name(shape_)) + ": " + *problem);
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::string_view kind() const noexcept { return kind_name(shape_); }

  template <typename S>
  bool is() const noexcept {
    return std::holds_alternative<S>(shape_);
  }

  /// True for the piecewise-linear family (Singleton, Piecewise, Triangle,
  /// Trapezoid, Grade, ReverseGrade).
  bool is_linear_family() const noexcept;

  /// x-valued parameters (positions, not widths), used for range inference.
  std::vector<double> x_parameters() const;

  bool operator==(const MembershipFunction&) const = default;

 private:
  Shape shape_;
};

}  // namespace fuzzkit
