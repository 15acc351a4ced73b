#include "fuzzkit/membership.hpp"

#include <cmath>
#include <sstream>

namespace fuzzkit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::optional<std::string> problem(const char* what) { return std::string(what); }

}  // namespace

std::optional<std::string> parameter_problem(const Shape& s) {
  return std::visit(
      overloaded{
          [](const shape::Singleton& p) -> std::optional<std::string> {
            if (!all_finite({p.c})) return problem("parameters must be finite");
            return std::nullopt;
          },
          [](const shape::Piecewise& p) -> std::optional<std::string> {
            if (p.points.size() < 2) return problem("needs at least two points");
            for (std::size_t i = 0; i < p.points.size(); ++i) {
              const auto& pt = p.points[i];
              if (!all_finite({pt.x, pt.mu})) return problem("parameters must be finite");
              if (pt.mu < 0.0 || pt.mu > 1.0) {
                std::ostringstream os;
                os << "point " << i << " has mu outside [0, 1]";
                return os.str();
              }
              if (i > 0 && !(p.points[i - 1].x < pt.x)) {
                std::ostringstream os;
                os << "point " << i << " x must be strictly greater than point " << i - 1;
                return os.str();
              }
            }
            return std::nullopt;
          },
          [](const shape::Triangle& p) -> std::optional<std::string> {
            if (!all_finite({p.a, p.b, p.c})) return problem("parameters must be finite");
            if (!(p.a <= p.b && p.b <= p.c)) return problem("requires a <= b <= c");
            return std::nullopt;
          },
          [](const shape::Trapezoid& p) -> std::optional<std::string> {
            if (!all_finite({p.a, p.b, p.c, p.d})) return problem("parameters must be finite");
            if (!(p.a <= p.b && p.b <= p.c && p.c <= p.d)) return problem("requires a <= b <= c <= d");
            return std::nullopt;
          },
          [](const shape::Grade& p) -> std::optional<std::string> {
            if (!all_finite({p.a, p.b})) return problem("parameters must be finite");
            if (!(p.a < p.b)) return problem("requires a < b");
            return std::nullopt;
          },
          [](const shape::ReverseGrade& p) -> std::optional<std::string> {
            if (!all_finite({p.a, p.b})) return problem("parameters must be finite");
            if (!(p.a < p.b)) return problem("requires a < b");
            return std::nullopt;
          },
          [](const shape::Gaussian& p) -> std::optional<std::string> {
            if (!all_finite({p.center, p.sigma})) return problem("parameters must be finite");
            if (!(p.sigma > 0.0)) return problem("requires sigma > 0");
            return std::nullopt;
          },
          [](const shape::DoubleGaussian& p) -> std::optional<std::string> {
            if (!all_finite({p.center1, p.sigma1, p.center2, p.sigma2}))
              return problem("parameters must be finite");
            if (!(p.sigma1 > 0.0 && p.sigma2 > 0.0)) return problem("requires sigma1, sigma2 > 0");
            if (!(p.center1 <= p.center2)) return problem("requires center1 <= center2");
            return std::nullopt;
          },
          [](const shape::Bell& p) -> std::optional<std::string> {
            if (!all_finite({p.a, p.b, p.c})) return problem("parameters must be finite");
            if (!(p.a > 0.0 && p.b > 0.0)) return problem("requires a > 0 and b > 0");
            return std::nullopt;
          },
          [](const shape::Cosine& p) -> std::optional<std::string> {
            if (!all_finite({p.center, p.width})) return problem("parameters must be finite");
            if (!(p.width > 0.0)) return problem("requires width > 0");
            return std::nullopt;
          },
          [](const shape::Sigmoidal& p) -> std::optional<std::string> {
            if (!all_finite({p.slope, p.center})) return problem("parameters must be finite");
            return std::nullopt;
          },
          [](const shape::SigmoidDifference& p) -> std::optional<std::string> {
            if (!all_finite({p.slope1, p.center1, p.slope2, p.center2}))
              return problem("parameters must be finite");
            return std::nullopt;
          },
      },
      s);
}

std::string_view kind_name(const Shape& s) {
  return std::visit(overloaded{
                        [](const shape::Singleton&) { return std::string_view("singleton"); },
                        [](const shape::Piecewise&) { return std::string_view("piecewise"); },
                        [](const shape::Triangle&) { return std::string_view("triangle"); },
                        [](const shape::Trapezoid&) { return std::string_view("trapezoid"); },
                        [](const shape::Grade&) { return std::string_view("grade"); },
                        [](const shape::ReverseGrade&) { return std::string_view("reverse_grade"); },
                        [](const shape::Gaussian&) { return std::string_view("gaussian"); },
                        [](const shape::DoubleGaussian&) { return std::string_view("double_gaussian"); },
                        [](const shape::Bell&) { return std::string_view("bell"); },
                        [](const shape::Cosine&) { return std::string_view("cosine"); },
                        [](const shape::Sigmoidal&) { return std::string_view("sigmoidal"); },
                        [](const shape::SigmoidDifference&) {
                          return std::string_view("sigmoid_difference");
                        },
                    },
                    s);
}

bool MembershipFunction::is_linear_family() const noexcept {
  return std::holds_alternative<shape::Singleton>(shape_) ||
         std::holds_alternative<shape::Piecewise>(shape_) ||
         std::holds_alternative<shape::Triangle>(shape_) ||
         std::holds_alternative<shape::Trapezoid>(shape_) ||
         std::holds_alternative<shape::Grade>(shape_) ||
         std::holds_alternative<shape::ReverseGrade>(shape_);
}

std::vector<double> MembershipFunction::x_parameters() const {
  return std::visit(
      overloaded{
          [](const shape::Singleton& p) { return std::vector<double>{p.c}; },
          [](const shape::Piecewise& p) {
            std::vector<double> xs;
            xs.reserve(p.points.size());
            for (const auto& pt : p.points) xs.push_back(pt.x);
            return xs;
          },
          [](const shape::Triangle& p) { return std::vector<double>{p.a, p.b, p.c}; },
          [](const shape::Trapezoid& p) { return std::vector<double>{p.a, p.b, p.c, p.d}; },
          [](const shape::Grade& p) { return std::vector<double>{p.a, p.b}; },
          [](const shape::ReverseGrade& p) { return std::vector<double>{p.a, p.b}; },
          [](const shape::Gaussian& p) { return std::vector<double>{p.center}; },
          [](const shape::DoubleGaussian& p) { return std::vector<double>{p.center1, p.center2}; },
          [](const shape::Bell& p) { return std::vector<double>{p.c}; },
          [](const shape::Cosine& p) {
            return std::vector<double>{p.center - p.width / 2, p.center + p.width / 2};
          },
          [](const shape::Sigmoidal& p) { return std::vector<double>{p.center}; },
          [](const shape::SigmoidDifference& p) { return std::vector<double>{p.center1, p.center2}; },
      },
      shape_);
}

}  // namespace fuzzkit
