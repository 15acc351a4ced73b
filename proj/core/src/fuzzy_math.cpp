#include "fuzzkit/fuzzy_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fuzzkit {
namespace {

double sigmoid(double slope, double center, double x) {
  return 1.0 / (1.0 + std::exp(-slope * (x - center)));
}

double gaussian(double center, double sigma, double x) {
  const double z = (x - center) / sigma;
  return std::exp(-0.5 * z * z);
}

struct Evaluator {
  double x;

  double operator()(const shape::Singleton& p) const { return x == p.c ? 1.0 : 0.0; }

  double operator()(const shape::Piecewise& p) const {
    const auto& pts = p.points;
    if (x <= pts.front().x) return pts.front().mu;
    if (x >= pts.back().x) return pts.back().mu;
    // First point strictly right of x; pts are strictly increasing in x.
    auto hi = std::upper_bound(pts.begin(), pts.end(), x,
                               [](double v, const Point& pt) { return v < pt.x; });
    auto lo = hi - 1;
    const double t = (x - lo->x) / (hi->x - lo->x);
    return lo->mu + t * (hi->mu - lo->mu);
  }

  double operator()(const shape::Triangle& p) const {
    if (x < p.a || x > p.c) return 0.0;
    if (x == p.b) return 1.0;
    if (x < p.b) return (x - p.a) / (p.b - p.a);
    return (p.c - x) / (p.c - p.b);
  }

  double operator()(const shape::Trapezoid& p) const {
    if (x < p.a || x > p.d) return 0.0;
    if (x >= p.b && x <= p.c) return 1.0;
    if (x < p.b) return (x - p.a) / (p.b - p.a);
    return (p.d - x) / (p.d - p.c);
  }

  double operator()(const shape::Grade& p) const {
    if (x <= p.a) return 0.0;
    if (x >= p.b) return 1.0;
    return (x - p.a) / (p.b - p.a);
  }

  double operator()(const shape::ReverseGrade& p) const {
    if (x <= p.a) return 1.0;
    if (x >= p.b) return 0.0;
    return (p.b - x) / (p.b - p.a);
  }

  double operator()(const shape::Gaussian& p) const { return gaussian(p.center, p.sigma, x); }

  double operator()(const shape::DoubleGaussian& p) const {
    if (x < p.center1) return gaussian(p.center1, p.sigma1, x);
    if (x > p.center2) return gaussian(p.center2, p.sigma2, x);
    return 1.0;
  }

  double operator()(const shape::Bell& p) const {
    const double z = std::abs((x - p.c) / p.a);
    return 1.0 / (1.0 + std::pow(z, 2.0 * p.b));
  }

  double operator()(const shape::Cosine& p) const {
    const double offset = x - p.center;
    if (std::abs(offset) > p.width / 2.0) return 0.0;
    return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * offset / p.width));
  }

  double operator()(const shape::Sigmoidal& p) const { return sigmoid(p.slope, p.center, x); }

  double operator()(const shape::SigmoidDifference& p) const {
    return sigmoid(p.slope1, p.center1, x) - sigmoid(p.slope2, p.center2, x);
  }
};

}  // namespace

Degree membership(const MembershipFunction& mf, double x) noexcept {
  return clamp_degree(std::visit(Evaluator{x}, mf.shape()));
}

Degree t_norm(TNorm method, Degree a, Degree b) noexcept {
  switch (method) {
    case TNorm::Min: return std::min(a, b);
    case TNorm::Prod: return clamp_degree(a * b);
    case TNorm::BDif: return clamp_degree(std::max(0.0, a + b - 1.0));
  }
  return 0.0;
}

Degree t_conorm(TConorm method, Degree a, Degree b) noexcept {
  switch (method) {
    case TConorm::Max: return std::max(a, b);
    // Written as a product of complements so that S(a, 1) is exactly 1.
    case TConorm::ASum: return clamp_degree(1.0 - (1.0 - a) * (1.0 - b));
    case TConorm::BSum: return clamp_degree(std::min(1.0, a + b));
    case TConorm::NSum: return clamp_degree((a + b) / std::max(1.0, a + b));
  }
  return 0.0;
}

}  // namespace fuzzkit
