#include "fuzzkit/simulation/crane.hpp"

#include <cmath>

namespace fuzzkit::sim {

CraneState crane_step(const CraneState& s, double power, double dt, const CraneParams& p) noexcept {
  const double a = p.kp * power - p.kf * s.cart_velocity;
  const double alpha = -(p.gravity / p.length) * std::sin(s.angle) - (a / p.length) * std::cos(s.angle);
  CraneState next = s;
  next.cart_velocity = s.cart_velocity + a * dt;
  next.angular_velocity = s.angular_velocity + alpha * dt;
  next.distance = s.distance - next.cart_velocity * dt;
  next.angle = s.angle + next.angular_velocity * dt;
  next.time = s.time + dt;
  return next;
}

double pendulum_energy(const CraneState& s, const CraneParams& p) noexcept {
  return 0.5 * p.length * p.length * s.angular_velocity * s.angular_velocity +
         p.gravity * p.length * (1.0 - std::cos(s.angle));
}

}  // namespace fuzzkit::sim
