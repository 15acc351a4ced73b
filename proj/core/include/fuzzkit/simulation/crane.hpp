#pragma once

namespace fuzzkit::sim {

/// Cart-pendulum with linear drag on the cart.
struct CraneParams {
  double length = 10.0;   // m
  double gravity = 9.81;  // m/s^2
  double kp = 0.5;        // acceleration per unit power
  double kf = 0.3;        // drag, 1/s
};

struct CraneState {
  double distance = 0.0;          // m, cart to target
  double angle = 0.0;             // rad, positive toward the target
  double cart_velocity = 0.0;     // m/s, positive toward the target
  double angular_velocity = 0.0;  // rad/s
  double time = 0.0;              // s
  bool operator==(const CraneState&) const = default;
};

/// One semi-implicit Euler step: velocities first, then positions.
CraneState crane_step(const CraneState& state, double power, double dt,
                      const CraneParams& params = {}) noexcept;

/// Pendulum energy per unit mass, (1/2)L^2 w^2 + gL(1 - cos theta).
double pendulum_energy(const CraneState& state, const CraneParams& params = {}) noexcept;

}  // namespace fuzzkit::sim
