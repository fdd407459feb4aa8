#pragma once

#include <Eigen/Dense>

namespace raman {

// Classical fixed-step fourth-order Runge-Kutta for autonomous systems
// x' = f(x). Scratch vectors are kept between steps.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(Eigen::Index n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  // `rhs(x, dxdt)` writes the derivative of x into dxdt.
  template <typename System>
  void step(System&& rhs, Eigen::VectorXd& x, double h) {
    rhs(x, k1_);
    tmp_ = x + (0.5 * h) * k1_;
    rhs(tmp_, k2_);
    tmp_ = x + (0.5 * h) * k2_;
    rhs(tmp_, k3_);
    tmp_ = x + h * k3_;
    rhs(tmp_, k4_);
    x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace raman
