#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "raman/link_model.hpp"

namespace raman {

// Rows = channels (scenario order), columns = grid points. Watts.
using PowerProfileMatrix = Eigen::MatrixXd;

/// Cumulative trapezoid operator on a grid.
///
/// `weights` is the (N_z+1)x(N_z+1) matrix such that `row * weights * step`
/// is the running integral of `row` from 0 to each grid point. Weights are
/// relative to the nominal step, so a shortened last interval shows up as a
/// scaled final column rather than a second step size.
class TrapezoidOperator {
 public:
  explicit TrapezoidOperator(const Grid& grid) : step_(grid.step) {
    const std::size_t n = grid.size();
    ratios_.resize(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k) ratios_[k] = grid.interval(k) / grid.step;

    const auto ng = static_cast<Eigen::Index>(n);
    weights_ = Eigen::MatrixXd::Zero(ng, ng);
    for (Eigen::Index k = 1; k < ng; ++k) {
      weights_.col(k) = weights_.col(k - 1);
      const double half = 0.5 * ratios_[static_cast<std::size_t>(k - 1)];
      weights_(k - 1, k) += half;
      weights_(k, k) += half;
    }
  }

  const Eigen::MatrixXd& weights() const { return weights_; }
  double step() const { return step_; }
  Eigen::Index size() const { return weights_.rows(); }

  // values * weights, evaluated as a running sum in O(rows * cols).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const {
    if (values.cols() != size()) throw std::invalid_argument("TrapezoidOperator::apply: column count mismatch");
    Eigen::MatrixXd out(values.rows(), values.cols());
    out.col(0).setZero();
    for (Eigen::Index k = 1; k < values.cols(); ++k) {
      const double half = 0.5 * ratios_[static_cast<std::size_t>(k - 1)];
      out.col(k) = out.col(k - 1) + half * (values.col(k - 1) + values.col(k));
    }
    return out;
  }

 private:
  double step_;
  std::vector<double> ratios_;
  Eigen::MatrixXd weights_;
};

inline TrapezoidOperator trapezoid_operator(const Grid& grid) { return TrapezoidOperator(grid); }

/// One application of the integral-form propagation equation:
///
///   P'[i][k] = P[i][0] * exp(d_i * (-alpha_i * z_k + (G P T)[i][k] * dz))
///
/// with d_i = +1 for forward and -1 for backward channels. Column 0 is the
/// anchor and is returned unchanged. Non-finite results are not trapped here.
inline PowerProfileMatrix propagate(const PowerProfileMatrix& p, const CouplingMatrix& g,
                                    const Eigen::VectorXd& alpha, const Eigen::VectorXd& direction,
                                    const Grid& grid, const TrapezoidOperator& t) {
  const Eigen::Index nch = p.rows();
  const Eigen::Index ng = p.cols();
  if (g.rows() != nch || g.cols() != nch || alpha.size() != nch || direction.size() != nch ||
      static_cast<std::size_t>(ng) != grid.size() || t.size() != ng) {
    throw std::invalid_argument("propagate: dimension mismatch");
  }
  const Eigen::MatrixXd coupled = g * p;
  const Eigen::MatrixXd integral = t.apply(coupled);
  const double dz = t.step();

  PowerProfileMatrix out(nch, ng);
  for (Eigen::Index k = 0; k < ng; ++k) {
    const double z = grid.points[static_cast<std::size_t>(k)];
    out.col(k) = p.col(0).array() *
                 (direction.array() * (integral.col(k).array() * dz - alpha.array() * z)).exp();
  }
  return out;
}

/// Bundles everything about a scenario that stays fixed across iterations.
struct PropagationContext {
  Grid grid;
  TrapezoidOperator trapezoid;
  CouplingMatrix coupling;
  Eigen::VectorXd alpha;
  Eigen::VectorXd direction;

  explicit PropagationContext(const LinkScenario& s)
      : grid(build_grid(s.length_km, s.step_km)),
        trapezoid(grid),
        coupling(build_coupling_matrix(s)),
        alpha(s.attenuation()),
        direction(s.direction()) {}

  PowerProfileMatrix propagate(const PowerProfileMatrix& p) const {
    return raman::propagate(p, coupling, alpha, direction, grid, trapezoid);
  }
};

inline bool all_finite(const PowerProfileMatrix& p) { return p.allFinite(); }

}  // namespace raman
