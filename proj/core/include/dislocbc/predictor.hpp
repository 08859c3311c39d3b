#pragma once

#include <Eigen/Dense>
#include <array>

namespace dislocbc {

enum class DislocationKind { screw, edge };

/// Dislocation geometry: Burgers vector, core position, and the radius of the
/// eta regularization ramp used by the edge predictor.
struct DislocationSpec {
  DislocationKind kind = DislocationKind::screw;
  Eigen::Vector2d burgers = Eigen::Vector2d(1.0, 0.0);  // component 0 = b
  Eigen::Vector2d core = Eigen::Vector2d(0.5, 0.25);
  double eta_radius = 4.0;

  void validate(int components) const;
};

/// Ramp eta: 0 on (-inf, 0], 1 on [1, inf), strictly increasing in between.
double eta_ramp(double s);
double eta_ramp_deriv(double s);

/// Angle of x in (0, 2pi) measured from the +e1 cut direction.
/// Throws on the cut (angle 0 / 2pi) and at the origin.
double arg_cut(const Eigen::Vector2d& x);

/// Derivatives of theta(x) = arg(x) and of log|x|, orders 0..4; entry (a, b)
/// with a + b = order is d^a_x d^b_y. Branch-independent for order >= 1.
struct HarmonicDerivs {
  // deriv[k][b] = d^{k-b}_x d^b_y, for k = 1..4
  std::array<std::array<double, 5>, 5> theta{};
  std::array<std::array<double, 5>, 5> logr{};
};
HarmonicDerivs harmonic_derivs(const Eigen::Vector2d& x, int max_order);

/// Antiplane screw CLE predictor for a scalar elasticity matrix c (2x2 SPD):
/// u0(x) = (b/2pi) arg(M (x - core)) with M = c^{-1/2}, branch rotated so the
/// jump sits on the physical cut.
class ScrewPredictor {
 public:
  ScrewPredictor(const DislocationSpec& d, const Eigen::Matrix2d& c2_scalar);
  double u0(const Eigen::Vector2d& x) const;
  Eigen::Vector2d grad(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d hess(const Eigen::Vector2d& x) const;
  /// grad^k u0 as the symmetric array indexed by number of y-derivatives.
  std::array<double, 5> derivs(const Eigen::Vector2d& x, int order) const;
  const DislocationSpec& spec() const { return d_; }

 private:
  DislocationSpec d_;
  Eigen::Matrix2d M_;       // c^{-1/2}
  double branch_rot_ = 0.0; // angle of M e1
  double kappa_ = 0.0;      // b / 2pi
};

/// Isotropic plane-strain edge predictor u0 = u_lin(xi^{-1}(x)).
class EdgePredictor {
 public:
  EdgePredictor(const DislocationSpec& d, double mu, double nu);
  Eigen::Vector2d u_lin(const Eigen::Vector2d& x) const;        // relative to core
  Eigen::Matrix2d grad_u_lin(const Eigen::Vector2d& x) const;   // du_i/dx_a
  Eigen::Vector2d u0(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d grad(const Eigen::Vector2d& x) const;
  /// hess(i, a, b) = d^2 u0_i / dx_a dx_b
  std::array<Eigen::Matrix2d, 2> hess(const Eigen::Vector2d& x) const;
  Eigen::Vector2d xi_map(const Eigen::Vector2d& x) const;
  Eigen::Vector2d xi_inverse(const Eigen::Vector2d& x) const;   // throws on non-convergence
  Eigen::Matrix2d xi_jacobian(const Eigen::Vector2d& x) const;
  double nu() const { return nu_; }
  const DislocationSpec& spec() const { return d_; }

 private:
  std::array<Eigen::Matrix2d, 2> hess_u_lin(const Eigen::Vector2d& x) const;
  DislocationSpec d_;
  double mu_ = 1.0, nu_ = 0.25;
};

}  // namespace dislocbc
