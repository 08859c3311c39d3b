#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "dislocbc/numerics.hpp"

namespace dislocbc {

struct LatticeSpec;  // lattice.hpp

/// Symmetric strain-slot tensors of the Cauchy-Born density at F = 0.
/// Index pairs (component i, gradient direction a), each in {0, 1}.
struct Tens4 {  // C2_{ia,jb}
  std::array<double, 16> v{};
  double& operator()(int i, int a, int j, int b) { return v[((i * 2 + a) * 2 + j) * 2 + b]; }
  double operator()(int i, int a, int j, int b) const { return v[((i * 2 + a) * 2 + j) * 2 + b]; }
};
struct Tens6 {  // C3_{ia,jb,kc}
  std::array<double, 64> v{};
  double& operator()(int i, int a, int j, int b, int k, int c) {
    return v[((((i * 2 + a) * 2 + j) * 2 + b) * 2 + k) * 2 + c];
  }
  double operator()(int i, int a, int j, int b, int k, int c) const {
    return v[((((i * 2 + a) * 2 + j) * 2 + b) * 2 + k) * 2 + c];
  }
};
struct Tens8 {  // C4_{ia,jb,kc,ld}
  std::array<double, 256> v{};
  double& operator()(int i, int a, int j, int b, int k, int c, int l, int d) {
    return v[((((((i * 2 + a) * 2 + j) * 2 + b) * 2 + k) * 2 + c) * 2 + l) * 2 + d];
  }
  double operator()(int i, int a, int j, int b, int k, int c, int l, int d) const {
    return v[((((((i * 2 + a) * 2 + j) * 2 + b) * 2 + k) * 2 + c) * 2 + l) * 2 + d];
  }
};

struct CBTensors {
  int components = 1;
  double c_vol = 1.0;
  Tens4 C2;
  Tens6 C3;
  Tens8 C4;

  /// N=1: C2 as a 2x2 matrix on gradients.
  Eigen::Matrix2d scalar_c2() const;
  /// N=1: isotropic scalar coefficient; throws if C2 deviates from c0*I.
  double isotropic_scalar(double rel_tol = 1e-10) const;
  /// N=2 cubic constants; throws with the measured asymmetry if not cubic.
  void cubic_constants(double& c11, double& c12, double& c44, double rel_tol = 1e-10) const;
  /// T_{ia} = C3_{ia,jb,kc} G_{jb} H_{kc} for N x 2 gradient matrices.
  Eigen::Matrix<double, 2, 2> c3_contract(const Eigen::Matrix<double, 2, 2>& G,
                                          const Eigen::Matrix<double, 2, 2>& H) const;
  Eigen::Matrix<double, 2, 2> c4_contract(const Eigen::Matrix<double, 2, 2>& G,
                                          const Eigen::Matrix<double, 2, 2>& H,
                                          const Eigen::Matrix<double, 2, 2>& K) const;
};

/// Site potential V(Du(l)) = 1/2 sum_rho phi_rho(D_rho u).
/// Pair form per offset: phi(s) = k/2 |s|^2 + alpha/3 (d.s)^3 + beta/4 |s|^4
/// with k, beta even and d odd under rho -> -rho, so the point symmetry
/// V(A) = V((-A_{-rho})) holds by construction.
class SitePotential {
 public:
  enum class Kind { pair_nonlinear, tabulated };

  struct PairParams {
    double k = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    Eigen::Vector2d dir = Eigen::Vector2d::Zero();  // cubic direction (N components used)
  };

  SitePotential() = default;
  /// Pair potential: params aligned with spec.interaction_range.
  SitePotential(const LatticeSpec& spec, std::vector<PairParams> params);
  /// Tabulated potential from the plain-text shell file format.
  static SitePotential tabulated_from_file(const LatticeSpec& spec, const std::string& path);
  static SitePotential tabulated_from_data(const LatticeSpec& spec,
                                           const std::vector<Eigen::Vector2i>& offsets,
                                           const std::vector<std::vector<double>>& knots,
                                           const std::vector<std::vector<double>>& values);

  Kind kind() const { return kind_; }
  int components() const { return components_; }
  int n_offsets() const { return static_cast<int>(offsets_.size()); }
  const std::vector<Eigen::Vector2i>& offsets() const { return offsets_; }

  /// Bond energy/derivatives for directed offset j; s has `components` entries.
  double phi(int j, const double* s) const;
  void dphi(int j, const double* s, double* out) const;
  void ddphi(int j, const double* s, double* out) const;  // N x N row-major
  /// phi''_j(0) is k_j * I for both kinds; returns the scalar.
  double k0(int j) const;

  /// Spec operations on whole stencils (stencil values aligned with offsets()).
  double site_energy(const std::vector<Eigen::Vector2d>& stencil) const;
  std::vector<Eigen::Vector2d> site_gradient(const std::vector<Eigen::Vector2d>& stencil) const;
  /// Nonzero blocks of grad^2 V(0): diagonal in (rho, sigma), value k0/2 * I.
  Eigen::Matrix2d site_hessian_at_zero_block(int j) const;

  /// Cauchy-Born density W(F) = V((F A rho)_rho) / |det A|.
  double cb_density(const Eigen::Matrix<double, 2, 2>& F) const;
  /// Analytic CB tensors at 0.
  CBTensors cb_tensors() const;

 private:
  Kind kind_ = Kind::pair_nonlinear;
  int components_ = 1;
  double c_vol_ = 1.0;
  Eigen::Matrix2d basis_ = Eigen::Matrix2d::Identity();
  std::vector<Eigen::Vector2i> offsets_;
  std::vector<Eigen::Vector2d> cart_;  // A * rho
  std::vector<PairParams> pair_;
  // Tabulated (N=1): spline per offset + quartic fit coefficients near 0.
  std::vector<CubicSpline> tab_;
  std::vector<std::array<double, 5>> tab_quartic_;  // c0..c4 about s=0
  double tab_window_ = 0.0;
  void validate_symmetry() const;
};

}  // namespace dislocbc
