#include "dislocbc/predictor.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dislocbc/numerics.hpp"

namespace dislocbc {

void DislocationSpec::validate(int components) const {
  if (kind == DislocationKind::screw && components != 1)
    throw std::invalid_argument("DislocationSpec: screw requires N = 1");
  if (kind == DislocationKind::edge) {
    if (components != 2) throw std::invalid_argument("DislocationSpec: edge requires N = 2");
    if (std::abs(burgers(1)) > 1e-14)
      throw std::invalid_argument("DislocationSpec: edge Burgers vector must be along e1");
  }
  if (eta_radius <= 0.0) throw std::invalid_argument("DislocationSpec: eta_radius must be > 0");
}

double eta_ramp(double s) { return smoothstep_quintic(s); }
double eta_ramp_deriv(double s) { return smoothstep_quintic_deriv(s); }

double arg_cut(const Eigen::Vector2d& x) {
  if (x.norm() < 1e-300) throw std::domain_error("arg_cut: origin");
  double t = std::atan2(x(1), x(0));
  if (t < 0.0) t += 2.0 * M_PI;
  if (t == 0.0 || t >= 2.0 * M_PI)
    throw std::domain_error("arg_cut: evaluation on the branch cut");
  return t;
}

HarmonicDerivs harmonic_derivs(const Eigen::Vector2d& x, int max_order) {
  // d^a_x d^b_y Im(log z) = Im(i^b F_{a+b}), F_k = (-1)^{k-1} (k-1)! / z^k,
  // and the same with Re for log|x|.
  HarmonicDerivs out;
  std::complex<double> z(x(0), x(1));
  if (std::abs(z) < 1e-300) throw std::domain_error("harmonic_derivs: origin");
  std::complex<double> zk = z;
  double fact = 1.0;  // (k-1)!
  double sign = 1.0;  // (-1)^{k-1}
  for (int k = 1; k <= max_order; ++k) {
    std::complex<double> Fk = sign * fact / zk;
    std::complex<double> ib(1.0, 0.0);
    for (int b = 0; b <= k; ++b) {
      out.theta[k][b] = (ib * Fk).imag();
      out.logr[k][b] = (ib * Fk).real();
      ib *= std::complex<double>(0.0, 1.0);
    }
    zk *= z;
    fact *= k;
    sign = -sign;
  }
  return out;
}

ScrewPredictor::ScrewPredictor(const DislocationSpec& d, const Eigen::Matrix2d& c2_scalar)
    : d_(d) {
  d_.validate(1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c2_scalar);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("ScrewPredictor: C2 must be positive definite");
  M_ = es.operatorInverseSqrt();
  Eigen::Vector2d me1 = M_.col(0);
  branch_rot_ = std::atan2(me1(1), me1(0));
  kappa_ = d_.burgers(0) / (2.0 * M_PI);
}

double ScrewPredictor::u0(const Eigen::Vector2d& x) const {
  Eigen::Vector2d y = M_ * (x - d_.core);
  Eigen::Vector2d yr(std::cos(branch_rot_) * y(0) + std::sin(branch_rot_) * y(1),
                     -std::sin(branch_rot_) * y(0) + std::cos(branch_rot_) * y(1));
  return kappa_ * arg_cut(yr);
}

std::array<double, 5> ScrewPredictor::derivs(const Eigen::Vector2d& x, int order) const {
  // Chain rule through the constant map y = M (x - core). theta derivatives
  // are branch independent, so the rotation only enters via M.
  Eigen::Vector2d y = M_ * (x - d_.core);
  HarmonicDerivs h = harmonic_derivs(y, order);
  std::array<double, 5> out{};
  // expand (M^T e_x)~ directional derivatives: iterate multi-indices
  // D^order u0 with n_y of them along e_y.
  for (int ny = 0; ny <= order; ++ny) {
    // sum over assignments of y-derivative slots: each x-slot contributes
    // column (M row) weights. Use multinomial expansion over how many of the
    // "x-type" and "y-type" slots map to y-coordinate 2.
    // d/dx_a = M(0,a) d/dy_1 + M(1,a) d/dy_2
    int nx = order - ny;
    double total = 0.0;
    for (int i = 0; i <= nx; ++i) {
      for (int j = 0; j <= ny; ++j) {
        double binom = 1.0;
        for (int t = 0; t < i; ++t) binom *= double(nx - t) / double(t + 1);
        for (int t = 0; t < j; ++t) binom *= double(ny - t) / double(t + 1);
        int b = i + j;  // number of d/dy_2
        total += binom * std::pow(M_(0, 0), nx - i) * std::pow(M_(1, 0), i) *
                 std::pow(M_(0, 1), ny - j) * std::pow(M_(1, 1), j) * h.theta[order][b];
      }
    }
    out[ny] = kappa_ * total;
  }
  return out;
}

Eigen::Vector2d ScrewPredictor::grad(const Eigen::Vector2d& x) const {
  auto d1 = derivs(x, 1);
  return Eigen::Vector2d(d1[0], d1[1]);
}

Eigen::Matrix2d ScrewPredictor::hess(const Eigen::Vector2d& x) const {
  auto d2 = derivs(x, 2);
  Eigen::Matrix2d H;
  H << d2[0], d2[1], d2[1], d2[2];
  return H;
}

EdgePredictor::EdgePredictor(const DislocationSpec& d, double mu, double nu)
    : d_(d), mu_(mu), nu_(nu) {
  d_.validate(2);
  if (nu_ <= -1.0 || nu_ >= 0.5) throw std::invalid_argument("EdgePredictor: bad Poisson ratio");
  (void)mu_;
}

Eigen::Vector2d EdgePredictor::u_lin(const Eigen::Vector2d& rel) const {
  const double b = d_.burgers(0);
  const double r2 = rel.squaredNorm();
  const double th = arg_cut(rel);
  const double xx = rel(0), yy = rel(1);
  const double pre = b / (2.0 * M_PI);
  double ux = pre * (th + xx * yy / (2.0 * (1.0 - nu_) * r2));
  double uy = -pre * ((1.0 - 2.0 * nu_) / (4.0 * (1.0 - nu_)) * std::log(r2) +
                      (xx * xx - yy * yy) / (4.0 * (1.0 - nu_) * r2));
  return Eigen::Vector2d(ux, uy);
}

Eigen::Matrix2d EdgePredictor::grad_u_lin(const Eigen::Vector2d& rel) const {
  const double b = d_.burgers(0);
  const double x = rel(0), y = rel(1);
  const double r2 = rel.squaredNorm(), r4 = r2 * r2;
  const double pre = b / (2.0 * M_PI);
  const double q = 1.0 / (2.0 * (1.0 - nu_));
  Eigen::Matrix2d g;
  // theta derivatives
  const double tx = -y / r2, ty = x / r2;
  // A = x y / r^2
  const double Ax = y * (y * y - x * x) / r4;
  const double Ay = x * (x * x - y * y) / r4;
  // B = (x^2 - y^2) / r^2, L = log r^2
  const double Bx = 4.0 * x * y * y / r4;
  const double By = -4.0 * x * x * y / r4;
  const double Lx = 2.0 * x / r2, Ly = 2.0 * y / r2;
  g(0, 0) = pre * (tx + q * Ax);
  g(0, 1) = pre * (ty + q * Ay);
  g(1, 0) = -pre * (0.5 * (1.0 - 2.0 * nu_) * q * Lx + 0.5 * q * Bx);
  g(1, 1) = -pre * (0.5 * (1.0 - 2.0 * nu_) * q * Ly + 0.5 * q * By);
  return g;
}

std::array<Eigen::Matrix2d, 2> EdgePredictor::hess_u_lin(const Eigen::Vector2d& rel) const {
  const double b = d_.burgers(0);
  const double x = rel(0), y = rel(1);
  const double r2 = rel.squaredNorm(), r4 = r2 * r2, r6 = r4 * r2;
  const double pre = b / (2.0 * M_PI);
  const double q = 1.0 / (2.0 * (1.0 - nu_));
  const double txx = 2.0 * x * y / r4, txy = (y * y - x * x) / r4, tyy = -2.0 * x * y / r4;
  const double Axx = -2.0 * x * y * (3.0 * y * y - x * x) / r6;
  const double Axy = (-x * x * x * x + 6.0 * x * x * y * y - y * y * y * y) / r6;
  const double Ayy = -2.0 * x * y * (3.0 * x * x - y * y) / r6;
  const double Bxx = 4.0 * y * y * (y * y - 3.0 * x * x) / r6;
  const double Bxy = 8.0 * x * y * (x * x - y * y) / r6;
  const double Byy = -4.0 * x * x * (x * x - 3.0 * y * y) / r6;
  const double Lxx = 2.0 * (y * y - x * x) / r4, Lxy = -4.0 * x * y / r4,
               Lyy = 2.0 * (x * x - y * y) / r4;
  Eigen::Matrix2d h0, h1;
  h0 << pre * (txx + q * Axx), pre * (txy + q * Axy), pre * (txy + q * Axy),
      pre * (tyy + q * Ayy);
  h1 << -pre * (0.5 * (1.0 - 2.0 * nu_) * q * Lxx + 0.5 * q * Bxx),
      -pre * (0.5 * (1.0 - 2.0 * nu_) * q * Lxy + 0.5 * q * Bxy),
      -pre * (0.5 * (1.0 - 2.0 * nu_) * q * Lxy + 0.5 * q * Bxy),
      -pre * (0.5 * (1.0 - 2.0 * nu_) * q * Lyy + 0.5 * q * Byy);
  return {h0, h1};
}

Eigen::Vector2d EdgePredictor::xi_map(const Eigen::Vector2d& x) const {
  Eigen::Vector2d rel = x - d_.core;
  double th = arg_cut(rel);
  double e = eta_ramp(rel.norm() / d_.eta_radius);
  return x - d_.burgers * (e * th / (2.0 * M_PI));
}

Eigen::Matrix2d EdgePredictor::xi_jacobian(const Eigen::Vector2d& x) const {
  Eigen::Vector2d rel = x - d_.core;
  double r = rel.norm();
  double th = arg_cut(rel);
  double s = r / d_.eta_radius;
  double e = eta_ramp(s);
  double ep = eta_ramp_deriv(s) / d_.eta_radius;
  Eigen::Vector2d grad_e = ep * rel / r;
  Eigen::Vector2d grad_th(-rel(1) / (r * r), rel(0) / (r * r));
  Eigen::Matrix2d J = Eigen::Matrix2d::Identity();
  J -= d_.burgers * ((grad_e * th + e * grad_th).transpose()) / (2.0 * M_PI);
  return J;
}

Eigen::Vector2d EdgePredictor::xi_inverse(const Eigen::Vector2d& z) const {
  // fixed point x <- z + b * eta * theta / 2pi, then Newton polish
  Eigen::Vector2d x = z;
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector2d rel = x - d_.core;
    double r = rel.norm();
    if (r < 1e-14) break;
    double th;
    try {
      th = arg_cut(rel);
    } catch (const std::domain_error&) {
      th = M_PI;  // nudge off the cut; Newton below restores accuracy
    }
    double e = eta_ramp(r / d_.eta_radius);
    Eigen::Vector2d xn = z + d_.burgers * (e * th / (2.0 * M_PI));
    if ((xn - x).norm() < 1e-13) {
      x = xn;
      break;
    }
    x = xn;
  }
  for (int it = 0; it < 50; ++it) {
    Eigen::Vector2d f = xi_map(x) - z;
    if (f.norm() < 1e-13) return x;
    x -= xi_jacobian(x).partialPivLu().solve(f);
  }
  Eigen::Vector2d f = xi_map(x) - z;
  if (f.norm() < 1e-12) return x;
  throw std::runtime_error("xi_inverse: iteration failed to converge, residual " +
                           format_float(f.norm()));
}

Eigen::Vector2d EdgePredictor::u0(const Eigen::Vector2d& x) const {
  Eigen::Vector2d y = xi_inverse(x);
  return u_lin(y - d_.core);
}

Eigen::Matrix2d EdgePredictor::grad(const Eigen::Vector2d& x) const {
  Eigen::Vector2d y = xi_inverse(x);
  Eigen::Matrix2d Jinv = xi_jacobian(y).inverse();  // D xi^{-1}(x)
  return grad_u_lin(y - d_.core) * Jinv;
}

std::array<Eigen::Matrix2d, 2> EdgePredictor::hess(const Eigen::Vector2d& x) const {
  // d^2(u o g) = (d^2 u)[Dg, Dg] + (du)[D^2 g], g = xi^{-1};
  // D^2 g by finite differences of the analytic Dg (the xi map is smooth and
  // this level only feeds the i=1 edge source term).
  Eigen::Vector2d y = xi_inverse(x);
  Eigen::Matrix2d Dg = xi_jacobian(y).inverse();
  auto Hu = hess_u_lin(y - d_.core);
  Eigen::Matrix2d Gu = grad_u_lin(y - d_.core);
  const double h = 1e-6 * std::max(1.0, x.norm());
  std::array<Eigen::Matrix2d, 2> D2g;  // D2g[a](b, c) = d^2 g_a / dx_b dx_c
  Eigen::Matrix2d Jx[2], Jy[2];
  for (int dir = 0; dir < 2; ++dir) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e(dir) = h;
    Eigen::Matrix2d Jp = xi_jacobian(xi_inverse(x + e)).inverse();
    Eigen::Matrix2d Jm = xi_jacobian(xi_inverse(x - e)).inverse();
    Jx[dir] = (Jp - Jm) / (2.0 * h);
  }
  (void)Jy;
  for (int a = 0; a < 2; ++a)
    for (int bb = 0; bb < 2; ++bb)
      for (int c = 0; c < 2; ++c) D2g[a](bb, c) = 0.5 * (Jx[c](a, bb) + Jx[bb](a, c));
  std::array<Eigen::Matrix2d, 2> out;
  for (int i = 0; i < 2; ++i) {
    Eigen::Matrix2d H = Dg.transpose() * Hu[i] * Dg;
    for (int bb = 0; bb < 2; ++bb)
      for (int c = 0; c < 2; ++c) {
        double extra = 0.0;
        for (int a = 0; a < 2; ++a) extra += Gu(i, a) * D2g[a](bb, c);
        H(bb, c) += extra;
      }
    out[i] = H;
  }
  return out;
}

}  // namespace dislocbc
