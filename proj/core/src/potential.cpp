#include "dislocbc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dislocbc/lattice.hpp"

namespace dislocbc {

SitePotential::SitePotential(const LatticeSpec& spec, std::vector<PairParams> params)
    : kind_(Kind::pair_nonlinear),
      components_(spec.components),
      basis_(spec.basis),
      offsets_(spec.interaction_range),
      pair_(std::move(params)) {
  if (pair_.size() != offsets_.size())
    throw std::invalid_argument("SitePotential: one PairParams per interaction offset required");
  c_vol_ = std::abs(basis_.determinant());
  cart_.reserve(offsets_.size());
  for (const auto& r : offsets_) cart_.push_back(basis_ * r.cast<double>());
  validate_symmetry();
}

void SitePotential::validate_symmetry() const {
  for (std::size_t j = 0; j < offsets_.size(); ++j) {
    auto neg = std::find(offsets_.begin(), offsets_.end(), Eigen::Vector2i(-offsets_[j]));
    if (neg == offsets_.end())
      throw std::invalid_argument("SitePotential: interaction range not closed under negation");
    std::size_t m = static_cast<std::size_t>(neg - offsets_.begin());
    if (kind_ != Kind::pair_nonlinear) continue;
    const auto& a = pair_[j];
    const auto& b = pair_[m];
    if (std::abs(a.k - b.k) > 1e-14 || std::abs(a.beta - b.beta) > 1e-14 ||
        (a.dir * a.alpha + b.dir * b.alpha).norm() > 1e-14 * (1.0 + std::abs(a.alpha)))
      throw std::invalid_argument(
          "SitePotential: point symmetry requires k,beta even and alpha*dir odd in rho");
  }
}

double SitePotential::phi(int j, const double* s) const {
  if (kind_ == Kind::tabulated) {
    double x = s[0];
    if (std::abs(x) <= tab_window_) {
      const auto& q = tab_quartic_[j];
      return q[0] + x * (q[1] + x * (q[2] + x * (q[3] + x * q[4])));
    }
    return tab_[j].eval(x);
  }
  const auto& p = pair_[j];
  double n2 = s[0] * s[0];
  double ds = p.dir(0) * s[0];
  if (components_ == 2) {
    n2 += s[1] * s[1];
    ds += p.dir(1) * s[1];
  }
  return 0.5 * p.k * n2 + (p.alpha / 3.0) * ds * ds * ds + 0.25 * p.beta * n2 * n2;
}

void SitePotential::dphi(int j, const double* s, double* out) const {
  if (kind_ == Kind::tabulated) {
    double x = s[0];
    if (std::abs(x) <= tab_window_) {
      const auto& q = tab_quartic_[j];
      out[0] = q[1] + x * (2 * q[2] + x * (3 * q[3] + x * 4 * q[4]));
    } else {
      out[0] = tab_[j].deriv(x, 1);
    }
    return;
  }
  const auto& p = pair_[j];
  double n2 = s[0] * s[0];
  double ds = p.dir(0) * s[0];
  if (components_ == 2) {
    n2 += s[1] * s[1];
    ds += p.dir(1) * s[1];
  }
  for (int c = 0; c < components_; ++c)
    out[c] = p.k * s[c] + p.alpha * ds * ds * p.dir(c) + p.beta * n2 * s[c];
}

void SitePotential::ddphi(int j, const double* s, double* out) const {
  if (kind_ == Kind::tabulated) {
    double x = s[0];
    if (std::abs(x) <= tab_window_) {
      const auto& q = tab_quartic_[j];
      out[0] = 2 * q[2] + x * (6 * q[3] + x * 12 * q[4]);
    } else {
      out[0] = tab_[j].deriv(x, 2);
    }
    return;
  }
  const auto& p = pair_[j];
  const int N = components_;
  double n2 = s[0] * s[0];
  double ds = p.dir(0) * s[0];
  if (N == 2) {
    n2 += s[1] * s[1];
    ds += p.dir(1) * s[1];
  }
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      double v = 2.0 * p.alpha * ds * p.dir(a) * p.dir(b) +
                 p.beta * (n2 * (a == b ? 1.0 : 0.0) + 2.0 * s[a] * s[b]);
      if (a == b) v += p.k;
      out[a * N + b] = v;
    }
}

double SitePotential::k0(int j) const {
  if (kind_ == Kind::tabulated) return 2.0 * tab_quartic_[j][2];
  return pair_[j].k;
}

double SitePotential::site_energy(const std::vector<Eigen::Vector2d>& st) const {
  double e = 0.0;
  for (int j = 0; j < n_offsets(); ++j) {
    double s[2] = {st[j](0), st[j](1)};
    e += 0.5 * phi(j, s);
  }
  return e;
}

std::vector<Eigen::Vector2d> SitePotential::site_gradient(
    const std::vector<Eigen::Vector2d>& st) const {
  std::vector<Eigen::Vector2d> g(st.size(), Eigen::Vector2d::Zero());
  for (int j = 0; j < n_offsets(); ++j) {
    double s[2] = {st[j](0), st[j](1)};
    double out[2] = {0, 0};
    dphi(j, s, out);
    g[j] = 0.5 * Eigen::Vector2d(out[0], components_ == 2 ? out[1] : 0.0);
  }
  return g;
}

Eigen::Matrix2d SitePotential::site_hessian_at_zero_block(int j) const {
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  for (int c = 0; c < components_; ++c) b(c, c) = 0.5 * k0(j);
  return b;
}

double SitePotential::cb_density(const Eigen::Matrix<double, 2, 2>& F) const {
  double e = 0.0;
  for (int j = 0; j < n_offsets(); ++j) {
    double s[2] = {0, 0};
    for (int c = 0; c < components_; ++c) s[c] = F(c, 0) * cart_[j](0) + F(c, 1) * cart_[j](1);
    e += 0.5 * phi(j, s);
  }
  return e / c_vol_;
}

CBTensors SitePotential::cb_tensors() const {
  CBTensors t;
  t.components = components_;
  t.c_vol = c_vol_;
  const int N = components_;
  for (int j = 0; j < n_offsets(); ++j) {
    const Eigen::Vector2d r = cart_[j];
    double k = k0(j);
    double al = 0.0, be = 0.0;
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    if (kind_ == Kind::pair_nonlinear) {
      al = pair_[j].alpha;
      be = pair_[j].beta;
      d = pair_[j].dir;
    } else {
      // phi'''(0) = 6 c3 = 2 alpha and phi''''(0) = 24 c4 = 6 beta
      al = 3.0 * tab_quartic_[j][3];
      be = 4.0 * tab_quartic_[j][4];
      d = Eigen::Vector2d(1.0, 0.0);
    }
    const double w2 = 0.5 * k / c_vol_;           // from 1/2 phi'' delta_ij
    const double w3 = al / c_vol_;                // 1/2 * phi''' = 1/2 * 2 alpha
    const double w4 = 0.5 / c_vol_;               // assembled below per term
    for (int i = 0; i < N; ++i)
      for (int a = 0; a < 2; ++a)
        for (int jj = 0; jj < N; ++jj)
          for (int b = 0; b < 2; ++b) {
            if (i == jj) t.C2(i, a, jj, b) += w2 * r(a) * r(b);
            for (int kk = 0; kk < N; ++kk)
              for (int c = 0; c < 2; ++c) {
                t.C3(i, a, jj, b, kk, c) += w3 * d(i) * d(jj) * d(kk) * r(a) * r(b) * r(c);
                for (int l = 0; l < N; ++l)
                  for (int dd = 0; dd < 2; ++dd) {
                    // d^4/ds^4 of beta/4 |s|^4 = 2 beta (d_ij d_kl + d_ik d_jl + d_il d_jk)
                    double quart = 2.0 * be *
                                   ((i == jj && kk == l ? 1.0 : 0.0) +
                                    (i == kk && jj == l ? 1.0 : 0.0) +
                                    (i == l && jj == kk ? 1.0 : 0.0));
                    t.C4(i, a, jj, b, kk, c, l, dd) +=
                        w4 * quart * r(a) * r(b) * r(c) * r(dd);
                  }
              }
          }
  }
  return t;
}

Eigen::Matrix2d CBTensors::scalar_c2() const {
  Eigen::Matrix2d m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = C2(0, a, 0, b);
  return m;
}

double CBTensors::isotropic_scalar(double rel_tol) const {
  Eigen::Matrix2d m = scalar_c2();
  double c0 = 0.5 * (m(0, 0) + m(1, 1));
  double dev = std::max({std::abs(m(0, 0) - c0), std::abs(m(1, 1) - c0), std::abs(m(0, 1)),
                         std::abs(m(1, 0))});
  if (dev > rel_tol * std::abs(c0))
    throw std::runtime_error("CBTensors: scalar C2 not isotropic, deviation " +
                             format_float(dev));
  return c0;
}

void CBTensors::cubic_constants(double& c11, double& c12, double& c44, double rel_tol) const {
  if (components != 2) throw std::runtime_error("cubic_constants: requires N = 2");
  c11 = C2(0, 0, 0, 0);
  c12 = C2(0, 0, 1, 1);
  c44 = C2(0, 1, 0, 1);
  double mx = std::max({std::abs(c11), std::abs(c12), std::abs(c44)});
  double asym = 0.0;
  asym = std::max(asym, std::abs(C2(1, 1, 1, 1) - c11));
  asym = std::max(asym, std::abs(C2(1, 1, 0, 0) - c12));
  asym = std::max(asym, std::abs(C2(1, 0, 1, 0) - c44));
  asym = std::max(asym, std::abs(C2(0, 1, 1, 0) - c44));
  // components that vanish under cubic symmetry
  asym = std::max(asym, std::abs(C2(0, 0, 0, 1)));
  asym = std::max(asym, std::abs(C2(0, 0, 1, 0)));
  asym = std::max(asym, std::abs(C2(1, 1, 0, 1)));
  asym = std::max(asym, std::abs(C2(1, 1, 1, 0)));
  if (asym > rel_tol * mx)
    throw std::runtime_error("CBTensors: C2 lacks cubic symmetry, asymmetry " +
                             format_float(asym));
}

Eigen::Matrix<double, 2, 2> CBTensors::c3_contract(const Eigen::Matrix<double, 2, 2>& G,
                                                   const Eigen::Matrix<double, 2, 2>& H) const {
  Eigen::Matrix<double, 2, 2> T = Eigen::Matrix<double, 2, 2>::Zero();
  const int N = components;
  for (int i = 0; i < N; ++i)
    for (int a = 0; a < 2; ++a) {
      double s = 0.0;
      for (int j = 0; j < N; ++j)
        for (int b = 0; b < 2; ++b)
          for (int k = 0; k < N; ++k)
            for (int c = 0; c < 2; ++c) s += C3(i, a, j, b, k, c) * G(j, b) * H(k, c);
      T(i, a) = s;
    }
  return T;
}

Eigen::Matrix<double, 2, 2> CBTensors::c4_contract(const Eigen::Matrix<double, 2, 2>& G,
                                                   const Eigen::Matrix<double, 2, 2>& H,
                                                   const Eigen::Matrix<double, 2, 2>& K) const {
  Eigen::Matrix<double, 2, 2> T = Eigen::Matrix<double, 2, 2>::Zero();
  const int N = components;
  for (int i = 0; i < N; ++i)
    for (int a = 0; a < 2; ++a) {
      double s = 0.0;
      for (int j = 0; j < N; ++j)
        for (int b = 0; b < 2; ++b)
          for (int k = 0; k < N; ++k)
            for (int c = 0; c < 2; ++c)
              for (int l = 0; l < N; ++l)
                for (int d = 0; d < 2; ++d)
                  s += C4(i, a, j, b, k, c, l, d) * G(j, b) * H(k, c) * K(l, d);
      T(i, a) = s;
    }
  return T;
}

SitePotential SitePotential::tabulated_from_data(const LatticeSpec& spec,
                                                 const std::vector<Eigen::Vector2i>& offsets,
                                                 const std::vector<std::vector<double>>& knots,
                                                 const std::vector<std::vector<double>>& values) {
  if (spec.components != 1)
    throw std::invalid_argument("tabulated potential: only N = 1 supported");
  SitePotential p;
  p.kind_ = Kind::tabulated;
  p.components_ = 1;
  p.basis_ = spec.basis;
  p.c_vol_ = std::abs(spec.basis.determinant());
  p.offsets_ = spec.interaction_range;
  for (const auto& r : p.offsets_) p.cart_.push_back(spec.basis * r.cast<double>());
  p.tab_.resize(p.offsets_.size());
  p.tab_quartic_.resize(p.offsets_.size());
  std::vector<bool> seen(p.offsets_.size(), false);

  auto index_of = [&](const Eigen::Vector2i& r) {
    auto it = std::find(p.offsets_.begin(), p.offsets_.end(), r);
    if (it == p.offsets_.end())
      throw std::invalid_argument("tabulated potential: offset not in interaction range");
    return static_cast<std::size_t>(it - p.offsets_.begin());
  };

  for (std::size_t blk = 0; blk < offsets.size(); ++blk) {
    std::size_t j = index_of(offsets[blk]);
    p.tab_[j] = CubicSpline(knots[blk], values[blk]);
    seen[j] = true;
    // mirror phi_{-rho}(s) = phi_rho(-s)
    std::size_t m = index_of(Eigen::Vector2i(-offsets[blk]));
    if (m != j && !seen[m]) {
      std::vector<double> xk(knots[blk].rbegin(), knots[blk].rend());
      std::vector<double> yv(values[blk].rbegin(), values[blk].rend());
      for (auto& x : xk) x = -x;
      p.tab_[m] = CubicSpline(xk, yv);
      seen[m] = true;
    }
  }
  for (std::size_t j = 0; j < p.offsets_.size(); ++j)
    if (!seen[j]) throw std::invalid_argument("tabulated potential: missing shell block");

  // Quartic fit about 0 so derivatives at the reference state are C^4-clean,
  // with V(0) = 0 enforced.
  for (std::size_t j = 0; j < p.offsets_.size(); ++j) {
    const double w = 0.15 * (p.tab_[j].x_max() - p.tab_[j].x_min());
    p.tab_window_ = w;
    const int npts = 21;
    Eigen::MatrixXd A(npts, 5);
    Eigen::VectorXd y(npts);
    for (int q = 0; q < npts; ++q) {
      double x = -w + 2.0 * w * q / (npts - 1);
      y(q) = p.tab_[j].eval(x);
      double xp = 1.0;
      for (int c = 0; c < 5; ++c) {
        A(q, c) = xp;
        xp *= x;
      }
    }
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    coef(0) = 0.0;  // V(0) = 0
    for (int c = 0; c < 5; ++c) p.tab_quartic_[j][c] = coef(c);
  }
  return p;
}

SitePotential SitePotential::tabulated_from_file(const LatticeSpec& spec,
                                                 const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tabulated potential: cannot open " + path);
  std::vector<Eigen::Vector2i> offs;
  std::vector<std::vector<double>> knots, values;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "#") continue;
    if (tag == "shell") {
      int rx, ry;
      if (!(ls >> rx >> ry)) throw std::runtime_error("tabulated potential: bad shell header");
      offs.push_back(Eigen::Vector2i(rx, ry));
      knots.emplace_back();
      values.emplace_back();
    } else {
      if (offs.empty()) throw std::runtime_error("tabulated potential: data before shell header");
      double s = std::stod(tag), v;
      if (!(ls >> v)) throw std::runtime_error("tabulated potential: bad data row");
      knots.back().push_back(s);
      values.back().push_back(v);
    }
  }
  return tabulated_from_data(spec, offs, knots, values);
}

}  // namespace dislocbc
