#include "dislocbc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dislocbc/potential.hpp"

namespace dislocbc {

namespace {

std::uint64_t pack(const Eigen::Vector2i& l) {
  auto u = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)); };
  return (u(l(0)) << 32) | u(l(1));
}

// Crossing sign of the straight bond x0 -> x1 against the cut
// Gamma = { y = core_y, x >= core_x }: +1 upward, -1 downward, 0 none.
int crossing_sign(const Eigen::Vector2d& x0, const Eigen::Vector2d& x1,
                  const Eigen::Vector2d& core) {
  double y0 = x0(1) - core(1), y1 = x1(1) - core(1);
  if (y0 * y1 >= 0.0) return 0;
  double t = y0 / (y0 - y1);
  double xc = x0(0) + t * (x1(0) - x0(0));
  if (xc < core(0)) return 0;
  return y1 > y0 ? 1 : -1;
}

}  // namespace

void LatticeSpec::validate() const {
  if (std::abs(basis.determinant()) < 1e-14)
    throw std::invalid_argument("LatticeSpec: basis is singular");
  if (components != 1 && components != 2)
    throw std::invalid_argument("LatticeSpec: components must be 1 or 2");
  if (interaction_range.empty())
    throw std::invalid_argument("LatticeSpec: empty interaction range");
  long long g = 0;
  for (std::size_t i = 0; i < interaction_range.size(); ++i) {
    const auto& r = interaction_range[i];
    if (r == Eigen::Vector2i::Zero())
      throw std::invalid_argument("LatticeSpec: zero offset in interaction range");
    if (std::find(interaction_range.begin(), interaction_range.end(), Eigen::Vector2i(-r)) ==
        interaction_range.end())
      throw std::invalid_argument("LatticeSpec: interaction range not closed under negation");
    for (std::size_t j = i + 1; j < interaction_range.size(); ++j) {
      const auto& s = interaction_range[j];
      long long det = static_cast<long long>(r(0)) * s(1) - static_cast<long long>(r(1)) * s(0);
      g = std::gcd(g, std::abs(det));
    }
  }
  if (g != 1) throw std::invalid_argument("LatticeSpec: interaction range does not span Z^2");
}

double LatticeSpec::max_bond_length() const {
  double m = 0.0;
  for (const auto& r : interaction_range) m = std::max(m, (basis * r.cast<double>()).norm());
  return m;
}

SiteSet::SiteSet(const LatticeSpec& spec, double radius, double extra_buffer, CutInfo cut)
    : spec_(&spec), cut_(cut), radius_(radius) {
  spec.validate();
  n_off_ = static_cast<int>(spec.interaction_range.size());
  const double reach = radius + extra_buffer;
  Eigen::Matrix2d inv = spec.basis.inverse();
  double amp = inv.cwiseAbs().maxCoeff() * (reach + spec.core.norm()) + 2.0;
  int box = static_cast<int>(std::ceil(amp));
  coords_.clear();
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j) {
      Eigen::Vector2i l(i, j);
      Eigen::Vector2d x = spec.cart(l);
      double d = (x - spec.core).norm();
      if (d <= reach) {
        if (std::abs(x(1) - spec.core(1)) < 1e-12 && x(0) >= spec.core(0) - 1e-12)
          throw std::invalid_argument("SiteSet: branch cut intersects a lattice site");
        coords_.push_back(l);
      }
    }
  // loop order is already lexicographic in (i, j)
  cart_.reserve(coords_.size());
  dist_.reserve(coords_.size());
  index_.reserve(coords_.size() * 2);
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    cart_.push_back(spec.cart(coords_[i]));
    dist_.push_back((cart_.back() - spec.core).norm());
    index_[pack(coords_[i])] = static_cast<int>(i);
  }
  nbr_.assign(coords_.size() * n_off_, -1);
  cross_.assign(coords_.size() * n_off_, 0);
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    for (int j = 0; j < n_off_; ++j) {
      Eigen::Vector2i tgt = coords_[i] + spec.interaction_range[j];
      int sign = 0;
      if (cut_.enabled) {
        sign = crossing_sign(cart_[i], spec.cart(tgt), spec.core);
        if (sign != 0 && cut_.relabel) tgt -= sign * cut_.b12_lattice;
      }
      auto it = index_.find(pack(tgt));
      nbr_[i * n_off_ + j] = (it == index_.end()) ? -1 : it->second;
      cross_[i * n_off_ + j] = static_cast<signed char>(sign);
    }
  }
}

int SiteSet::find(const Eigen::Vector2i& l) const {
  auto it = index_.find(pack(l));
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> SiteSet::ball(double r) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (dist_[i] <= r) out.push_back(i);
  return out;
}

std::vector<Eigen::Vector2i> sites_in_ball(const LatticeSpec& spec, double radius,
                                           bool include_buffer) {
  if (radius <= 0.0) throw std::invalid_argument("sites_in_ball: radius must be positive");
  double buf = include_buffer ? spec.max_bond_length() : 0.0;
  SiteSet s(spec, radius + buf, 0.0);
  return s.coords();
}

Field Field::zero_predictor(const SiteSet& s) {
  return Field::on(s, [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero(); });
}

Field Field::on(const SiteSet& s, std::function<Eigen::Vector2d(const Eigen::Vector2d&)> pred) {
  Field f;
  f.components = s.spec().components;
  f.predictor = std::move(pred);
  f.sites = &s;
  f.free_radius = s.radius();
  f.predictor_values.assign(static_cast<std::size_t>(s.size()) * f.components, 0.0);
  f.corrector.assign(static_cast<std::size_t>(s.size()) * f.components, 0.0);
  for (int i = 0; i < s.size(); ++i) {
    Eigen::Vector2d v = f.predictor(s.position(i));
    for (int c = 0; c < f.components; ++c)
      f.predictor_values[static_cast<std::size_t>(i) * f.components + c] = v(c);
  }
  return f;
}

Eigen::Vector2d Field::value(int site) const {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int c = 0; c < components; ++c) {
    std::size_t k = static_cast<std::size_t>(site) * components + c;
    v(c) = predictor_values[k] + corrector[k];
  }
  return v;
}

Eigen::Vector2d Field::corrector_at(int site) const {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int c = 0; c < components; ++c)
    v(c) = corrector[static_cast<std::size_t>(site) * components + c];
  return v;
}

void Field::set_corrector(int site, const Eigen::Vector2d& v) {
  for (int c = 0; c < components; ++c)
    corrector[static_cast<std::size_t>(site) * components + c] = v(c);
}

void Field::clamp_exterior() {
  for (int i = 0; i < sites->size(); ++i)
    if (sites->dist(i) > free_radius)
      for (int c = 0; c < components; ++c)
        corrector[static_cast<std::size_t>(i) * components + c] = 0.0;
}

namespace {

// Stencil entry for bond (i, j) of field u on its SiteSet; falls back to the
// predictor closure when the (relabelled) target lies outside the set.
inline void bond_diff(const Field& u, int i, int j, double* out) {
  const SiteSet& S = *u.sites;
  const int N = u.components;
  int t = S.neighbor(i, j);
  int sg = S.crossing(i, j);
  double tv[2] = {0.0, 0.0};
  if (t >= 0) {
    for (int c = 0; c < N; ++c) tv[c] = u.predictor_values[std::size_t(t) * N + c] +
                                        u.corrector[std::size_t(t) * N + c];
  } else {
    Eigen::Vector2i tgt = S.coords()[i] + S.spec().interaction_range[j];
    if (sg != 0 && S.cut().relabel) tgt -= sg * S.cut().b12_lattice;
    Eigen::Vector2d v = u.predictor(S.spec().cart(tgt));
    tv[0] = v(0);
    tv[1] = v(1);
  }
  for (int c = 0; c < N; ++c)
    out[c] = tv[c] - (u.predictor_values[std::size_t(i) * N + c] +
                      u.corrector[std::size_t(i) * N + c]) +
             sg * S.cut().jump(c);
}

}  // namespace

Stencil stencil(const Field& u, int site) {
  Stencil st;
  st.offsets = &u.sites->spec().interaction_range;
  st.values.resize(st.offsets->size(), Eigen::Vector2d::Zero());
  for (int j = 0; j < u.sites->n_offsets(); ++j) {
    double d[2] = {0, 0};
    bond_diff(u, site, j, d);
    st.values[j] = Eigen::Vector2d(d[0], u.components == 2 ? d[1] : 0.0);
  }
  return st;
}

double energy_difference(const Field& u, const Field& reference, const SitePotential& pot,
                         const std::vector<int>& domain) {
  const int noff = u.sites->n_offsets();
  double total = 0.0;
  double s[2], s0[2];
  for (int i : domain) {
    double site_e = 0.0;
    for (int j = 0; j < noff; ++j) {
      bond_diff(u, i, j, s);
      bond_diff(reference, i, j, s0);
      site_e += 0.5 * (pot.phi(j, s) - pot.phi(j, s0));
    }
    if (!std::isfinite(site_e))
      throw EvaluationFailure("energy_difference: non-finite site energy");
    total += site_e;
  }
  return total;
}

void gradient(const Field& u, const SitePotential& pot, const std::vector<int>& free_sites,
              std::vector<double>& grad_out) {
  const SiteSet& S = *u.sites;
  const int N = u.components;
  const int noff = S.n_offsets();
  // scatter per-site forces then gather the free subset
  std::vector<double> g(static_cast<std::size_t>(S.size()) * N, 0.0);
  double s[2], f[2];
  for (int i = 0; i < S.size(); ++i) {
    for (int j = 0; j < noff; ++j) {
      int t = S.neighbor(i, j);
      bond_diff(u, i, j, s);
      pot.dphi(j, s, f);
      for (int c = 0; c < N; ++c) {
        g[std::size_t(i) * N + c] -= 0.5 * f[c];
        if (t >= 0) g[std::size_t(t) * N + c] += 0.5 * f[c];
      }
    }
  }
  grad_out.resize(free_sites.size() * N);
  for (std::size_t k = 0; k < free_sites.size(); ++k)
    for (int c = 0; c < N; ++c) grad_out[k * N + c] = g[std::size_t(free_sites[k]) * N + c];
}

void hessian_apply(const SiteSet& sites, const SitePotential& pot, const std::vector<double>& v,
                   std::vector<double>& out) {
  const int N = sites.spec().components;
  const int noff = sites.n_offsets();
  out.assign(v.size(), 0.0);
  for (int i = 0; i < sites.size(); ++i) {
    for (int j = 0; j < noff; ++j) {
      // raw differences: reference operator ignores the cut
      Eigen::Vector2i tgt = sites.coords()[i] + sites.spec().interaction_range[j];
      int t = sites.find(tgt);
      if (t < 0) continue;
      double kj = 0.5 * pot.k0(j);
      for (int c = 0; c < N; ++c) {
        double d = kj * (v[std::size_t(t) * N + c] - v[std::size_t(i) * N + c]);
        out[std::size_t(i) * N + c] -= d;
        out[std::size_t(t) * N + c] += d;
      }
    }
  }
}

namespace {

Eigen::SparseMatrix<double> assemble_hessian_impl(const SiteSet& S, const SitePotential& pot,
                                                  const std::vector<int>& free_sites,
                                                  const Field* state) {
  const int N = S.spec().components;
  const int noff = S.n_offsets();
  std::vector<int> fmap(S.size(), -1);
  for (std::size_t k = 0; k < free_sites.size(); ++k) fmap[free_sites[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(free_sites.size() * (noff + 1) * N * N);
  double s[2] = {0, 0};
  double blk[4];
  for (int i = 0; i < S.size(); ++i) {
    for (int j = 0; j < noff; ++j) {
      int t;
      if (state) {
        t = S.neighbor(i, j);
        bond_diff(*state, i, j, s);
        pot.ddphi(j, s, blk);
      } else {
        t = S.find(S.coords()[i] + S.spec().interaction_range[j]);
        double k0 = pot.k0(j);
        blk[0] = k0;
        blk[1] = blk[2] = 0.0;
        blk[3] = k0;
      }
      int fi = fmap[i];
      int ft = (t >= 0) ? fmap[t] : -1;
      if (fi < 0 && ft < 0) continue;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
          double h = 0.5 * blk[a * N + b];
          if (fi >= 0) trip.emplace_back(fi * N + a, fi * N + b, h);
          if (ft >= 0) trip.emplace_back(ft * N + a, ft * N + b, h);
          if (fi >= 0 && ft >= 0) {
            trip.emplace_back(fi * N + a, ft * N + b, -h);
            trip.emplace_back(ft * N + a, fi * N + b, -h);
          }
        }
    }
  }
  Eigen::SparseMatrix<double> H(free_sites.size() * N, free_sites.size() * N);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_reference_hessian(const SiteSet& sites,
                                                       const SitePotential& pot,
                                                       const std::vector<int>& free_sites) {
  return assemble_hessian_impl(sites, pot, free_sites, nullptr);
}

Eigen::SparseMatrix<double> assemble_state_hessian(const Field& u, const SitePotential& pot,
                                                   const std::vector<int>& free_sites) {
  return assemble_hessian_impl(*u.sites, pot, free_sites, &u);
}

std::vector<double> slip_apply(const Field& u, SlipMode mode) {
  const SiteSet& S = *u.sites;
  if (S.spec().components != 2)
    throw std::invalid_argument("slip_apply: requires N = 2 (edge configuration)");
  const Eigen::Vector2i b12 = S.cut().b12_lattice;
  const int N = 2;
  std::vector<double> out(u.corrector.size(), 0.0);
  for (int i = 0; i < S.size(); ++i) {
    Eigen::Vector2d x = S.position(i);
    Eigen::Vector2i src = S.coords()[i];
    if (x(1) < S.spec().core(1)) src += (mode == SlipMode::S) ? -b12 : b12;
    int t = S.find(src);
    Eigen::Vector2d v;
    if (t >= 0) {
      v = Eigen::Vector2d(u.corrector[std::size_t(t) * N], u.corrector[std::size_t(t) * N + 1]);
    } else {
      v = Eigen::Vector2d::Zero();  // clamped continuation of the corrector
    }
    out[std::size_t(i) * N] = v(0);
    out[std::size_t(i) * N + 1] = v(1);
  }
  return out;
}

}  // namespace dislocbc
