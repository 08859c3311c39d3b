#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dislocbc {

class SitePotential;

/// The 2D projected Bravais lattice Lambda = A Z^2 with a finite interaction
/// range and the dislocation core position (the branch cut starts there).
struct LatticeSpec {
  Eigen::Matrix2d basis = Eigen::Matrix2d::Identity();
  std::vector<Eigen::Vector2i> interaction_range;  // closed under negation, spans Z^2
  int components = 1;                              // 1 = screw, 2 = edge
  Eigen::Vector2d core = Eigen::Vector2d(0.5, 0.25);

  void validate() const;  // throws std::invalid_argument on violation
  double max_bond_length() const;
  Eigen::Vector2d cart(const Eigen::Vector2i& l) const { return basis * l.cast<double>(); }
};

/// Branch-cut bookkeeping for stencils of dislocation fields.
/// Bonds crossing Gamma get the predictor jump removed; for edge (N=2) the
/// below-cut endpoint is additionally relabelled by -+ b12 (slip form).
struct CutInfo {
  bool enabled = false;
  Eigen::Vector2d jump = Eigen::Vector2d::Zero();        // value jump magnitude (screw: (b,0))
  Eigen::Vector2i b12_lattice = Eigen::Vector2i::Zero(); // lattice Burgers vector (edge only)
  bool relabel = false;                                  // edge slip relabelling
};

/// Enumerated finite piece of the lattice around the core, with neighbor
/// tables and cut-crossing signs. Site order is lexicographic in integer
/// coordinates (reproducible).
class SiteSet {
 public:
  SiteSet() = default;
  SiteSet(const LatticeSpec& spec, double radius, double extra_buffer, CutInfo cut = {});

  const LatticeSpec& spec() const { return *spec_; }
  int size() const { return static_cast<int>(coords_.size()); }
  int n_offsets() const { return static_cast<int>(spec_->interaction_range.size()); }
  const std::vector<Eigen::Vector2i>& coords() const { return coords_; }
  const Eigen::Vector2d& position(int i) const { return cart_[i]; }
  double dist(int i) const { return dist_[i]; }  // |x_i - core|
  int find(const Eigen::Vector2i& l) const;      // -1 if absent
  /// Neighbor of site i along offset j, after cut relabelling; -1 if outside.
  int neighbor(int i, int j) const { return nbr_[static_cast<std::size_t>(i) * n_off_ + j]; }
  /// +1 bond crosses the cut upward, -1 downward, 0 no crossing.
  int crossing(int i, int j) const { return cross_[static_cast<std::size_t>(i) * n_off_ + j]; }
  const CutInfo& cut() const { return cut_; }
  double radius() const { return radius_; }

  /// Site indices with dist <= r, in site order.
  std::vector<int> ball(double r) const;

 private:
  const LatticeSpec* spec_ = nullptr;
  CutInfo cut_;
  double radius_ = 0.0;
  int n_off_ = 0;
  std::vector<Eigen::Vector2i> coords_;
  std::vector<Eigen::Vector2d> cart_;
  std::vector<double> dist_;
  std::vector<int> nbr_;
  std::vector<signed char> cross_;
  std::unordered_map<std::uint64_t, int> index_;
};

/// Spec op: all sites of Lambda within `radius` of the core (optionally plus
/// one interaction-range buffer shell), in lexicographic integer order.
std::vector<Eigen::Vector2i> sites_in_ball(const LatticeSpec& spec, double radius,
                                           bool include_buffer);

/// Displacement u = predictor + corrector on a SiteSet. The predictor closure
/// is total on R^2 \ Gamma; the corrector is clamped to zero outside
/// free_radius.
struct Field {
  int components = 1;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> predictor;
  double free_radius = 0.0;
  const SiteSet* sites = nullptr;
  std::vector<double> predictor_values;  // N * size, cached
  std::vector<double> corrector;         // N * size, zero outside free_radius

  static Field zero_predictor(const SiteSet& s);
  static Field on(const SiteSet& s, std::function<Eigen::Vector2d(const Eigen::Vector2d&)> pred);
  Eigen::Vector2d value(int site) const;
  Eigen::Vector2d corrector_at(int site) const;
  void set_corrector(int site, const Eigen::Vector2d& v);
  void clamp_exterior();  // zero corrector outside free_radius
};

/// Discrete difference stencil of u at site l: entry j is
/// u(l + rho_j) - u(l), slip-corrected across the branch cut.
struct Stencil {
  const std::vector<Eigen::Vector2i>* offsets = nullptr;
  std::vector<Eigen::Vector2d> values;
};
Stencil stencil(const Field& u, int site);

/// Energy difference functional E(u) = sum_l [V(Du(l)) - V(Du0C(l))] over the
/// given site ids. Throws EvaluationFailure if a site energy is non-finite.
struct EvaluationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
double energy_difference(const Field& u, const Field& reference, const SitePotential& pot,
                         const std::vector<int>& domain);

/// Gradient dE/du over free sites (flattened N * |free|, in free-list order).
void gradient(const Field& u, const SitePotential& pot, const std::vector<int>& free_sites,
              std::vector<double>& grad_out);

/// Reference Hessian action H[v](l) = -Div(grad^2 V(0)[Dv]) with raw
/// differences; v given as flat N*size values on the SiteSet.
void hessian_apply(const SiteSet& sites, const SitePotential& pot, const std::vector<double>& v,
                   std::vector<double>& out);

/// Assembled sparse reference Hessian restricted to `rows` (free sites).
Eigen::SparseMatrix<double> assemble_reference_hessian(const SiteSet& sites,
                                                       const SitePotential& pot,
                                                       const std::vector<int>& free_sites);

/// Assembled sparse Hessian of the energy at the current state of `u`.
Eigen::SparseMatrix<double> assemble_state_hessian(const Field& u, const SitePotential& pot,
                                                   const std::vector<int>& free_sites);

enum class SlipMode { S, R_op };
/// Slip operator (edge only): Su(l) = u(l) above the cut, u(l - b12) below.
/// R_op is the inverse. Sites whose source lies outside the set keep the
/// predictor-only continuation.
std::vector<double> slip_apply(const Field& u, SlipMode mode);

}  // namespace dislocbc
