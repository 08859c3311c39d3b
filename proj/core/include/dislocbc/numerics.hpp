#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dislocbc {

/// Legendre polynomials L_0..L_n at t, values and first derivatives.
void legendre_all(int n, double t, std::vector<double>& val, std::vector<double>& der);

double legendre(int n, double t);
double legendre_deriv(int n, double t);

/// Gauss-Legendre nodes/weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int npoints);

/// Smooth ramps on [0, 1]: 0 at 0, 1 at 1, monotone.
double smoothstep_cubic(double s);    // C^1
double smoothstep_quintic(double s);  // C^2
double smoothstep_septic(double s);   // C^3
double smoothstep_quintic_deriv(double s);

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double eval(double x) const;           // throws outside [x_front, x_back]
  double deriv(double x, int order) const;  // order 1 or 2
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  int interval(double x) const;
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

/// Least-squares line fit y = slope*x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
  std::vector<double> residuals;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Deterministic float formatting with 17 significant digits.
std::string format_float(double v);

/// FNV-1a hash of a byte string, hex-encoded. Used for config provenance.
std::string fnv1a_hex(const std::string& data);

/// Deterministic xorshift-based RNG for test fields and study seeds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next_u64();
  double uniform();                 // [0, 1)
  double normal();                  // standard normal (Box-Muller)
 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dislocbc
