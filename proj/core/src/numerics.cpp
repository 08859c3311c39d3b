#include "dislocbc/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>

namespace dislocbc {

void legendre_all(int n, double t, std::vector<double>& val, std::vector<double>& der) {
  val.assign(n + 1, 0.0);
  der.assign(n + 1, 0.0);
  val[0] = 1.0;
  if (n >= 1) {
    val[1] = t;
    der[1] = 1.0;
  }
  for (int k = 1; k < n; ++k) {
    val[k + 1] = ((2 * k + 1) * t * val[k] - k * val[k - 1]) / (k + 1);
    der[k + 1] = der[k - 1] + (2 * k + 1) * val[k];
  }
}

double legendre(int n, double t) {
  std::vector<double> v, d;
  legendre_all(n, t, v, d);
  return v[n];
}

double legendre_deriv(int n, double t) {
  std::vector<double> v, d;
  legendre_all(n, t, v, d);
  return d[n];
}

Quadrature gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: npoints < 1");
  Quadrature q;
  q.nodes.resize(npoints);
  q.weights.resize(npoints);
  const int n = npoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, Newton on L_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

static double clamp01(double s) { return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s); }

double smoothstep_cubic(double s) {
  s = clamp01(s);
  return s * s * (3.0 - 2.0 * s);
}

double smoothstep_quintic(double s) {
  s = clamp01(s);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep_quintic_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double smoothstep_septic(double s) {
  s = clamp01(s);
  return s * s * s * s * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (x_[i] <= x_[i - 1]) throw std::invalid_argument("CubicSpline: knots not increasing");
  // Natural spline: tridiagonal solve for second derivatives.
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  m_.assign(n, 0.0);
  b[0] = 1.0;
  b[n - 1] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    a[i] = h0;
    b[i] = 2.0 * (h0 + h1);
    c[i] = h1;
    d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (std::size_t i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m_[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

int CubicSpline::interval(double x) const {
  if (x < x_.front() || x > x_.back())
    throw std::out_of_range("CubicSpline: evaluation outside knot range");
  std::size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (x_[mid] <= x) lo = mid;
    else hi = mid;
  }
  return static_cast<int>(lo);
}

double CubicSpline::eval(double x) const {
  int i = interval(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x, int order) const {
  int i = interval(x);
  double h = x_[i + 1] - x_[i];
  double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
  if (order == 1) {
    return (y_[i + 1] - y_[i]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
           (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
  }
  if (order == 2) return A * m_[i] + B * m_[i + 1];
  throw std::invalid_argument("CubicSpline::deriv: order must be 1 or 2");
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: bad input");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  f.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    f.residuals[i] = r;
    ss_res += r * r;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.rms_residual = std::sqrt(ss_res / n);
  return f;
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t Rng::next_u64() {
  // xorshift64*
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 2685821657736338717ull;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

}  // namespace dislocbc
