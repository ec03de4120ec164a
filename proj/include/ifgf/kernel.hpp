#ifndef IFGF_KERNEL_HPP
#define IFGF_KERNEL_HPP

#include "ifgf/types.hpp"

namespace ifgf {

/// Non-negative wavenumber; zero selects the Laplace kernel.
class Wavenumber {
 public:
  constexpr Wavenumber() = default;
  explicit Wavenumber(double kappa);

  constexpr double value() const { return kappa_; }
  constexpr bool is_laplace() const { return kappa_ == 0.0; }

 private:
  double kappa_ = 0.0;
};

/// Spherical coordinates around some origin. At the poles phi is canonicalized to 0.
struct SphericalPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Radial variable s = h / r for a source box of radius h.
struct RadialVariable {
  double s = 0.0;
  double h = 0.0;
};

/// Spherical coordinates of `v`, with theta in [0, pi] and phi in [0, 2 pi).
/// Throws std::domain_error for the zero vector.
SphericalPoint to_spherical(const Vec3& v);

/// Inverse of to_spherical.
Vec3 from_spherical(const SphericalPoint& p);

/// Radius of the sphere circumscribing a box of side H.
constexpr double box_radius(double side) { return 0.5 * std::numbers::sqrt3 * side; }

/// exp(i kappa |x - xp|) / (4 pi |x - xp|). Throws std::domain_error if x == xp.
cplx green(const Vec3& x, const Vec3& xp, double kappa);

/// Same kernel evaluated against the box center; the singular, oscillatory factor.
cplx centered_factor(const Vec3& x, const Vec3& center, double kappa);

/// (|x - c| / |x - xp|) exp(i kappa (|x - xp| - |x - c|)), the slowly varying factor
/// satisfying green = centered_factor * analytic_factor.
cplx analytic_factor(const Vec3& x, const Vec3& xp, const Vec3& center, double kappa);

double s_of_r(double r, double h);
double r_of_s(double s, double h);

/// Length of the r interval [r0, r0 + dr] that corresponds to an s interval of length
/// delta_s ending at h / r0. Returns +infinity when the interval is unbounded.
double delta_r_of_delta_s(double r0, double delta_s, double h);

namespace detail {

// Unchecked kernels for inner loops; callers guarantee non-coincident arguments.
inline cplx green_unchecked(double dist, double kappa) {
  const double scale = 1.0 / (4.0 * pi * dist);
  if (kappa == 0.0) return {scale, 0.0};
  const double phase = kappa * dist;
  return {scale * std::cos(phase), scale * std::sin(phase)};
}

inline cplx analytic_unchecked(double dist_src, double dist_center, double kappa) {
  const double ratio = dist_center / dist_src;
  if (kappa == 0.0) return {ratio, 0.0};
  const double phase = kappa * (dist_src - dist_center);
  return {ratio * std::cos(phase), ratio * std::sin(phase)};
}

// e^{i kappa (a + b)} with the product kappa * a carried to twice working
// precision, so large phases lose no more than a rounding of the result.
inline cplx exp_i_phase(double kappa, double a, double b = 0.0) {
  const double hi = kappa * a;
  const double lo = std::fma(kappa, a, -hi) + kappa * b;
  const double c = std::cos(hi), s = std::sin(hi);
  return {c - s * lo, s + c * lo};
}

}  // namespace detail

}  // namespace ifgf

#endif  // IFGF_KERNEL_HPP
