#include "ifgf/kernel.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ifgf {

Wavenumber::Wavenumber(double kappa) : kappa_(kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw std::domain_error("wavenumber must be finite and non-negative");
  }
}

SphericalPoint to_spherical(const Vec3& v) {
  const double r = norm(v);
  if (r == 0.0) throw std::domain_error("spherical coordinates undefined at the origin");
  const double theta = std::acos(std::clamp(v.z / r, -1.0, 1.0));
  double phi = 0.0;
  if (v.x != 0.0 || v.y != 0.0) {
    phi = std::atan2(v.y, v.x);
    if (phi < 0.0) phi += 2.0 * pi;
    if (phi >= 2.0 * pi) phi = 0.0;
  }
  return {r, theta, phi};
}

Vec3 from_spherical(const SphericalPoint& p) {
  const double st = std::sin(p.theta);
  return {p.r * st * std::cos(p.phi), p.r * st * std::sin(p.phi), p.r * std::cos(p.theta)};
}

cplx green(const Vec3& x, const Vec3& xp, double kappa) {
  const double d = distance(x, xp);
  if (d == 0.0) throw std::domain_error("green: coincident points");
  const double scale = 1.0 / (4.0 * pi * d);
  return kappa == 0.0 ? cplx{scale, 0.0} : scale * detail::exp_i_phase(kappa, d);
}

cplx centered_factor(const Vec3& x, const Vec3& center, double kappa) {
  const double d = distance(x, center);
  if (d == 0.0) throw std::domain_error("centered_factor: target at box center");
  const double scale = 1.0 / (4.0 * pi * d);
  return kappa == 0.0 ? cplx{scale, 0.0} : scale * detail::exp_i_phase(kappa, d);
}

cplx analytic_factor(const Vec3& x, const Vec3& xp, const Vec3& center, double kappa) {
  const double d = distance(x, xp);
  if (d == 0.0) throw std::domain_error("analytic_factor: coincident points");
  const double dc = distance(x, center);
  if (dc == 0.0) throw std::domain_error("analytic_factor: target at box center");
  const double ratio = dc / d;
  if (kappa == 0.0) return {ratio, 0.0};
  // Two-sum keeps the rounding error of d - dc.
  const double diff = d - dc;
  const double back = diff - d;
  const double diff_lo = (d - (diff - back)) + (-dc - back);
  return ratio * detail::exp_i_phase(kappa, diff, diff_lo);
}

double s_of_r(double r, double h) {
  if (!(r > 0.0)) throw std::domain_error("s_of_r: r must be positive");
  return h / r;
}

double r_of_s(double s, double h) {
  if (!(s > 0.0)) throw std::domain_error("r_of_s: s must be positive");
  return h / s;
}

double delta_r_of_delta_s(double r0, double delta_s, double h) {
  const double denom = h - r0 * delta_s;
  if (denom <= 1e-12 * h) return std::numeric_limits<double>::infinity();
  return r0 * r0 * delta_s / denom;
}

}  // namespace ifgf
