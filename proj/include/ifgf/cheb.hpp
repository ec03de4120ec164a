#ifndef IFGF_CHEB_HPP
#define IFGF_CHEB_HPP

#include <array>
#include <span>
#include <vector>

#include "ifgf/types.hpp"

namespace ifgf {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  constexpr double length() const { return hi - lo; }
  constexpr double midpoint() const { return 0.5 * (lo + hi); }
};

/// First-kind Chebyshev points cos((2k+1) pi / (2n)), k = 0..n-1, mapped onto [a, b].
/// They are returned in the order of k, i.e. descending.
std::vector<double> cheb_nodes(int n, double a, double b);

/// Chebyshev series on an interval, fitted from samples at cheb_nodes.
struct ChebInterpolant1D {
  Interval interval;
  std::vector<cplx> coefficients;

  int order() const { return static_cast<int>(coefficients.size()); }
};

ChebInterpolant1D cheb_fit(std::span<const cplx> values, int n, double a, double b);

/// Clenshaw evaluation. Throws std::domain_error when x is outside the interval
/// by more than a 1e-12 relative slack.
cplx cheb_eval(const ChebInterpolant1D& interp, double x);

/// Nested s/theta/phi Chebyshev interpolant on a box in (s, theta, phi) space.
///
/// Sample and coefficient layout: index = i_s + P_s * (i_theta + P_ang * i_phi),
/// s fastest, then theta, then phi. Samples are taken at the tensor product of
/// cheb_nodes in each direction.
struct TensorInterpolant3D {
  std::array<Interval, 3> intervals;
  int ps = 0;
  int pang = 0;
  std::vector<cplx> coefficients;
};

TensorInterpolant3D tensor_fit_3d(std::span<const cplx> samples, const std::array<Interval, 3>& intervals,
                                  int ps, int pang);

cplx tensor_eval_3d(const TensorInterpolant3D& interp, double s, double theta, double phi);

/// Precomputed 1D and 3D Chebyshev transforms for fixed orders. This is the
/// allocation-free form used by the evaluator's inner loops.
class ChebTransform {
 public:
  ChebTransform(int ps, int pang);

  int ps() const { return ps_; }
  int pang() const { return pang_; }
  int size() const { return ps_ * pang_ * pang_; }

  /// Values at the tensor nodes to coefficients. `work` must hold size() entries.
  void fit(std::span<const cplx> values, std::span<cplx> coeffs, std::span<cplx> work) const;

  /// Evaluate a coefficient tensor at reference coordinates in [-1, 1]^3.
  cplx eval(std::span<const cplx> coeffs, double ts, double tt, double tp) const;

 private:
  int ps_;
  int pang_;
  std::vector<double> fit_s_;    // ps x ps, row = coefficient index
  std::vector<double> fit_ang_;  // pang x pang
};

/// Reference coordinate of x in the interval, i.e. the affine map onto [-1, 1].
inline double to_reference(double x, const Interval& iv) { return (2.0 * x - iv.lo - iv.hi) / iv.length(); }

}  // namespace ifgf

#endif  // IFGF_CHEB_HPP
