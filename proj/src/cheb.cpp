#include "ifgf/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ifgf {

namespace {

constexpr int kMaxOrder = 64;
constexpr double kEvalSlack = 1e-12;

void check_order(int n) {
  if (n < 1 || n > kMaxOrder) {
    throw std::invalid_argument("chebyshev order must be in [1, " + std::to_string(kMaxOrder) + "]");
  }
}

void check_interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("chebyshev interval requires a < b");
}

// Row i holds (2 - delta_i0) / n * T_i(x_k), the discrete orthogonality on the zeros grid.
std::vector<double> fit_matrix(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 ? 1.0 : 2.0) / n;
    for (int k = 0; k < n; ++k) {
      m[static_cast<std::size_t>(i) * n + k] = w * std::cos(i * (2.0 * k + 1.0) * pi / (2.0 * n));
    }
  }
  return m;
}

inline void basis(int n, double t, double* out) {
  out[0] = 1.0;
  if (n > 1) out[1] = t;
  for (int i = 2; i < n; ++i) out[i] = 2.0 * t * out[i - 1] - out[i - 2];
}

double checked_reference(double x, const Interval& iv) {
  const double slack = kEvalSlack * std::max({std::abs(iv.lo), std::abs(iv.hi), iv.length()});
  if (!(x >= iv.lo - slack && x <= iv.hi + slack)) {
    throw std::domain_error("chebyshev evaluation outside interpolation interval");
  }
  return std::clamp(to_reference(x, iv), -1.0, 1.0);
}

}  // namespace

std::vector<double> cheb_nodes(int n, double a, double b) {
  check_order(n);
  check_interval(a, b);
  std::vector<double> nodes(n);
  for (int k = 0; k < n; ++k) {
    const double t = std::cos((2.0 * k + 1.0) * pi / (2.0 * n));
    nodes[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return nodes;
}

ChebInterpolant1D cheb_fit(std::span<const cplx> values, int n, double a, double b) {
  check_order(n);
  check_interval(a, b);
  if (static_cast<int>(values.size()) != n) throw std::invalid_argument("cheb_fit: sample count mismatch");
  const auto m = fit_matrix(n);
  ChebInterpolant1D out{{a, b}, std::vector<cplx>(n)};
  for (int i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) acc += m[static_cast<std::size_t>(i) * n + k] * values[k];
    out.coefficients[i] = acc;
  }
  return out;
}

cplx cheb_eval(const ChebInterpolant1D& interp, double x) {
  const double t = checked_reference(x, interp.interval);
  const auto& c = interp.coefficients;
  cplx b1 = 0.0, b2 = 0.0;
  for (int i = interp.order() - 1; i >= 1; --i) {
    const cplx b0 = c[i] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

TensorInterpolant3D tensor_fit_3d(std::span<const cplx> samples, const std::array<Interval, 3>& intervals,
                                  int ps, int pang) {
  for (const auto& iv : intervals) check_interval(iv.lo, iv.hi);
  const ChebTransform transform(ps, pang);
  if (static_cast<int>(samples.size()) != transform.size()) {
    throw std::invalid_argument("tensor_fit_3d: expected P_s * P_ang^2 samples");
  }
  TensorInterpolant3D out{intervals, ps, pang, std::vector<cplx>(transform.size())};
  std::vector<cplx> work(transform.size());
  transform.fit(samples, out.coefficients, work);
  return out;
}

cplx tensor_eval_3d(const TensorInterpolant3D& interp, double s, double theta, double phi) {
  const ChebTransform transform(interp.ps, interp.pang);
  return transform.eval(interp.coefficients, checked_reference(s, interp.intervals[0]),
                        checked_reference(theta, interp.intervals[1]), checked_reference(phi, interp.intervals[2]));
}

ChebTransform::ChebTransform(int ps, int pang) : ps_(ps), pang_(pang) {
  check_order(ps);
  check_order(pang);
  fit_s_ = fit_matrix(ps);
  fit_ang_ = fit_matrix(pang);
}

void ChebTransform::fit(std::span<const cplx> values, std::span<cplx> coeffs, std::span<cplx> work) const {
  const int ps = ps_, pa = pang_;
  const auto idx = [ps, pa](int i, int j, int l) { return static_cast<std::size_t>(i + ps * (j + pa * l)); };

  // s direction: values -> work
  for (int l = 0; l < pa; ++l)
    for (int j = 0; j < pa; ++j)
      for (int i = 0; i < ps; ++i) {
        cplx acc = 0.0;
        const double* row = &fit_s_[static_cast<std::size_t>(i) * ps];
        for (int k = 0; k < ps; ++k) acc += row[k] * values[idx(k, j, l)];
        work[idx(i, j, l)] = acc;
      }
  // theta direction: work -> coeffs
  for (int l = 0; l < pa; ++l)
    for (int j = 0; j < pa; ++j) {
      const double* row = &fit_ang_[static_cast<std::size_t>(j) * pa];
      for (int i = 0; i < ps; ++i) {
        cplx acc = 0.0;
        for (int k = 0; k < pa; ++k) acc += row[k] * work[idx(i, k, l)];
        coeffs[idx(i, j, l)] = acc;
      }
    }
  // phi direction: coeffs -> work -> coeffs
  for (int l = 0; l < pa; ++l) {
    const double* row = &fit_ang_[static_cast<std::size_t>(l) * pa];
    for (int j = 0; j < pa; ++j)
      for (int i = 0; i < ps; ++i) {
        cplx acc = 0.0;
        for (int k = 0; k < pa; ++k) acc += row[k] * coeffs[idx(i, j, k)];
        work[idx(i, j, l)] = acc;
      }
  }
  std::copy(work.begin(), work.begin() + size(), coeffs.begin());
}

cplx ChebTransform::eval(std::span<const cplx> coeffs, double ts, double tt, double tp) const {
  double bs[kMaxOrder], bt[kMaxOrder], bp[kMaxOrder];
  basis(ps_, ts, bs);
  basis(pang_, tt, bt);
  basis(pang_, tp, bp);

  const cplx* c = coeffs.data();
  double re = 0.0, im = 0.0;
  for (int l = 0; l < pang_; ++l) {
    double re_l = 0.0, im_l = 0.0;
    for (int j = 0; j < pang_; ++j) {
      double re_j = 0.0, im_j = 0.0;
      for (int i = 0; i < ps_; ++i, ++c) {
        re_j += bs[i] * c->real();
        im_j += bs[i] * c->imag();
      }
      re_l += bt[j] * re_j;
      im_l += bt[j] * im_j;
    }
    re += bp[l] * re_l;
    im += bp[l] * im_l;
  }
  return {re, im};
}

}  // namespace ifgf
