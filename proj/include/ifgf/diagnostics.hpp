#ifndef IFGF_DIAGNOSTICS_HPP
#define IFGF_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ifgf/types.hpp"

namespace ifgf {

/// What is interpolated over a target cone segment of a source box:
///   none         the field itself, in r
///   exponential  the field divided by exp(i kappa |x - x_S|), in r
///   full_r       the analytic factor, in r
///   full_s       the analytic factor, in s = h / r
enum class FactorizationStrategy { none, exponential, full_r, full_s };

std::string to_string(FactorizationStrategy strategy);
FactorizationStrategy parse_strategy(const std::string& name);
inline constexpr FactorizationStrategy kAllStrategies[] = {FactorizationStrategy::none,
                                                           FactorizationStrategy::exponential,
                                                           FactorizationStrategy::full_r, FactorizationStrategy::full_s};

struct FactorizationDiagConfig {
  std::vector<double> kappa_h;
  std::vector<FactorizationStrategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  int sources = 1000;
  int targets = 1000;
  int ps = 3;
  int pang = 5;
  std::uint64_t seed = 1;
};

struct FactorizationSample {
  double kappa_h = 0.0;
  FactorizationStrategy strategy = FactorizationStrategy::full_s;
  /// max |I_interp - I| / max |I| over the targets; +inf when the strategy's
  /// interpolation interval is unbounded.
  double error = 0.0;
};

/// 0 followed by 0.1 * 10^(k/4), k = 0..12.
std::vector<double> default_kappa_h_sweep();

/// Random sources in a unit box centered at the origin, random targets in the cone
/// segment around +x with s in [eta - ds, eta], ds = eta * min(1, 1/(kappa H)) and
/// angular spans (pi/4) * min(1, 1/(kappa H)).
double factorization_error(double kappa_h, FactorizationStrategy strategy, const FactorizationDiagConfig& config);
std::vector<FactorizationSample> diag_factorization(const FactorizationDiagConfig& config);

struct RvsSDiagConfig {
  int points = 20;
  /// Fixed s span.
  double delta_s = eta / 8.0;
  /// Last r0 as a fraction of the singular point h / delta_s.
  double end_fraction = 0.98;
  int sources = 1000;
  int targets = 1000;
  int ps = 3;
  std::uint64_t seed = 1;
};

struct RvsSSample {
  double r0 = 0.0;
  double delta_r = 0.0;
  double error_r = 0.0;
  double error_s = 0.0;
};

/// Radial interpolation of the analytic factor of a one-wavelength box along the +x
/// ray over [r0, r0 + delta_r], in r and in s, for geometrically spaced r0 from 1.5 H.
std::vector<RvsSSample> diag_r_vs_s(const RvsSDiagConfig& config);

}  // namespace ifgf

#endif  // IFGF_DIAGNOSTICS_HPP
