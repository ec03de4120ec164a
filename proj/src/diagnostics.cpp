#include "ifgf/diagnostics.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "ifgf/cheb.hpp"
#include "ifgf/kernel.hpp"

namespace ifgf {

std::string to_string(FactorizationStrategy strategy) {
  switch (strategy) {
    case FactorizationStrategy::none:
      return "none";
    case FactorizationStrategy::exponential:
      return "exp-only";
    case FactorizationStrategy::full_r:
      return "full-r";
    case FactorizationStrategy::full_s:
      return "full-s";
  }
  return "?";
}

FactorizationStrategy parse_strategy(const std::string& name) {
  for (auto s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown factorization strategy '" + name + "'");
}

std::vector<double> default_kappa_h_sweep() {
  std::vector<double> out{0.0};
  for (int k = 0; k <= 12; ++k) out.push_back(0.1 * std::pow(10.0, k / 4.0));
  return out;
}

namespace {

constexpr double kSide = 1.0;

struct Sources {
  std::vector<Vec3> points;
  std::vector<cplx> coefficients;
};

// Unit-strength point sources uniformly placed in the box.
Sources random_sources(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  Sources src;
  for (int i = 0; i < count; ++i) {
    const double x = unit(rng), y = unit(rng), z = unit(rng);
    src.points.push_back(Vec3{x, y, z} * kSide);
    src.coefficients.emplace_back(1.0, 0.0);
  }
  return src;
}

cplx field(const Sources& src, const Vec3& x, double kappa) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < src.points.size(); ++j) acc += src.coefficients[j] * green(x, src.points[j], kappa);
  return acc;
}

// The interpolated quantity for a strategy, and the factor that restores the field.
cplx reduced(const Sources& src, const Vec3& x, double kappa, FactorizationStrategy strategy) {
  const Vec3 origin{};
  switch (strategy) {
    case FactorizationStrategy::none:
      return field(src, x, kappa);
    case FactorizationStrategy::exponential:
      return field(src, x, kappa) * std::exp(cplx{0.0, -kappa * norm(x)});
    case FactorizationStrategy::full_r:
    case FactorizationStrategy::full_s: {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < src.points.size(); ++j) {
        acc += src.coefficients[j] * analytic_factor(x, src.points[j], origin, kappa);
      }
      return acc;
    }
  }
  return 0.0;
}

cplx restore(const Vec3& x, double kappa, FactorizationStrategy strategy) {
  switch (strategy) {
    case FactorizationStrategy::none:
      return 1.0;
    case FactorizationStrategy::exponential:
      return std::exp(cplx{0.0, kappa * norm(x)});
    case FactorizationStrategy::full_r:
    case FactorizationStrategy::full_s:
      return centered_factor(x, Vec3{}, kappa);
  }
  return 1.0;
}

bool in_s(FactorizationStrategy strategy) { return strategy == FactorizationStrategy::full_s; }

}  // namespace

double factorization_error(double kappa_h, FactorizationStrategy strategy, const FactorizationDiagConfig& config) {
  if (!(kappa_h >= 0.0)) throw std::invalid_argument("factorization_error: kappa H must be non-negative");
  const double kappa = kappa_h / kSide;
  const double h = box_radius(kSide);
  const double scale = kappa_h > 1.0 ? 1.0 / kappa_h : 1.0;
  const double ds = eta * scale;
  const double dang = (pi / 4.0) * scale;

  const Interval s_iv{eta - ds, eta};
  const Interval t_iv{pi / 2.0 - dang / 2.0, pi / 2.0 + dang / 2.0};
  const Interval p_iv{-dang / 2.0, dang / 2.0};
  const double r0 = h / eta;
  const double dr = delta_r_of_delta_s(r0, ds, h);
  if (!in_s(strategy) && !std::isfinite(dr)) return std::numeric_limits<double>::infinity();
  const Interval r_iv{r0, r0 + dr};
  const Interval& radial = in_s(strategy) ? s_iv : r_iv;
  const auto radius = [&](double v) { return in_s(strategy) ? h / v : v; };

  std::mt19937_64 rng(config.seed);
  const Sources src = random_sources(config.sources, rng);

  const auto point = [&](double v, double theta, double phi) {
    return from_spherical({radius(v), theta, phi});
  };

  const auto vn = cheb_nodes(config.ps, radial.lo, radial.hi);
  const auto tn = cheb_nodes(config.pang, t_iv.lo, t_iv.hi);
  const auto pn = cheb_nodes(config.pang, p_iv.lo, p_iv.hi);
  std::vector<cplx> samples;
  samples.reserve(vn.size() * tn.size() * pn.size());
  for (double phi : pn)
    for (double theta : tn)
      for (double v : vn) samples.push_back(reduced(src, point(v, theta, phi), kappa, strategy));
  const auto interp = tensor_fit_3d(samples, {radial, t_iv, p_iv}, config.ps, config.pang);

  // Targets are drawn uniformly in (s, theta, phi) for every strategy.
  std::uniform_real_distribution<double> us(s_iv.lo, s_iv.hi), ut(t_iv.lo, t_iv.hi), up(p_iv.lo, p_iv.hi);
  double max_err = 0.0, max_val = 0.0;
  for (int i = 0; i < config.targets; ++i) {
    const double s = us(rng), theta = ut(rng), phi = up(rng);
    const double r = h / s;
    const Vec3 x = from_spherical({r, theta, phi});
    const double v = std::clamp(in_s(strategy) ? s : r, radial.lo, radial.hi);
    const cplx exact = field(src, x, kappa);
    const cplx approx = tensor_eval_3d(interp, v, theta, phi) * restore(x, kappa, strategy);
    max_err = std::max(max_err, std::abs(approx - exact));
    max_val = std::max(max_val, std::abs(exact));
  }
  return max_err / max_val;
}

std::vector<FactorizationSample> diag_factorization(const FactorizationDiagConfig& config) {
  std::vector<FactorizationSample> out;
  for (double kh : config.kappa_h) {
    for (auto strategy : config.strategies) out.push_back({kh, strategy, factorization_error(kh, strategy, config)});
  }
  return out;
}

std::vector<RvsSSample> diag_r_vs_s(const RvsSDiagConfig& config) {
  if (!(config.delta_s > 0.0 && config.delta_s <= eta)) throw std::invalid_argument("diag_r_vs_s: bad delta_s");
  if (config.points < 1) throw std::invalid_argument("diag_r_vs_s: need at least one sweep point");
  const double h = box_radius(kSide);
  const double kappa = 2.0 * pi / kSide;  // one wavelength per side
  const double r_first = 1.5 * kSide;
  const double r_last = config.end_fraction * h / config.delta_s;
  if (!(r_last > r_first)) throw std::invalid_argument("diag_r_vs_s: sweep end is below 1.5 H");

  std::mt19937_64 rng(config.seed);
  const Sources src = random_sources(config.sources, rng);
  const auto analytic = [&](double r) {
    const Vec3 x{r, 0.0, 0.0};
    cplx acc = 0.0;
    for (std::size_t j = 0; j < src.points.size(); ++j) {
      acc += src.coefficients[j] * analytic_factor(x, src.points[j], Vec3{}, kappa);
    }
    return acc;
  };

  std::vector<RvsSSample> out;
  for (int k = 0; k < config.points; ++k) {
    const double t = config.points == 1 ? 0.0 : static_cast<double>(k) / (config.points - 1);
    const double r0 = r_first * std::pow(r_last / r_first, t);
    const double dr = delta_r_of_delta_s(r0, config.delta_s, h);
    const double s_hi = h / r0;
    const double s_lo = h / (r0 + dr);

    std::vector<cplx> vr, vs;
    for (double r : cheb_nodes(config.ps, r0, r0 + dr)) vr.push_back(analytic(r));
    for (double s : cheb_nodes(config.ps, s_lo, s_hi)) vs.push_back(analytic(h / s));
    const auto ir = cheb_fit(vr, config.ps, r0, r0 + dr);
    const auto is = cheb_fit(vs, config.ps, s_lo, s_hi);

    std::mt19937_64 trng(config.seed + 1 + k);
    std::uniform_real_distribution<double> us(s_lo, s_hi);
    double err_r = 0.0, err_s = 0.0, max_val = 0.0;
    for (int i = 0; i < config.targets; ++i) {
      const double s = us(trng);
      const double r = std::clamp(h / s, r0, r0 + dr);
      const cplx exact = analytic(r);
      err_r = std::max(err_r, std::abs(cheb_eval(ir, r) - exact));
      err_s = std::max(err_s, std::abs(cheb_eval(is, std::clamp(s, s_lo, s_hi)) - exact));
      max_val = std::max(max_val, std::abs(exact));
    }
    out.push_back({r0, dr, err_r / max_val, err_s / max_val});
  }
  return out;
}

}  // namespace ifgf
