#include "ifgf/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ifgf/kernel.hpp"

namespace ifgf {

PointCloud gen_sphere(double a, int n) {
  if (n < 1) throw std::invalid_argument("gen_sphere: n must be at least 1");
  if (!(a > 0.0)) throw std::invalid_argument("gen_sphere: radius must be positive");
  PointCloud cloud;
  cloud.points.reserve(6 * static_cast<std::size_t>(n) * n);
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      for (int j = 0; j < n; ++j) {
        const double v = (2.0 * j + 1.0) / n - 1.0;
        for (int i = 0; i < n; ++i) {
          const double u = (2.0 * i + 1.0) / n - 1.0;
          Vec3 p;
          p[axis] = sign;
          p[(axis + 1) % 3] = sign * u;
          p[(axis + 2) % 3] = sign * v;
          cloud.points.push_back(p * (a / norm(p)));
        }
      }
    }
  }
  cloud.coefficients.assign(cloud.points.size(), cplx{1.0, 0.0});
  return cloud;
}

PointCloud gen_spheroid(double a, double alpha, double beta, double gamma, int n) {
  if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0)) {
    throw std::invalid_argument("gen_spheroid: alpha, beta and gamma must be positive");
  }
  PointCloud cloud = gen_sphere(a, n);
  for (auto& p : cloud.points) p = {alpha * p.x, beta * p.y, gamma * p.z};
  return cloud;
}

PointCloud gen_rough_sphere(double a, int n) {
  PointCloud cloud = gen_sphere(a, n);
  for (auto& p : cloud.points) {
    auto sp = to_spherical(p);
    sp.r = a * (1.0 + 0.05 * std::sin(40.0 * sp.theta) * std::sin(40.0 * sp.phi));
    p = from_spherical(sp);
  }
  return cloud;
}

PointCloud generate(const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::sphere:
      return gen_sphere(spec.a, spec.n);
    case GeometryKind::spheroid:
      return gen_spheroid(spec.a, spec.alpha, spec.beta, spec.gamma, spec.n);
    case GeometryKind::rough_sphere:
      return gen_rough_sphere(spec.a, spec.n);
    case GeometryKind::file:
      return load_cloud(spec.path);
  }
  throw std::invalid_argument("unknown geometry kind");
}

namespace {

bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace

PointCloud parse_cloud(const std::string& text) {
  PointCloud cloud;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);

    std::vector<std::string_view> tokens;
    std::string_view rest(line);
    while (true) {
      const auto start = rest.find_first_not_of(" \t\r");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = rest.find_first_of(" \t\r");
      tokens.push_back(rest.substr(0, end));
      if (end == std::string_view::npos) break;
      rest.remove_prefix(end);
    }
    if (tokens.empty()) continue;
    if (tokens.size() != 5) {
      throw ParseError("expected 5 fields \"x y z re im\", got " + std::to_string(tokens.size()), lineno);
    }
    double v[5];
    for (int i = 0; i < 5; ++i) {
      if (!parse_double(tokens[i], v[i])) {
        throw ParseError("malformed number '" + std::string(tokens[i]) + "'", lineno);
      }
    }
    cloud.points.push_back({v[0], v[1], v[2]});
    cloud.coefficients.emplace_back(v[3], v[4]);
  }
  if (cloud.points.empty()) throw ParseError("empty point cloud", 0);
  return cloud;
}

PointCloud load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open point cloud file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cloud(buf.str());
}

std::string format_cloud(const PointCloud& cloud) {
  if (cloud.points.size() != cloud.coefficients.size()) {
    throw std::invalid_argument("format_cloud: point and coefficient counts differ");
  }
  std::string out;
  out.reserve(cloud.size() * 120);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    const auto& c = cloud.coefficients[i];
    for (double v : {p.x, p.y, p.z, c.real(), c.imag()}) {
      if (!out.empty() && out.back() != '\n') out.push_back(' ');
      append_double(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write point cloud file '" + path.string() + "'");
  out << format_cloud(cloud);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

bool has_duplicate_points(const std::vector<Vec3>& points, double tol) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a].x < points[b].x; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Vec3& p = points[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Vec3& q = points[order[j]];
      if (q.x - p.x > tol) break;
      if (std::abs(q.y - p.y) <= tol && std::abs(q.z - p.z) <= tol) return true;
    }
  }
  return false;
}

void validate_cloud(const PointCloud& cloud, double tol) {
  if (cloud.points.empty()) throw std::invalid_argument("empty point cloud");
  if (cloud.points.size() != cloud.coefficients.size()) {
    throw std::invalid_argument("point and coefficient counts differ");
  }
  for (const auto& p : cloud.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw std::invalid_argument("point cloud contains non-finite coordinates");
    }
  }
  if (has_duplicate_points(cloud.points, tol)) throw std::invalid_argument("point cloud contains coincident points");
}

void randomize_coefficients(PointCloud& cloud, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  cloud.coefficients.resize(cloud.points.size());
  for (auto& c : cloud.coefficients) {
    const double re = dist(rng);
    const double im = dist(rng);
    c = {re, im};
  }
}

double points_per_wavelength(int n_equator, double kappa, double a) {
  if (!(kappa > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return n_equator / (kappa * a);
}

}  // namespace ifgf
