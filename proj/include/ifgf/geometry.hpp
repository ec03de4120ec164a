#ifndef IFGF_GEOMETRY_HPP
#define IFGF_GEOMETRY_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifgf/types.hpp"

namespace ifgf {

/// Surface discretization points with one complex source coefficient each.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<cplx> coefficients;

  std::size_t size() const { return points.size(); }
};

enum class GeometryKind { sphere, spheroid, rough_sphere, file };

struct GeometrySpec {
  GeometryKind kind = GeometryKind::sphere;
  double a = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  int n = 16;
  std::filesystem::path path;  // kind == file only
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Cubed-sphere cloud: an n x n cell-centered grid on each cube face, projected
/// radially onto the sphere of radius a. Coefficients are 1.
PointCloud gen_sphere(double a, int n);

/// gen_sphere scaled by (alpha, beta, gamma) along the axes.
PointCloud gen_spheroid(double a, double alpha, double beta, double gamma, int n);

/// gen_sphere with each point moved to radius a (1 + 0.05 sin(40 theta) sin(40 phi)).
PointCloud gen_rough_sphere(double a, int n);

PointCloud generate(const GeometrySpec& spec);

/// Text format: one point per line, "x y z re(a) im(a)", whitespace separated,
/// '#' starts a comment. Values are written with 17 significant digits.
PointCloud load_cloud(const std::filesystem::path& path);
PointCloud parse_cloud(const std::string& text);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path);
std::string format_cloud(const PointCloud& cloud);

/// Throws std::invalid_argument if the cloud is empty, has mismatched lengths or
/// contains two points closer than `tol` in every coordinate.
void validate_cloud(const PointCloud& cloud, double tol = 0.0);
bool has_duplicate_points(const std::vector<Vec3>& points, double tol);

/// Replace coefficients with seeded uniform random values in the unit square
/// [-1, 1] x [-1, 1] of the complex plane.
void randomize_coefficients(PointCloud& cloud, std::uint64_t seed);

/// n_equator / (kappa a). NaN ("not applicable") when kappa == 0.
double points_per_wavelength(int n_equator, double kappa, double a);

/// Equator point count of the cubed-sphere layout.
constexpr int cubed_sphere_equator_count(int n) { return 4 * n; }

}  // namespace ifgf

#endif  // IFGF_GEOMETRY_HPP
