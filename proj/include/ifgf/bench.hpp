#ifndef IFGF_BENCH_HPP
#define IFGF_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ifgf/evaluator.hpp"
#include "ifgf/geometry.hpp"

namespace ifgf {

inline constexpr int kBenchSchemaVersion = 1;

struct BenchConfig {
  GeometrySpec geometry;
  /// Exactly one of ka (kappa times the radius geometry.a) and laplace is used.
  std::optional<double> ka;
  bool laplace = false;
  EvaluatorParams params;
  /// Error subset size M; 0 means all points.
  std::size_t subset = 1000;
  std::uint64_t seed = 1;
  /// Replace the cloud's coefficients with seeded random ones.
  bool random_coefficients = false;
  int threads = 1;

  /// Throws std::invalid_argument for inconsistent settings.
  void validate() const;
  double kappa() const;
};

struct BenchResult {
  BenchConfig config;
  std::size_t n_points = 0;
  double ka = 0.0;
  double kappa = 0.0;
  /// NaN when not applicable (kappa = 0 or loaded clouds).
  double ppw = 0.0;
  std::size_t subset_size = 0;
  double epsilon = 0.0;
  double t_pre = 0.0;
  double t_acc = 0.0;
  double t_oracle = 0.0;
  std::uint64_t peak_memory_bytes = 0;
  int depth = 0;
  EvaluatorParams resolved_params;
  std::vector<LevelStats> levels;
};

/// Cloud for a config, with coefficients randomized if requested.
PointCloud bench_cloud(const BenchConfig& config);

/// precompute, evaluate, oracle on the error subset, relative error.
BenchResult run_bench(const BenchConfig& config);
BenchResult run_bench(const BenchConfig& config, const PointCloud& cloud);

std::string geometry_name(GeometryKind kind);
GeometryKind parse_geometry(const std::string& name);

/// One JSON object per record, no trailing newline.
std::string config_json(const BenchConfig& config);
std::string result_json(const BenchResult& result);

/// Fixed CSV column order.
std::string csv_header();
std::string result_csv(const BenchResult& result);

}  // namespace ifgf

#endif  // IFGF_BENCH_HPP
