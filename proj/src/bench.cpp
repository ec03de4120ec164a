#include "ifgf/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ifgf {

namespace {

using json = nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const EvaluatorParams& p) {
  return {{"ps", p.ps},
          {"pang", p.pang},
          {"leaf_ns", p.leaf_ns},
          {"leaf_nc", p.leaf_nc},
          {"depth", p.depth},
          {"leaf_size_target", p.leaf_size_target}};
}

json config_object(const BenchConfig& c) {
  json g = {{"kind", geometry_name(c.geometry.kind)}, {"a", c.geometry.a}};
  if (c.geometry.kind == GeometryKind::file) {
    g["path"] = c.geometry.path.string();
  } else {
    g["n"] = c.geometry.n;
  }
  if (c.geometry.kind == GeometryKind::spheroid) {
    g["alpha"] = c.geometry.alpha;
    g["beta"] = c.geometry.beta;
    g["gamma"] = c.geometry.gamma;
  }
  return {{"geometry", g},
          {"ka", c.ka ? json(*c.ka) : json(nullptr)},
          {"laplace", c.laplace},
          {"params", params_json(c.params)},
          {"subset", c.subset},
          {"seed", c.seed},
          {"random_coefficients", c.random_coefficients},
          {"threads", c.threads}};
}

std::string join_counts(const std::vector<LevelStats>& levels, bool segments) {
  std::string out;
  for (const auto& l : levels) {
    if (!out.empty()) out += ';';
    out += std::to_string(segments ? l.segments : l.boxes);
  }
  return out;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void BenchConfig::validate() const {
  if (laplace && ka) throw std::invalid_argument("--kappa0 and --ka are mutually exclusive");
  if (!laplace && !ka) throw std::invalid_argument("one of --ka or --kappa0 is required");
  if (ka && !(*ka > 0.0 && std::isfinite(*ka))) throw std::invalid_argument("--ka must be positive");
  if (!(geometry.a > 0.0)) throw std::invalid_argument("radius a must be positive");
  if (geometry.kind != GeometryKind::file && geometry.n < 1) throw std::invalid_argument("--n must be >= 1");
  if (geometry.kind == GeometryKind::file && geometry.path.empty()) {
    throw std::invalid_argument("file geometry needs --input");
  }
  if (params.ps < 1 || params.pang < 1) throw std::invalid_argument("--ps and --pang must be >= 1");
  if (params.ps > 64 || params.pang > 64) throw std::invalid_argument("--ps and --pang must be <= 64");
  if (params.leaf_ns < 0 || params.leaf_nc < 0) throw std::invalid_argument("leaf grid counts must be >= 1");
  if (params.depth < 0 || params.depth > kMaxTreeDepth) throw std::invalid_argument("--depth out of range");
  if (threads < 1) throw std::invalid_argument("--threads must be >= 1");
}

double BenchConfig::kappa() const { return laplace ? 0.0 : *ka / geometry.a; }

PointCloud bench_cloud(const BenchConfig& config) {
  PointCloud cloud = generate(config.geometry);
  if (config.random_coefficients) randomize_coefficients(cloud, config.seed);
  return cloud;
}

BenchResult run_bench(const BenchConfig& config) { return run_bench(config, bench_cloud(config)); }

BenchResult run_bench(const BenchConfig& config, const PointCloud& cloud) {
  config.validate();
  validate_cloud(cloud);
  BenchResult r;
  r.config = config;
  r.n_points = cloud.size();
  r.kappa = config.kappa();
  r.ka = r.kappa * config.geometry.a;
  r.ppw = config.geometry.kind == GeometryKind::file
              ? std::numeric_limits<double>::quiet_NaN()
              : points_per_wavelength(cubed_sphere_equator_count(config.geometry.n), r.kappa, config.geometry.a);

  auto t0 = std::chrono::steady_clock::now();
  const EvaluationPlan plan = precompute(cloud.points, r.kappa, config.params);
  r.t_pre = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto field = evaluate(plan, cloud.coefficients, {config.threads, nullptr});
  r.t_acc = seconds_since(t0);

  const std::size_t m = config.subset == 0 ? cloud.size() : config.subset;
  const auto subset = random_subset(cloud.size(), m, config.seed);
  t0 = std::chrono::steady_clock::now();
  const auto exact = direct_oracle(cloud.points, cloud.coefficients, r.kappa, subset, config.threads);
  r.t_oracle = seconds_since(t0);
  std::vector<cplx> acc;
  acc.reserve(subset.size());
  for (std::size_t i : subset) acc.push_back(field[i]);
  r.epsilon = relative_error(acc, exact);
  r.subset_size = subset.size();

  r.peak_memory_bytes = peak_memory_bytes();
  r.depth = plan.depth();
  r.resolved_params = plan.params();
  r.levels = plan.level_stats();
  return r;
}

std::string geometry_name(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::sphere:
      return "sphere";
    case GeometryKind::spheroid:
      return "spheroid";
    case GeometryKind::rough_sphere:
      return "rough-sphere";
    case GeometryKind::file:
      return "file";
  }
  return "?";
}

GeometryKind parse_geometry(const std::string& name) {
  for (auto k : {GeometryKind::sphere, GeometryKind::spheroid, GeometryKind::rough_sphere, GeometryKind::file}) {
    if (geometry_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown geometry '" + name + "'");
}

std::string config_json(const BenchConfig& config) { return config_object(config).dump(); }

std::string result_json(const BenchResult& r) {
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"level", l.level},
                      {"side", l.side},
                      {"boxes", l.boxes},
                      {"segments", l.segments},
                      {"n_s", l.grid.n_s},
                      {"n_c", l.grid.n_c}});
  }
  json j = {{"schema_version", kBenchSchemaVersion},
            {"config", config_object(r.config)},
            {"N", r.n_points},
            {"ka", r.ka},
            {"kappa", r.kappa},
            {"ppw", number_or_null(r.ppw)},
            {"subset_size", r.subset_size},
            {"epsilon", r.epsilon},
            {"t_pre", r.t_pre},
            {"t_acc", r.t_acc},
            {"t_oracle", r.t_oracle},
            {"peak_memory_bytes", r.peak_memory_bytes},
            {"depth", r.depth},
            {"resolved_params", params_json(r.resolved_params)},
            {"levels", levels}};
  return j.dump();
}

std::string csv_header() {
  return "schema_version,geometry,n,N,ka,kappa,ppw,ps,pang,leaf_ns,leaf_nc,depth,subset_size,seed,threads,"
         "epsilon,t_pre,t_acc,t_oracle,peak_memory_bytes,boxes_per_level,segments_per_level";
}

std::string result_csv(const BenchResult& r) {
  const auto& c = r.config;
  const auto& p = r.resolved_params;
  std::ostringstream os;
  os << kBenchSchemaVersion << ',' << geometry_name(c.geometry.kind) << ','
     << (c.geometry.kind == GeometryKind::file ? std::string() : std::to_string(c.geometry.n)) << ','
     << r.n_points << ',' << csv_number(r.ka) << ',' << csv_number(r.kappa) << ',' << csv_number(r.ppw) << ','
     << p.ps << ',' << p.pang << ',' << p.leaf_ns << ',' << p.leaf_nc << ',' << r.depth << ',' << r.subset_size
     << ',' << c.seed << ',' << c.threads << ',' << csv_number(r.epsilon) << ',' << csv_number(r.t_pre) << ','
     << csv_number(r.t_acc) << ',' << csv_number(r.t_oracle) << ',' << r.peak_memory_bytes << ','
     << join_counts(r.levels, false) << ',' << join_counts(r.levels, true);
  return os.str();
}

}  // namespace ifgf
