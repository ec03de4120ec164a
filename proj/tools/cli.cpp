#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ifgf/bench.hpp"
#include "ifgf/diagnostics.hpp"

namespace ifgf::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string geometry = "sphere";
  std::string input;
  int n = 16;
  double a = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double ka = 0.0;
  bool kappa0 = false;
  int ps = 3;
  int pang = 5;
  int leaf_ns = 0;
  int leaf_nc = 0;
  int depth = 0;
  int leaf_size = 32;
  std::size_t subset = 1000;
  std::uint64_t seed = 1;
  bool random_coeffs = false;
  int threads = 1;
  std::string out;
  std::string format = "jsonl";
  bool dry_run = false;
  // verify
  std::size_t cap = 8192;
  double threshold = 1e-3;
  bool inject_fault = false;
  // diagnostics
  std::vector<double> kappa_h;
  std::vector<std::string> strategies;
  int sources = 1000;
  int targets = 1000;
  int points = 20;
  double delta_s = eta / 8.0;
  double end_fraction = 0.98;
};

void add_geometry_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--geometry", o.geometry, "sphere | spheroid | rough-sphere | file")
      ->check(CLI::IsMember({"sphere", "spheroid", "rough-sphere", "file"}));
  cmd->add_option("--input", o.input, "point cloud file for --geometry file");
  cmd->add_option("--n", o.n, "cubed-sphere points per face edge (N = 6 n^2)")->check(CLI::PositiveNumber);
  cmd->add_option("--a", o.a, "radius a")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "spheroid x scale")->check(CLI::PositiveNumber);
  cmd->add_option("--beta", o.beta, "spheroid y scale")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", o.gamma, "spheroid z scale")->check(CLI::PositiveNumber);
}

void add_run_flags(CLI::App* cmd, Options& o) {
  add_geometry_flags(cmd, o);
  cmd->add_option("--ka", o.ka, "kappa times a")->check(CLI::PositiveNumber);
  cmd->add_flag("--kappa0", o.kappa0, "Laplace kernel (kappa = 0)");
  cmd->add_option("--ps", o.ps, "radial interpolation order")->check(CLI::Range(1, 64));
  cmd->add_option("--pang", o.pang, "angular interpolation order")->check(CLI::Range(1, 64));
  cmd->add_option("--leaf-ns", o.leaf_ns, "leaf radial cone intervals (0 = default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--leaf-nc", o.leaf_nc, "leaf polar cone intervals (0 = default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--depth", o.depth, "tree depth (0 = automatic)")->check(CLI::Range(0, kMaxTreeDepth));
  cmd->add_option("--leaf-size", o.leaf_size, "mean points per leaf for the kappa = 0 depth rule")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_flag("--random-coeffs", o.random_coeffs, "use seeded random coefficients instead of ones");
  cmd->add_option("--threads", o.threads, "evaluator threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "append the result record to this file");
  cmd->add_option("--format", o.format, "record format")->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_flag("--dry-run", o.dry_run, "print the resolved configuration and exit");
}

BenchConfig to_config(const Options& o, CLI::App* cmd) {
  BenchConfig c;
  c.geometry.kind = parse_geometry(o.geometry);
  c.geometry.a = o.a;
  c.geometry.alpha = o.alpha;
  c.geometry.beta = o.beta;
  c.geometry.gamma = o.gamma;
  c.geometry.n = o.n;
  c.geometry.path = o.input;
  if (cmd->count("--ka") > 0) c.ka = o.ka;
  c.laplace = o.kappa0;
  c.params.ps = o.ps;
  c.params.pang = o.pang;
  c.params.leaf_ns = o.leaf_ns;
  c.params.leaf_nc = o.leaf_nc;
  c.params.depth = o.depth;
  c.params.leaf_size_target = o.leaf_size;
  c.subset = o.subset;
  c.seed = o.seed;
  c.random_coefficients = o.random_coeffs;
  c.threads = o.threads;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

void append_record(const Options& o, const BenchResult& r) {
  if (o.out.empty()) return;
  bool fresh = true;
  {
    std::ifstream probe(o.out, std::ios::binary | std::ios::ate);
    fresh = !probe || probe.tellg() == 0;
  }
  std::ofstream f(o.out, std::ios::app);
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
  if (o.format == "csv") {
    if (fresh) f << csv_header() << '\n';
    f << result_csv(r) << '\n';
  } else {
    f << result_json(r) << '\n';
  }
}

void print_result(std::ostream& out, const BenchResult& r, const char* error_label) {
  out << std::setprecision(4);
  out << "N            " << r.n_points << '\n'
      << "ka           " << r.ka << '\n'
      << "ppw          " << r.ppw << '\n'
      << "depth        " << r.depth << '\n'
      << error_label << std::string(13 - std::string(error_label).size(), ' ') << std::scientific << r.epsilon
      << std::defaultfloat << '\n'
      << "t_pre (s)    " << r.t_pre << '\n'
      << "t_acc (s)    " << r.t_acc << '\n'
      << "t_oracle (s) " << r.t_oracle << '\n'
      << "peak mem MB  " << static_cast<double>(r.peak_memory_bytes) / (1 << 20) << '\n'
      << "level  boxes  segments  n_s  n_c\n";
  for (const auto& l : r.levels) {
    out << std::setw(5) << l.level << std::setw(7) << l.boxes << std::setw(10) << l.segments << std::setw(5)
        << l.grid.n_s << std::setw(5) << l.grid.n_c << '\n';
  }
}

int cmd_bench(const Options& o, CLI::App* cmd, std::ostream& out) {
  const BenchConfig config = to_config(o, cmd);
  if (o.dry_run) {
    out << config_json(config) << '\n';
    return kExitOk;
  }
  const BenchResult r = run_bench(config);
  print_result(out, r, "epsilon");
  append_record(o, r);
  return kExitOk;
}

int cmd_verify(const Options& o, CLI::App* cmd, std::ostream& out) {
  BenchConfig config = to_config(o, cmd);
  config.subset = 0;
  if (o.dry_run) {
    out << config_json(config) << '\n';
    return kExitOk;
  }
  PointCloud cloud = bench_cloud(config);
  if (cloud.size() > o.cap) {
    throw UsageError("verify computes the full O(N^2) oracle; N = " + std::to_string(cloud.size()) +
                     " exceeds the cap of " + std::to_string(o.cap) + " (raise it with --cap)");
  }
  validate_cloud(cloud);
  const double kappa = config.kappa();
  const EvaluationPlan plan = precompute(cloud.points, kappa, config.params);
  std::vector<cplx> accel_coeffs = cloud.coefficients;
  if (o.inject_fault) {
    for (std::size_t i = 0; i < accel_coeffs.size(); i += 2) accel_coeffs[i] = 0.0;
  }
  const auto field = evaluate(plan, accel_coeffs, {config.threads, nullptr});
  std::vector<std::size_t> all(cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto exact = direct_oracle(cloud.points, cloud.coefficients, kappa, all, config.threads);
  const double eps = relative_error(field, exact);
  const bool ok = eps <= o.threshold;
  out << "N " << cloud.size() << "  epsilon_N " << std::scientific << std::setprecision(3) << eps << "  threshold "
      << o.threshold << std::defaultfloat << "  " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kExitOk : kExitVerifyFailed;
}

std::ostream& open_or(std::ofstream& file, const std::string& path, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

int cmd_diag_factorization(const Options& o, std::ostream& out) {
  FactorizationDiagConfig c;
  c.kappa_h = o.kappa_h.empty() ? default_kappa_h_sweep() : o.kappa_h;
  if (!o.strategies.empty()) {
    c.strategies.clear();
    for (const auto& s : o.strategies) c.strategies.push_back(parse_strategy(s));
  }
  c.sources = o.sources;
  c.targets = o.targets;
  c.ps = o.ps;
  c.pang = o.pang;
  c.seed = o.seed;
  if (o.dry_run) {
    out << "kappa_h";
    for (double k : c.kappa_h) out << ' ' << k;
    out << "\nstrategies";
    for (auto s : c.strategies) out << ' ' << to_string(s);
    out << '\n';
    return kExitOk;
  }
  std::ofstream file;
  std::ostream& dst = open_or(file, o.out, out);
  dst << "kappa_h,strategy,max_rel_error\n" << std::setprecision(10);
  for (const auto& s : diag_factorization(c)) {
    dst << s.kappa_h << ',' << to_string(s.strategy) << ',' << s.error << '\n';
  }
  return kExitOk;
}

int cmd_diag_r_vs_s(const Options& o, std::ostream& out) {
  RvsSDiagConfig c;
  c.points = o.points;
  c.delta_s = o.delta_s;
  c.end_fraction = o.end_fraction;
  c.sources = o.sources;
  c.targets = o.targets;
  c.ps = o.ps;
  c.seed = o.seed;
  if (o.dry_run) {
    out << "points " << c.points << " delta_s " << c.delta_s << " end_fraction " << c.end_fraction << '\n';
    return kExitOk;
  }
  std::ofstream file;
  std::ostream& dst = open_or(file, o.out, out);
  dst << "r0,delta_r,error_r,error_s\n" << std::setprecision(10);
  for (const auto& s : diag_r_vs_s(c)) dst << s.r0 << ',' << s.delta_r << ',' << s.error_r << ',' << s.error_s << '\n';
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  if (o.geometry == "file") throw UsageError("gen needs a generated geometry, not 'file'");
  if (o.out.empty()) throw UsageError("gen needs --out");
  GeometrySpec spec;
  spec.kind = parse_geometry(o.geometry);
  spec.a = o.a;
  spec.alpha = o.alpha;
  spec.beta = o.beta;
  spec.gamma = o.gamma;
  spec.n = o.n;
  PointCloud cloud = generate(spec);
  if (o.random_coeffs) randomize_coefficients(cloud, o.seed);
  if (o.dry_run) {
    out << "would write " << cloud.size() << " points to " << o.out << '\n';
    return kExitOk;
  }
  save_cloud(cloud, o.out);
  out << "wrote " << cloud.size() << " points to " << o.out << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"IFGF fast Helmholtz/Laplace operator evaluation: benchmarks, verification and diagnostics", "ifgf"};
  app.require_subcommand(1);
  Options o;

  auto* bench = app.add_subcommand("bench", "run the accelerated operator and measure its error on a subset");
  add_run_flags(bench, o);
  bench->add_option("--subset", o.subset, "error subset size M (0 = all points)");

  auto* verify = app.add_subcommand("verify", "check the accelerated operator against the full direct sum");
  add_run_flags(verify, o);
  verify->add_option("--cap", o.cap, "largest N accepted");
  verify->add_option("--threshold", o.threshold, "largest accepted epsilon_N")->check(CLI::PositiveNumber);
  verify->add_flag("--inject-fault", o.inject_fault)->group("");

  auto* diag_f = app.add_subcommand("diag-factorization", "interpolation error of four factorization strategies");
  diag_f->add_option("--kh", o.kappa_h, "kappa H values (default 0 and 0.1 .. 100)")->delimiter(',');
  diag_f->add_option("--strategies", o.strategies, "none, exp-only, full-r, full-s")->delimiter(',');
  diag_f->add_option("--sources", o.sources, "sources in the box")->check(CLI::PositiveNumber);
  diag_f->add_option("--targets", o.targets, "targets in the segment")->check(CLI::PositiveNumber);
  diag_f->add_option("--ps", o.ps, "radial interpolation order")->check(CLI::Range(1, 64));
  diag_f->add_option("--pang", o.pang, "angular interpolation order")->check(CLI::Range(1, 64));
  diag_f->add_option("--seed", o.seed, "random seed");
  diag_f->add_option("--out", o.out, "CSV output path (default stdout)");
  diag_f->add_flag("--dry-run", o.dry_run, "print the sweep and exit");

  auto* diag_rs = app.add_subcommand("diag-r-vs-s", "radial interpolation in r versus s over an r0 sweep");
  diag_rs->add_option("--points", o.points, "sweep points")->check(CLI::PositiveNumber);
  diag_rs->add_option("--delta-s", o.delta_s, "fixed s span")->check(CLI::Range(1e-6, eta));
  diag_rs->add_option("--end-fraction", o.end_fraction, "last r0 as a fraction of h / delta_s")
      ->check(CLI::Range(0.0, 1.0));
  diag_rs->add_option("--sources", o.sources, "sources in the box")->check(CLI::PositiveNumber);
  diag_rs->add_option("--targets", o.targets, "targets per interval")->check(CLI::PositiveNumber);
  diag_rs->add_option("--ps", o.ps, "radial interpolation order")->check(CLI::Range(1, 64));
  diag_rs->add_option("--seed", o.seed, "random seed");
  diag_rs->add_option("--out", o.out, "CSV output path (default stdout)");
  diag_rs->add_flag("--dry-run", o.dry_run, "print the sweep settings and exit");

  auto* gen = app.add_subcommand("gen", "write a generated point cloud");
  add_geometry_flags(gen, o);
  gen->add_flag("--random-coeffs", o.random_coeffs, "seeded random coefficients instead of ones");
  gen->add_option("--seed", o.seed, "random seed");
  gen->add_option("--out", o.out, "output path")->required();
  gen->add_flag("--dry-run", o.dry_run, "report what would be written and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ifgf: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*bench) return cmd_bench(o, bench, out);
    if (*verify) return cmd_verify(o, verify, out);
    if (*diag_f) return cmd_diag_factorization(o, out);
    if (*diag_rs) return cmd_diag_r_vs_s(o, out);
    if (*gen) return cmd_gen(o, out);
  } catch (const UsageError& e) {
    err << "ifgf: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e) ||
        dynamic_cast<const std::domain_error*>(&e)) {
      err << "ifgf: " << e.what() << '\n';
      return kExitUsage;
    }
    err << "ifgf: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "ifgf: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ifgf::cli
