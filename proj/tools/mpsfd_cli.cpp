#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpsfd/harness.hpp"

using namespace mpsfd;

namespace {

struct Args {
  int dim = 2;
  std::string method = "mps";
  std::string bc = "dirichlet";
  std::string domain = "cut";
  double alpha = kDefaultAlpha;
  std::vector<double> hs;
  double radius_factor = kDefaultRadiusSafety;
  double delta_min = 0.0;  // 0 selects h / 4
  std::uint64_t seed = 1;
  int seeds = 5;
  std::string solver = "bicgstab";
  double tol = 1e-10;
  std::size_t max_iter = 0;
  int threads = 1;
  std::string out;
  std::string cloud;
  std::string matrix;
  std::string rhs;
  std::string rhs_out;
  std::size_t point = 0;
};

// Usage problems that CLI11 cannot catch (bad values, unreadable files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Domain make_domain(const Args& a) {
  if (a.domain == "cut") return Domain::unit_box_with_cut(a.dim);
  if (a.domain == "box") return Domain::unit_box(a.dim);
  throw UsageError("unknown domain '" + a.domain + "'");
}

double single_h(const Args& a) {
  if (a.hs.size() != 1) throw UsageError("expected exactly one --h value");
  return a.hs.front();
}

// Writes to --out, or to stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  return in;
}

// The cloud from --cloud when given, otherwise a fresh one from --h/--seed.
PointCloud load_cloud(const Args& a, const Domain& domain) {
  if (!a.cloud.empty()) {
    auto in = open_input(a.cloud);
    auto cloud = read_cloud(in);
    if (cloud.dim() != a.dim) throw UsageError("cloud dimension differs from --dim");
    return cloud;
  }
  const double h = single_h(a);
  const double delta = a.delta_min > 0.0 ? a.delta_min : 0.25 * h;
  return apply_bc(generate(domain, h, delta, a.seed), domain, parse_bc(a.bc));
}

AssemblyOptions assembly_options(const Args& a) {
  AssemblyOptions o;
  o.method = parse_method(a.method);
  o.alpha = a.alpha;
  o.mesh_size = single_h(a);
  o.radius_factor = a.radius_factor;
  o.threads = a.threads;
  return o;
}

void warn_unused(const AssembledSystem& sys) {
  if (!sys.unused_dirichlet.empty())
    std::cerr << "warning: " << sys.unused_dirichlet.size() << " Dirichlet points are not referenced by any stencil\n";
}

int cmd_generate(const Args& a) {
  const auto domain = make_domain(a);
  const auto cloud = load_cloud(a, domain);
  Output out(a.out);
  write_cloud(out.stream(), cloud);
  const auto q = measure_quality(cloud, domain, single_h(a) / 40);
  std::fprintf(stderr, "points %zu  interior %zu  mesh_size %.6g  min_separation %.6g  cone_failures %zu\n",
               cloud.size(), cloud.count(Role::Interior), q.mesh_size, q.min_separation, q.cone_failures);
  return 0;
}

int cmd_assemble(const Args& a) {
  const auto domain = make_domain(a);
  const auto cloud = load_cloud(a, domain);
  const auto sys = assemble(cloud, domain, assembly_options(a));
  warn_unused(sys);
  Output out(a.out);
  write_matrix_market(out.stream(), sys.matrix);
  if (!a.rhs_out.empty()) {
    Output rhs(a.rhs_out);
    write_vector(rhs.stream(), sys.rhs(ManufacturedSolution::standard(a.dim, parse_bc(a.bc)).boundary_data()));
  }
  const auto rep = analyze(sys.matrix);
  std::fprintf(stderr, "n %zu  nnz %zu  l_matrix %d  dominant %d  unreachable %zu  setup_s %.4g\n", sys.matrix.n,
               rep.nnz, rep.is_l_matrix, rep.weakly_dominant, rep.unreachable.size(), sys.setup_seconds);
  return 0;
}

int cmd_solve(const Args& a) {
  SolverOptions so;
  so.method = parse_solver(a.solver);
  so.tol = a.tol;
  so.max_iter = a.max_iter;
  so.threads = a.threads;

  SolveResult res;
  std::optional<double> err;
  if (!a.matrix.empty()) {
    if (a.rhs.empty()) throw UsageError("--matrix needs --rhs");
    auto min = open_input(a.matrix);
    auto rin = open_input(a.rhs);
    const auto m = read_matrix_market(min);
    res = solve_iterative(m, read_vector(rin), so);
  } else {
    const auto domain = make_domain(a);
    const auto cloud = load_cloud(a, domain);
    const auto sys = assemble(cloud, domain, assembly_options(a));
    warn_unused(sys);
    const auto g = ManufacturedSolution::standard(a.dim, parse_bc(a.bc));
    res = solve_iterative(sys.matrix, sys.rhs(g.boundary_data()), so);
    err = interior_max_error(cloud, res.solution, g);
  }
  Output out(a.out);
  write_vector(out.stream(), res.solution);
  const auto& r = res.report;
  std::fprintf(stderr, "solver %s  iterations %zu  relative_residual %.3e  converged %d  seconds %.4g", to_string(r.method),
               r.iterations, r.relative_residual, r.converged, r.seconds);
  if (err) std::fprintf(stderr, "  err_max %.6e", *err);
  std::fprintf(stderr, "\n");
  return r.converged ? 0 : 1;
}

int cmd_convergence(const Args& a, bool method_given) {
  ConvergenceConfig cfg;
  cfg.dim = a.dim;
  cfg.hs = a.hs;
  cfg.seeds = a.seeds;
  cfg.base_seed = a.seed;
  if (method_given) cfg.methods = {parse_method(a.method)};
  cfg.bcs = {parse_bc(a.bc)};
  cfg.alpha = a.alpha;
  cfg.radius_factor = a.radius_factor;
  cfg.solver.method = parse_solver(a.solver);
  cfg.solver.tol = a.tol;
  cfg.solver.max_iter = a.max_iter;
  cfg.assembly_threads = a.threads;
  const auto recs = run_convergence(cfg);
  Output out(a.out);
  write_convergence_csv(out.stream(), recs);
  for (Method m : cfg.methods)
    std::fprintf(stderr, "%s slope %.3f\n", to_string(m), fit_slope(recs, m, cfg.bcs.front()).slope);
  return 0;
}

int cmd_cost(const Args& a) {
  CostConfig cfg;
  cfg.dim = a.dim;
  if (!a.hs.empty()) cfg.hs = a.hs;
  cfg.seed = a.seed;
  cfg.alpha = a.alpha;
  cfg.radius_factor = a.radius_factor;
  const auto recs = run_cost_comparison(cfg);
  Output out(a.out);
  write_cost_csv(out.stream(), recs);
  for (const auto& r : cost_ratios(recs))
    std::fprintf(stderr, "n %zu  nnz_ratio %.3f  setup_ratio %.3f  solve_ratio %.3f\n", r.n, r.nnz_ratio, r.setup_ratio,
                 r.solve_ratio);
  return 0;
}

int cmd_stencil_debug(const Args& a) {
  const auto domain = make_domain(a);
  const auto cloud = load_cloud(a, domain);
  if (a.point >= cloud.size()) throw UsageError("--point out of range");
  if (cloud.role(a.point) == Role::Dirichlet) throw UsageError("point " + std::to_string(a.point) + " is a Dirichlet point");
  const auto ps = build_point_stencil(cloud, domain, a.point, assembly_options(a));
  const auto& offsets = ps.constraints.offsets;
  const bool half_space = half_space_check(offsets, a.dim);
  const bool cone = cone_criterion_check(offsets, ConeCriterionParams::for_dimension(a.dim));

  Output out(a.out);
  auto& os = out.stream();
  os.precision(17);
  int code = 0;
  if (const auto* st = std::get_if<Stencil>(&ps.result)) {
    os << ps.center << ' ' << st->center_coefficient << '\n';
    for (std::size_t t = 0; t < st->neighbors.size(); ++t)
      os << ps.candidates[st->neighbors[t]] << ' ' << st->coefficients[t] << '\n';
  } else {
    const auto& rep = std::get<InfeasibilityReport>(ps.result);
    os << "# infeasible, certificate:";
    for (Eigen::Index i = 0; i < rep.certificate.size(); ++i) os << ' ' << rep.certificate(i);
    os << '\n';
    code = 1;
  }
  os << "# candidates " << ps.candidates.size() << '\n';
  os << "# half_space " << (half_space ? "pass" : "fail") << '\n';
  os << "# cone " << (cone ? "pass" : "fail") << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive meshfree finite-difference stencils for the Poisson equation"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* c) {
    c->add_option("--dim", a.dim)->check(CLI::IsMember({2, 3}));
    c->add_option("--alpha", a.alpha, "weight decay exponent (> 2)");
    c->add_option("--h", a.hs, "target mesh size");
    c->add_option("--radius-factor", a.radius_factor);
    c->add_option("--delta-min", a.delta_min, "minimum point separation (default h/4)");
    c->add_option("--seed", a.seed);
    c->add_option("--bc", a.bc)->check(CLI::IsMember({"dirichlet", "mixed"}));
    c->add_option("--domain", a.domain)->check(CLI::IsMember({"cut", "box"}));
    c->add_option("--threads", a.threads)->check(CLI::PositiveNumber);
    c->add_option("--out", a.out, "output path (default stdout)");
  };
  auto method = [&](CLI::App* c) {
    return c->add_option("--method", a.method)->check(CLI::IsMember({"mps", "lsq"}));
  };
  auto solver = [&](CLI::App* c) {
    c->add_option("--solver", a.solver)->check(CLI::IsMember({"jacobi", "gs", "bicgstab"}));
    c->add_option("--tol", a.tol)->check(CLI::PositiveNumber);
    c->add_option("--max-iter", a.max_iter);
  };

  auto* gen = app.add_subcommand("generate", "write a point cloud");
  common(gen);
  auto* asmb = app.add_subcommand("assemble", "write the system matrix (MatrixMarket) and rhs");
  common(asmb);
  method(asmb);
  asmb->add_option("--cloud", a.cloud, "cloud file instead of generating one");
  asmb->add_option("--rhs-out", a.rhs_out);
  auto* sol = app.add_subcommand("solve", "solve the manufactured problem or a stored system");
  common(sol);
  method(sol);
  solver(sol);
  sol->add_option("--cloud", a.cloud);
  sol->add_option("--matrix", a.matrix, "MatrixMarket file");
  sol->add_option("--rhs", a.rhs, "rhs vector file");
  auto* conv = app.add_subcommand("convergence", "error study over an h sequence");
  common(conv);
  auto* conv_method = method(conv);
  solver(conv);
  conv->add_option("--seeds", a.seeds)->check(CLI::PositiveNumber);
  auto* cost = app.add_subcommand("cost", "setup and solve timing of both methods");
  common(cost);
  auto* dbg = app.add_subcommand("stencil-debug", "dump one stencil and the criteria verdicts");
  common(dbg);
  method(dbg);
  dbg->add_option("--cloud", a.cloud);
  dbg->add_option("--point", a.point)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e, std::cerr, std::cerr), 2);
  }

  try {
    const bool needs_h = gen->parsed() || asmb->parsed() || dbg->parsed() || (sol->parsed() && a.matrix.empty());
    if (needs_h && a.hs.empty()) throw UsageError("--h is required");
    if (gen->parsed()) return cmd_generate(a);
    if (asmb->parsed()) return cmd_assemble(a);
    if (sol->parsed()) return cmd_solve(a);
    if (conv->parsed()) return cmd_convergence(a, conv_method->count() > 0);
    if (cost->parsed()) return cmd_cost(a);
    return cmd_stencil_debug(a);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
