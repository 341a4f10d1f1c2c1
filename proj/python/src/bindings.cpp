#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "mpsfd/harness.hpp"

namespace py = pybind11;
using namespace mpsfd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point> to_points(const Array& a, int& dim) {
  if (a.ndim() != 2 || (a.shape(1) != 2 && a.shape(1) != 3)) throw std::invalid_argument("expected an (m, 2) or (m, 3) array");
  dim = static_cast<int>(a.shape(1));
  auto r = a.unchecked<2>();
  std::vector<Point> out(static_cast<std::size_t>(a.shape(0)), Point{0, 0, 0});
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (int k = 0; k < dim; ++k) out[static_cast<std::size_t>(i)][k] = r(i, k);
  return out;
}

Point to_point(const std::vector<double>& v) {
  if (v.size() < 2 || v.size() > 3) throw std::invalid_argument("expected 2 or 3 coordinates");
  Point p{0, 0, 0};
  for (std::size_t k = 0; k < v.size(); ++k) p[k] = v[k];
  return p;
}

Array points_array(const std::vector<Point>& pts, int dim) {
  Array out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(dim)});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < dim; ++k) w(static_cast<py::ssize_t>(i), k) = pts[i][k];
  return out;
}

template <class T>
py::array_t<T> vector_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

Role parse_role(const std::string& s) {
  if (s == "interior" || s == "I") return Role::Interior;
  if (s == "dirichlet" || s == "D") return Role::Dirichlet;
  if (s == "neumann" || s == "N") return Role::Neumann;
  throw std::invalid_argument("unknown role '" + s + "'");
}

py::dict stencil_dict(const StencilResult& res) {
  py::dict d;
  if (const auto* st = std::get_if<Stencil>(&res)) {
    d["feasible"] = true;
    d["center"] = st->center_coefficient;
    d["neighbors"] = st->neighbors;
    d["coefficients"] = vector_array(st->coefficients);
    d["positive"] = st->positive;
    d["objective"] = st->objective;
  } else {
    const auto& rep = std::get<InfeasibilityReport>(res);
    d["feasible"] = false;
    d["certificate"] = std::vector<double>(rep.certificate.data(), rep.certificate.data() + rep.certificate.size());
    d["gap"] = rep.gap;
    d["min_dual_slack"] = rep.min_dual_slack;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_mpsfd, m) {
  m.doc() = "Positive meshfree finite-difference stencils for the Poisson equation";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<Domain>(m, "Domain")
      .def(py::init([](int dim, const std::vector<double>& lo, const std::vector<double>& hi) {
             return Domain(dim, to_point(lo), to_point(hi));
           }),
           py::arg("dim"), py::arg("lo"), py::arg("hi"))
      .def_static("unit_box", &Domain::unit_box, py::arg("dim"))
      .def_static("unit_box_with_cut", &Domain::unit_box_with_cut, py::arg("dim"))
      .def_property_readonly("dim", &Domain::dim)
      .def("phi", [](const Domain& d, const std::vector<double>& x) { return d.phi(to_point(x)); }, py::arg("x"));

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](const Array& points, const std::vector<std::string>& roles, std::optional<Array> normals) {
             int dim = 2;
             auto pts = to_points(points, dim);
             std::vector<Role> r;
             for (const auto& s : roles) r.push_back(parse_role(s));
             std::vector<Point> n;
             if (normals) {
               int nd = 2;
               n = to_points(*normals, nd);
             }
             return PointCloud(dim, std::move(pts), std::move(r), std::move(n));
           }),
           py::arg("points"), py::arg("roles"), py::arg("normals") = std::nullopt)
      .def_property_readonly("dim", &PointCloud::dim)
      .def("__len__", &PointCloud::size)
      .def_property_readonly("points", [](const PointCloud& c) { return points_array(c.points(), c.dim()); })
      .def_property_readonly("normals", [](const PointCloud& c) { return points_array(c.normals(), c.dim()); })
      .def_property_readonly("roles", [](const PointCloud& c) {
        std::vector<std::string> out;
        for (Role r : c.roles())
          out.emplace_back(r == Role::Interior ? "interior" : r == Role::Dirichlet ? "dirichlet" : "neumann");
        return out;
      })
      .def("with_bc", [](const PointCloud& c, const Domain& d, const std::string& bc) { return apply_bc(c, d, parse_bc(bc)); },
           py::arg("domain"), py::arg("bc"));

  py::class_<SparseMatrix>(m, "SparseMatrix")
      .def_readonly("n", &SparseMatrix::n)
      .def_property_readonly("nnz", &SparseMatrix::nnz)
      .def_property_readonly("row_ptr", [](const SparseMatrix& a) { return vector_array(a.row_ptr); })
      .def_property_readonly("cols", [](const SparseMatrix& a) { return vector_array(a.cols); })
      .def_property_readonly("values", [](const SparseMatrix& a) { return vector_array(a.values); })
      .def("at", &SparseMatrix::at);

  m.def(
      "generate",
      [](const Domain& d, double h, std::optional<double> delta_min, std::uint64_t seed) {
        py::gil_scoped_release release;
        return generate(d, h, delta_min.value_or(0.25 * h), seed);
      },
      py::arg("domain"), py::arg("h"), py::arg("delta_min") = std::nullopt, py::arg("seed") = 1);

  m.def(
      "half_space_check",
      [](const Array& offsets) {
        int dim = 2;
        const auto pts = to_points(offsets, dim);
        return half_space_check(pts, dim);
      },
      py::arg("offsets"));
  m.def(
      "cone_criterion_check",
      [](const Array& offsets) {
        int dim = 2;
        const auto pts = to_points(offsets, dim);
        return cone_criterion_check(pts, ConeCriterionParams::for_dimension(dim));
      },
      py::arg("offsets"));

  m.def(
      "lsq_stencil",
      [](const Array& offsets, double alpha) {
        int dim = 2;
        const auto pts = to_points(offsets, dim);
        return stencil_dict(lsq_stencil(build_constraints(pts, dim, alpha, ConstraintKind::Laplace)));
      },
      py::arg("offsets"), py::arg("alpha") = kDefaultAlpha);
  m.def(
      "mps_stencil",
      [](const Array& offsets, double alpha) {
        int dim = 2;
        const auto pts = to_points(offsets, dim);
        return stencil_dict(mps_stencil(build_constraints(pts, dim, alpha, ConstraintKind::Laplace)));
      },
      py::arg("offsets"), py::arg("alpha") = kDefaultAlpha);

  m.def(
      "assemble",
      [](const PointCloud& cloud, const Domain& domain, double h, const std::string& method, double alpha,
         double radius_factor, int threads) {
        AssemblyOptions o;
        o.method = parse_method(method);
        o.mesh_size = h;
        o.alpha = alpha;
        o.radius_factor = radius_factor;
        o.threads = threads;
        AssembledSystem sys;
        std::vector<double> rhs;
        {
          py::gil_scoped_release release;
          sys = assemble(cloud, domain, o);
          const bool mixed = cloud.count(Role::Neumann) > 0;
          const auto g = ManufacturedSolution::standard(cloud.dim(), mixed ? BcMode::MixedNeumannBottom : BcMode::AllDirichlet);
          rhs = sys.rhs(g.boundary_data());
        }
        py::dict d;
        d["matrix"] = sys.matrix;
        d["rhs"] = vector_array(rhs);
        d["unused_dirichlet"] = sys.unused_dirichlet;
        d["setup_seconds"] = sys.setup_seconds;
        d["candidate_radius"] = sys.candidate_radius;
        return d;
      },
      py::arg("cloud"), py::arg("domain"), py::arg("h"), py::arg("method") = "mps", py::arg("alpha") = kDefaultAlpha,
      py::arg("radius_factor") = kDefaultRadiusSafety, py::arg("threads") = 1,
      "Assemble the Poisson system; rhs belongs to the built-in manufactured solution.");

  m.def(
      "analyze",
      [](const SparseMatrix& a) {
        const auto r = analyze(a);
        py::dict d;
        d["is_l_matrix"] = r.is_l_matrix;
        d["weakly_dominant"] = r.weakly_dominant;
        d["unreachable"] = r.unreachable;
        d["nnz"] = r.nnz;
        d["max_row_nnz"] = r.max_row_nnz;
        d["max_interior_row_nnz"] = r.max_interior_row_nnz;
        d["max_interior_row_sum"] = r.max_interior_row_sum;
        return d;
      },
      py::arg("matrix"));

  m.def(
      "solve",
      [](const SparseMatrix& a, const std::vector<double>& rhs, const std::string& method, double tol,
         std::size_t max_iter) {
        SolverOptions o;
        o.method = parse_solver(method);
        o.tol = tol;
        o.max_iter = max_iter;
        SolveResult r;
        {
          py::gil_scoped_release release;
          r = solve_iterative(a, rhs, o);
        }
        py::dict report;
        report["iterations"] = r.report.iterations;
        report["relative_residual"] = r.report.relative_residual;
        report["history"] = r.report.history;
        report["converged"] = r.report.converged;
        return py::make_tuple(vector_array(r.solution), report);
      },
      py::arg("matrix"), py::arg("rhs"), py::arg("method") = "bicgstab", py::arg("tol") = 1e-10, py::arg("max_iter") = 0);

  m.def(
      "dense_solve", [](const SparseMatrix& a, const std::vector<double>& rhs) { return vector_array(dense_solve(a, rhs)); },
      py::arg("matrix"), py::arg("rhs"));

  m.def(
      "manufactured_solution",
      [](const Array& points) {
        int dim = 2;
        const auto pts = to_points(points, dim);
        const auto g = ManufacturedSolution::standard(dim, BcMode::AllDirichlet);
        std::vector<double> out;
        for (const auto& p : pts) out.push_back(g.value(p));
        return vector_array(out);
      },
      py::arg("points"));

  py::class_<ConvergenceRecord>(m, "ConvergenceRecord")
      .def_readonly("h", &ConvergenceRecord::h)
      .def_readonly("seed", &ConvergenceRecord::seed)
      .def_property_readonly("method", [](const ConvergenceRecord& r) { return to_string(r.method); })
      .def_property_readonly("bc", [](const ConvergenceRecord& r) { return to_string(r.bc); })
      .def_readonly("err_max", &ConvergenceRecord::err_max)
      .def_readonly("setup_s", &ConvergenceRecord::setup_s)
      .def_readonly("solve_s", &ConvergenceRecord::solve_s)
      .def_readonly("nnz", &ConvergenceRecord::nnz)
      .def_readonly("n", &ConvergenceRecord::n)
      .def_readonly("converged", &ConvergenceRecord::converged);

  m.def(
      "run_convergence",
      [](int dim, std::vector<double> hs, int seeds, const std::vector<std::string>& methods,
         const std::vector<std::string>& bcs, std::uint64_t base_seed) {
        ConvergenceConfig cfg;
        cfg.dim = dim;
        cfg.hs = std::move(hs);
        cfg.seeds = seeds;
        cfg.base_seed = base_seed;
        cfg.methods.clear();
        for (const auto& s : methods) cfg.methods.push_back(parse_method(s));
        cfg.bcs.clear();
        for (const auto& s : bcs) cfg.bcs.push_back(parse_bc(s));
        py::gil_scoped_release release;
        return run_convergence(cfg);
      },
      py::arg("dim") = 2, py::arg("hs") = std::vector<double>{}, py::arg("seeds") = 5,
      py::arg("methods") = std::vector<std::string>{"mps", "lsq"}, py::arg("bcs") = std::vector<std::string>{"dirichlet"},
      py::arg("base_seed") = 1);

  m.def(
      "fit_slope",
      [](const std::vector<ConvergenceRecord>& recs, const std::string& method, const std::string& bc) {
        const auto f = fit_slope(recs, parse_method(method), parse_bc(bc));
        return py::make_tuple(f.slope, f.intercept);
      },
      py::arg("records"), py::arg("method") = "mps", py::arg("bc") = "dirichlet");
}
