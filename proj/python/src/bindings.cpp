#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dmfbm/error.hpp"
#include "dmfbm/estimator.hpp"
#include "dmfbm/fbm.hpp"
#include "dmfbm/fredholm.hpp"
#include "dmfbm/kernel.hpp"
#include "dmfbm/specfun.hpp"

namespace py = pybind11;
using namespace dmfbm;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Drift estimation for mixed fractional Brownian motion";

    auto base = py::register_exception<Error>(m, "DmfbmError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
    py::register_exception<GridMismatchError>(m, "GridMismatchError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<EmbeddingError>(m, "EmbeddingError", base.ptr());

    m.def("gamma", &gamma_fn, py::arg("x"));
    m.def("beta", &beta_fn, py::arg("a"), py::arg("b"));
    m.def(
        "hyp2f1", [](double a, double b, double c, double z) { return hyp2f1(HyperParams{a, b, c}, z); },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));

    py::enum_<HurstMode>(m, "HurstMode").value("strict", HurstMode::strict).value("relaxed", HurstMode::relaxed);

    py::class_<HurstPair>(m, "HurstPair")
        .def(py::init<double, double, HurstMode>(), py::arg("h1"), py::arg("h2"),
             py::arg("mode") = HurstMode::relaxed)
        .def_property_readonly("H1", &HurstPair::H1)
        .def_property_readonly("H2", &HurstPair::H2)
        .def_property_readonly("alpha", &HurstPair::alpha)
        .def_property_readonly("beta", &HurstPair::beta)
        .def_property_readonly("gamma", &HurstPair::gamma)
        .def("__repr__", [](const HurstPair& h) {
            return "HurstPair(" + std::to_string(h.H1()) + ", " + std::to_string(h.H2()) + ")";
        });

    py::class_<KernelConstants>(m, "KernelConstants")
        .def_readonly("c", &KernelConstants::c)
        .def_readonly("ell", &KernelConstants::ell)
        .def_readonly("Xi", &KernelConstants::Xi)
        .def_readonly("D1", &KernelConstants::D1)
        .def_readonly("D2", &KernelConstants::D2)
        .def_readonly("D3", &KernelConstants::D3)
        .def_readonly("D4", &KernelConstants::D4)
        .def_readonly("D5", &KernelConstants::D5);
    m.def("g_rhs", &g_rhs, py::arg("u"), py::arg("hurst"), py::arg("T"));

    py::class_<KernelModel>(m, "KernelModel")
        .def(py::init([](const HurstPair& h, double T, bool use_tables, std::size_t table_size) {
                 KernelOptions opt;
                 opt.use_tables = use_tables;
                 opt.table_size = table_size;
                 return KernelModel(h, T, opt);
             }),
             py::arg("hurst"), py::arg("T"), py::arg("use_tables") = true, py::arg("table_size") = 100000)
        .def_property_readonly("T", &KernelModel::T)
        .def_property_readonly("constants", &KernelModel::consts)
        .def_property_readonly("uses_tables", &KernelModel::uses_tables)
        .def("F", py::overload_cast<int, double>(&KernelModel::F, py::const_), py::arg("k"), py::arg("z"))
        .def("L", &KernelModel::L, py::arg("u"), py::arg("s"))
        .def("K", [](const KernelModel& k, double u, double s) { return eval_K(k, u, s); }, py::arg("u"),
             py::arg("s"));

    py::enum_<Formulation>(m, "Formulation")
        .value("direct", Formulation::direct)
        .value("tilde", Formulation::tilde);

    py::class_<Grid>(m, "Grid")
        .def_static("uniform", &Grid::uniform, py::arg("T"), py::arg("N"))
        .def_readonly("T", &Grid::T)
        .def_readonly("N", &Grid::N)
        .def_readonly("nodes", &Grid::nodes)
        .def_property_readonly("delta", &Grid::delta);

    py::class_<DiscreteSolution>(m, "DiscreteSolution")
        .def_readonly("grid", &DiscreteSolution::grid)
        .def_readonly("values", &DiscreteSolution::values)
        .def_readonly("int_h", &DiscreteSolution::int_h)
        .def_readonly("residual_norm", &DiscreteSolution::residual_norm)
        .def_readonly("rhs_norm", &DiscreteSolution::rhs_norm);

    m.def(
        "solve_mle_h",
        [](const KernelModel& model, std::size_t N, Formulation f, bool relaxed, std::size_t workers) {
            SolverConfig cfg;
            cfg.N = N;
            cfg.formulation = f;
            cfg.allow_relaxed = relaxed;
            cfg.workers = workers;
            py::gil_scoped_release release;
            return solve_mle_h(model, cfg);
        },
        py::arg("model"), py::arg("N") = 500, py::arg("formulation") = Formulation::direct,
        py::arg("relaxed") = false, py::arg("workers") = 1);

    py::class_<MixedPath>(m, "MixedPath")
        .def_readonly("grid", &MixedPath::grid)
        .def_readonly("values", &MixedPath::values)
        .def_readonly("theta", &MixedPath::theta)
        .def_property_readonly("method", [](const MixedPath& p) { return std::string(to_string(p.method)); });

    m.def(
        "mixed_path",
        [](double theta, const HurstPair& h, const Grid& grid, std::uint64_t seed, std::uint64_t stream) {
            return mixed_path(theta, h, grid, RngSpec{seed, stream});
        },
        py::arg("theta"), py::arg("hurst"), py::arg("grid"), py::arg("seed"), py::arg("stream") = 0);

    py::class_<EstimationResult>(m, "EstimationResult")
        .def_readonly("theta_hat", &EstimationResult::theta_hat)
        .def_readonly("int_h", &EstimationResult::int_h)
        .def_readonly("theoretical_variance", &EstimationResult::theoretical_variance);

    m.def(
        "estimate_theta",
        [](const std::vector<double>& h, const std::vector<double>& x, double delta) {
            return estimate_theta(h, x, delta);
        },
        py::arg("h"), py::arg("path"), py::arg("delta"));
    m.def(
        "estimate_theta", [](const DiscreteSolution& h, const MixedPath& p) { return estimate_theta(h, p); },
        py::arg("solution"), py::arg("path"));

    py::class_<MonteCarloSummary>(m, "MonteCarloSummary")
        .def_readonly("H1", &MonteCarloSummary::H1)
        .def_readonly("H2", &MonteCarloSummary::H2)
        .def_readonly("T", &MonteCarloSummary::T)
        .def_readonly("M", &MonteCarloSummary::M)
        .def_readonly("N_solver", &MonteCarloSummary::N_solver)
        .def_readonly("N_path", &MonteCarloSummary::N_path)
        .def_readonly("mean", &MonteCarloSummary::mean)
        .def_readonly("se_mean", &MonteCarloSummary::se_mean)
        .def_readonly("empirical_variance", &MonteCarloSummary::empirical_variance)
        .def_readonly("theoretical_variance", &MonteCarloSummary::theoretical_variance)
        .def_readonly("estimates", &MonteCarloSummary::estimates);

    m.def(
        "run_montecarlo",
        [](const HurstPair& h, double T, std::size_t M, std::size_t N, double theta, std::uint64_t seed,
           std::size_t workers, bool relaxed) {
            MonteCarloConfig cfg;
            cfg.T = T;
            cfg.M = M;
            cfg.N = N;
            cfg.theta = theta;
            cfg.base_seed = seed;
            cfg.workers = workers;
            cfg.allow_relaxed = relaxed;
            HCache cache;
            py::gil_scoped_release release;
            return run_montecarlo(h, cfg, cache);
        },
        py::arg("hurst"), py::arg("T"), py::arg("M") = 1000, py::arg("N") = 0, py::arg("theta") = 1.0,
        py::arg("seed") = 1, py::arg("workers") = 1, py::arg("relaxed") = false);

    py::class_<VarianceBand>(m, "VarianceBand")
        .def_readonly("lower", &VarianceBand::lower)
        .def_readonly("upper", &VarianceBand::upper)
        .def("contains", &VarianceBand::contains);
    m.def("chi_square_band", &chi_square_band, py::arg("sigma2"), py::arg("M"), py::arg("level") = 0.99);
}
