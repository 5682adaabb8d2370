#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmfbm/kernel.hpp"

namespace dmfbm {

/// Uniform grid t_j = (j - 1) T / N, j = 1..N+1 (stored 0-based).
struct Grid {
    double T = 1.0;
    std::size_t N = 0;
    std::vector<double> nodes;

    static Grid uniform(double T, std::size_t N);
    double delta() const noexcept { return T / static_cast<double>(N); }
    std::size_t size() const noexcept { return nodes.size(); }
};

enum class Formulation { direct, tilde };

const char* to_string(Formulation f);
Formulation parse_formulation(const std::string& s);

struct SolverConfig {
    std::size_t N = 500;
    std::size_t n = 0;  // truncation; 0 means n = N
    Formulation formulation = Formulation::direct;
    double pivot_threshold = 1e-14;
    bool allow_relaxed = false;
    std::size_t workers = 1;

    std::size_t truncation() const noexcept { return n == 0 ? N : n; }
};

struct DiscreteSolution {
    Grid grid;
    std::vector<double> values;
    double residual_norm = 0.0;
    double rhs_norm = 0.0;
    double int_h = 0.0;
    double H1 = 0.0;
    double H2 = 0.0;
    SolverConfig config;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// Product-integration weights for the hat functions at node j against
/// |t_i - s|^{gamma - 1}; indices are 1-based as in the case tables.
double weight_psi1(std::size_t j, std::size_t i, std::size_t N, double T, double gamma);
double weight_psi2(std::size_t j, std::size_t i, std::size_t N, double T, double gamma);

/// Dense weight matrix W(i, j) = psi1_{j,i} + psi2_{j,i} (0-based).
Eigen::MatrixXd weight_matrix(std::size_t N, double T, double gamma);

struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd G;
};

/// System (I + cK) H = G. The matrix uses the truncated kernel at the grid
/// nodes; G is g_T at the clamped nodes (or the constant tilde rhs).
LinearSystem assemble(const KernelModel& model, const SolverConfig& cfg);

/// Matrix part only; kernel constant c may be overridden (e.g. 0).
Eigen::MatrixXd assemble_matrix(const KernelModel& model, const SolverConfig& cfg);
Eigen::MatrixXd assemble_matrix(const KernelModel& model, const SolverConfig& cfg, double c);

/// Dense LU solve of a prepared system.
DiscreteSolution solve(const KernelModel& model, const SolverConfig& cfg, const LinearSystem& sys);
DiscreteSolution solve(const KernelModel& model, const SolverConfig& cfg);

/// g(u_i) = h(u_i) + c int_0^T h(s) |u_i - s|^{gamma-1} L^{(n)}(u_i, s) ds by
/// graded quadrature at every grid node.
std::vector<double> manufactured_rhs(const KernelModel& model, const std::function<double(double)>& h_exact,
                                     const SolverConfig& cfg);

/// Same quadrature at a single point u in [0, T].
double manufactured_rhs_at(const KernelModel& model, const std::function<double(double)>& h_exact,
                           std::size_t n, double u, double c);

/// Solution of the equation with right-hand side g_T. The tilde
/// formulation is transformed back to h before returning.
DiscreteSolution solve_mle_h(const KernelModel& model, const SolverConfig& cfg);

/// Trapezoid integral of grid values.
double trapezoid(const std::vector<double>& values, double delta);

/// H (2H - 1) int_0^T |t - s|^{2H-2} f(s) ds by graded quadrature; f may
/// have integrable power singularities at 0 and T.
double apply_gamma(double H, const std::function<double(double)>& f, double T, double t);

/// (Gamma_{H1} + Gamma_{H2}) h at every node, with h interpolated linearly
/// between the nodes (product integration).
std::vector<double> operator_defect(const DiscreteSolution& sol);

void write_solution_csv(std::ostream& os, const DiscreteSolution& sol);
std::string solution_metadata_json(const DiscreteSolution& sol);

}  // namespace dmfbm
