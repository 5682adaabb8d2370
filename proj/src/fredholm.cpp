#include "dmfbm/fredholm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "dmfbm/error.hpp"
#include "json.hpp"

namespace dmfbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// (1 + x)^e - 1 - e x without cancellation for small |x|.
double binomial_tail(double e, double x) {
    if (std::abs(x) > 0.125) return std::pow(1.0 + x, e) - 1.0 - e * x;
    double term = e * x;
    double sum = 0.0;
    for (int k = 2; k < 80; ++k) {
        term *= (e - static_cast<double>(k - 1)) / static_cast<double>(k) * x;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// delta^{-gamma} gamma (gamma + 1) times the integral of the hat piece
// rising towards the near end, at integer distance m >= 0 from t_i.
double far_piece(std::size_t m, double g) {
    if (m == 0) return 1.0;
    const double dm = static_cast<double>(m);
    return std::pow(dm, g + 1.0) * binomial_tail(g + 1.0, 1.0 / dm);
}

// Same for the hat piece falling towards the near end, distance k >= 1.
double near_piece(std::size_t k, double g) {
    const double dk = static_cast<double>(k);
    return std::pow(dk, g + 1.0) * binomial_tail(g + 1.0, -1.0 / dk);
}

void check_indices(std::size_t j, std::size_t i, std::size_t N, double gamma) {
    if (j < 1 || i < 1 || j > N + 1 || i > N + 1) {
        throw DomainError("weight index out of range 1..N+1");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("weight exponent gamma must lie in (0, 1)");
}

std::size_t clamp_n(std::size_t n, double T) {
    if (n < 2 || !(1.0 / static_cast<double>(n) < 0.5 * T)) {
        throw DomainError("truncation n must satisfy n >= 2 and 1/n < T/2");
    }
    return n;
}

template <class RowFn>
void for_rows(std::size_t rows, std::size_t workers, RowFn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, rows));
    if (workers == 1) {
        for (std::size_t i = 0; i < rows; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < rows; i += workers) fn(i);
        });
    }
}

}  // namespace

Grid Grid::uniform(double T, std::size_t N) {
    if (!(T > 0.0)) throw DomainError("grid horizon must be positive");
    if (N < 2) throw DomainError("grid needs N >= 2");
    Grid g;
    g.T = T;
    g.N = N;
    g.nodes.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) g.nodes[j] = T * static_cast<double>(j) / static_cast<double>(N);
    g.nodes[N] = T;
    return g;
}

const char* to_string(Formulation f) { return f == Formulation::tilde ? "tilde" : "direct"; }

Formulation parse_formulation(const std::string& s) {
    if (s == "direct") return Formulation::direct;
    if (s == "tilde") return Formulation::tilde;
    throw DomainError("unknown formulation '" + s + "' (expected direct or tilde)");
}

double weight_psi1(std::size_t j, std::size_t i, std::size_t N, double T, double gamma) {
    check_indices(j, i, N, gamma);
    if (j == N + 1) return 0.0;
    const double delta = T / static_cast<double>(N);
    const double pre = std::pow(delta, gamma) / (gamma * (gamma + 1.0));
    return pre * (i <= j ? far_piece(j - i, gamma) : near_piece(i - j, gamma));
}

double weight_psi2(std::size_t j, std::size_t i, std::size_t N, double T, double gamma) {
    check_indices(j, i, N, gamma);
    if (j == 1) return 0.0;
    const double delta = T / static_cast<double>(N);
    const double pre = std::pow(delta, gamma) / (gamma * (gamma + 1.0));
    return pre * (i >= j ? far_piece(i - j, gamma) : near_piece(j - i, gamma));
}

Eigen::MatrixXd weight_matrix(std::size_t N, double T, double gamma) {
    const auto M = static_cast<Eigen::Index>(N + 1);
    Eigen::MatrixXd W(M, M);
    for (std::size_t i = 1; i <= N + 1; ++i) {
        for (std::size_t j = 1; j <= N + 1; ++j) {
            W(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
                weight_psi1(j, i, N, T, gamma) + weight_psi2(j, i, N, T, gamma);
        }
    }
    return W;
}

Eigen::MatrixXd assemble_matrix(const KernelModel& model, const SolverConfig& cfg) {
    return assemble_matrix(model, cfg, model.consts().c);
}

Eigen::MatrixXd assemble_matrix(const KernelModel& model, const SolverConfig& cfg, double c) {
    const double T = model.T();
    const Grid grid = Grid::uniform(T, cfg.N);
    const std::size_t n = clamp_n(cfg.truncation(), T);
    const double lo = 1.0 / static_cast<double>(n);
    const double hi = T - lo;
    const bool tilde = cfg.formulation == Formulation::tilde;

    std::vector<double> uc(grid.size());
    std::vector<double> wt(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        uc[i] = std::clamp(grid.nodes[i], lo, hi);
        wt[i] = tilde ? tilde_weight(model, uc[i]) : 1.0;
    }

    Eigen::MatrixXd A = weight_matrix(cfg.N, T, model.hurst().gamma());
    for_rows(grid.size(), cfg.workers, [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const auto col = static_cast<Eigen::Index>(j);
            const double l = model.L(uc[i], uc[j]) * (wt[i] / wt[j]);
            A(r, col) = c * l * A(r, col);
        }
        A(r, r) += 1.0;
    });
    return A;
}

LinearSystem assemble(const KernelModel& model, const SolverConfig& cfg) {
    LinearSystem sys;
    sys.A = assemble_matrix(model, cfg);
    const Grid grid = Grid::uniform(model.T(), cfg.N);
    const std::size_t n = clamp_n(cfg.truncation(), model.T());
    const double lo = 1.0 / static_cast<double>(n);
    const double hi = model.T() - lo;
    sys.G.resize(static_cast<Eigen::Index>(grid.size()));
    const double const_rhs = tilde_rhs(model);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sys.G(static_cast<Eigen::Index>(i)) = cfg.formulation == Formulation::tilde
                                                  ? const_rhs
                                                  : g_rhs(std::clamp(grid.nodes[i], lo, hi), model.hurst(), model.T());
    }
    return sys;
}

DiscreteSolution solve(const KernelModel& model, const SolverConfig& cfg, const LinearSystem& sys) {
    const auto t0 = Clock::now();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
    const double rcond = lu.rcond();
    if (!(rcond > cfg.pivot_threshold)) {
        std::ostringstream msg;
        msg << "system matrix is numerically singular (rcond = " << rcond << ")";
        throw SingularMatrixError(msg.str());
    }
    const Eigen::VectorXd H = lu.solve(sys.G);

    DiscreteSolution sol;
    sol.solve_seconds = seconds_since(t0);
    sol.grid = Grid::uniform(model.T(), cfg.N);
    sol.values.assign(H.data(), H.data() + H.size());
    sol.residual_norm = (sys.A * H - sys.G).lpNorm<Eigen::Infinity>();
    sol.rhs_norm = sys.G.lpNorm<Eigen::Infinity>();
    sol.int_h = trapezoid(sol.values, sol.grid.delta());
    sol.H1 = model.hurst().H1();
    sol.H2 = model.hurst().H2();
    sol.config = cfg;
    return sol;
}

DiscreteSolution solve(const KernelModel& model, const SolverConfig& cfg) {
    const auto t0 = Clock::now();
    const LinearSystem sys = assemble(model, cfg);
    const double t_asm = seconds_since(t0);
    DiscreteSolution sol = solve(model, cfg, sys);
    sol.assemble_seconds = t_asm;
    return sol;
}

double manufactured_rhs_at(const KernelModel& model, const std::function<double(double)>& h_exact, std::size_t n,
                           double u, double c) {
    const double T = model.T();
    clamp_n(n, T);
    const double lo = 1.0 / static_cast<double>(n);
    const double hi = T - lo;
    const double uc = std::clamp(u, lo, hi);
    auto f = [&](double s) { return h_exact(s) * model.L(uc, std::clamp(s, lo, hi)); };
    const double integral =
        integrate_graded(f, 0.0, T, u, model.hurst().gamma() - 1.0, {lo, hi, uc}, {uc});
    return h_exact(u) + c * integral;
}

std::vector<double> manufactured_rhs(const KernelModel& model, const std::function<double(double)>& h_exact,
                                     const SolverConfig& cfg) {
    const Grid grid = Grid::uniform(model.T(), cfg.N);
    std::vector<double> g(grid.size());
    const double c = model.consts().c;
    for_rows(grid.size(), cfg.workers, [&](std::size_t i) {
        g[i] = manufactured_rhs_at(model, h_exact, cfg.truncation(), grid.nodes[i], c);
    });
    return g;
}

DiscreteSolution solve_mle_h(const KernelModel& model, const SolverConfig& cfg) {
    const HurstPair& hp = model.hurst();
    if (!hp.is_strict_admissible() && !cfg.allow_relaxed) {
        throw DomainError("unique solvability needs H1 <= 3/4; got H1 = " + std::to_string(hp.H1()) +
                          " (pass allow_relaxed to override)");
    }
    DiscreteSolution sol = solve(model, cfg);
    if (cfg.formulation == Formulation::tilde) {
        const double lo = 1.0 / static_cast<double>(cfg.truncation());
        const double hi = model.T() - lo;
        for (std::size_t i = 0; i < sol.values.size(); ++i) {
            sol.values[i] /= tilde_weight(model, std::clamp(sol.grid.nodes[i], lo, hi));
        }
        sol.int_h = trapezoid(sol.values, sol.grid.delta());
    }
    return sol;
}

double trapezoid(const std::vector<double>& values, double delta) {
    if (values.size() < 2) return 0.0;
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
    return acc * delta;
}

double apply_gamma(double H, const std::function<double(double)>& f, double T, double t) {
    if (!(H > 0.5 && H < 1.0)) throw DomainError("apply_gamma needs H in (1/2, 1)");
    return H * (2.0 * H - 1.0) * integrate_graded(f, 0.0, T, t, 2.0 * H - 2.0, {}, {0.0, T});
}

std::vector<double> operator_defect(const DiscreteSolution& sol) {
    const std::size_t N = sol.grid.N;
    const Eigen::Map<const Eigen::VectorXd> h(sol.values.data(), static_cast<Eigen::Index>(sol.values.size()));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(h.size());
    for (double H : {sol.H1, sol.H2}) {
        out += H * (2.0 * H - 1.0) * (weight_matrix(N, sol.grid.T, 2.0 * H - 1.0) * h);
    }
    return {out.data(), out.data() + out.size()};
}

void write_solution_csv(std::ostream& os, const DiscreteSolution& sol) {
    os << "t,h\n" << std::setprecision(17);
    for (std::size_t i = 0; i < sol.values.size(); ++i) os << sol.grid.nodes[i] << ',' << sol.values[i] << '\n';
}

std::string solution_metadata_json(const DiscreteSolution& sol) {
    nlohmann::json j;
    j["H1"] = sol.H1;
    j["H2"] = sol.H2;
    j["T"] = sol.grid.T;
    j["N"] = sol.grid.N;
    j["n"] = sol.config.truncation();
    j["formulation"] = to_string(sol.config.formulation);
    j["residual_norm"] = sol.residual_norm;
    j["rhs_norm"] = sol.rhs_norm;
    j["int_h"] = sol.int_h;
    j["theoretical_variance"] = sol.int_h != 0.0 ? 1.0 / sol.int_h : 0.0;
    j["timings"] = {{"assemble_seconds", sol.assemble_seconds}, {"solve_seconds", sol.solve_seconds}};
    return j.dump(2);
}

}  // namespace dmfbm
