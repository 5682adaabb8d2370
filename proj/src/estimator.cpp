#include "dmfbm/estimator.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "dmfbm/error.hpp"

namespace dmfbm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_values(const std::filesystem::path& file, const DiscreteSolution& sol) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot write cache file " + file.string());
    write_solution_csv(os, sol);
}

std::optional<std::vector<double>> read_values(const std::filesystem::path& file, std::size_t expected) {
    std::ifstream is(file);
    if (!is) return std::nullopt;
    std::string line;
    std::getline(is, line);
    std::vector<double> v;
    while (std::getline(is, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) return std::nullopt;
        v.push_back(std::stod(line.substr(comma + 1)));
    }
    if (v.size() != expected) return std::nullopt;
    return v;
}

}  // namespace

EstimationResult estimate_theta(const std::vector<double>& h, const std::vector<double>& X, double delta,
                                DenominatorRule rule) {
    if (h.size() != X.size() || h.size() < 2) {
        throw GridMismatchError("h has " + std::to_string(h.size()) + " nodes but the path has " +
                                std::to_string(X.size()));
    }
    double num = 0.0;
    for (std::size_t j = 0; j + 1 < X.size(); ++j) num += h[j] * (X[j + 1] - X[j]);
    double den = 0.0;
    if (rule == DenominatorRule::trapezoid) {
        den = trapezoid(h, delta);
    } else {
        for (std::size_t j = 0; j + 1 < h.size(); ++j) den += h[j];
        den *= delta;
    }
    if (!(std::abs(den) > 0.0) || !std::isfinite(den)) throw ConsistencyError("integral of h is zero or not finite");
    EstimationResult r;
    r.theta_hat = num / den;
    r.int_h = den;
    r.theoretical_variance = 1.0 / den;
    return r;
}

EstimationResult estimate_theta(const DiscreteSolution& h, const MixedPath& path, DenominatorRule rule) {
    if (h.grid.N != path.grid.N || std::abs(h.grid.T - path.grid.T) > 1e-12 * h.grid.T) {
        std::ostringstream msg;
        msg << "h is on a grid (T=" << h.grid.T << ", N=" << h.grid.N << ") but the path is on (T=" << path.grid.T
            << ", N=" << path.grid.N << ")";
        throw GridMismatchError(msg.str());
    }
    return estimate_theta(h.values, path.values, h.grid.delta(), rule);
}

std::vector<double> interpolate_linear(const Grid& from, const std::vector<double>& values, const Grid& to) {
    if (values.size() != from.size()) throw GridMismatchError("value count does not match the source grid");
    if (std::abs(from.T - to.T) > 1e-12 * from.T) throw GridMismatchError("grids cover different horizons");
    std::vector<double> out(to.size());
    const double inv = 1.0 / from.delta();
    for (std::size_t i = 0; i < to.size(); ++i) {
        const double pos = to.nodes[i] * inv;
        std::size_t k = static_cast<std::size_t>(pos);
        if (k >= from.N) k = from.N - 1;
        const double t = pos - static_cast<double>(k);
        out[i] = values[k] + t * (values[k + 1] - values[k]);
    }
    return out;
}

std::size_t path_intervals(double T, double points_per_unit) {
    const auto n = static_cast<std::size_t>(std::llround(points_per_unit * T));
    if (n < 2) throw DomainError("path grid needs at least three points");
    return n;
}

HCache::HCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_->string() + ": " + ec.message());
}

std::string HCache::key(double H1, double H2, double T, std::size_t N, Formulation f) {
    std::ostringstream os;
    os << std::setprecision(12) << "h_" << H1 << '_' << H2 << '_' << T << '_' << N << '_' << to_string(f);
    return os.str();
}

DiscreteSolution HCache::get_or_solve(const KernelModel& model, const SolverConfig& cfg) {
    const std::string k = key(model.hurst().H1(), model.hurst().H2(), model.T(), cfg.N, cfg.formulation);
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(k); it != memory_.end()) return it->second;

    if (dir_) {
        if (auto v = read_values(*dir_ / (k + ".csv"), cfg.N + 1)) {
            DiscreteSolution sol;
            sol.grid = Grid::uniform(model.T(), cfg.N);
            sol.values = std::move(*v);
            sol.int_h = trapezoid(sol.values, sol.grid.delta());
            sol.H1 = model.hurst().H1();
            sol.H2 = model.hurst().H2();
            sol.config = cfg;
            memory_.emplace(k, sol);
            return sol;
        }
    }
    DiscreteSolution sol = solve_mle_h(model, cfg);
    ++solves_;
    if (dir_) write_values(*dir_ / (k + ".csv"), sol);
    memory_.emplace(k, sol);
    return sol;
}

MonteCarloSummary run_montecarlo(const HurstPair& hurst, const MonteCarloConfig& cfg, HCache& cache,
                                 const KernelOptions& kopt) {
    if (cfg.M < 2) throw DomainError("Monte Carlo needs M >= 2 replications");
    const std::size_t n_path = path_intervals(cfg.T, cfg.points_per_unit);
    const std::size_t n_solver = cfg.N == 0 ? n_path : cfg.N;
    const Grid path_grid = Grid::uniform(cfg.T, n_path);

    MonteCarloSummary s;
    s.H1 = hurst.H1();
    s.H2 = hurst.H2();
    s.T = cfg.T;
    s.M = cfg.M;
    s.N_solver = n_solver;
    s.N_path = n_path;
    s.theta = cfg.theta;
    s.base_seed = cfg.base_seed;

    const auto t0 = Clock::now();
    const KernelModel model(hurst, cfg.T, kopt);
    SolverConfig scfg;
    scfg.N = n_solver;
    scfg.formulation = cfg.formulation;
    scfg.workers = cfg.workers;
    scfg.allow_relaxed = cfg.allow_relaxed;
    const DiscreteSolution sol = cache.get_or_solve(model, scfg);
    const std::vector<double> h =
        n_solver == n_path ? sol.values : interpolate_linear(sol.grid, sol.values, path_grid);
    s.solve_seconds = seconds_since(t0);

    const auto t1 = Clock::now();
    const MixedPathGenerator gen(hurst, path_grid);
    s.estimates.assign(cfg.M, 0.0);
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.M));
    auto run = [&](std::size_t w) {
        for (std::size_t r = w; r < cfg.M; r += workers) {
            const MixedPath p = gen.sample(cfg.theta, {cfg.base_seed, r});
            s.estimates[r] = estimate_theta(h, p.values, path_grid.delta()).theta_hat;
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    s.simulate_seconds = seconds_since(t1);

    double mean = 0.0;
    for (double e : s.estimates) mean += e;
    mean /= static_cast<double>(cfg.M);
    double ss = 0.0;
    for (double e : s.estimates) ss += (e - mean) * (e - mean);
    s.mean = mean;
    s.empirical_variance = ss / static_cast<double>(cfg.M - 1);
    s.se_mean = std::sqrt(s.empirical_variance / static_cast<double>(cfg.M));
    s.theoretical_variance = 1.0 / trapezoid(h, path_grid.delta());
    return s;
}

MonteCarloSummary run_montecarlo(const HurstPair& hurst, double T, std::size_t M, std::size_t N, double theta,
                                 std::uint64_t base_seed) {
    HCache cache;
    MonteCarloConfig cfg;
    cfg.T = T;
    cfg.M = M;
    cfg.N = N;
    cfg.theta = theta;
    cfg.base_seed = base_seed;
    return run_montecarlo(hurst, cfg, cache);
}

VarianceBand chi_square_band(double sigma2, std::size_t M, double level) {
    if (M < 2) throw DomainError("variance band needs M >= 2");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    const double dof = static_cast<double>(M - 1);
    const boost::math::chi_squared dist(dof);
    const double q = 0.5 * (1.0 - level);
    return {sigma2 * boost::math::quantile(dist, q) / dof, sigma2 * boost::math::quantile(dist, 1.0 - q) / dof};
}

void write_summary_header(std::ostream& os) {
    os << "T,H1,H2,M,N_solver,N_path,theta,mean,empirical_variance,theoretical_variance,se_mean,base_seed,"
          "solve_seconds,simulate_seconds\n";
}

void write_summary_row(std::ostream& os, const MonteCarloSummary& s) {
    os << std::setprecision(10) << s.T << ',' << s.H1 << ',' << s.H2 << ',' << s.M << ',' << s.N_solver << ','
       << s.N_path << ',' << s.theta << ',' << s.mean << ',' << s.empirical_variance << ','
       << s.theoretical_variance << ',' << s.se_mean << ',' << s.base_seed << ',' << std::setprecision(4)
       << s.solve_seconds << ',' << s.simulate_seconds << '\n';
}

}  // namespace dmfbm
