#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dmfbm/fbm.hpp"
#include "dmfbm/fredholm.hpp"

namespace dmfbm {

enum class DenominatorRule { trapezoid, left_point };

struct EstimationResult {
    double theta_hat = 0.0;
    double int_h = 0.0;
    double theoretical_variance = 0.0;
};

/// theta_hat = sum_j h_j (X_{j+1} - X_j) / int h, on a shared uniform grid.
EstimationResult estimate_theta(const std::vector<double>& h, const std::vector<double>& X, double delta,
                                DenominatorRule rule = DenominatorRule::trapezoid);
EstimationResult estimate_theta(const DiscreteSolution& h, const MixedPath& path,
                                DenominatorRule rule = DenominatorRule::trapezoid);

/// Piecewise-linear transfer of grid values onto another grid on [0, T].
std::vector<double> interpolate_linear(const Grid& from, const std::vector<double>& values, const Grid& to);

/// Number of path intervals for the observation grid of 100 T + 1 points.
std::size_t path_intervals(double T, double points_per_unit = 100.0);

/// Solutions of the h-equation keyed by (H1, H2, T, N, formulation); kept in
/// memory and, when a directory is given, persisted as CSV files.
class HCache {
public:
    HCache() = default;
    explicit HCache(std::filesystem::path dir);

    DiscreteSolution get_or_solve(const KernelModel& model, const SolverConfig& cfg);
    static std::string key(double H1, double H2, double T, std::size_t N, Formulation f);

    std::size_t solves() const noexcept { return solves_; }

private:
    std::optional<std::filesystem::path> dir_;
    std::map<std::string, DiscreteSolution> memory_;
    std::mutex mutex_;
    std::size_t solves_ = 0;
};

struct MonteCarloConfig {
    double T = 5.0;
    std::size_t M = 1000;
    std::size_t N = 0;  // solver grid; 0 means the path grid
    double theta = 1.0;
    std::uint64_t base_seed = 1;
    double points_per_unit = 100.0;
    Formulation formulation = Formulation::direct;
    std::size_t workers = 1;
    bool allow_relaxed = false;
};

struct MonteCarloSummary {
    double H1 = 0.0;
    double H2 = 0.0;
    double T = 0.0;
    std::size_t M = 0;
    std::size_t N_solver = 0;
    std::size_t N_path = 0;
    double theta = 0.0;
    double mean = 0.0;
    double empirical_variance = 0.0;
    double theoretical_variance = 0.0;
    double se_mean = 0.0;
    std::uint64_t base_seed = 0;
    double solve_seconds = 0.0;
    double simulate_seconds = 0.0;
    std::vector<double> estimates;
};

MonteCarloSummary run_montecarlo(const HurstPair& hurst, const MonteCarloConfig& cfg, HCache& cache,
                                 const KernelOptions& kopt = {});
MonteCarloSummary run_montecarlo(const HurstPair& hurst, double T, std::size_t M, std::size_t N, double theta,
                                 std::uint64_t base_seed);

/// Two-sided band for the sample variance of M i.i.d. normals with variance
/// sigma2: sigma2 chi2_{M-1}(q) / (M - 1) for q = (1 -+ level) / 2.
struct VarianceBand {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double v) const noexcept { return v >= lower && v <= upper; }
};
VarianceBand chi_square_band(double sigma2, std::size_t M, double level = 0.99);

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const MonteCarloSummary& s);

}  // namespace dmfbm
