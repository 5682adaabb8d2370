#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "dmfbm/error.hpp"
#include "dmfbm/estimator.hpp"

using namespace dmfbm;

namespace {

std::vector<double> affine_path(const Grid& g, double theta, const std::vector<double>& noise, double scale) {
    std::vector<double> x(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) x[j] = theta * g.nodes[j] + scale * noise[j];
    return x;
}

}  // namespace

TEST_CASE("noise-free path returns the drift under the left-point rule") {
    const Grid g = Grid::uniform(2.0, 40);
    std::vector<double> h(g.size());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = 1.0 + std::cos(g.nodes[j]);
    const std::vector<double> x = affine_path(g, 1.7, std::vector<double>(g.size(), 0.0), 0.0);
    const EstimationResult r = estimate_theta(h, x, g.delta(), DenominatorRule::left_point);
    CHECK(r.theta_hat == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(r.theoretical_variance == doctest::Approx(1.0 / r.int_h));
    const EstimationResult t = estimate_theta(h, x, g.delta(), DenominatorRule::trapezoid);
    CHECK(t.theta_hat == doctest::Approx(1.7).epsilon(1e-2));
}

TEST_CASE("estimator is affine in the path") {
    const Grid g = Grid::uniform(1.0, 50);
    std::vector<double> h(g.size()), noise(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        h[j] = 2.0 - g.nodes[j];
        noise[j] = std::sin(7.0 * g.nodes[j]);
    }
    const double base = estimate_theta(h, noise, g.delta()).theta_hat;
    const double shifted = estimate_theta(h, affine_path(g, 0.4, noise, 3.0), g.delta()).theta_hat;
    CHECK(shifted == doctest::Approx(3.0 * base + 0.4 * estimate_theta(h, g.nodes, g.delta()).theta_hat));
}

TEST_CASE("grid mismatches are rejected") {
    const KernelModel m(HurstPair(0.6, 0.7), 1.0);
    SolverConfig cfg;
    cfg.N = 20;
    const DiscreteSolution sol = solve_mle_h(m, cfg);
    const MixedPath path = mixed_path(1.0, HurstPair(0.6, 0.7), Grid::uniform(1.0, 40), {1, 0});
    CHECK_THROWS_AS(estimate_theta(sol, path), GridMismatchError);
    CHECK_THROWS_AS(estimate_theta(std::vector<double>(3, 1.0), std::vector<double>(4, 0.0), 0.1), GridMismatchError);
}

TEST_CASE("linear interpolation between grids") {
    const Grid a = Grid::uniform(2.0, 10);
    const Grid b = Grid::uniform(2.0, 37);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) v[j] = 3.0 * a.nodes[j] - 1.0;
    const std::vector<double> w = interpolate_linear(a, v, b);
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(w[j] == doctest::Approx(3.0 * b.nodes[j] - 1.0));
}

TEST_CASE("path grid sizes") {
    CHECK(path_intervals(5.0) == 500);
    CHECK(path_intervals(25.0) == 2500);
    CHECK(path_intervals(0.5, 10.0) == 5);
    CHECK_THROWS_AS(path_intervals(0.01), DomainError);
}

TEST_CASE("cache solves once and persists to disk") {
    const auto dir = std::filesystem::temp_directory_path() / "dmfbm_test_cache";
    std::filesystem::remove_all(dir);
    const KernelModel m(HurstPair(0.6, 0.7), 1.0);
    SolverConfig cfg;
    cfg.N = 30;
    HCache a(dir);
    const DiscreteSolution s1 = a.get_or_solve(m, cfg);
    const DiscreteSolution s2 = a.get_or_solve(m, cfg);
    CHECK(a.solves() == 1);
    CHECK(s1.values == s2.values);
    HCache b(dir);
    const DiscreteSolution s3 = b.get_or_solve(m, cfg);
    CHECK(b.solves() == 0);
    for (std::size_t i = 0; i < s1.values.size(); ++i) CHECK(s3.values[i] == s1.values[i]);
    CHECK(s3.int_h == doctest::Approx(s1.int_h).epsilon(1e-15));
    CHECK(HCache::key(0.6, 0.7, 1.0, 30, Formulation::direct) != HCache::key(0.6, 0.7, 1.0, 30, Formulation::tilde));
    std::filesystem::remove_all(dir);
}

TEST_CASE("chi-square band") {
    const VarianceBand b = chi_square_band(0.5, 1000);
    boost::math::chi_squared chi(999.0);
    CHECK(b.lower == doctest::Approx(0.5 * quantile(chi, 0.005) / 999.0));
    CHECK(b.upper == doctest::Approx(0.5 * quantile(chi, 0.995) / 999.0));
    CHECK(b.contains(0.5));
    CHECK_FALSE(b.contains(0.6));
    CHECK_THROWS_AS(chi_square_band(0.5, 1), DomainError);
}

TEST_CASE("small Monte Carlo study") {
    HCache cache;
    MonteCarloConfig cfg;
    cfg.T = 1.0;
    cfg.M = 300;
    cfg.base_seed = 42;
    const MonteCarloSummary s = run_montecarlo(HurstPair(0.6, 0.7), cfg, cache);
    CHECK(s.estimates.size() == 300);
    CHECK(s.N_path == 100);
    CHECK(s.N_solver == 100);
    CHECK(std::abs(s.mean - 1.0) <= 4.0 * s.se_mean);
    CHECK(chi_square_band(s.theoretical_variance, s.M, 0.999).contains(s.empirical_variance));
    const MonteCarloSummary again = run_montecarlo(HurstPair(0.6, 0.7), cfg, cache);
    CHECK(again.estimates == s.estimates);
    CHECK(cache.solves() == 1);

    std::ostringstream os;
    write_summary_header(os);
    write_summary_row(os, s);
    CHECK(os.str().rfind("T,H1,H2,M,", 0) == 0);

    MonteCarloConfig coarse = cfg;
    coarse.N = 50;
    coarse.M = 20;
    const MonteCarloSummary c = run_montecarlo(HurstPair(0.6, 0.7), coarse, cache);
    CHECK(c.N_solver == 50);
    CHECK(c.N_path == 100);
}
