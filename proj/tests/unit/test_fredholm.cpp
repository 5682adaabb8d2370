#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "dmfbm/error.hpp"
#include "dmfbm/fredholm.hpp"
#include "json.hpp"

using namespace dmfbm;

namespace {

const KernelModel& model06() {
    static const KernelModel m(HurstPair(0.6, 0.7), 1.0);
    return m;
}

double hat_weight(bool rising, std::size_t j, std::size_t i, std::size_t N, double T, double g) {
    const double d = T / static_cast<double>(N);
    const double ti = d * static_cast<double>(i - 1);
    const double tj = d * static_cast<double>(j - 1);
    const double a = rising ? tj - d : tj;
    const double b = a + d;
    boost::math::quadrature::tanh_sinh<double> ts;
    // xc is the signed distance to the nearer endpoint; it keeps |t_i - s| exact
    // when t_i is an endpoint.
    auto f = [&](double s, double xc) {
        const bool left_half = s < 0.5 * (a + b);
        double dist = std::abs(ti - s);
        if (ti == a && left_half) dist = -xc;
        if (ti == b && !left_half) dist = xc;
        const double hat = rising ? (s - a) / d : (b - s) / d;
        return hat * std::pow(dist, g - 1);
    };
    return ts.integrate(f, a, b);
}

}  // namespace

TEST_CASE("uniform grid") {
    const Grid g = Grid::uniform(2.5, 10);
    CHECK(g.size() == 11);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 2.5);
    CHECK(g.delta() == doctest::Approx(0.25));
    CHECK_THROWS_AS(Grid::uniform(0.0, 10), DomainError);
    CHECK_THROWS_AS(Grid::uniform(1.0, 1), DomainError);
}

TEST_CASE("formulation names round-trip") {
    CHECK(parse_formulation(to_string(Formulation::tilde)) == Formulation::tilde);
    CHECK(parse_formulation("direct") == Formulation::direct);
    CHECK_THROWS_AS(parse_formulation("other"), DomainError);
}

TEST_CASE("closed-form weights match quadrature") {
    const std::size_t N = 40;
    const double T = 3.0;
    for (double g : {0.1, 0.2, 0.6, 0.9}) {
        for (std::size_t i : {1u, 2u, 17u, 40u, 41u}) {
            for (std::size_t j : {1u, 2u, 16u, 17u, 18u, 30u, 41u}) {
                INFO("gamma=" << g << " i=" << i << " j=" << j);
                const double w1 = j == N + 1 ? 0.0 : hat_weight(false, j, i, N, T, g);
                const double w2 = j == 1 ? 0.0 : hat_weight(true, j, i, N, T, g);
                CHECK(std::abs(weight_psi1(j, i, N, T, g) - w1) <= 1e-10 * std::max(1.0, std::abs(w1)));
                CHECK(std::abs(weight_psi2(j, i, N, T, g) - w2) <= 1e-10 * std::max(1.0, std::abs(w2)));
            }
        }
    }
}

TEST_CASE("weights form a partition of the singular integral") {
    const std::size_t N = 64;
    const double T = 2.0, g = 0.4;
    const Eigen::MatrixXd W = weight_matrix(N, T, g);
    for (std::size_t i = 0; i <= N; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(N);
        const double exact = (std::pow(t, g) + std::pow(T - t, g)) / g;
        CHECK(W.row(static_cast<Eigen::Index>(i)).sum() == doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK_THROWS_AS(weight_psi1(0, 1, N, T, g), DomainError);
    CHECK_THROWS_AS(weight_psi2(1, N + 2, N, T, g), DomainError);
    CHECK_THROWS_AS(weight_psi1(1, 1, N, T, 1.2), DomainError);
}

TEST_CASE("solve produces a small residual") {
    SolverConfig cfg;
    cfg.N = 80;
    const DiscreteSolution sol = solve_mle_h(model06(), cfg);
    CHECK(sol.values.size() == 81);
    CHECK(sol.residual_norm <= 1e-12 * sol.rhs_norm);
    CHECK(sol.int_h > 0.0);
    CHECK(sol.int_h == doctest::Approx(trapezoid(sol.values, sol.grid.delta())));
}

TEST_CASE("worker count does not change the solution") {
    SolverConfig a;
    a.N = 50;
    SolverConfig b = a;
    b.workers = 3;
    CHECK(solve_mle_h(model06(), a).values == solve_mle_h(model06(), b).values);
}

TEST_CASE("tilde and direct formulations agree in the interior") {
    SolverConfig d;
    d.N = 200;
    SolverConfig t = d;
    t.formulation = Formulation::tilde;
    const DiscreteSolution hd = solve_mle_h(model06(), d);
    const DiscreteSolution ht = solve_mle_h(model06(), t);
    double worst = 0.0;
    for (std::size_t i = 0; i < hd.values.size(); ++i) {
        const double u = hd.grid.nodes[i];
        if (u < 0.05 || u > 0.95) continue;
        worst = std::max(worst, std::abs(hd.values[i] - ht.values[i]));
    }
    CHECK(worst <= 1e-4);
    CHECK(ht.int_h == doctest::Approx(hd.int_h).epsilon(1e-3));
}

TEST_CASE("discrete solution satisfies the operator equation") {
    SolverConfig cfg;
    cfg.N = 200;
    const DiscreteSolution sol = solve_mle_h(model06(), cfg);
    const std::vector<double> d = operator_defect(sol);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double u = sol.grid.nodes[i];
        if (u < 0.1 || u > 0.9) continue;
        CHECK(std::abs(d[i] - 1.0) <= 1e-3);
    }
}

TEST_CASE("strict mode is enforced unless relaxed") {
    const KernelModel m(HurstPair(0.8, 0.9), 1.0);
    SolverConfig cfg;
    cfg.N = 20;
    CHECK_THROWS_AS(solve_mle_h(m, cfg), DomainError);
    cfg.allow_relaxed = true;
    CHECK_NOTHROW(solve_mle_h(m, cfg));
}

TEST_CASE("singular systems are reported") {
    SolverConfig cfg;
    cfg.N = 10;
    LinearSystem sys;
    sys.A = Eigen::MatrixXd::Zero(11, 11);
    sys.G = Eigen::VectorXd::Ones(11);
    CHECK_THROWS_AS(solve(model06(), cfg, sys), SingularMatrixError);
}

TEST_CASE("truncation bounds") {
    SolverConfig cfg;
    cfg.N = 20;
    cfg.n = 1;
    CHECK_THROWS_AS(solve_mle_h(model06(), cfg), DomainError);
    cfg.n = 10;
    CHECK_NOTHROW(solve_mle_h(model06(), cfg));
}

TEST_CASE("manufactured solution with zero kernel constant is exact") {
    SolverConfig cfg;
    cfg.N = 30;
    auto h = [](double u) { return std::sin(3 * u) + 2; };
    const Grid grid = Grid::uniform(1.0, cfg.N);
    LinearSystem sys;
    sys.A = assemble_matrix(model06(), cfg, 0.0);
    sys.G.resize(31);
    for (int i = 0; i <= 30; ++i) sys.G[i] = manufactured_rhs_at(model06(), h, cfg.N, grid.nodes[i], 0.0);
    const DiscreteSolution sol = solve(model06(), cfg, sys);
    for (int i = 0; i <= 30; ++i) CHECK(sol.values[i] == doctest::Approx(h(grid.nodes[i])).epsilon(1e-14));
}

TEST_CASE("manufactured solution converges under refinement") {
    auto h = [](double u) { return u; };
    auto mean_error = [&](std::size_t N) {
        SolverConfig cfg;
        cfg.N = N;
        LinearSystem sys;
        sys.A = assemble_matrix(model06(), cfg);
        const std::vector<double> g = manufactured_rhs(model06(), h, cfg);
        sys.G = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
        const DiscreteSolution sol = solve(model06(), cfg, sys);
        double acc = 0.0;
        for (std::size_t i = 0; i < sol.values.size(); ++i) acc += std::abs(sol.values[i] - sol.grid.nodes[i]);
        return acc / static_cast<double>(sol.values.size());
    };
    const double e1 = mean_error(50);
    const double e2 = mean_error(100);
    CHECK(e1 < 1e-3);
    CHECK(e2 < 0.65 * e1);
}

TEST_CASE("Gamma operator applied to the right-hand side is one") {
    for (double H1 : {0.55, 0.6, 0.7}) {
        const HurstPair h(H1, 0.9);
        for (double t : {0.1, 0.33, 0.5, 0.9}) {
            const double v = apply_gamma(H1, [&](double s) { return g_rhs(s, h, 1.0); }, 1.0, t);
            CHECK(std::abs(v - 1.0) <= 1e-3);
        }
    }
    CHECK_THROWS_AS(apply_gamma(0.5, [](double) { return 1.0; }, 1.0, 0.5), DomainError);
}

TEST_CASE("solution output") {
    SolverConfig cfg;
    cfg.N = 10;
    const DiscreteSolution sol = solve_mle_h(model06(), cfg);
    std::ostringstream os;
    write_solution_csv(os, sol);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,h");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 11);
    const auto meta = nlohmann::json::parse(solution_metadata_json(sol));
    CHECK(meta.at("N").get<int>() == 10);
    CHECK(meta.at("H1").get<double>() == 0.6);
    CHECK(meta.contains("residual_norm"));
}
