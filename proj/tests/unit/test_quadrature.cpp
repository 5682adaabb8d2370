#include <doctest.h>

#include <cmath>

#include "dmfbm/quadrature.hpp"
#include "dmfbm/specfun.hpp"

using namespace dmfbm;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const QuadRule r = gauss_legendre01(8);
    CHECK(r.size() == 8);
    for (int p = 0; p <= 15; ++p) {
        const double v = r.integrate([p](double x) { return std::pow(x, p); });
        CHECK(v == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    }
}

TEST_CASE("Gauss-Jacobi carries the power weight") {
    const double a = -0.3, b = 0.4;
    const QuadRule r = gauss_jacobi01(12, a, b);
    for (int p = 0; p <= 10; ++p) {
        const double v = r.integrate([p](double x) { return std::pow(x, p); });
        CHECK(v == doctest::Approx(beta_fn(b + 1 + p, a + 1)).epsilon(1e-13));
    }
}

TEST_CASE("rescale maps the interval") {
    const QuadRule r = rescale(gauss_legendre01(5), 2.0, 5.0);
    CHECK(r.integrate([](double x) { return x * x; }) == doctest::Approx((125.0 - 8.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("graded integration of a weakly singular product") {
    // int_0^1 s |s - 0.3|^{-0.4} ds in closed form.
    const double c = 0.3, e = -0.4;
    auto F = [&](double x) {
        const double d = x - c;
        const double m = std::abs(d);
        return std::pow(m, e + 2) / (e + 2) + std::copysign(1.0, d) * c * std::pow(m, e + 1) / (e + 1);
    };
    const double exact = F(1.0) - F(0.0);
    const double v = integrate_graded([](double s) { return s; }, 0.0, 1.0, c, e, {}, {});
    CHECK(v == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("graded integration with endpoint singularities") {
    // int_0^1 s^{-0.3} (1-s)^{-0.3} |s - 0.5|^{-0.2} ds; compare two resolutions.
    auto f = [](double s) { return std::pow(s, -0.3) * std::pow(1 - s, -0.3); };
    const double coarse = integrate_graded(f, 0.0, 1.0, 0.5, -0.2, {}, {0.0, 1.0});
    GradedOptions fine;
    fine.nodes = 16;
    fine.rel_depth = 1e-13;
    const double ref = integrate_graded(f, 0.0, 1.0, 0.5, -0.2, {}, {0.0, 1.0}, fine);
    CHECK(coarse == doctest::Approx(ref).epsilon(1e-6));
}
