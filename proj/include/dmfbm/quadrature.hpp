#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dmfbm {

/// Nodes and weights of an interpolatory rule.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const noexcept { return x.size(); }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * f(x[k]);
        return acc;
    }
};

/// n-point Gauss-Legendre rule on [0, 1].
QuadRule gauss_legendre01(std::size_t n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight (1 - y)^a y^b,
/// a, b > -1 (Golub-Welsch).
QuadRule gauss_jacobi01(std::size_t n, double a, double b);

/// Affine image of a [0, 1] rule on [lo, hi]; weights scaled by (hi - lo).
QuadRule rescale(const QuadRule& unit, double lo, double hi);

/// Integral of f(s) |s - center|^expo over [lo, hi].
///
/// The range is split at `center` and at every entry of `breaks`; panels are
/// refined geometrically towards `center` and every entry of `graded` until
/// they are shorter than rel_depth * (hi - lo). The innermost panel at
/// `center` uses a Gauss-Jacobi rule carrying the power weight.
struct GradedOptions {
    std::size_t nodes = 10;
    double rel_depth = 1e-12;
    std::size_t plain_panels = 4;
};

double integrate_graded(const std::function<double(double)>& f, double lo, double hi, double center,
                        double expo, const std::vector<double>& breaks, const std::vector<double>& graded,
                        const GradedOptions& opt = {});

}  // namespace dmfbm
