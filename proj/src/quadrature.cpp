#include "dmfbm/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "dmfbm/error.hpp"
#include "dmfbm/specfun.hpp"

namespace dmfbm {

namespace {

// Jacobi matrix on [-1, 1] for the weight (1 - x)^a (1 + x)^b.
QuadRule golub_welsch(std::size_t n, double a, double b) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 1));
    const double ab = a + b;
    for (std::size_t k = 0; k < n; ++k) {
        const double dk = static_cast<double>(k);
        const double s = 2.0 * dk + ab;
        diag(static_cast<Eigen::Index>(k)) =
            (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (std::size_t k = 1; k < n; ++k) {
        const double dk = static_cast<double>(k);
        const double s = 2.0 * dk + ab;
        const double beta = 4.0 * dk * (dk + a) * (dk + b) * (dk + ab) / (s * s * (s + 1.0) * (s - 1.0));
        sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(beta);
    }
    const double mu0 = std::pow(2.0, ab + 1.0) * beta_fn(a + 1.0, b + 1.0);

    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    if (n == 1) {
        r.x[0] = diag(0);
        r.w[0] = mu0;
        return r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw ConvergenceError("Golub-Welsch eigenproblem failed");
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        r.x[k] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.w[k] = mu0 * v0 * v0;
    }
    return r;
}

}  // namespace

QuadRule gauss_legendre01(std::size_t n) { return gauss_jacobi01(n, 0.0, 0.0); }

QuadRule gauss_jacobi01(std::size_t n, double a, double b) {
    if (n == 0 || !(a > -1.0) || !(b > -1.0)) {
        std::ostringstream msg;
        msg << "gauss_jacobi01: need n >= 1 and a, b > -1 (n=" << n << " a=" << a << " b=" << b << ")";
        throw DomainError(msg.str());
    }
    QuadRule r = golub_welsch(n, a, b);
    const double scale = std::pow(2.0, -(a + b + 1.0));
    for (std::size_t k = 0; k < n; ++k) {
        r.x[k] = 0.5 * (r.x[k] + 1.0);
        r.w[k] *= scale;
    }
    return r;
}

QuadRule rescale(const QuadRule& unit, double lo, double hi) {
    QuadRule r = unit;
    const double len = hi - lo;
    for (std::size_t k = 0; k < r.size(); ++k) {
        r.x[k] = lo + len * unit.x[k];
        r.w[k] = len * unit.w[k];
    }
    return r;
}

}  // namespace dmfbm

namespace dmfbm {

double integrate_graded(const std::function<double(double)>& f, double lo, double hi, double center,
                        double expo, const std::vector<double>& breaks, const std::vector<double>& graded,
                        const GradedOptions& opt) {
    if (!(hi > lo)) return 0.0;
    if (!(expo > -1.0)) throw DomainError("integrate_graded: power weight must have expo > -1");
    const QuadRule gl = gauss_legendre01(opt.nodes);
    const QuadRule gj = gauss_jacobi01(opt.nodes, 0.0, expo);
    const double min_len = opt.rel_depth * (hi - lo);

    std::vector<double> pts{lo, hi};
    const auto inside = [&](double x) { return x > lo && x < hi; };
    if (inside(center)) pts.push_back(center);
    for (double b : breaks)
        if (inside(b)) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto is_graded = [&](double x) {
        if (x == center) return true;
        return std::find(graded.begin(), graded.end(), x) != graded.end();
    };
    auto weight = [&](double s) { return std::pow(std::abs(s - center), expo); };
    auto panel = [&](double a, double b) {
        double acc = 0.0;
        const double len = b - a;
        for (std::size_t k = 0; k < gl.size(); ++k) {
            const double s = a + len * gl.x[k];
            acc += len * gl.w[k] * f(s) * weight(s);
        }
        return acc;
    };
    // Innermost panel [e, e + d] (d may be negative).
    auto end_panel = [&](double e, double d) {
        const double len = std::abs(d);
        if (e != center) return panel(std::min(e, e + d), std::max(e, e + d));
        double acc = 0.0;
        for (std::size_t k = 0; k < gj.size(); ++k) acc += gj.w[k] * f(e + d * gj.x[k]);
        return acc * std::pow(len, expo + 1.0);
    };
    // Half interval from e (graded end) over signed length d.
    auto graded_half = [&](double e, double d) {
        double acc = 0.0;
        double outer = d;
        while (std::abs(outer) > min_len) {
            const double inner = 0.5 * outer;
            acc += panel(std::min(e + inner, e + outer), std::max(e + inner, e + outer));
            outer = inner;
        }
        return acc + end_panel(e, outer);
    };
    auto plain = [&](double a, double b) {
        double acc = 0.0;
        const double len = (b - a) / static_cast<double>(opt.plain_panels);
        for (std::size_t k = 0; k < opt.plain_panels; ++k) {
            acc += panel(a + static_cast<double>(k) * len, a + static_cast<double>(k + 1) * len);
        }
        return acc;
    };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const double m = 0.5 * (a + b);
        total += is_graded(a) ? graded_half(a, m - a) : plain(a, m);
        total += is_graded(b) ? graded_half(b, m - b) : plain(m, b);
    }
    return total;
}

}  // namespace dmfbm
