#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace dmfbm {

/// Gamma function for x > 0 (Lanczos, g = 7, nine terms).
/// Throws DomainError for x <= 0.
double gamma_fn(double x);

/// Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
double beta_fn(double a, double b);

namespace detail {
// Gamma on the whole real line except the poles, via reflection.
double gamma_signed(double x);
// 1 / Gamma(x); zero at the poles.
double rgamma(double x);
}  // namespace detail

/// Parameters of the Gauss hypergeometric function 2F1(a, b; c; z).
struct HyperParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    /// Endpoint exponent c - a - b; governs the behaviour as z -> 1.
    double lambda() const noexcept { return c - a - b; }
};

/// 2F1(a, b; c; z) for z in [0, 1].
///
/// Power series for z <= 1/2, connection formula in 1 - z above that.
/// At z = 1 returns Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)), which
/// requires lambda > 0.
double hyp2f1(const HyperParams& p, double z);

/// Regular parts of the connection formula:
/// 2F1(a, b; c; z) = regular + (1 - z)^lambda * singular_coef.
struct ConnectionParts {
    double regular = 0.0;
    double singular_coef = 0.0;
};

/// Evaluator bound to one parameter triple. Connection coefficients are
/// computed once, so repeated evaluation only pays for the series.
class Hyp2F1 {
public:
    explicit Hyp2F1(const HyperParams& p);

    const HyperParams& params() const noexcept { return p_; }

    double operator()(double z) const;

    /// Same, with 1 - z supplied by the caller (avoids cancellation near 1).
    double operator()(double z, double one_minus_z) const;

    /// Value at z = 1 (requires lambda > 0).
    double at_one() const;

    /// Both series of the connection formula at z in [1/2, 1].
    ConnectionParts parts(double z) const;

    /// parts() with 1 - z given directly.
    ConnectionParts parts_at(double one_minus_z) const;

    double lambda() const noexcept { return lambda_; }

private:
    HyperParams p_;
    double lambda_ = 0.0;
    double coef_regular_ = 0.0;
    double coef_singular_ = 0.0;
};

/// Piecewise-linear lookup table of 2F1 on equally spaced nodes of [0, 1].
///
/// Cells lying in [1/2, 1] interpolate the two regular connection parts and
/// re-attach the exact (1 - z)^lambda factor, so the Hoelder endpoint at z = 1
/// does not spoil the interpolation error. Cells below 1/2 interpolate the
/// function directly. Lookups at nodes return the node values.
class InterpolationTable {
public:
    InterpolationTable() = default;
    InterpolationTable(const HyperParams& p, std::size_t grid_size);

    const HyperParams& params() const noexcept { return p_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator()(double z) const noexcept { return (*this)(z, 1.0 - z); }

    /// Lookup with 1 - z supplied by the caller.
    double operator()(double z, double one_minus_z) const noexcept {
        const double pos = z > 0.0 ? z * step_inv_ : 0.0;
        std::size_t k = static_cast<std::size_t>(pos);
        if (k >= last_cell_) k = last_cell_;
        const double t = pos - static_cast<double>(k);
        if (k >= hybrid_cell_) {
            const std::size_t j = k - split_cell_;
            const double reg = regular_[j] + t * (regular_[j + 1] - regular_[j]);
            const double sing = singular_[j] + t * (singular_[j + 1] - singular_[j]);
            return reg + std::pow(one_minus_z, lambda_) * sing;
        }
        return values_[k] + t * (values_[k + 1] - values_[k]);
    }

    /// Interpolated connection parts; valid for z >= 1/2 when the table was
    /// built with split cells.
    ConnectionParts parts(double z) const noexcept {
        const double pos = z > 0.0 ? z * step_inv_ : 0.0;
        std::size_t k = static_cast<std::size_t>(pos);
        if (k >= last_cell_) k = last_cell_;
        if (k < split_cell_) k = split_cell_;
        const double t = pos - static_cast<double>(k);
        const std::size_t j = k - split_cell_;
        return {regular_[j] + t * (regular_[j + 1] - regular_[j]),
                singular_[j] + t * (singular_[j + 1] - singular_[j])};
    }

    bool has_parts() const noexcept { return !regular_.empty(); }
    double lambda() const noexcept { return lambda_; }

    /// Largest |lookup - direct| observed at the cell midpoints during
    /// construction.
    double max_deviation() const noexcept { return max_deviation_; }

private:
    HyperParams p_;
    double lambda_ = 0.0;
    double step_inv_ = 1.0;
    std::size_t last_cell_ = 0;
    std::size_t split_cell_ = 0;
    std::size_t hybrid_cell_ = 0;
    std::vector<double> values_;
    std::vector<double> regular_;
    std::vector<double> singular_;
    double max_deviation_ = 0.0;
};

/// Builds a lookup table with `grid_size` nodes (grid_size >= 2).
InterpolationTable hyp2f1_table(const HyperParams& p, std::size_t grid_size);

}  // namespace dmfbm
