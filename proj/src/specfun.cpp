#include "dmfbm/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dmfbm/error.hpp"

namespace dmfbm {

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

// Valid for x >= 1/2.
double lanczos_gamma(double x) {
    x -= 1.0;
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (x + static_cast<double>(i));
    const double t = x + kLanczosG + 0.5;
    // t^(x+1/2) split in two halves keeps the intermediate finite up to x ~ 170.
    const double half_pow = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) * acc;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

constexpr double kSeriesTol = 1e-16;
constexpr int kSeriesCap = 100000;

double series(double a, double b, double c, double z) {
    if (z == 0.0) return 1.0;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < kSeriesCap; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= kSeriesTol * std::abs(sum)) return sum;
    }
    std::ostringstream msg;
    msg << "2F1 series did not converge: a=" << a << " b=" << b << " c=" << c << " z=" << z;
    throw ConvergenceError(msg.str());
}

void validate(const HyperParams& p) {
    if (!(p.b > 0.0) || !(p.c > p.b) || !std::isfinite(p.a)) {
        std::ostringstream msg;
        msg << "2F1 requires c > b > 0 (got a=" << p.a << " b=" << p.b << " c=" << p.c << ")";
        throw DomainError(msg.str());
    }
}

bool connection_degenerate(double lambda) {
    return std::abs(lambda - std::nearbyint(lambda)) < 1e-9;
}

}  // namespace

namespace detail {

double gamma_signed(double x) {
    if (x >= 0.5) return lanczos_gamma(x);
    if (is_nonpositive_integer(x)) return std::numeric_limits<double>::infinity();
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / gamma_signed(x);
}

}  // namespace detail

double gamma_fn(double x) {
    if (!(x > 0.0)) {
        std::ostringstream msg;
        msg << "gamma_fn: argument must be positive, got " << x;
        throw DomainError(msg.str());
    }
    return lanczos_gamma(x);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        std::ostringstream msg;
        msg << "beta_fn: arguments must be positive, got (" << a << ", " << b << ")";
        throw DomainError(msg.str());
    }
    return lanczos_gamma(a) * lanczos_gamma(b) / lanczos_gamma(a + b);
}

Hyp2F1::Hyp2F1(const HyperParams& p) : p_(p), lambda_(p.lambda()) {
    validate(p);
    if (!connection_degenerate(lambda_)) {
        using detail::gamma_signed;
        using detail::rgamma;
        const double gc = gamma_signed(p.c);
        coef_regular_ = gc * gamma_signed(lambda_) * rgamma(p.c - p.a) * rgamma(p.c - p.b);
        coef_singular_ = gc * gamma_signed(-lambda_) * rgamma(p.a) * rgamma(p.b);
    }
}

double Hyp2F1::operator()(double z) const { return (*this)(z, 1.0 - z); }

double Hyp2F1::operator()(double z, double one_minus_z) const {
    if (!(z >= 0.0 && z <= 1.0)) {
        std::ostringstream msg;
        msg << "2F1 argument outside [0, 1]: " << z;
        throw DomainError(msg.str());
    }
    if (z <= 0.5) return series(p_.a, p_.b, p_.c, z);
    if (z == 1.0 || one_minus_z <= 0.0) return at_one();
    // Logarithmic case: no usable connection formula, sum the series directly.
    if (connection_degenerate(lambda_)) return series(p_.a, p_.b, p_.c, z);
    const ConnectionParts cp = parts_at(one_minus_z);
    return cp.regular + std::pow(one_minus_z, lambda_) * cp.singular_coef;
}

double Hyp2F1::at_one() const {
    if (!(lambda_ > 0.0)) {
        std::ostringstream msg;
        msg << "2F1 diverges at z = 1 when c - a - b <= 0 (got " << lambda_ << ")";
        throw DomainError(msg.str());
    }
    if (connection_degenerate(lambda_)) {
        return gamma_fn(p_.c) * gamma_fn(lambda_) * detail::rgamma(p_.c - p_.a) * detail::rgamma(p_.c - p_.b);
    }
    return coef_regular_;
}

ConnectionParts Hyp2F1::parts(double z) const { return parts_at(1.0 - z); }

ConnectionParts Hyp2F1::parts_at(double w) const {
    if (connection_degenerate(lambda_)) {
        throw DomainError("2F1 connection formula is degenerate for integer c - a - b");
    }
    return {coef_regular_ * series(p_.a, p_.b, 1.0 - lambda_, w),
            coef_singular_ * series(p_.c - p_.a, p_.c - p_.b, 1.0 + lambda_, w)};
}

double hyp2f1(const HyperParams& p, double z) { return Hyp2F1(p)(z); }

InterpolationTable::InterpolationTable(const HyperParams& p, std::size_t grid_size)
    : p_(p), lambda_(p.lambda()) {
    if (grid_size < 2) throw DomainError("hyp2f1_table: grid_size must be at least 2");
    const Hyp2F1 f(p);
    const std::size_t cells = grid_size - 1;
    const double h = 1.0 / static_cast<double>(cells);
    step_inv_ = static_cast<double>(cells);
    last_cell_ = cells - 1;

    values_.resize(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k) {
        values_[k] = f(k == cells ? 1.0 : static_cast<double>(k) * h);
    }

    // Connection parts are stored from z = 1/2 on. Lookups switch to them
    // only from hybrid_cell_, where plain linear interpolation stops meeting
    // kLinearTolerance.
    constexpr double kLinearTolerance = 1e-10;
    split_cell_ = (cells + 1) / 2;
    hybrid_cell_ = cells + 1;
    const bool split = split_cell_ <= last_cell_ && !connection_degenerate(lambda_) && lambda_ > 0.0;
    if (!split) split_cell_ = cells + 1;
    if (split) {
        for (std::size_t k = split_cell_; k < cells; ++k) {
            const double zm = (static_cast<double>(k) + 0.5) * h;
            const double linear = 0.5 * (values_[k] + values_[k + 1]);
            if (std::abs(linear - f(zm)) > kLinearTolerance) {
                hybrid_cell_ = k;
                break;
            }
        }

        regular_.resize(grid_size - split_cell_);
        singular_.resize(grid_size - split_cell_);
        for (std::size_t k = split_cell_; k < grid_size; ++k) {
            const double z = k == cells ? 1.0 : static_cast<double>(k) * h;
            const ConnectionParts cp = f.parts(z);
            regular_[k - split_cell_] = cp.regular;
            singular_[k - split_cell_] = cp.singular_coef;
        }
    }

    for (std::size_t k = 0; k < cells; ++k) {
        const double zm = (static_cast<double>(k) + 0.5) * h;
        max_deviation_ = std::max(max_deviation_, std::abs((*this)(zm) - f(zm)));
    }
}

InterpolationTable hyp2f1_table(const HyperParams& p, std::size_t grid_size) {
    return InterpolationTable(p, grid_size);
}

}  // namespace dmfbm
