#include "dmfbm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dmfbm/error.hpp"

namespace dmfbm {

namespace {

std::string fmt_pair(double a, double b) {
    std::ostringstream os;
    os << "(" << a << ", " << b << ")";
    return os.str();
}

// Sum over the geometric panels [2^k, 2^{k+1}] clipped to [1, R].
template <class F>
void geometric_panels(const QuadRule& unit, double R, F&& visit) {
    double a = 1.0;
    while (a < R) {
        const double b = std::min(2.0 * a, R);
        const double len = b - a;
        for (std::size_t k = 0; k < unit.size(); ++k) visit(a + len * unit.x[k], len * unit.w[k]);
        a = b;
    }
}

}  // namespace

HurstPair::HurstPair(double h1, double h2, HurstMode mode) : h1_(h1), h2_(h2), mode_(mode) {
    if (!(h1 > 0.5) || !(h2 > h1) || !(h2 < 1.0)) {
        throw DomainError("Hurst pair must satisfy 1/2 < H1 < H2 < 1, got " + fmt_pair(h1, h2));
    }
    if (mode == HurstMode::strict && h1 > 0.75) {
        throw DomainError("strict mode requires H1 <= 3/4, got H1 = " + std::to_string(h1) +
                          " (use relaxed mode to override)");
    }
}

HyperParams hyper_params(int k, const HurstPair& h) {
    const double h1 = h.H1();
    const double h2 = h.H2();
    switch (k) {
        case 1: return {2.0 - 2.0 * h2, 1.5 - h1, 3.0 - 2.0 * h1};
        case 2: return {1.0 + 2.0 * h2 - 2.0 * h1, 1.5 - h1, 4.0 - 2.0 * h1};
        case 3: return {h1 - 0.5, 1.5 - h1, 2.0 * h2 - h1 + 0.5};
        case 4: return {2.0 * h2 - 2.0 * h1 + 1.0, 2.0 * h2 - 1.0, 2.0 * h2 - h1 + 1.5};
        case 5: return {2.0 * h2 - 2.0 * h1, 2.0 * h2 - 1.0, 2.0 * h2 - h1 + 0.5};
        default: throw DomainError("F index must be in 1..5, got " + std::to_string(k));
    }
}

KernelConstants make_constants(const HurstPair& h) {
    const double h1 = h.H1();
    const double h2 = h.H2();
    const double al = h.alpha();
    const double ga = h.gamma();
    KernelConstants k;
    const double g32 = gamma_fn(1.5 - h1);
    k.c = gamma_fn(2.0 - 2.0 * h1) * std::cos(std::numbers::pi * (1.0 - h1)) * h2 * (2.0 * h2 - 1.0) /
          (std::numbers::pi * h1 * (2.0 * h1 - 1.0) * g32 * g32);
    const double b11 = beta_fn(1.5 - h1, 1.5 - h1);
    const double b3 = beta_fn(1.5 - h1, 2.0 * h2 - 1.0);
    k.D1 = 2.0 * (1.0 - h1) * b11;
    k.D2 = (1.0 - h2) * b11;
    k.D3 = 2.0 * (h2 - h1) * b3;
    k.D4 = (h1 - 0.5) * (1.5 - h1) / (2.0 * h2 - h1 + 0.5) * b3;
    k.D5 = (h1 - 0.5) * b3;

    const double f5_one = Hyp2F1(hyper_params(5, h)).at_one();
    const double f2_one = Hyp2F1(hyper_params(2, h)).at_one();
    k.Xi = (k.D3 + k.D5) - k.D5 * f5_one;
    k.B_const = (h1 - 0.5) * beta_fn(al, 1.0 - ga);
    k.C_const = (1.5 + h1 - 2.0 * h2) * beta_fn(1.5 - h1, 1.0 - ga);
    k.A_const = 2.0 * (h2 - h1) * k.D2 * f2_one * beta_fn(1.5 - h1, al);
    k.ell = k.C_const * k.Xi;

    const double rel = std::abs(k.A_const - (k.B_const + k.C_const) * k.Xi) / std::abs(k.A_const);
    if (!(rel <= 1e-8)) {
        std::ostringstream msg;
        msg << "diagonal constants inconsistent for H = " << fmt_pair(h1, h2) << ": |A - (B+C)Xi|/|A| = " << rel;
        throw ConsistencyError(msg.str());
    }
    return k;
}

double g_rhs(double u, const HurstPair& h, double T) {
    if (!(u > 0.0 && u < T)) throw DomainError("g_rhs: u must lie in (0, T), got u = " + std::to_string(u));
    const double h1 = h.H1();
    return std::pow(u * (T - u), 0.5 - h1) / (2.0 * h1 * beta_fn(1.5 - h1, h1 + 0.5));
}

KernelModel::KernelModel(const HurstPair& hurst, double T, const KernelOptions& opt)
    : hurst_(hurst), T_(T), opt_(opt), consts_(make_constants(hurst)) {
    if (!(T > 0.0)) throw DomainError("horizon T must be positive, got " + std::to_string(T));
    if (!(opt.eps_diag_rel > 0.0)) throw DomainError("eps_diag must be positive");
    if (opt.head_nodes < 2 || opt.panel_nodes < 2) throw DomainError("quadrature orders must be at least 2");
    eps_diag_ = opt.eps_diag_rel * T;

    direct_.reserve(5);
    for (int k = 1; k <= 5; ++k) direct_.emplace_back(hyper_params(k, hurst));
    if (opt.use_tables) {
        tables_.reserve(5);
        for (int k = 1; k <= 5; ++k) tables_.emplace_back(hyper_params(k, hurst), opt.table_size);
    }

    const double h1 = hurst.H1();
    const double al = hurst.alpha();
    head_sub_ = gauss_jacobi01(opt.head_nodes, 0.0, 0.5 - h1);
    for (std::size_t k = 0; k < head_sub_.size(); ++k) head_sub_.w[k] /= head_sub_.x[k];
    head_alpha_ = gauss_jacobi01(opt.head_nodes, 0.0, al - 1.0);
    legendre_ = gauss_legendre01(opt.head_nodes);
    panel_ = gauss_legendre01(opt.panel_nodes);
    jac_alpha_ = gauss_jacobi01(opt.head_nodes, al, 0.0);
    jac_alpha_m1_ = gauss_jacobi01(opt.head_nodes, al - 1.0, 0.0);
}

const InterpolationTable* KernelModel::table(int k) const {
    if (tables_.empty() || k < 1 || k > 5) return nullptr;
    return &tables_[static_cast<std::size_t>(k - 1)];
}

double KernelModel::F(int k, double z, double cz) const {
    // F3 and F4 take the complementary argument.
    const bool flip = (k == 3 || k == 4);
    const double w = flip ? cz : z;
    const double cw = flip ? z : cz;
    const auto i = static_cast<std::size_t>(k - 1);
    if (!tables_.empty()) return tables_[i](w, cw);
    return direct_[i](w, cw);
}

ConnectionParts KernelModel::parts(int k, double w, double cw) const {
    const auto i = static_cast<std::size_t>(k - 1);
    if (!tables_.empty()) return tables_[i].parts(w);
    return direct_[i].parts_at(cw);
}

PsiTerms KernelModel::psi_terms(double u, double s) const {
    const double h1 = hurst_.H1();
    const double h2 = hurst_.H2();
    const double z = u / s;
    const double cz = (s - u) / s;
    PsiTerms r;
    r.first = consts_.D1 * std::pow(u, 1.0 - 2.0 * h1) * std::pow(s, 2.0 * h2 - 2.0) * F(1, z, cz);
    r.second = consts_.D2 * std::pow(u, 2.0 - 2.0 * h1) * std::pow(s, h1 - 1.5) *
               std::pow(s - u, hurst_.alpha() - 1.0) * F(2, z, cz);
    return r;
}

RhoTerms KernelModel::rho_terms(double u, double s) const {
    const double h1 = hurst_.H1();
    const double h2 = hurst_.H2();
    const double al = hurst_.alpha();
    const double z = s / u;
    const double cz = (u - s) / u;
    const double d = u - s;
    RhoTerms r;
    r.r1 = std::pow(d, al - 1.0) * std::pow(u, -h1 - 0.5) * (consts_.D3 * u + consts_.D5 * s) * F(3, z, cz);
    r.r2 = consts_.D4 * std::pow(u, -2.0 * h2) * std::pow(s, al) * std::pow(d, al) * F(4, z, cz);
    r.r3 = -consts_.D5 * std::pow(u, 1.0 - 2.0 * h2) * std::pow(s, al) * std::pow(d, al - 1.0) * F(5, z, cz);
    return r;
}

std::pair<double, double> KernelModel::Phi12(double z) const {
    const double h1 = hurst_.H1();
    const double p = h1 + 0.5;
    const double al = hurst_.alpha();
    const double be = hurst_.beta();
    const double a = 1.0 - z;
    const double f1z = F(1, z, a);
    const double zf2z = z * F(2, z, a);

    double phi1 = 0.0;
    double phi2 = 0.0;

    // [0, 1/2]: integrands vanish linearly at y = 0.
    {
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t k = 0; k < head_sub_.size(); ++k) {
            const double y = 0.5 * head_sub_.x[k];
            const double zy = z + a * y;
            const double czy = a * (1.0 - y);
            s1 += head_sub_.w[k] * (f1z - F(1, zy, czy));
            s2 += head_sub_.w[k] * (zf2z - zy * std::pow(1.0 - y, al - 1.0) * F(2, zy, czy));
        }
        const double scale = std::pow(0.5, 0.5 - h1);
        phi1 += scale * s1;
        phi2 += scale * s2;
    }
    // [1/2, 1]: split F1, F2 into connection parts; the singular powers of
    // (1 - y) go into Jacobi weights.
    const double a_al = std::pow(a, al);
    const double a_be = std::pow(a, be);
    for (std::size_t k = 0; k < legendre_.size(); ++k) {
        const double y = 0.5 + 0.5 * legendre_.x[k];
        const double w = 0.5 * legendre_.w[k] * std::pow(y, -p);
        const double zy = z + a * y;
        const double czy = a * (1.0 - y);
        const ConnectionParts c1 = parts(1, zy, czy);
        const ConnectionParts c2 = parts(2, zy, czy);
        phi1 += w * (f1z - c1.regular);
        phi2 += w * (zf2z - zy * a_be * c2.singular_coef);
    }
    {
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t k = 0; k < jac_alpha_.size(); ++k) {
            const double y = 0.5 + 0.5 * jac_alpha_.x[k];
            const double zy = z + a * y;
            s1 += jac_alpha_.w[k] * std::pow(y, -p) * parts(1, zy, a * (1.0 - y)).singular_coef;
        }
        for (std::size_t k = 0; k < jac_alpha_m1_.size(); ++k) {
            const double y = 0.5 + 0.5 * jac_alpha_m1_.x[k];
            const double zy = z + a * y;
            s2 += jac_alpha_m1_.w[k] * std::pow(y, -p) * zy * parts(2, zy, a * (1.0 - y)).regular;
        }
        phi1 -= a_al * std::pow(0.5, al + 1.0) * s1;
        phi2 -= std::pow(0.5, al) * s2;
    }
    return {phi1, phi2};
}

Triple KernelModel::Psi(double z, double R) const {
    const double h1 = hurst_.H1();
    const double h2 = hurst_.H2();
    const double p = h1 + 0.5;
    const double al = hurst_.alpha();
    const double e1 = h1 - 0.5;
    const double e2 = 2.0 * h1 - 2.0 * h2 - 1.0;
    const double e3 = 2.0 * h1 - 2.0 * h2;
    const double a = 1.0 - z;
    const double D3 = consts_.D3;
    const double D5 = consts_.D5;

    const double f3z = (D3 + D5 * z) * F(3, z, a);
    const double f4z = F(4, z, a);
    const double f5z = F(5, z, a);

    auto diffs = [&](double x, Triple& d) {
        const double l1 = std::log1p(x);
        const double la = std::log1p(a * x);
        const double q = 1.0 + a * x;
        const double zx = z / q;
        const double czx = a * (1.0 + x) / q;
        d[0] = f3z - std::exp((al - 1.0) * l1 + e1 * la) * (D3 + D5 * zx) * F(3, zx, czx);
        d[1] = f4z - std::exp(al * l1 + e2 * la) * F(4, zx, czx);
        d[2] = f5z - std::exp((al - 1.0) * l1 + e3 * la) * F(5, zx, czx);
    };

    Triple acc{0.0, 0.0, 0.0};
    Triple d{};
    const double r = std::min(1.0, R);
    const double head_scale = std::pow(r, 0.5 - h1);
    for (std::size_t k = 0; k < head_sub_.size(); ++k) {
        diffs(r * head_sub_.x[k], d);
        const double w = head_scale * head_sub_.w[k];
        for (int j = 0; j < 3; ++j) acc[j] += w * d[j];
    }
    geometric_panels(panel_, R, [&](double x, double w) {
        diffs(x, d);
        const double wx = w * std::pow(x, -p);
        for (int j = 0; j < 3; ++j) acc[j] += wx * d[j];
    });
    const double zal = std::pow(z, al);
    return {acc[0], consts_.D4 * zal * a * acc[1], -D5 * zal * acc[2]};
}

Triple KernelModel::Lambda(double z, double R) const {
    const double h1 = hurst_.H1();
    const double h2 = hurst_.H2();
    const double p = h1 + 0.5;
    const double al = hurst_.alpha();
    const double be = hurst_.beta();
    const double e1 = h1 - 1.5;
    const double e2 = 2.0 * h1 - 2.0 * h2 - 1.0;
    const double e3 = 2.0 * h1 - 2.0 * h2;
    const double a = 1.0 - z;
    const double D3 = consts_.D3;
    const double D4 = consts_.D4;
    const double D5 = consts_.D5;

    // Integrands without the x^{alpha - 1} factor. With split = true the F5
    // factor is replaced by its regular connection part.
    auto integrands = [&](double x, bool split, Triple& f) {
        const double l1 = std::log1p(x);
        const double la = std::log1p(a * x);
        const double q = 1.0 + a * x;
        const double yx = 1.0 / q;
        const double cyx = a * x / q;
        const double base = -p * l1;
        f[0] = std::exp(base + e1 * la) * ((D3 + D5) + D3 * a * x) * F(3, yx, cyx);
        f[1] = D4 * a * x * std::exp(base + e2 * la) * F(4, yx, cyx);
        const double f5 = split ? parts(5, yx, cyx).regular : F(5, yx, cyx);
        f[2] = -D5 * std::exp(base + e3 * la) * f5;
    };

    Triple acc{0.0, 0.0, 0.0};
    Triple f{};
    const double r = std::min(1.0, R);
    const double head_scale = std::pow(r, al);
    for (std::size_t k = 0; k < head_alpha_.size(); ++k) {
        integrands(r * head_alpha_.x[k], true, f);
        const double w = head_scale * head_alpha_.w[k];
        for (int j = 0; j < 3; ++j) acc[j] += w * f[j];
    }
    // Singular part of F5: x^{alpha-1} (1 - y_x)^beta is smooth.
    const double a_be = std::pow(a, be);
    for (std::size_t k = 0; k < legendre_.size(); ++k) {
        const double x = r * legendre_.x[k];
        const double q = 1.0 + a * x;
        const double yx = 1.0 / q;
        const double sing = parts(5, yx, a * x / q).singular_coef;
        acc[2] += r * legendre_.w[k] * (-D5) * a_be * std::exp(-p * std::log1p(x) + (e3 - be) * std::log1p(a * x)) * sing;
    }
    geometric_panels(panel_, R, [&](double x, double w) {
        integrands(x, false, f);
        const double wx = w * std::pow(x, al - 1.0);
        for (int j = 0; j < 3; ++j) acc[j] += wx * f[j];
    });
    return acc;
}

double KernelModel::L_minus(double u, double s) const {
    const double h1 = hurst_.H1();
    const double al = hurst_.alpha();
    const double z = s / u;
    const double a = (u - s) / u;
    const double R = (T_ - u) / (u - s);
    const double zal = std::pow(z, al);
    const double bracket = (consts_.D3 + consts_.D5 * z) * F(3, z, a) + consts_.D4 * zal * a * F(4, z, a) -
                           consts_.D5 * zal * F(5, z, a);
    const Triple psi = Psi(z, R);
    return std::pow(T_ - u, 0.5 - h1) * std::pow(u - s, h1 - 0.5) * bracket +
           (h1 - 0.5) * (psi[0] + psi[1] + psi[2]);
}

double KernelModel::L_plus(double u, double s) const {
    const double h1 = hurst_.H1();
    const double h2 = hurst_.H2();
    const double q = h1 - 0.5;
    const double z = u / s;
    const double a = (s - u) / s;
    const double R = (T_ - s) / (s - u);
    const auto [phi1, phi2] = Phi12(z);
    const Triple lam = Lambda(z, R);
    const double zq = std::pow(z, 0.5 - h1);
    return consts_.D1 * std::pow(u, 0.5 - h1) * std::pow(s, 2.0 * h2 - 2.0) * std::pow(s - u, hurst_.beta()) *
               (F(1, z, a) + q * phi1) +
           consts_.D2 * std::pow(z, 1.5 - h1) * F(2, z, a) + q * consts_.D2 * zq * phi2 -
           q * zq * (lam[0] + lam[1] + lam[2]);
}

double KernelModel::L(double u, double s) const {
    if (!(u > 0.0 && u < T_ && s > 0.0 && s < T_)) {
        throw DomainError("L(u, s) requires u, s in (0, T), got " + fmt_pair(u, s));
    }
    if (std::abs(u - s) <= eps_diag_) return consts_.ell;
    return s < u ? L_minus(u, s) : L_plus(u, s);
}

double eval_F(int k, const KernelModel& m, double z) {
    if (k < 1 || k > 5) throw DomainError("F index must be in 1..5, got " + std::to_string(k));
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("eval_F: z outside [0, 1]: " + std::to_string(z));
    return m.F(k, z);
}

double eval_psi(const KernelModel& m, double u, double s) {
    if (!(0.0 < u && u < s && s < m.T())) throw DomainError("eval_psi requires 0 < u < s < T, got " + fmt_pair(u, s));
    return m.psi_terms(u, s).total();
}

double eval_rho(const KernelModel& m, double u, double s) {
    if (!(0.0 < s && s < u && u < m.T())) throw DomainError("eval_rho requires 0 < s < u < T, got " + fmt_pair(u, s));
    return m.rho_terms(u, s).total();
}

std::pair<double, double> eval_Phi12(const KernelModel& m, double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("eval_Phi12: z outside [0, 1]: " + std::to_string(z));
    return m.Phi12(z);
}

Triple eval_Psi(const KernelModel& m, double z, double R) {
    if (!(z > 0.0 && z < 1.0) || !(R > 0.0)) throw DomainError("eval_Psi requires z in (0,1), R > 0, got " + fmt_pair(z, R));
    return m.Psi(z, R);
}

Triple eval_Lambda(const KernelModel& m, double z, double R) {
    if (!(z > 0.0 && z < 1.0) || !(R > 0.0)) {
        throw DomainError("eval_Lambda requires z in (0,1), R > 0, got " + fmt_pair(z, R));
    }
    return m.Lambda(z, R);
}

double eval_L(const KernelModel& m, double u, double s) { return m.L(u, s); }

double eval_K(const KernelModel& m, double u, double s) {
    if (u == s) throw DomainError("eval_K is singular on the diagonal");
    return std::pow(std::abs(u - s), m.hurst().gamma() - 1.0) * m.L(u, s);
}

double eval_L_truncated(const KernelModel& m, std::size_t n, double u, double s) {
    const double T = m.T();
    const double lo = 1.0 / static_cast<double>(n);
    const double hi = T - lo;
    if (n < 2 || !(lo <= hi)) throw DomainError("truncation n too small for horizon T");
    if (!(u >= 0.0 && u <= T && s >= 0.0 && s <= T)) {
        throw DomainError("truncated kernel requires u, s in [0, T], got " + fmt_pair(u, s));
    }
    return m.L(std::clamp(u, lo, hi), std::clamp(s, lo, hi));
}

double eval_K_truncated(const KernelModel& m, std::size_t n, double u, double s) {
    const double l = eval_L_truncated(m, n, u, s);
    if (u == s) return std::copysign(std::numeric_limits<double>::infinity(), l);
    return std::pow(std::abs(u - s), m.hurst().gamma() - 1.0) * l;
}

double tilde_weight(const KernelModel& m, double u) {
    return std::pow(u * (m.T() - u), m.hurst().H1() - 0.5);
}

double tilde_kernel(const KernelModel& m, double u, double s) {
    return m.L(u, s) * tilde_weight(m, u) / tilde_weight(m, s);
}

double tilde_rhs(const KernelModel& m) {
    const double h1 = m.hurst().H1();
    return 1.0 / (2.0 * h1 * beta_fn(1.5 - h1, h1 + 0.5));
}

}  // namespace dmfbm
