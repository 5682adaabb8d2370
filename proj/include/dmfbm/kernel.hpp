#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "dmfbm/quadrature.hpp"
#include "dmfbm/specfun.hpp"

namespace dmfbm {

enum class HurstMode { strict, relaxed };

/// Validated pair 1/2 < H1 < H2 < 1. Strict mode also requires H1 <= 3/4.
class HurstPair {
public:
    HurstPair(double h1, double h2, HurstMode mode = HurstMode::relaxed);

    double H1() const noexcept { return h1_; }
    double H2() const noexcept { return h2_; }
    HurstMode mode() const noexcept { return mode_; }
    bool is_strict_admissible() const noexcept { return h1_ <= 0.75; }

    double alpha() const noexcept { return 2.0 * h2_ - h1_ - 0.5; }
    double beta() const noexcept { return 1.5 - 2.0 * h2_ + h1_; }
    double gamma() const noexcept { return 2.0 * h2_ - 2.0 * h1_; }

private:
    double h1_;
    double h2_;
    HurstMode mode_;
};

struct KernelConstants {
    double c = 0.0;
    double D1 = 0.0, D2 = 0.0, D3 = 0.0, D4 = 0.0, D5 = 0.0;
    double ell = 0.0;
    double Xi = 0.0;
    double A_const = 0.0;
    double B_const = 0.0;
    double C_const = 0.0;
};

/// Closed-form constants; throws ConsistencyError when A and (B + C) Xi
/// disagree beyond 1e-8 relative.
KernelConstants make_constants(const HurstPair& h);

/// Parameter triple of F_k, k = 1..5 (F3, F4 are evaluated at 1 - z).
HyperParams hyper_params(int k, const HurstPair& h);

/// Right-hand side g_T(u) for 0 < u < T.
double g_rhs(double u, const HurstPair& h, double T);

struct KernelOptions {
    bool use_tables = true;
    std::size_t table_size = 100000;
    double eps_diag_rel = 1e-8;  // band half-width as a fraction of T
    std::size_t head_nodes = 16;
    std::size_t panel_nodes = 8;
};

struct PsiTerms {
    double first = 0.0;   // D1 term
    double second = 0.0;  // D2 term
    double total() const noexcept { return first + second; }
};

struct RhoTerms {
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    double phi() const noexcept { return r1 + r2; }
    double tau() const noexcept { return r3; }
    double total() const noexcept { return r1 + r2 + r3; }
};

using Triple = std::array<double, 3>;

/// Immutable evaluator bundle for the kernel and all of its pieces.
class KernelModel {
public:
    KernelModel(const HurstPair& hurst, double T, const KernelOptions& opt = {});

    const HurstPair& hurst() const noexcept { return hurst_; }
    double T() const noexcept { return T_; }
    const KernelConstants& consts() const noexcept { return consts_; }
    double eps_diag() const noexcept { return eps_diag_; }
    bool uses_tables() const noexcept { return !tables_.empty(); }
    const KernelOptions& options() const noexcept { return opt_; }
    const InterpolationTable* table(int k) const;

    /// F_k at kernel argument z; cz = 1 - z supplied exactly by the caller.
    double F(int k, double z, double cz) const;
    double F(int k, double z) const { return F(k, z, 1.0 - z); }

    PsiTerms psi_terms(double u, double s) const;
    RhoTerms rho_terms(double u, double s) const;
    std::pair<double, double> Phi12(double z) const;
    Triple Psi(double z, double R) const;
    Triple Lambda(double z, double R) const;

    /// L without the diagonal band (u != s required).
    double L_minus(double u, double s) const;
    double L_plus(double u, double s) const;
    double L(double u, double s) const;

private:
    // Connection parts of F_k at its own hypergeometric argument w >= 1/2,
    // where cw = 1 - w.
    ConnectionParts parts(int k, double w, double cw) const;

    HurstPair hurst_;
    double T_;
    KernelOptions opt_;
    KernelConstants consts_;
    double eps_diag_;
    std::vector<Hyp2F1> direct_;
    std::vector<InterpolationTable> tables_;

    // Unit rules: head y^{1/2-H1} (weights divided by y), head x^{alpha-1},
    // plain Legendre, and (1-y)^alpha, (1-y)^{alpha-1} on [0, 1].
    QuadRule head_sub_;
    QuadRule head_alpha_;
    QuadRule legendre_;
    QuadRule panel_;
    QuadRule jac_alpha_;
    QuadRule jac_alpha_m1_;
};

double eval_F(int k, const KernelModel& m, double z);
double eval_psi(const KernelModel& m, double u, double s);
double eval_rho(const KernelModel& m, double u, double s);
std::pair<double, double> eval_Phi12(const KernelModel& m, double z);
Triple eval_Psi(const KernelModel& m, double z, double R);
Triple eval_Lambda(const KernelModel& m, double z, double R);
double eval_L(const KernelModel& m, double u, double s);
double eval_K(const KernelModel& m, double u, double s);

/// Clamps both coordinates of L into [1/n, T - 1/n]; the singular factor
/// |u - s|^{gamma - 1} uses the original coordinates.
double eval_L_truncated(const KernelModel& m, std::size_t n, double u, double s);
double eval_K_truncated(const KernelModel& m, std::size_t n, double u, double s);

/// Kernel and constant right-hand side of the equation for
/// h(u) [u (T - u)]^{H1 - 1/2}.
double tilde_kernel(const KernelModel& m, double u, double s);
double tilde_rhs(const KernelModel& m);
double tilde_weight(const KernelModel& m, double u);

}  // namespace dmfbm
