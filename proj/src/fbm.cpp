#include "dmfbm/fbm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>

#include "dmfbm/error.hpp"
#include "json.hpp"

namespace dmfbm {

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// Autocovariance of unit-step fractional Gaussian noise.
double fgn_cov(double H, std::size_t k) {
    const double dk = static_cast<double>(k);
    const double e = 2.0 * H;
    if (k == 0) return 1.0;
    return 0.5 * (std::pow(dk + 1.0, e) - 2.0 * std::pow(dk, e) + std::pow(dk - 1.0, e));
}

// Forward DFT of length m.
std::vector<std::complex<double>> dft(std::vector<std::complex<double>> in) {
    const int m = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(in.size());
    auto* pin = reinterpret_cast<fftw_complex*>(in.data());
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_mutex());
        plan = fftw_plan_dft_1d(m, pin, pout, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::mt19937_64 make_engine(const RngSpec& rng) {
    std::seed_seq seq{static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32),
                      static_cast<std::uint32_t>(rng.stream), static_cast<std::uint32_t>(rng.stream >> 32)};
    return std::mt19937_64(seq);
}

constexpr double kNegativeEigTol = 1e-10;

}  // namespace

const char* to_string(FbmMethod m) { return m == FbmMethod::cholesky ? "cholesky" : "circulant"; }

FbmGenerator::FbmGenerator(double H, const Grid& grid, bool force_cholesky) : H_(H), grid_(grid) {
    if (!(H > 0.0 && H < 1.0)) throw DomainError("fBm Hurst index must lie in (0, 1), got " + std::to_string(H));
    if (grid.N < 1 || grid.nodes.size() != grid.N + 1) throw DomainError("fBm grid is malformed");
    const std::size_t M = grid.N;

    if (!force_cholesky) {
        const std::size_t m = 2 * M;
        std::vector<std::complex<double>> row(m);
        for (std::size_t k = 0; k <= M; ++k) row[k] = fgn_cov(H, k);
        for (std::size_t k = M + 1; k < m; ++k) row[k] = fgn_cov(H, m - k);
        const auto eig = dft(std::move(row));
        double max_eig = 0.0;
        double min_eig = 0.0;
        for (const auto& e : eig) {
            max_eig = std::max(max_eig, e.real());
            min_eig = std::min(min_eig, e.real());
        }
        if (min_eig >= -kNegativeEigTol * max_eig) {
            sqrt_eig_.resize(m);
            for (std::size_t k = 0; k < m; ++k) {
                sqrt_eig_[k] = std::sqrt(std::max(eig[k].real(), 0.0) / static_cast<double>(m));
            }
            method_ = FbmMethod::circulant;
            return;
        }
    }

    const auto n = static_cast<Eigen::Index>(M);
    Eigen::MatrixXd C(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) C(i, j) = fgn_cov(H, static_cast<std::size_t>(std::abs(i - j)));
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) {
        throw EmbeddingError("circulant embedding has negative eigenvalues and Cholesky factorization failed");
    }
    chol_ = llt.matrixL();
    method_ = FbmMethod::cholesky;
}

std::vector<double> FbmGenerator::sample(const RngSpec& rng) const {
    const std::size_t M = grid_.N;
    auto eng = make_engine(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> inc(M);

    if (method_ == FbmMethod::circulant) {
        const std::size_t m = sqrt_eig_.size();
        std::vector<std::complex<double>> w(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double a = normal(eng);
            const double b = normal(eng);
            w[k] = sqrt_eig_[k] * std::complex<double>(a, b);
        }
        const auto y = dft(std::move(w));
        for (std::size_t k = 0; k < M; ++k) inc[k] = y[k].real();
    } else {
        Eigen::VectorXd z(static_cast<Eigen::Index>(M));
        for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(eng);
        const Eigen::VectorXd x = chol_ * z;
        for (std::size_t k = 0; k < M; ++k) inc[k] = x(static_cast<Eigen::Index>(k));
    }

    // Self-similarity: increments over steps of length delta scale by delta^H.
    const double scale = std::pow(grid_.delta(), H_);
    std::vector<double> path(M + 1, 0.0);
    for (std::size_t k = 0; k < M; ++k) path[k + 1] = path[k] + scale * inc[k];
    return path;
}

std::vector<double> fbm_sample(double H, const Grid& grid, const RngSpec& rng) {
    return FbmGenerator(H, grid).sample(rng);
}

MixedPathGenerator::MixedPathGenerator(const HurstPair& hurst, const Grid& grid)
    : hurst_(hurst), g1_(hurst.H1(), grid), g2_(hurst.H2(), grid) {}

MixedPath MixedPathGenerator::sample(double theta, const RngSpec& rng) const {
    const auto b1 = g1_.sample({rng.seed, 2 * rng.stream});
    const auto b2 = g2_.sample({rng.seed, 2 * rng.stream + 1});
    MixedPath p;
    p.grid = g1_.grid();
    p.theta = theta;
    p.H1 = hurst_.H1();
    p.H2 = hurst_.H2();
    p.rng = rng;
    p.method = (g1_.method() == FbmMethod::cholesky || g2_.method() == FbmMethod::cholesky) ? FbmMethod::cholesky
                                                                                             : FbmMethod::circulant;
    p.values.resize(b1.size());
    for (std::size_t j = 0; j < b1.size(); ++j) p.values[j] = theta * p.grid.nodes[j] + b1[j] + b2[j];
    p.values[0] = 0.0;
    return p;
}

MixedPath mixed_path(double theta, const HurstPair& hurst, const Grid& grid, const RngSpec& rng) {
    return MixedPathGenerator(hurst, grid).sample(theta, rng);
}

void write_path_csv(std::ostream& os, const MixedPath& path) {
    os << "t,X\n" << std::setprecision(17);
    for (std::size_t j = 0; j < path.values.size(); ++j) os << path.grid.nodes[j] << ',' << path.values[j] << '\n';
}

std::string path_metadata_json(const MixedPath& path) {
    nlohmann::json j;
    j["theta"] = path.theta;
    j["H1"] = path.H1;
    j["H2"] = path.H2;
    j["T"] = path.grid.T;
    j["N"] = path.grid.N;
    j["seed"] = path.rng.seed;
    j["stream"] = path.rng.stream;
    j["method"] = to_string(path.method);
    return j.dump(2);
}

}  // namespace dmfbm
