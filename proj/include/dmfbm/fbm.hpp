#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmfbm/fredholm.hpp"
#include "dmfbm/kernel.hpp"

namespace dmfbm {

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

enum class FbmMethod { circulant, cholesky };

const char* to_string(FbmMethod m);

/// Exact-covariance sampler of fBm on a uniform grid. The spectrum (or the
/// Cholesky factor) is computed once; sample() is const and reentrant.
class FbmGenerator {
public:
    FbmGenerator(double H, const Grid& grid, bool force_cholesky = false);

    double H() const noexcept { return H_; }
    FbmMethod method() const noexcept { return method_; }
    const Grid& grid() const noexcept { return grid_; }

    /// Path values B(t_j), j = 0..N, with B(0) = 0.
    std::vector<double> sample(const RngSpec& rng) const;

private:
    double H_;
    Grid grid_;
    FbmMethod method_ = FbmMethod::circulant;
    std::vector<double> sqrt_eig_;  // circulant: sqrt(lambda_k / m)
    Eigen::MatrixXd chol_;          // fallback: lower factor of the increment covariance
};

std::vector<double> fbm_sample(double H, const Grid& grid, const RngSpec& rng);

struct MixedPath {
    Grid grid;
    std::vector<double> values;
    double theta = 0.0;
    double H1 = 0.0;
    double H2 = 0.0;
    RngSpec rng;
    FbmMethod method = FbmMethod::circulant;
};

/// Generator pair for X_t = theta t + B^{H1}_t + B^{H2}_t.
class MixedPathGenerator {
public:
    MixedPathGenerator(const HurstPair& hurst, const Grid& grid);

    /// Components use streams 2 * stream and 2 * stream + 1 of rng.seed.
    MixedPath sample(double theta, const RngSpec& rng) const;

private:
    HurstPair hurst_;
    FbmGenerator g1_;
    FbmGenerator g2_;
};

MixedPath mixed_path(double theta, const HurstPair& hurst, const Grid& grid, const RngSpec& rng);

void write_path_csv(std::ostream& os, const MixedPath& path);
std::string path_metadata_json(const MixedPath& path);

}  // namespace dmfbm
