// Exact Gaussian sampling of mixed fBm on dyadic grids via dense Cholesky
// factors, with deterministic per-(seed, path, component) streams.
#pragma once

#include "fdb/covariance.hpp"
#include "fdb/grid_path.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace fdb {

// splitmix64: derives independent sub-stream seeds from (seed, indices).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Self-contained standard-normal stream (Box-Muller over mt19937_64), so
// outputs do not depend on the standard library's distribution internals.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    double operator()();
    Eigen::VectorXd vector(int n);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Cholesky factors of the per-component fBm covariance on the grid times
// t_1..t_N (t_0 = 0 excluded; w_0 = 0).
class FbmSampler {
public:
    FbmSampler(const CovarianceModel& model, int level);

    // Path `index` of the ensemble keyed by (seed, index): reproducible and
    // independent across indices and components.
    GridPath sample(std::uint64_t seed, std::uint64_t index) const;

    std::vector<GridPath> sample_ensemble(std::uint64_t seed, int n_paths,
                                          int threads = 1) const;

    const CovarianceModel& model() const { return model_; }
    int level() const { return level_; }

private:
    CovarianceModel model_;
    int level_;
    std::vector<Eigen::MatrixXd> chol_;  // per component, N x N lower factor
};

std::vector<GridPath> sample_fbm(const CovarianceModel& model, int level, int n_paths,
                                 std::uint64_t seed, int threads = 1);

}  // namespace fdb
