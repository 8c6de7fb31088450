#include "fdb/sampling.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace fdb {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ b);
}

double GaussianStream::operator()() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 kept away from 0.
    const double inv = 1.0 / (double)(std::mt19937_64::max() + 1.0);
    double u1 = 0.0;
    do {
        u1 = (engine_() + 0.5) * inv;
    } while (u1 <= 0.0);
    double u2 = (engine_() + 0.5) * inv;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Eigen::VectorXd GaussianStream::vector(int n) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = (*this)();
    return z;
}

FbmSampler::FbmSampler(const CovarianceModel& model, int level)
    : model_(model), level_(level) {
    const int n = 1 << level;
    if (n > (1 << 14))
        throw std::invalid_argument("FbmSampler: grid too large for dense factorization (max 2^14)");
    Eigen::VectorXd times(n);
    for (int i = 0; i < n; ++i) times[i] = model.horizon * (i + 1) / n;
    for (int j = 0; j < model.dim(); ++j) {
        Eigen::MatrixXd sigma = covariance_matrix(model, j, times);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("FbmSampler: covariance factorization failed at H = "
                                     + std::to_string(model.hurst[j]));
        chol_.push_back(llt.matrixL());
    }
}

GridPath FbmSampler::sample(std::uint64_t seed, std::uint64_t index) const {
    const int n = 1 << level_;
    GridPath path(model_.dim(), model_.horizon, level_);
    for (int j = 0; j < model_.dim(); ++j) {
        GaussianStream stream(derive_seed(seed, index, (std::uint64_t)j + 1));
        Eigen::VectorXd w = chol_[j] * stream.vector(n);
        for (int i = 0; i < n; ++i) path.values(i + 1, j) = w[i];
    }
    return path;
}

std::vector<GridPath> FbmSampler::sample_ensemble(std::uint64_t seed, int n_paths,
                                                  int threads) const {
    std::vector<GridPath> out((size_t)n_paths);
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) out[i] = sample(seed, (std::uint64_t)i);
    };
    if (threads <= 1 || n_paths < 2 * threads) {
        work(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n_paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            int lo = t * chunk, hi = std::min(n_paths, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<GridPath> sample_fbm(const CovarianceModel& model, int level, int n_paths,
                                 std::uint64_t seed, int threads) {
    return FbmSampler(model, level).sample_ensemble(seed, n_paths, threads);
}

}  // namespace fdb
