#include "fdb/lift.hpp"

#include "fdb/errors.hpp"

#include <cmath>

namespace fdb {

namespace {

void fit_record(LiftRecord& rec) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rec.distances.size(); ++i) {
        if (rec.distances[i] > 1e-15) {
            xs.push_back((double)rec.levels[i]);
            ys.push_back(std::log(rec.distances[i]));
        }
    }
    rec.exact = xs.empty() && !rec.distances.empty();
    if (xs.size() >= 3) {
        LinearFit f = linear_fit(xs, ys);
        rec.c_hat = std::exp(f.intercept);
        rec.kappa_hat = std::exp(f.slope);
        rec.fit_r2 = f.r2;
        rec.fit_valid = true;
    }
}

}  // namespace

LiftRecord canonical_lift(const GridPath& w, const CanonicalLiftOptions& opts) {
    if (opts.tol < 0.0) throw std::invalid_argument("canonical_lift: tol must be >= 0");
    if (opts.start_level >= w.level)
        throw std::invalid_argument("canonical_lift: start level must be below the grid level");
    LiftRecord rec;
    int reached = w.level;
    for (int l = opts.start_level; l < w.level; ++l) {
        // both approximants on their common grid of 2^(l+1) intervals
        RoughPathGrid coarse = lift_dyadic(w, l, opts.degree, l + 1);
        RoughPathGrid fine = lift_dyadic(w, l + 1, opts.degree, l + 1);
        auto pairs = PairSet::ladder(fine.intervals());
        std::vector<double> per_level = level_distances(coarse, fine, opts.mode, pairs);
        double d = 0.0;
        for (int i = 1; i <= opts.degree; ++i) d += per_level[i];
        rec.levels.push_back(l);
        rec.distances.push_back(d);
        if (d < opts.tol) {
            rec.converged = true;
            reached = l + 1;
            break;
        }
    }
    rec.final_level = reached;
    if (opts.keep_final) rec.final = lift_dyadic(w, reached, opts.degree, reached);
    fit_record(rec);
    return rec;
}

CauchyRateEstimate cauchy_rate_estimate(const std::vector<LiftRecord>& ensemble, double q) {
    if (ensemble.empty()) throw std::invalid_argument("cauchy_rate_estimate: empty ensemble");
    size_t n_levels = ensemble.front().distances.size();
    for (const auto& r : ensemble)
        n_levels = std::min(n_levels, r.distances.size());
    if (n_levels < 3)
        throw std::invalid_argument("cauchy_rate_estimate: need at least 3 common levels");
    CauchyRateEstimate est;
    std::vector<double> xs, ys;
    for (size_t i = 0; i < n_levels; ++i) {
        double acc = 0.0;
        for (const auto& r : ensemble) acc += std::pow(r.distances[i], q);
        double pooled = std::pow(acc / ensemble.size(), 1.0 / q);
        est.levels.push_back(ensemble.front().levels[i]);
        est.pooled.push_back(pooled);
        xs.push_back((double)ensemble.front().levels[i]);
        ys.push_back(std::log(pooled));
    }
    LinearFit f = linear_fit(xs, ys);
    est.c_q = std::exp(f.intercept);
    est.kappa_q = std::exp(f.slope);
    est.r2 = f.r2;
    return est;
}

namespace {

// Per-interval translated block. Cross iterated integrals use the linear
// in-cell model for both the path underlying X and the translating path;
// exact when X's block is a segment signature.
GroupTensorD translate_block(const GroupTensorD& x, const Eigen::VectorXd& kappa) {
    const int d = x.dim;
    GroupTensorD t(d, x.degree);
    t.level1 = x.level1 + kappa;
    if (x.degree >= 2)
        t.level2 = x.level2
                 + 0.5 * (x.level1 * kappa.transpose() + kappa * x.level1.transpose())
                 + 0.5 * kappa * kappa.transpose();
    if (x.degree >= 3) {
        const auto& x1 = x.level1;
        const auto& x2 = x.level2;
        t.level3 = x.level3;
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                for (int r = 0; r < d; ++r) {
                    double v = kappa(p) * x2(q, r) / 3.0            // k x x
                             + x1(p) * kappa(q) * x1(r) / 6.0       // x k x
                             + x2(p, q) * kappa(r) / 3.0            // x x k
                             + kappa(p) * kappa(q) * x1(r) / 6.0    // k k x
                             + kappa(p) * x1(q) * kappa(r) / 6.0    // k x k
                             + x1(p) * kappa(q) * kappa(r) / 6.0    // x k k
                             + kappa(p) * kappa(q) * kappa(r) / 6.0;
                    t.level3(p, q * d + r) += v;
                }
    }
    return t;
}

}  // namespace

RoughPathGrid young_translation(const RoughPathGrid& x, const GridPath& k,
                                const YoungTranslationOptions& opts) {
    if (k.dim != x.dim() || k.level != x.level() || k.horizon != x.horizon())
        throw std::invalid_argument("young_translation: incompatible grids");
    if (opts.check_regularity) {
        if (opts.alpha + 1.0 / opts.q <= 1.0)
            throw std::invalid_argument("young_translation: requires alpha + 1/q > 1");
        double qv = pvar_norm(k, opts.q);
        if (!std::isfinite(qv))
            throw NumericalError("young_translation: translating path has non-finite q-variation");
    }
    std::vector<GroupTensorD> blocks;
    blocks.reserve(x.intervals());
    for (int i = 0; i < x.intervals(); ++i)
        blocks.push_back(translate_block(x.increment(i), k.increment(i, i + 1)));
    RoughPathGrid out(x.dim(), x.degree(), x.level(), x.horizon(), std::move(blocks));
    if (opts.check_geometric && out.shuffle_certificate() > 1e-8)
        throw NumericalError("young_translation: output failed the geometric-ness certificate");
    return out;
}

RoughPathGrid young_pair_time(const RoughPathGrid& x, double beta) {
    const int d = x.dim();
    // embed X into R^{d+1} and translate by the scaled time path in the last slot
    std::vector<GroupTensorD> blocks;
    blocks.reserve(x.intervals());
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(d + 1);
    kappa(d) = beta * x.dt();
    for (int i = 0; i < x.intervals(); ++i) {
        const GroupTensorD& b = x.increment(i);
        GroupTensorD e(d + 1, b.degree);
        e.level1.head(d) = b.level1;
        if (b.degree >= 2) e.level2.topLeftCorner(d, d) = b.level2;
        if (b.degree >= 3)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q)
                    for (int r = 0; r < d; ++r)
                        e.level3(p, q * (d + 1) + r) = b.level3(p, q * d + r);
        blocks.push_back(translate_block(e, kappa));
    }
    return RoughPathGrid(d + 1, x.degree(), x.level(), x.horizon(), std::move(blocks));
}

}  // namespace fdb
