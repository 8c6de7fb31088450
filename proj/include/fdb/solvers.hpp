// Differential-equation solvers: Young/skeleton Euler, step-k Euler for
// rough drivers, ellipticity diagnostics and the explicit elliptic control.
#pragma once

#include "fdb/grid_path.hpp"
#include "fdb/rough_path.hpp"
#include "fdb/vector_fields.hpp"

#include <string>

namespace fdb {

struct SolutionPath {
    GridPath states;             // y on the driver grid; states.values.row(0) = a
    std::string scheme;
    int level = 0;
    double two_grid_error = 0.0; // sup difference against the one-level-coarser solve
};

struct SolveOptions {
    double blowup_threshold = 1e8;
    bool two_grid_estimate = true;
};

// Left-point Euler y_{i+1} = y_i + V(y_i) dw_i + beta V_0(y_i) dt.
SolutionPath solve_young(const VectorFieldSystem& V, const GridPath& driver,
                         const Eigen::VectorXd& a, double beta,
                         const SolveOptions& opts = {});

// Young-sense skeleton solve psi^h = Psi_a(h) with drift scale beta0.
SolutionPath solve_skeleton(const VectorFieldSystem& V, const GridPath& h,
                            const Eigen::VectorXd& a, double beta0,
                            const SolveOptions& opts = {});

// Step-k Euler over the grid blocks of a degree-2/3 driver; drift folded in
// by pairing the driver with the scaled time path.
SolutionPath solve_rde(const VectorFieldSystem& V, const RoughPathGrid& driver,
                       const Eigen::VectorXd& a, double beta,
                       const SolveOptions& opts = {});

struct EllipticityReport {
    int rank = 0;
    double sigma_min = 0.0;
    bool elliptic = false;  // rank == state dimension
};

EllipticityReport ellipticity_check(const VectorFieldSystem& V, const Eigen::VectorXd& z);

// h with h_0 = 0 and h' = V^T (V V^T)^{-1} [phi' - beta V_0(phi)]; requires
// ellipticity along phi (throws with the first failing time otherwise).
GridPath control_from_path(const VectorFieldSystem& V, const GridPath& phi, double beta,
                           double sigma_min_threshold = 1e-8);

}  // namespace fdb
