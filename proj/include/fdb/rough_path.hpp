// Rough paths stored as per-interval tensor increments on a dyadic grid,
// with Chen-consistent reconstruction of X_{s,t} from cached prefix products.
#pragma once

#include "fdb/grid_path.hpp"
#include "fdb/tensor.hpp"

#include <functional>
#include <vector>

namespace fdb {

class RoughPathGrid {
public:
    RoughPathGrid() = default;

    // Takes ownership of per-interval increments X_{t_{i-1}, t_i}.
    RoughPathGrid(int dim, int degree, int level, double horizon,
                  std::vector<GroupTensorD> increments);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    int level() const { return level_; }
    double horizon() const { return horizon_; }
    int intervals() const { return 1 << level_; }
    double dt() const { return horizon_ / intervals(); }
    double time(int i) const { return horizon_ * i / intervals(); }

    const GroupTensorD& increment(int i) const { return inc_[i]; }
    const std::vector<GroupTensorD>& increments() const { return inc_; }

    // X_{0,t_i}; index 0 is the identity.
    const GroupTensorD& prefix(int i) const { return prefix_[i]; }

    // X_{s,t} = X_{0,s}^{-1} (x) X_{0,t}; satisfies Chen exactly by
    // construction. X_{t,t} is the exact identity.
    GroupTensorD reconstruct(int s_index, int t_index) const;
    void reconstruct_into(int s_index, int t_index, GroupTensorD& out) const;

    // Largest shuffle residual over stored increments, relative to
    // (1 + max entry magnitude): the geometric-ness certificate.
    double shuffle_certificate() const;

    // Coarsen by combining adjacent blocks (exact by Chen).
    RoughPathGrid restrict_to_coarser(int l) const;

    // Sub-path over [i0, i1] (dyadic count of intervals), re-anchored.
    RoughPathGrid sub_range(int i0, int i1) const;

private:
    int dim_ = 0, degree_ = 1, level_ = 0;
    double horizon_ = 1.0;
    std::vector<GroupTensorD> inc_;
    std::vector<GroupTensorD> prefix_;      // X_{0, t_i}
    std::vector<GroupTensorD> prefix_inv_;  // X_{0, t_i}^{-1}
};

enum class ConcatOrder { LeftToRight, BalancedTree };

// Signature of the piecewise-linear path through the grid values of w
// between s_index and t_index, as a single group element.
GroupTensorD signature_piecewise_linear(const GridPath& path, int s_index, int t_index,
                                        int degree,
                                        ConcatOrder order = ConcatOrder::LeftToRight);

// S_degree(w(l)) on the level l_out grid (l <= l_out <= w.level; l_out
// defaults to l, i.e. one tensor block per coarse segment).
RoughPathGrid lift_dyadic(const GridPath& w, int l, int degree, int l_out = -1);

// Max absolute entry of X_{s,t} - X_{s,u} (x) X_{u,t}. The grid overload
// certifies the rounding of the cached reconstruction; the functional
// overload checks an arbitrary two-parameter tensor map.
double chen_defect(const RoughPathGrid& x, int s_index, int u_index, int t_index);
double chen_defect(const std::function<GroupTensorD(int, int)>& values, int s_index,
                   int u_index, int t_index);

}  // namespace fdb
