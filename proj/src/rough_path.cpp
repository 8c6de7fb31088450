#include "fdb/rough_path.hpp"

#include <cmath>
#include <stdexcept>

namespace fdb {

RoughPathGrid::RoughPathGrid(int dim, int degree, int level, double horizon,
                             std::vector<GroupTensorD> increments)
    : dim_(dim), degree_(degree), level_(level), horizon_(horizon), inc_(std::move(increments)) {
    if ((int)inc_.size() != (1 << level_))
        throw std::invalid_argument("RoughPathGrid: expects one increment per grid interval");
    prefix_.reserve(inc_.size() + 1);
    prefix_inv_.reserve(inc_.size() + 1);
    prefix_.push_back(GroupTensorD::identity(dim_, degree_));
    prefix_inv_.push_back(GroupTensorD::identity(dim_, degree_));
    for (const auto& b : inc_) {
        if (b.dim != dim_ || b.degree != degree_)
            throw std::invalid_argument("RoughPathGrid: increment shape mismatch");
        prefix_.push_back(tensor_mul(prefix_.back(), b));
        prefix_inv_.push_back(tensor_mul(tensor_inverse(b), prefix_inv_.back()));
    }
}

GroupTensorD RoughPathGrid::reconstruct(int s_index, int t_index) const {
    GroupTensorD out(dim_, degree_);
    reconstruct_into(s_index, t_index, out);
    return out;
}

void RoughPathGrid::reconstruct_into(int s_index, int t_index, GroupTensorD& out) const {
    if (s_index < 0 || t_index < s_index || t_index > intervals())
        throw std::invalid_argument("reconstruct: bad index pair");
    if (s_index == t_index) {
        out = GroupTensorD::identity(dim_, degree_);
        return;
    }
    tensor_mul_into(prefix_inv_[s_index], prefix_[t_index], out);
}

double RoughPathGrid::shuffle_certificate() const {
    double worst = 0.0;
    for (const auto& b : inc_) {
        double scale = 1.0 + b.max_abs();
        worst = std::max(worst, shuffle_check(b).max() / scale);
    }
    return worst;
}

RoughPathGrid RoughPathGrid::restrict_to_coarser(int l) const {
    if (l > level_) throw std::invalid_argument("restrict_to_coarser: l exceeds level");
    const int stride = 1 << (level_ - l);
    std::vector<GroupTensorD> blocks;
    blocks.reserve(1 << l);
    for (int j = 0; j < (1 << l); ++j) {
        GroupTensorD b = inc_[j * stride];
        for (int s = 1; s < stride; ++s) b = tensor_mul(b, inc_[j * stride + s]);
        blocks.push_back(std::move(b));
    }
    return RoughPathGrid(dim_, degree_, l, horizon_, std::move(blocks));
}

RoughPathGrid RoughPathGrid::sub_range(int i0, int i1) const {
    const int n = i1 - i0;
    if (n <= 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("sub_range: index range must be a positive power of two");
    int l = 0;
    while ((1 << l) < n) ++l;
    std::vector<GroupTensorD> blocks(inc_.begin() + i0, inc_.begin() + i1);
    return RoughPathGrid(dim_, degree_, l, horizon_ * n / intervals(), std::move(blocks));
}

namespace {

GroupTensorD concat_range(const std::vector<GroupTensorD>& segs, int lo, int hi) {
    if (hi - lo == 1) return segs[lo];
    int mid = lo + (hi - lo) / 2;
    return tensor_mul(concat_range(segs, lo, mid), concat_range(segs, mid, hi));
}

}  // namespace

GroupTensorD signature_piecewise_linear(const GridPath& path, int s_index, int t_index,
                                        int degree, ConcatOrder order) {
    if (s_index < 0 || t_index < s_index || t_index > path.intervals())
        throw std::invalid_argument("signature_piecewise_linear: bad index pair");
    if (s_index == t_index) return GroupTensorD::identity(path.dim, degree);
    std::vector<GroupTensorD> segs;
    segs.reserve(t_index - s_index);
    for (int i = s_index; i < t_index; ++i)
        segs.push_back(segment_signature<double>(path.increment(i, i + 1), degree));
    if (order == ConcatOrder::BalancedTree) return concat_range(segs, 0, (int)segs.size());
    GroupTensorD acc = segs[0];
    for (size_t i = 1; i < segs.size(); ++i) acc = tensor_mul(acc, segs[i]);
    return acc;
}

RoughPathGrid lift_dyadic(const GridPath& w, int l, int degree, int l_out) {
    if (l_out < 0) l_out = l;
    if (l > w.level || l_out > w.level || l > l_out)
        throw std::invalid_argument("lift_dyadic: requires l <= l_out <= path level");
    // Nodes of w(l) on the level l_out grid; within a coarse cell the path is
    // linear, so each fine segment carries increment (coarse increment)/2^(l_out-l).
    const GridPath nodes = restrict_to_level(w, l);
    const int split = 1 << (l_out - l);
    std::vector<GroupTensorD> blocks;
    blocks.reserve(1 << l_out);
    for (int j = 0; j < (1 << l); ++j) {
        Eigen::VectorXd v = nodes.increment(j, j + 1) / split;
        GroupTensorD seg = segment_signature<double>(v, degree);
        for (int s = 0; s < split; ++s) blocks.push_back(seg);
    }
    return RoughPathGrid(w.dim, degree, l_out, w.horizon, std::move(blocks));
}

double chen_defect(const RoughPathGrid& x, int s_index, int u_index, int t_index) {
    if (!(s_index <= u_index && u_index <= t_index))
        throw std::invalid_argument("chen_defect: requires s <= u <= t");
    GroupTensorD whole = x.reconstruct(s_index, t_index);
    GroupTensorD split = tensor_mul(x.reconstruct(s_index, u_index), x.reconstruct(u_index, t_index));
    return tensor_max_abs_diff(whole, split);
}

double chen_defect(const std::function<GroupTensorD(int, int)>& values, int s_index,
                   int u_index, int t_index) {
    if (!(s_index <= u_index && u_index <= t_index))
        throw std::invalid_argument("chen_defect: requires s <= u <= t");
    GroupTensorD whole = values(s_index, t_index);
    GroupTensorD split = tensor_mul(values(s_index, u_index), values(u_index, t_index));
    return tensor_max_abs_diff(whole, split);
}

}  // namespace fdb
