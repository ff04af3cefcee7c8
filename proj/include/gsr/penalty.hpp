#pragma once

#include <cmath>
#include <limits>

#include "gsr/design.hpp"
#include "gsr/errors.hpp"
#include "gsr/partition.hpp"
#include "gsr/types.hpp"

namespace gsr {

namespace detail {

inline double lq_norm(const Eigen::Ref<const Vector>& v, double q) {
    if (q == 2.0) return v.norm();
    if (q == 1.0) return v.lpNorm<1>();
    if (std::isinf(q)) return v.lpNorm<Eigen::Infinity>();
    double acc = 0.0;
    for (Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), q);
    return std::pow(acc, 1.0 / q);
}

}  // namespace detail

/**
 * Mixed group penalty over the partition: for r > 0 the value is
 * (sum_g ||x_g||_q^r)^(1/r); r = 0 counts the groups whose q-norm is
 * nonzero; r = inf takes the largest group q-norm. Zero detection for
 * r = 0 is exact (solver outputs carry hard zeros off the support).
 */
inline double group_norm(const GroupPartition& part, const Vector& x, double r, double q) {
    if (!(q > 0.0)) throw InvalidArgument("group_norm: q must be positive");
    if (r < 0.0 && !std::isinf(r)) throw InvalidArgument("group_norm: r must be >= 0 or inf");
    if (x.size() != part.dim())
        throw DimensionMismatch("group_norm: signal length does not match partition");

    if (r == 0.0) {
        Index count = 0;
        for (Index g = 0; g < part.num_groups(); ++g) {
            const auto seg = part.segment(x, g);
            bool nonzero = false;
            for (Index i = 0; i < seg.size(); ++i)
                if (seg[i] != 0.0) { nonzero = true; break; }
            if (nonzero) ++count;
        }
        return static_cast<double>(count);
    }
    if (std::isinf(r)) {
        double best = 0.0;
        for (Index g = 0; g < part.num_groups(); ++g)
            best = std::max(best, detail::lq_norm(part.segment(x, g), q));
        return best;
    }
    double acc = 0.0;
    for (Index g = 0; g < part.num_groups(); ++g)
        acc += std::pow(detail::lq_norm(part.segment(x, g), q), r);
    return std::pow(acc, 1.0 / r);
}

/// Groups with an exactly nonzero block.
inline ActiveSet support_groups(const GroupPartition& part, const Vector& x) {
    if (x.size() != part.dim())
        throw DimensionMismatch("support_groups: signal length does not match partition");
    std::vector<Index> members;
    for (Index g = 0; g < part.num_groups(); ++g) {
        const auto seg = part.segment(x, g);
        for (Index i = 0; i < seg.size(); ++i)
            if (seg[i] != 0.0) { members.push_back(g); break; }
    }
    return ActiveSet(std::move(members));
}

/// Sparsity report for externally loaded signals that may carry tiny
/// nonzeros instead of hard zeros.
inline ActiveSet thresholded_support(const GroupPartition& part, const Vector& x,
                                     double threshold = 1e-12) {
    std::vector<Index> members;
    for (Index g = 0; g < part.num_groups(); ++g)
        if (part.segment(x, g).lpNorm<Eigen::Infinity>() > threshold) members.push_back(g);
    return ActiveSet(std::move(members));
}

/// Regularized least-squares objective: 0.5*||psi*x - y||^2 + lambda * (number
/// of nonzero groups).
inline double objective(const GroupedDesign& design, const Vector& y, const Vector& x,
                        double lambda) {
    if (y.size() != design.rows())
        throw DimensionMismatch("objective: data length does not match design rows");
    if (x.size() != design.cols())
        throw DimensionMismatch("objective: signal length does not match design columns");
    const double fit = 0.5 * (design.matrix() * x - y).squaredNorm();
    return fit + lambda * group_norm(design.partition(), x, 0.0, 2.0);
}

}  // namespace gsr
