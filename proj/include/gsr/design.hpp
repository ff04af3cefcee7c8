#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gsr/errors.hpp"
#include "gsr/partition.hpp"
#include "gsr/types.hpp"

namespace gsr {

/**
 * Design matrix together with its per-group symmetric square-root factors.
 *
 * For each group g the factor is the SPD matrix root of the group Gram,
 * factor(g) * factor(g) = psi_g^t psi_g, with factor_inv(g) its inverse.
 * Both come out of one symmetric eigendecomposition per group. Immutable
 * after construction; safe to share across concurrent solver runs.
 */
class GroupedDesign {
public:
    GroupedDesign(Matrix psi, GroupPartition part, std::vector<Matrix> factor,
                  std::vector<Matrix> factor_inv, std::vector<Index> col_perm,
                  double unit_norm_deviation)
        : psi_(std::move(psi)),
          part_(std::move(part)),
          factor_(std::move(factor)),
          factor_inv_(std::move(factor_inv)),
          col_perm_(std::move(col_perm)),
          unit_norm_deviation_(unit_norm_deviation) {}

    const Matrix& matrix() const { return psi_; }
    const GroupPartition& partition() const { return part_; }
    Index rows() const { return psi_.rows(); }
    Index cols() const { return psi_.cols(); }
    Index num_groups() const { return part_.num_groups(); }

    const Matrix& factor(Index g) const { return factor_[static_cast<std::size_t>(g)]; }
    const Matrix& factor_inv(Index g) const { return factor_inv_[static_cast<std::size_t>(g)]; }

    /// Columns of group g as a block view.
    auto group_block(Index g) const { return psi_.middleCols(part_.offset(g), part_.size(g)); }

    /// Largest observed | ||psi_j|| - 1 | over all columns.
    double unit_norm_deviation() const { return unit_norm_deviation_; }
    bool columns_unit_norm(double tol = 1e-6) const { return unit_norm_deviation_ <= tol; }

    /// Non-empty when the design was loaded from a non-contiguous labelling;
    /// perm[k] = original column held at internal position k.
    const std::vector<Index>& column_permutation() const { return col_perm_; }
    bool has_permutation() const { return !col_perm_.empty(); }

    /// Report an internal-order coefficient vector in the caller's original
    /// column indexing (identity when no permutation was recorded).
    Vector to_original_order(const Vector& x) const {
        if (col_perm_.empty()) return x;
        Vector out(x.size());
        for (Index k = 0; k < x.size(); ++k) out[col_perm_[static_cast<std::size_t>(k)]] = x[k];
        return out;
    }

    Vector to_internal_order(const Vector& x) const {
        if (col_perm_.empty()) return x;
        Vector out(x.size());
        for (Index k = 0; k < x.size(); ++k) out[k] = x[col_perm_[static_cast<std::size_t>(k)]];
        return out;
    }

private:
    Matrix psi_;
    GroupPartition part_;
    std::vector<Matrix> factor_;
    std::vector<Matrix> factor_inv_;
    std::vector<Index> col_perm_;
    double unit_norm_deviation_ = 0.0;
};

namespace detail {

inline GroupedDesign prepare_design_impl(Matrix psi, GroupPartition part, double rank_tol,
                                         std::vector<Index> col_perm) {
    if (psi.cols() != part.dim())
        throw DimensionMismatch("prepare_design: matrix has " + std::to_string(psi.cols()) +
                                " columns, partition covers " + std::to_string(part.dim()));
    if (psi.rows() < part.max_size())
        throw InvalidArgument("prepare_design: fewer rows than the largest group size");

    double unit_dev = 0.0;
    for (Index j = 0; j < psi.cols(); ++j)
        unit_dev = std::max(unit_dev, std::abs(psi.col(j).norm() - 1.0));

    const Index n_groups = part.num_groups();
    std::vector<Matrix> factor(static_cast<std::size_t>(n_groups));
    std::vector<Matrix> factor_inv(static_cast<std::size_t>(n_groups));
    for (Index g = 0; g < n_groups; ++g) {
        const Matrix gram = psi.middleCols(part.offset(g), part.size(g)).transpose() *
                            psi.middleCols(part.offset(g), part.size(g));
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        if (eig.info() != Eigen::Success)
            throw Error("prepare_design: eigendecomposition failed for group " +
                        std::to_string(g));
        const Vector& ev = eig.eigenvalues();
        const double tol = rank_tol > 0.0 ? rank_tol : 1e-8 * ev(ev.size() - 1);
        if (!(ev(0) > tol * tol))
            throw RankDeficientGroup(
                g, "prepare_design: group " + std::to_string(g) +
                       " is rank deficient (smallest Gram eigenvalue " + std::to_string(ev(0)) +
                       ")");
        const Vector root = ev.cwiseSqrt();
        const Matrix& v = eig.eigenvectors();
        factor[static_cast<std::size_t>(g)] = v * root.asDiagonal() * v.transpose();
        factor_inv[static_cast<std::size_t>(g)] =
            v * root.cwiseInverse().asDiagonal() * v.transpose();
    }
    return GroupedDesign(std::move(psi), std::move(part), std::move(factor),
                         std::move(factor_inv), std::move(col_perm), unit_dev);
}

}  // namespace detail

/**
 * Build the grouped design for a contiguous partition. Every group block
 * must have full column rank: smallest singular value > rank_tol, where
 * rank_tol <= 0 selects the default 1e-8 * (largest Gram eigenvalue of the
 * group). Throws RankDeficientGroup naming the offending group otherwise.
 */
inline GroupedDesign prepare_design(Matrix psi, GroupPartition part, double rank_tol = 0.0) {
    return detail::prepare_design_impl(std::move(psi), std::move(part), rank_tol, {});
}

/// Group membership given per-column labels. Columns are permuted into
/// contiguous group order internally; the permutation is recorded on the
/// design so results can be reported in the original indexing.
inline GroupedDesign prepare_design(const Matrix& psi, const std::vector<Index>& labels,
                                    double rank_tol = 0.0) {
    if (static_cast<Index>(labels.size()) != psi.cols())
        throw DimensionMismatch("prepare_design: one label per column required");
    auto [part, perm] = partition_from_labels(labels);
    Matrix permuted(psi.rows(), psi.cols());
    for (Index k = 0; k < psi.cols(); ++k) permuted.col(k) = psi.col(perm[static_cast<std::size_t>(k)]);
    return detail::prepare_design_impl(std::move(permuted), std::move(part), rank_tol,
                                       std::move(perm));
}

/// Per-group map x |-> factor(g) * x_g of the primal variable.
inline Vector transform_primal(const GroupedDesign& design, const Vector& x) {
    const GroupPartition& part = design.partition();
    if (x.size() != part.dim())
        throw DimensionMismatch("transform_primal: signal length does not match partition");
    Vector out(x.size());
    for (Index g = 0; g < part.num_groups(); ++g)
        out.segment(part.offset(g), part.size(g)) =
            design.factor(g) * x.segment(part.offset(g), part.size(g));
    return out;
}

/// Per-group map d |-> factor_inv(g) * d_g of the dual variable.
inline Vector transform_dual(const GroupedDesign& design, const Vector& d) {
    const GroupPartition& part = design.partition();
    if (d.size() != part.dim())
        throw DimensionMismatch("transform_dual: signal length does not match partition");
    Vector out(d.size());
    for (Index g = 0; g < part.num_groups(); ++g)
        out.segment(part.offset(g), part.size(g)) =
            design.factor_inv(g) * d.segment(part.offset(g), part.size(g));
    return out;
}

}  // namespace gsr
