#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gsr/design.hpp"
#include "gsr/errors.hpp"
#include "gsr/types.hpp"

namespace gsr {

/**
 * Coherence summary of a grouped design.
 *
 * mc is the classical mutual coherence of the columns; bmc the blockwise
 * mutual coherence, the largest cosine of the first principal angle over
 * all group pairs. pairwise holds every cosine with unit diagonal.
 * assumption_T_max is the largest group sparsity T for which
 * bmc < 1/(3T) holds strictly, 0 if none, and -1 when bmc == 0 (mutually
 * orthogonal group spans: every T qualifies except for the strict
 * positivity requirement; zero_bmc flags this degenerate case).
 */
struct CoherenceReport {
    double mc = 0.0;
    double bmc = 0.0;
    Matrix pairwise;
    Index assumption_T_max = 0;
    bool zero_bmc = false;
};

/**
 * Mutual coherence: largest absolute inner product between two distinct
 * columns. Columns are expected unit-norm; any others are renormalized
 * internally and *renormalized is set when the caller wants to know.
 */
inline double mutual_coherence(Matrix psi, bool* renormalized = nullptr) {
    if (psi.cols() < 2) throw InvalidArgument("mutual_coherence: need at least two columns");
    bool fixed = false;
    for (Index j = 0; j < psi.cols(); ++j) {
        const double nrm = psi.col(j).norm();
        if (nrm <= 0.0)
            throw InvalidArgument("mutual_coherence: zero column " + std::to_string(j));
        if (std::abs(nrm - 1.0) > 1e-12) {
            psi.col(j) /= nrm;
            fixed = true;
        }
    }
    if (renormalized) *renormalized = fixed;
    double best = 0.0;
    for (Index j = 1; j < psi.cols(); ++j) {
        const auto dots = (psi.leftCols(j).transpose() * psi.col(j)).cwiseAbs();
        best = std::max(best, dots.maxCoeff());
    }
    return best;
}

namespace detail {

inline Matrix thin_orthonormal_basis(const Eigen::Ref<const Matrix>& block) {
    Eigen::HouseholderQR<Matrix> qr(block);
    return qr.householderQ() * Matrix::Identity(block.rows(), block.cols());
}

inline double max_singular_value(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

}  // namespace detail

/**
 * Cosine of the first principal angle between the column spans of groups
 * i and j: sigma_max(U_i^t U_j) with U_* orthonormal bases from thin QR.
 * By convention the diagonal is 1.
 */
inline double pair_coherence(const GroupedDesign& design, Index i, Index j) {
    if (i < 0 || j < 0 || i >= design.num_groups() || j >= design.num_groups())
        throw InvalidArgument("pair_coherence: group index out of range");
    if (i == j) return 1.0;
    const Matrix ui = detail::thin_orthonormal_basis(design.group_block(i));
    const Matrix uj = detail::thin_orthonormal_basis(design.group_block(j));
    return std::min(1.0, detail::max_singular_value(ui.transpose() * uj));
}

/// Decorrelated cross Gram D_{i,j} = factor_inv(i) * psi_i^t psi_j * factor_inv(j).
inline Matrix cross_gram(const GroupedDesign& design, Index i, Index j) {
    if (i < 0 || j < 0 || i >= design.num_groups() || j >= design.num_groups())
        throw InvalidArgument("cross_gram: group index out of range");
    return design.factor_inv(i) *
           (design.group_block(i).transpose() * design.group_block(j)) * design.factor_inv(j);
}

/**
 * Full coherence report. All group bases are stacked so the pairwise
 * products come from a single Gram evaluation; the N(N-1)/2 pair scan is
 * exact (no pruning), which is O(N^2) small SVDs.
 */
inline CoherenceReport bmc(const GroupedDesign& design) {
    const Index n_groups = design.num_groups();
    if (n_groups < 2) throw InvalidArgument("bmc: need at least two groups");
    const GroupPartition& part = design.partition();

    Matrix stacked(design.rows(), design.cols());
    for (Index g = 0; g < n_groups; ++g)
        stacked.middleCols(part.offset(g), part.size(g)) =
            detail::thin_orthonormal_basis(design.group_block(g));
    const Matrix gram = stacked.transpose() * stacked;

    CoherenceReport report;
    report.pairwise = Matrix::Identity(n_groups, n_groups);
    double mu = 0.0;
    for (Index i = 0; i < n_groups; ++i) {
        for (Index j = i + 1; j < n_groups; ++j) {
            const double c = std::min(
                1.0, detail::max_singular_value(gram.block(part.offset(i), part.offset(j),
                                                           part.size(i), part.size(j))));
            report.pairwise(i, j) = c;
            report.pairwise(j, i) = c;
            mu = std::max(mu, c);
        }
    }
    report.bmc = mu;
    report.mc = mutual_coherence(design.matrix());

    if (mu <= 0.0) {
        report.zero_bmc = true;
        report.assumption_T_max = -1;
    } else {
        Index t = static_cast<Index>(std::floor(1.0 / (3.0 * mu)));
        while (t >= 1 && !(mu < 1.0 / (3.0 * static_cast<double>(t)))) --t;
        report.assumption_T_max = std::max<Index>(t, 0);
    }
    return report;
}

/// Strict feasibility check: 0 < bmc < 1/(3T). A zero BMC fails the open
/// interval; CoherenceReport::zero_bmc tells that case apart.
inline bool check_assumption(const CoherenceReport& report, Index t_groups) {
    if (t_groups < 1) throw InvalidArgument("check_assumption: T must be >= 1");
    return report.bmc > 0.0 && report.bmc < 1.0 / (3.0 * static_cast<double>(t_groups));
}

}  // namespace gsr
