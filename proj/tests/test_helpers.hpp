#pragma once

#include <vector>

#include "gsr/gsr.hpp"

namespace test_helpers {

using gsr::Index;
using gsr::Matrix;
using gsr::Vector;

inline Matrix gaussian_matrix(Index rows, Index cols, gsr::Rng& rng) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.next_gaussian();
    return m;
}

inline Vector gaussian_vector(Index n, gsr::Rng& rng) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.next_gaussian();
    return v;
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian draw.
inline Matrix random_orthogonal(Index n, gsr::Rng& rng) {
    const Matrix g = gaussian_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// Nonsingular s x s matrix with condition number at most cond_cap:
/// U * diag(singular values log-uniform in [1/sqrt(cap), sqrt(cap)]) * V^t.
inline Matrix random_conditioned(Index s, double cond_cap, gsr::Rng& rng) {
    const Matrix u = random_orthogonal(s, rng);
    const Matrix v = random_orthogonal(s, rng);
    Vector sv(s);
    const double half_log = 0.5 * std::log(cond_cap);
    for (Index i = 0; i < s; ++i) sv[i] = std::exp(rng.uniform(-half_log, half_log));
    return u * sv.asDiagonal() * v.transpose();
}

/// Column-normalized Gaussian design with the same inner-group correlation
/// construction as the instance generator.
inline Matrix correlated_design_matrix(Index n, Index num_groups, Index group_size,
                                       double theta, gsr::Rng& rng) {
    const Index p = num_groups * group_size;
    const Matrix raw = gaussian_matrix(n, p, rng);
    Matrix psi(n, p);
    for (Index g = 0; g < num_groups; ++g) {
        const Index off = g * group_size;
        psi.col(off) = raw.col(off);
        psi.col(off + group_size - 1) = raw.col(off + group_size - 1);
        for (Index j = 1; j + 1 < group_size; ++j)
            psi.col(off + j) = raw.col(off + j) + theta * (raw.col(off + j - 1) + raw.col(off + j + 1));
    }
    for (Index j = 0; j < p; ++j) psi.col(j) /= psi.col(j).norm();
    return psi;
}

inline gsr::GroupedDesign random_design(Index n, Index num_groups, Index group_size,
                                        double theta, gsr::Rng& rng) {
    return gsr::prepare_design(
        correlated_design_matrix(n, num_groups, group_size, theta, rng),
        gsr::GroupPartition(std::vector<Index>(static_cast<std::size_t>(num_groups),
                                               group_size)));
}

/// Independent least-squares oracle via SVD (rank-revealing, minimum norm).
inline Vector svd_lstsq(const Matrix& a, const Vector& b) {
    return a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

/// Oversampled (n > p) analogue of the synthetic generator, for tests that
/// need a blockwise coherence small enough to satisfy the recovery
/// hypotheses. The library generator models compressed sensing and
/// requires n <= p, so this variant lives in test code.
inline gsr::ProblemInstance tall_instance(Index n, Index num_groups, Index t_active,
                                          Index group_size, double dr, double theta,
                                          double sigma, std::uint64_t seed) {
    gsr::Rng rng(seed);
    const Index p = num_groups * group_size;
    gsr::GroupPartition part(std::vector<Index>(static_cast<std::size_t>(num_groups),
                                                group_size));
    gsr::GroupedDesign design =
        gsr::prepare_design(correlated_design_matrix(n, num_groups, group_size, theta, rng),
                            part);

    std::vector<Index> pool(static_cast<std::size_t>(num_groups));
    for (Index g = 0; g < num_groups; ++g) pool[static_cast<std::size_t>(g)] = g;
    for (Index k = 0; k < t_active; ++k) {
        const Index j = k + static_cast<Index>(
                                rng.next_below(static_cast<std::uint64_t>(num_groups - k)));
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
    }
    gsr::ActiveSet truth(std::vector<Index>(pool.begin(), pool.begin() + t_active));

    Vector x_true = Vector::Zero(p);
    for (Index g : truth)
        for (Index i = 0; i < group_size; ++i)
            x_true[part.offset(g) + i] = rng.uniform(1.0, dr) * rng.rademacher();

    Vector eta = Vector::Zero(n);
    if (sigma > 0.0)
        for (Index i = 0; i < n; ++i) eta[i] = sigma * rng.next_gaussian();

    gsr::ProblemInstance inst{std::move(design), std::move(x_true), Vector{}, Vector{},
                              std::move(truth),  gsr::GenParams{}, eta.norm()};
    inst.params.seed = seed;
    inst.y_clean = inst.design.matrix() * inst.x_true;
    inst.y = inst.y_clean + eta;
    return inst;
}

/// Apply a per-group column transformation psi_g -> psi_g * m[g].
inline Matrix apply_group_transforms(const Matrix& psi, const gsr::GroupPartition& part,
                                     const std::vector<Matrix>& m) {
    Matrix out = psi;
    for (Index g = 0; g < part.num_groups(); ++g)
        out.middleCols(part.offset(g), part.size(g)) =
            psi.middleCols(part.offset(g), part.size(g)) * m[static_cast<std::size_t>(g)];
    return out;
}

/// x with blocks m[g]^{-1} x_g, the signal that keeps psi*x fixed under
/// apply_group_transforms.
inline Vector counter_transform_signal(const Vector& x, const gsr::GroupPartition& part,
                                       const std::vector<Matrix>& m) {
    Vector out = x;
    for (Index g = 0; g < part.num_groups(); ++g)
        out.segment(part.offset(g), part.size(g)) =
            m[static_cast<std::size_t>(g)].partialPivLu().solve(
                x.segment(part.offset(g), part.size(g)));
    return out;
}

}  // namespace test_helpers
