#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gsr/design.hpp"
#include "gsr/errors.hpp"
#include "gsr/partition.hpp"
#include "gsr/rng.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Synthetic problem parameters (n, p, N, T, s, DR, theta, sigma) plus the
/// stream seed. p must equal N*s.
struct GenParams {
    Index n = 0;
    Index p = 0;
    Index N = 0;
    Index T = 0;
    Index s = 0;
    double dynamic_range = 1.0;
    double theta = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    static GenParams make(Index n, Index N, Index T, Index s, double dr, double theta,
                          double sigma, std::uint64_t seed) {
        GenParams gp;
        gp.n = n;
        gp.N = N;
        gp.T = T;
        gp.s = s;
        gp.p = N * s;
        gp.dynamic_range = dr;
        gp.theta = theta;
        gp.sigma = sigma;
        gp.seed = seed;
        return gp;
    }

    void validate() const {
        if (n < 1 || N < 1 || s < 1) throw InvalidArgument("gen params: n, N, s must be >= 1");
        if (p != N * s) throw InvalidArgument("gen params: p must equal N*s");
        if (T < 1 || T > N) throw InvalidArgument("gen params: T must lie in [1, N]");
        if (n > p) throw InvalidArgument("gen params: n must not exceed p");
        if (dynamic_range < 1.0) throw InvalidArgument("gen params: DR must be >= 1");
        if (theta < 0.0) throw InvalidArgument("gen params: theta must be >= 0");
        if (sigma < 0.0) throw InvalidArgument("gen params: sigma must be >= 0");
    }
};

/// Generated instance: y = y_clean + eta with y_clean = psi * x_true,
/// |true_active| = T, the smallest nonzero magnitude exactly 1 and none
/// above the dynamic range.
struct ProblemInstance {
    GroupedDesign design;
    Vector x_true;
    Vector y;
    Vector y_clean;
    ActiveSet true_active;
    GenParams params;
    double noise_norm = 0.0;
};

/**
 * Draw a problem instance. The construction, in stream order:
 *  1. n x p standard Gaussian matrix, filled column by column;
 *  2. within each group the interior columns become
 *     col_j + theta*(col_{j-1} + col_{j+1}) of the Gaussian draw, the two
 *     endpoint columns are copied unchanged;
 *  3. every column is normalized to unit length;
 *  4. T active groups drawn uniformly without replacement;
 *  5. magnitudes of the active entries uniform on [1, DR] with random
 *     signs, then one uniformly chosen entry is pinned to magnitude
 *     exactly 1;
 *  6. i.i.d. N(0, sigma^2) noise.
 * Identical seeds reproduce the instance bit for bit on any platform.
 */
inline ProblemInstance generate_instance(const GenParams& params) {
    params.validate();
    Rng rng(params.seed);

    Matrix raw(params.n, params.p);
    for (Index j = 0; j < params.p; ++j)
        for (Index i = 0; i < params.n; ++i) raw(i, j) = rng.next_gaussian();

    GroupPartition part(std::vector<Index>(static_cast<std::size_t>(params.N), params.s));
    Matrix psi(params.n, params.p);
    for (Index g = 0; g < params.N; ++g) {
        const Index off = part.offset(g);
        const Index sz = part.size(g);
        psi.col(off) = raw.col(off);
        psi.col(off + sz - 1) = raw.col(off + sz - 1);
        for (Index j = 1; j + 1 < sz; ++j)
            psi.col(off + j) =
                raw.col(off + j) + params.theta * (raw.col(off + j - 1) + raw.col(off + j + 1));
    }
    for (Index j = 0; j < params.p; ++j) psi.col(j) /= psi.col(j).norm();

    // Partial Fisher-Yates: first T entries of a shuffled group list.
    std::vector<Index> pool(static_cast<std::size_t>(params.N));
    for (Index g = 0; g < params.N; ++g) pool[static_cast<std::size_t>(g)] = g;
    for (Index k = 0; k < params.T; ++k) {
        const Index j =
            k + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(params.N - k)));
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
    }
    ActiveSet true_active(std::vector<Index>(pool.begin(), pool.begin() + params.T));

    Vector x_true = Vector::Zero(params.p);
    std::vector<Index> nonzero_positions;
    nonzero_positions.reserve(static_cast<std::size_t>(params.T * params.s));
    for (Index g : true_active) {
        for (Index i = 0; i < part.size(g); ++i) {
            const Index idx = part.offset(g) + i;
            x_true[idx] = rng.uniform(1.0, params.dynamic_range);
            nonzero_positions.push_back(idx);
        }
    }
    const Index pinned = nonzero_positions[static_cast<std::size_t>(
        rng.next_below(nonzero_positions.size()))];
    x_true[pinned] = 1.0;
    for (Index idx : nonzero_positions) x_true[idx] *= rng.rademacher();

    Vector eta = Vector::Zero(params.n);
    if (params.sigma > 0.0)
        for (Index i = 0; i < params.n; ++i) eta[i] = params.sigma * rng.next_gaussian();

    ProblemInstance inst{prepare_design(std::move(psi), std::move(part)),
                         std::move(x_true),
                         Vector{},
                         Vector{},
                         std::move(true_active),
                         params,
                         eta.norm()};
    inst.y_clean = inst.design.matrix() * inst.x_true;
    inst.y = inst.y_clean + eta;
    return inst;
}

}  // namespace gsr
