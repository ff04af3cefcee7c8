#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "gsr/design.hpp"
#include "gsr/errors.hpp"
#include "gsr/partition.hpp"
#include "gsr/penalty.hpp"
#include "gsr/types.hpp"

namespace gsr {

/**
 * Group hard-thresholding: keep the block iff its norm exceeds sqrt(2*lambda).
 * The boundary ||g|| == sqrt(2*lambda) maps to zero, the sparser of the two
 * minimizers of the scalar subproblem.
 */
inline Vector hard_threshold_group(const Vector& g, double lambda) {
    if (g.norm() > std::sqrt(2.0 * lambda)) return g;
    return Vector::Zero(g.size());
}

/// Primal/dual iterate of the active-set loop. After a completed update,
/// x is the least-squares fit on the active groups (hard zeros elsewhere),
/// d = psi^t (y - psi x), and d vanishes on the active groups.
struct PrimalDualState {
    Vector x;
    Vector d;
    ActiveSet active;
    double residual_norm = 0.0;
};

inline PrimalDualState initial_state(const GroupedDesign& design, const Vector& y) {
    if (y.size() != design.rows())
        throw DimensionMismatch("initial_state: data length does not match design rows");
    PrimalDualState st;
    st.x = Vector::Zero(design.cols());
    st.d = design.matrix().transpose() * y;
    st.active = ActiveSet{};
    st.residual_norm = y.norm();
    return st;
}

/// State for an arbitrary primal candidate: dual and residual are computed,
/// the active set is the exact support of x.
inline PrimalDualState make_state(const GroupedDesign& design, const Vector& y,
                                  const Vector& x) {
    if (x.size() != design.cols())
        throw DimensionMismatch("make_state: signal length does not match design columns");
    PrimalDualState st;
    st.x = x;
    const Vector r = y - design.matrix() * x;
    st.d = design.matrix().transpose() * r;
    st.active = support_groups(design.partition(), x);
    st.residual_norm = r.norm();
    return st;
}

/// Active set read off a primal/dual pair: groups whose transformed sum
/// x_bar + d_bar strictly exceeds the threshold sqrt(2*lambda). Ties are
/// excluded, consistent with the zero tie rule of hard_threshold_group.
inline ActiveSet active_from_state(const GroupedDesign& design, const Vector& x,
                                   const Vector& d, double lambda) {
    const GroupPartition& part = design.partition();
    if (x.size() != part.dim() || d.size() != part.dim())
        throw DimensionMismatch("active_from_state: signal length does not match partition");
    const double threshold = std::sqrt(2.0 * lambda);
    std::vector<Index> members;
    for (Index g = 0; g < part.num_groups(); ++g) {
        const double norm =
            (design.factor(g) * part.segment(x, g) + design.factor_inv(g) * part.segment(d, g))
                .norm();
        if (norm > threshold) members.push_back(g);
    }
    return ActiveSet(std::move(members));
}

/**
 * Least squares restricted to the active groups, hard zeros elsewhere.
 * Normal equations with Cholesky and one refinement pass; falls back to
 * column-pivoted QR when the Cholesky factorization fails or leaves a
 * large defect. Throws IllPosedActiveSet when the stacked columns exceed
 * the row count or are rank deficient.
 */
inline Vector ls_on_active(const GroupedDesign& design, const Vector& y,
                           const ActiveSet& active) {
    const GroupPartition& part = design.partition();
    if (y.size() != design.rows())
        throw DimensionMismatch("ls_on_active: data length does not match design rows");
    Vector x = Vector::Zero(design.cols());
    if (active.empty()) return x;

    const Index bsize = active_dim(part, active);
    if (bsize > design.rows())
        throw IllPosedActiveSet("ls_on_active: active block has " + std::to_string(bsize) +
                                " columns but only " + std::to_string(design.rows()) +
                                " rows");

    Matrix psi_b(design.rows(), bsize);
    Index pos = 0;
    for (Index g : active) {
        psi_b.middleCols(pos, part.size(g)) = design.group_block(g);
        pos += part.size(g);
    }

    const Matrix normal = psi_b.transpose() * psi_b;
    const Vector rhs = psi_b.transpose() * y;
    Vector xb;
    bool ok = false;
    Eigen::LLT<Matrix> llt(normal);
    if (llt.info() == Eigen::Success) {
        xb = llt.solve(rhs);
        xb += llt.solve(rhs - normal * xb);
        const double defect = (rhs - normal * xb).norm();
        ok = defect <= 1e-6 * (rhs.norm() + 1.0);
    }
    if (!ok) {
        Eigen::ColPivHouseholderQR<Matrix> qr(psi_b);
        if (qr.rank() < bsize)
            throw IllPosedActiveSet("ls_on_active: active block is rank deficient");
        xb = qr.solve(y);
    }

    pos = 0;
    for (Index g : active) {
        x.segment(part.offset(g), part.size(g)) = xb.segment(pos, part.size(g));
        pos += part.size(g);
    }
    return x;
}

/**
 * Violation of the fixed-point optimality system: the largest distance,
 * over groups, between x_bar and the hard threshold of x_bar + d_bar,
 * with the dual recomputed from (y, x). Zero (to roundoff) exactly at a
 * block coordinatewise minimizer.
 */
inline double optimality_residual(const GroupedDesign& design, const Vector& y,
                                  const PrimalDualState& state, double lambda) {
    const GroupPartition& part = design.partition();
    const Vector d = design.matrix().transpose() * (y - design.matrix() * state.x);
    const Vector xbar = transform_primal(design, state.x);
    const Vector dbar = transform_dual(design, d);
    double worst = 0.0;
    for (Index g = 0; g < part.num_groups(); ++g) {
        const Vector sum = part.segment(xbar, g) + part.segment(dbar, g);
        worst = std::max(worst,
                         (part.segment(xbar, g) - hard_threshold_group(sum, lambda)).norm());
    }
    return worst;
}

struct GpdasResult {
    PrimalDualState state;
    int inner_iterations = 0;
    bool converged = false;
};

/**
 * Primal-dual active set loop at a fixed lambda. Each iteration reads the
 * active set off the current (x, d), stops as soon as it repeats, and
 * otherwise refits least squares on the new set and updates the dual.
 * inner_iterations counts active-set evaluations, so a warm start whose
 * set is already stable converges in one iteration.
 */
inline GpdasResult gpdas_fixed_lambda(const GroupedDesign& design, const Vector& y,
                                      double lambda, const PrimalDualState& warm_start,
                                      int k_max) {
    if (k_max < 1) throw InvalidArgument("gpdas_fixed_lambda: k_max must be >= 1");
    GpdasResult res;
    res.state = warm_start;
    ActiveSet prev = warm_start.active;
    while (res.inner_iterations < k_max) {
        ++res.inner_iterations;
        ActiveSet next = active_from_state(design, res.state.x, res.state.d, lambda);
        if (next == prev) {
            res.converged = true;
            break;
        }
        Vector x = ls_on_active(design, y, next);
        const Vector r = y - design.matrix() * x;
        res.state.x = std::move(x);
        res.state.d = design.matrix().transpose() * r;
        res.state.residual_norm = r.norm();
        res.state.active = std::move(next);
        prev = res.state.active;
    }
    return res;
}

struct SolverConfig {
    std::optional<double> lambda0;      ///< default 0.5*||y||^2
    double rho = 0.7;                   ///< continuation decrease factor in (0,1)
    int k_max = 5;                      ///< inner iteration cap
    std::optional<double> eps;          ///< discrepancy level; absent = run to the floor
    std::optional<double> lambda_min;   ///< path floor, default 1e-15*lambda0
    int max_outer = 1000;
    std::optional<Index> t_cap;         ///< optional cap on active group count
};

enum class PathTermination { discrepancy_met, lambda_floor, max_outer, active_set_overflow };

inline const char* to_string(PathTermination t) {
    switch (t) {
        case PathTermination::discrepancy_met: return "discrepancy-met";
        case PathTermination::lambda_floor: return "lambda-min-reached";
        case PathTermination::max_outer: return "max-outer";
        case PathTermination::active_set_overflow: return "active-set-overflow";
    }
    return "unknown";
}

struct PathStep {
    double lambda = 0.0;
    Vector x;
    ActiveSet active;
    double residual_norm = 0.0;
    int inner_iterations = 0;
    bool converged = false;
    double time_ms = 0.0;
};

struct SolutionPath {
    std::vector<PathStep> steps;
    PathTermination termination = PathTermination::lambda_floor;
    PrimalDualState final_state;
    double total_time_ms = 0.0;

    const PathStep& final_step() const { return steps.back(); }
};

namespace detail {

inline void validate(const SolverConfig& config) {
    if (!(config.rho > 0.0 && config.rho < 1.0))
        throw InvalidArgument("solver config: rho must lie in (0,1)");
    if (config.k_max < 1) throw InvalidArgument("solver config: k_max must be >= 1");
    if (config.max_outer < 0) throw InvalidArgument("solver config: max_outer must be >= 0");
    if (config.eps && *config.eps < 0.0)
        throw InvalidArgument("solver config: eps must be >= 0");
}

}  // namespace detail

/**
 * Continuation driver: lambda_s = rho * lambda_{s-1} starting from
 * lambda_0, warm-starting every inner solve from the previous solution.
 * Stops at the first lambda whose residual meets the discrepancy level
 * (when eps is given), at the lambda floor, at max_outer, or when the
 * active set outgrows the least-squares problem.
 */
inline SolutionPath gpdasc_path(const GroupedDesign& design, const Vector& y,
                                const SolverConfig& config = {}) {
    detail::validate(config);
    const auto t_start = std::chrono::steady_clock::now();
    const auto elapsed_ms = [](auto since) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         since)
            .count();
    };

    const double lambda0 = config.lambda0 ? *config.lambda0 : 0.5 * y.squaredNorm();
    const double lambda_min = config.lambda_min ? *config.lambda_min : 1e-15 * lambda0;
    if (config.lambda0 && !(*config.lambda0 > 0.0))
        throw InvalidArgument("solver config: lambda0 must be positive");
    if (config.lambda_min && lambda0 > 0.0 && !(lambda_min < lambda0))
        throw InvalidArgument("solver config: lambda_min must be below lambda0");

    SolutionPath path;
    PrimalDualState state = initial_state(design, y);
    {
        PathStep step0;
        step0.lambda = lambda0;
        step0.x = state.x;
        step0.active = state.active;
        step0.residual_norm = state.residual_norm;
        step0.converged = active_from_state(design, state.x, state.d, lambda0).empty();
        path.steps.push_back(std::move(step0));
    }
    path.final_state = state;
    if (config.eps && state.residual_norm <= *config.eps) {
        path.termination = PathTermination::discrepancy_met;
        path.total_time_ms = elapsed_ms(t_start);
        return path;
    }
    if (!(lambda0 > 0.0)) {
        path.termination = PathTermination::lambda_floor;
        path.total_time_ms = elapsed_ms(t_start);
        return path;
    }

    double lambda = lambda0;
    path.termination = PathTermination::max_outer;
    for (int s = 1; s <= config.max_outer; ++s) {
        lambda *= config.rho;
        if (lambda < lambda_min) {
            path.termination = PathTermination::lambda_floor;
            break;
        }
        const auto t_step = std::chrono::steady_clock::now();
        GpdasResult res;
        try {
            res = gpdas_fixed_lambda(design, y, lambda, state, config.k_max);
        } catch (const IllPosedActiveSet&) {
            path.termination = PathTermination::active_set_overflow;
            break;
        }
        state = res.state;

        PathStep step;
        step.lambda = lambda;
        step.x = state.x;
        step.active = state.active;
        step.residual_norm = state.residual_norm;
        step.inner_iterations = res.inner_iterations;
        step.converged = res.converged;
        step.time_ms = elapsed_ms(t_step);
        path.steps.push_back(std::move(step));
        path.final_state = state;

        if (config.t_cap && state.active.count() > *config.t_cap) {
            path.termination = PathTermination::active_set_overflow;
            break;
        }
        if (config.eps && state.residual_norm <= *config.eps) {
            path.termination = PathTermination::discrepancy_met;
            break;
        }
    }
    path.total_time_ms = elapsed_ms(t_start);
    return path;
}

/// Solution at one target lambda: run the continuation down to it for the
/// warm start, then solve at exactly that value.
inline PrimalDualState gpdasc_at(const GroupedDesign& design, const Vector& y, double lambda,
                                 SolverConfig config = {}) {
    if (!(lambda > 0.0)) throw InvalidArgument("gpdasc_at: lambda must be positive");
    config.eps.reset();
    const double lambda0 = config.lambda0 ? *config.lambda0 : 0.5 * y.squaredNorm();
    PrimalDualState warm;
    if (lambda < lambda0) {
        config.lambda_min = lambda;
        warm = gpdasc_path(design, y, config).final_state;
    } else {
        warm = initial_state(design, y);
    }
    return gpdas_fixed_lambda(design, y, lambda, warm, config.k_max).state;
}

/// Least-squares fit restricted to the true active groups (the benchmark
/// solution when the true support is known).
inline Vector oracle_solution(const GroupedDesign& design, const Vector& y,
                              const ActiveSet& true_active) {
    return ls_on_active(design, y, true_active);
}

struct BruteForceResult {
    Vector x;
    double value = 0.0;
    ActiveSet active;
    bool proven_global = false;
};

namespace detail {

inline Vector ls_on_subset_any_rank(const GroupedDesign& design, const Vector& y,
                                    const std::vector<Index>& groups) {
    const GroupPartition& part = design.partition();
    Index bsize = 0;
    for (Index g : groups) bsize += part.size(g);
    Matrix psi_b(design.rows(), bsize);
    Index pos = 0;
    for (Index g : groups) {
        psi_b.middleCols(pos, part.size(g)) = design.group_block(g);
        pos += part.size(g);
    }
    const Vector xb = Eigen::ColPivHouseholderQR<Matrix>(psi_b).solve(y);
    Vector x = Vector::Zero(design.cols());
    pos = 0;
    for (Index g : groups) {
        x.segment(part.offset(g), part.size(g)) = xb.segment(pos, part.size(g));
        pos += part.size(g);
    }
    return x;
}

}  // namespace detail

/**
 * Exhaustive search for the global minimizer of the penalized objective
 * over all supports of at most max_groups groups. Subsets are visited in
 * size order, lexicographic within a size, and only strict improvements
 * replace the incumbent, so ties resolve to the smaller / earlier
 * support. Sizes m with lambda*m >= incumbent value cannot improve and
 * end the search with a certified global minimum. Guarded against more
 * than 1e6 subsets.
 */
inline BruteForceResult brute_force_global_min(const GroupedDesign& design, const Vector& y,
                                               double lambda, Index max_groups) {
    const Index n_groups = design.num_groups();
    max_groups = std::min(max_groups, n_groups);
    if (max_groups < 0) throw InvalidArgument("brute_force_global_min: negative max_groups");

    double total = 1.0;
    double binom = 1.0;
    for (Index m = 1; m <= max_groups; ++m) {
        binom *= static_cast<double>(n_groups - m + 1) / static_cast<double>(m);
        total += binom;
        if (total > 1e6)
            throw EnumerationLimit("brute_force_global_min: more than 1e6 subsets");
    }

    BruteForceResult best;
    best.x = Vector::Zero(design.cols());
    best.value = 0.5 * y.squaredNorm();
    best.active = ActiveSet{};
    best.proven_global = max_groups == n_groups;

    std::vector<Index> subset;
    for (Index m = 1; m <= max_groups; ++m) {
        if (lambda * static_cast<double>(m) >= best.value) {
            best.proven_global = true;
            break;
        }
        subset.resize(static_cast<std::size_t>(m));
        for (Index i = 0; i < m; ++i) subset[static_cast<std::size_t>(i)] = i;
        for (;;) {
            Vector x = detail::ls_on_subset_any_rank(design, y, subset);
            const double value = objective(design, y, x, lambda);
            if (value < best.value) {
                best.value = value;
                best.x = std::move(x);
                best.active = support_groups(design.partition(), best.x);
            }
            // next lexicographic m-combination of {0,...,n_groups-1}
            Index i = m - 1;
            while (i >= 0 && subset[static_cast<std::size_t>(i)] == n_groups - m + i) --i;
            if (i < 0) break;
            ++subset[static_cast<std::size_t>(i)];
            for (Index k = i + 1; k < m; ++k)
                subset[static_cast<std::size_t>(k)] = subset[static_cast<std::size_t>(k - 1)] + 1;
        }
    }
    return best;
}

}  // namespace gsr
