#pragma once

#include <vector>

#include "gsr/design.hpp"
#include "gsr/errors.hpp"
#include "gsr/partition.hpp"
#include "gsr/solver.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Group selection statistic. `raw` scores a group by the norm of its block
/// correlation psi_g^t r, the classical choice; `transformed` whitens the
/// correlation by factor_inv(g) first, which removes sensitivity to
/// inner-group conditioning.
enum class GompSelection { raw, transformed };

struct GompConfig {
    Index max_groups = 0;           ///< selection budget; 0 = floor(n / max group size)
    double residual_tol = 0.0;      ///< stop once ||r|| <= residual_tol
    GompSelection selection = GompSelection::raw;
};

struct GompResult {
    Vector x;
    ActiveSet active;
    double residual_norm = 0.0;
    bool ill_posed_stop = false;
    std::vector<double> residual_history;  ///< ||r|| after each refit
};

/**
 * Group orthogonal matching pursuit: greedily add the best-scoring group,
 * refit least squares on the selected groups, repeat until the residual
 * tolerance or the budget is reached. Groups are never re-selected. An
 * ill-posed refit stops the loop and returns the last good iterate.
 */
inline GompResult gomp(const GroupedDesign& design, const Vector& y,
                       const GompConfig& config = {}) {
    if (y.size() != design.rows())
        throw DimensionMismatch("gomp: data length does not match design rows");
    const GroupPartition& part = design.partition();
    Index budget = config.max_groups;
    if (budget <= 0) budget = design.rows() / part.max_size();
    budget = std::min(budget, part.num_groups());
    if (budget < 1) throw InvalidArgument("gomp: max_groups must allow one selection");

    GompResult res;
    res.x = Vector::Zero(design.cols());
    res.active = ActiveSet{};
    Vector r = y;
    res.residual_norm = r.norm();

    while (res.active.count() < budget && res.residual_norm > config.residual_tol) {
        Index best_group = -1;
        double best_score = 0.0;
        for (Index g = 0; g < part.num_groups(); ++g) {
            if (res.active.contains(g)) continue;
            const Vector corr = design.group_block(g).transpose() * r;
            const double score = config.selection == GompSelection::raw
                                     ? corr.norm()
                                     : (design.factor_inv(g) * corr).norm();
            if (score > best_score) {
                best_score = score;
                best_group = g;
            }
        }
        if (best_group < 0) break;  // residual orthogonal to every remaining group

        ActiveSet trial = res.active;
        trial.insert(best_group);
        Vector x;
        try {
            x = ls_on_active(design, y, trial);
        } catch (const IllPosedActiveSet&) {
            res.ill_posed_stop = true;
            break;
        }
        res.active = std::move(trial);
        res.x = std::move(x);
        r = y - design.matrix() * res.x;
        res.residual_norm = r.norm();
        res.residual_history.push_back(res.residual_norm);
    }
    return res;
}

}  // namespace gsr
