#pragma once

#include <cmath>
#include <limits>

#include "gsr/generate.hpp"
#include "gsr/partition.hpp"
#include "gsr/penalty.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Exact support recovery: the found and true active sets coincide.
/// A strict superset counts as a miss.
inline bool exact_recovery(const ActiveSet& found, const ActiveSet& truth) {
    return found == truth;
}

struct Metrics {
    double relative_error = 0.0;
    bool relative_is_absolute = false;  ///< set when the truth is zero
    bool exact_recovery = false;
    double psnr = 0.0;
    double residual_norm = 0.0;
};

/// Reconstruction quality of x_hat against the instance truth. PSNR uses
/// the reconstruction's own peak value V = max |x_hat_i| and the mean
/// squared error over all p entries.
inline Metrics compute_metrics(const Vector& x_hat, const ProblemInstance& instance) {
    if (x_hat.size() != instance.design.cols())
        throw DimensionMismatch("compute_metrics: signal length does not match design");
    Metrics m;
    const double err = (x_hat - instance.x_true).norm();
    const double truth_norm = instance.x_true.norm();
    if (truth_norm > 0.0) {
        m.relative_error = err / truth_norm;
    } else {
        m.relative_error = err;
        m.relative_is_absolute = true;
    }
    m.exact_recovery =
        exact_recovery(support_groups(instance.design.partition(), x_hat),
                       instance.true_active);
    const double peak = x_hat.lpNorm<Eigen::Infinity>();
    const double mse = err * err / static_cast<double>(x_hat.size());
    m.psnr = mse > 0.0 ? 10.0 * std::log10(peak * peak / mse)
                       : std::numeric_limits<double>::infinity();
    m.residual_norm = (instance.design.matrix() * x_hat - instance.y).norm();
    return m;
}

}  // namespace gsr
