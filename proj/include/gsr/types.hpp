#pragma once

#include <Eigen/Dense>

namespace gsr {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace gsr
