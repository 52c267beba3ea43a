#pragma once

#include <Eigen/Dense>

namespace scanpath {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

class Rng;

Matrix random_normal(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

}  // namespace scanpath
