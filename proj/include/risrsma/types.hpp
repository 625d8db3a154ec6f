// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace risrsma {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Point2 = Eigen::Vector2d;

}  // namespace risrsma
