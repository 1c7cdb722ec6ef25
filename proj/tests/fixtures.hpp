// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spinor/topology.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace spinor::testing {

inline OrientedGraph path3() { return OrientedGraph(3, {{0, 1}, {1, 2}}); }
inline OrientedGraph triangle() { return OrientedGraph(3, {{0, 1}, {1, 2}, {2, 0}}); }

inline double max_abs(const Eigen::MatrixXd& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

// Orthogonal projector onto the column span of a full-column-rank block.
inline Eigen::MatrixXd projector(const Eigen::MatrixXd& A) {
    if (A.cols() == 0) return Eigen::MatrixXd::Zero(A.rows(), A.rows());
    return A * (A.transpose() * A).ldlt().solve(A.transpose());
}

inline Eigen::MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) M(i, j) = g(rng);
    return M;
}

}  // namespace spinor::testing
