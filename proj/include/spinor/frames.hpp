// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace spinor {

/// Overcomplete dictionary (Phi | Theta) built from two orthonormal bases of
/// the spinor space. F F^T = 2 I, so analysis followed by synthesis with the
/// 1/2 factor reproduces any spinor.
class DiracLaplacianFrame {
public:
    static constexpr double frame_bound = 2.0;

    const Eigen::MatrixXd& matrix() const noexcept { return F_; }
    Eigen::Index dim() const noexcept { return F_.rows(); }
    Eigen::Index size() const noexcept { return F_.cols(); }

private:
    friend DiracLaplacianFrame build_frame(const Eigen::MatrixXd&, const Eigen::MatrixXd&);
    explicit DiracLaplacianFrame(Eigen::MatrixXd F) : F_(std::move(F)) {}

    Eigen::MatrixXd F_;
};

/// Throws InvalidArgument unless both inputs are square, orthonormal to 1e-8
/// and of matching size.
DiracLaplacianFrame build_frame(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& theta);

Eigen::VectorXd frame_analysis(const DiracLaplacianFrame& F, const Eigen::VectorXd& s);
Eigen::VectorXd frame_synthesis(const DiracLaplacianFrame& F, const Eigen::VectorXd& coefficients);

}  // namespace spinor
