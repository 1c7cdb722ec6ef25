// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/frames.hpp"

#include "spinor/error.hpp"

#include <string>

namespace spinor {

namespace {

void require_orthonormal(const Eigen::MatrixXd& Q, const char* name) {
    if (Q.rows() != Q.cols()) {
        throw InvalidArgument(std::string(name) + " must be square");
    }
    const double dev =
        (Q.transpose() * Q - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-8)) {
        throw InvalidArgument(std::string(name) + " is not orthonormal (max Gram deviation " +
                              std::to_string(dev) + ")");
    }
}

}  // namespace

DiracLaplacianFrame build_frame(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& theta) {
    if (phi.rows() != theta.rows()) {
        throw DimensionMismatch("build_frame: bases have different row counts");
    }
    if (phi.size() > 0) require_orthonormal(phi, "phi");
    if (theta.size() > 0) require_orthonormal(theta, "theta");
    Eigen::MatrixXd F(phi.rows(), phi.cols() + theta.cols());
    F << phi, theta;
    return DiracLaplacianFrame(std::move(F));
}

Eigen::VectorXd frame_analysis(const DiracLaplacianFrame& F, const Eigen::VectorXd& s) {
    if (s.size() != F.dim()) {
        throw DimensionMismatch("frame_analysis: spinor length does not match the frame");
    }
    return F.matrix().transpose() * s;
}

Eigen::VectorXd frame_synthesis(const DiracLaplacianFrame& F, const Eigen::VectorXd& coefficients) {
    if (coefficients.size() != F.size()) {
        throw DimensionMismatch("frame_synthesis: coefficient count does not match the frame");
    }
    return (F.matrix() * coefficients) / DiracLaplacianFrame::frame_bound;
}

}  // namespace spinor
