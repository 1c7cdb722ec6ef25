// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/transform.hpp"

#include "spinor/error.hpp"

#include <cmath>
#include <string>

namespace spinor {

namespace {

constexpr double kOrthogonalityTol = 1e-6;

}  // namespace

CouplingVector CouplingVector::uniform(Index rank, double value, double c1, double c2) {
    return CouplingVector{Eigen::VectorXd::Constant(rank, value), Eigen::VectorXd::Constant(rank, value), c1, c2};
}

CouplingVector CouplingVector::shared(const Eigen::VectorXd& values, double c1, double c2) {
    return CouplingVector{values, values, c1, c2};
}

Eigen::VectorXd CouplingVector::stacked() const {
    Eigen::VectorXd out(minus.size() + plus.size());
    out << minus, plus;
    return out;
}

void CouplingVector::validate() const {
    if (!(c1 >= 0.0 && c1 <= 1.0 && c2 >= 0.0 && c2 <= 1.0)) {
        throw InvalidArgument("coupling bounds c1, c2 must lie in [0, 1]");
    }
    if (minus.size() != plus.size()) {
        throw DimensionMismatch("coupling vector branches have different lengths");
    }
    for (Index i = 0; i < minus.size(); ++i) {
        for (double k : {minus(i), plus(i)}) {
            if (!(k >= -c2 && k <= c1)) {
                throw InvalidArgument("coupling factor " + std::to_string(k) + " at mode " + std::to_string(i) +
                                      " outside [-c2, c1]");
            }
        }
    }
}

double mass_to_coupling(double lambda, double mass) {
    if (!(lambda > 0.0)) throw InvalidArgument("mass_to_coupling: lambda must be positive");
    if (!(mass >= 0.0)) throw InvalidArgument("mass_to_coupling: mass must be nonnegative");
    return lambda / (std::hypot(lambda, mass) + mass);
}

double coupling_to_mass(double lambda, double k) {
    if (!(lambda > 0.0)) throw InvalidArgument("coupling_to_mass: lambda must be positive");
    if (!(k > 0.0 && k <= 1.0)) throw InvalidArgument("coupling_to_mass: k must lie in (0, 1]");
    return lambda * (1.0 - k) * (1.0 + k) / (2.0 * k);
}

Eigen::VectorXd unit_scale(const Eigen::VectorXd& k) {
    return (1.0 + k.array().square()).rsqrt().matrix();
}

Eigen::MatrixXd mass_basis_matrix(const SpectralDecomposition& d, const Eigen::VectorXd& k_minus,
                                  const Eigen::VectorXd& k_plus, const Eigen::VectorXd& scale_minus,
                                  const Eigen::VectorXd& scale_plus) {
    const BasisLayout layout(d);
    const Index r = layout.rank;
    if (k_minus.size() != r || k_plus.size() != r || scale_minus.size() != r || scale_plus.size() != r) {
        throw DimensionMismatch("mass basis: coupling length must equal the rank " + std::to_string(r));
    }
    const Index nv = d.num_nodes();
    const Index ne = d.num_edges();
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(nv + ne, nv + ne);
    for (Index i = 0; i < r; ++i) {
        const Index cm = layout.minus_column(i);
        psi.col(cm).head(nv) = (scale_minus(i) * k_minus(i)) * d.U.col(i);
        psi.col(cm).tail(ne) = -scale_minus(i) * d.V.col(i);
        const Index cp = layout.plus_column(i);
        psi.col(cp).head(nv) = scale_plus(i) * d.U.col(i);
        psi.col(cp).tail(ne) = (scale_plus(i) * k_plus(i)) * d.V.col(i);
    }
    const Index h = layout.harmonic_begin();
    psi.block(0, h, nv, layout.xi0) = d.U_harmonic;
    psi.block(nv, h + layout.xi0, ne, layout.xi1) = d.V_harmonic;
    return psi;
}

MassBasis build_mass_basis(const SpectralDecomposition& d, const CouplingVector& k, bool normalized) {
    if (k.rank() != d.rank() || k.plus.size() != d.rank()) {
        throw DimensionMismatch("build_mass_basis: coupling length " + std::to_string(k.rank()) +
                                " does not match rank " + std::to_string(d.rank()));
    }
    const Index r = d.rank();
    const Eigen::VectorXd scale_minus = normalized ? unit_scale(k.minus) : Eigen::VectorXd::Ones(r);
    const Eigen::VectorXd scale_plus = normalized ? unit_scale(k.plus) : Eigen::VectorXd::Ones(r);
    return MassBasis{mass_basis_matrix(d, k.minus, k.plus, scale_minus, scale_plus), k, normalized};
}

double gram_deviation(const MassBasis& basis) {
    const Index n = basis.psi_bar.cols();
    if (n == 0) return 0.0;
    return (basis.psi_bar.transpose() * basis.psi_bar - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

TransformResult forward_transform(const MassBasis& basis, const Eigen::VectorXd& s) {
    if (!basis.normalized) throw InvalidArgument("forward_transform requires a normalized basis");
    if (s.size() != basis.psi_bar.rows()) throw DimensionMismatch("forward_transform: spinor length mismatch");
    return TransformResult{basis.psi_bar.transpose() * s, gram_deviation(basis) > kOrthogonalityTol};
}

TransformResult inverse_transform(const MassBasis& basis, const Eigen::VectorXd& coefficients) {
    if (!basis.normalized) throw InvalidArgument("inverse_transform requires a normalized basis");
    if (coefficients.size() != basis.psi_bar.cols()) {
        throw DimensionMismatch("inverse_transform: coefficient length mismatch");
    }
    return TransformResult{basis.psi_bar * coefficients, gram_deviation(basis) > kOrthogonalityTol};
}

}  // namespace spinor
