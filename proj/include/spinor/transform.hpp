// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spinor/topology.hpp"

#include <Eigen/Dense>

namespace spinor {

/// Per-mode node-edge coupling factors, one for each branch of every
/// non-harmonic Dirac mode. k = 1 is the Dirac regime, k = 0 the Laplacian
/// regime. Entries are confined to the box [-c2, c1].
struct CouplingVector {
    Eigen::VectorXd minus;
    Eigen::VectorXd plus;
    double c1 = 1.0;
    double c2 = 1.0;

    static CouplingVector uniform(Index rank, double value, double c1 = 1.0, double c2 = 1.0);
    static CouplingVector shared(const Eigen::VectorXd& values, double c1 = 1.0, double c2 = 1.0);

    Index rank() const noexcept { return minus.size(); }
    /// [minus; plus], length 2r.
    Eigen::VectorXd stacked() const;
    /// Throws InvalidArgument on bad bounds, mismatched lengths or entries outside the box.
    void validate() const;
};

/// Column layout shared by every mass-parameterized basis:
/// [minus branch (r) | node harmonic (xi0) | edge harmonic (xi1) | plus branch (r)].
struct BasisLayout {
    Index num_nodes = 0;
    Index rank = 0;
    Index xi0 = 0;
    Index xi1 = 0;

    explicit BasisLayout(const SpectralDecomposition& d)
        : num_nodes(d.num_nodes()), rank(d.rank()), xi0(d.xi0()), xi1(d.xi1()) {}

    Index dim() const noexcept { return 2 * rank + xi0 + xi1; }
    Index minus_column(Index i) const noexcept { return i; }
    Index plus_column(Index i) const noexcept { return rank + xi0 + xi1 + i; }
    Index harmonic_begin() const noexcept { return rank; }
    bool is_harmonic(Index column) const noexcept {
        return column >= rank && column < rank + xi0 + xi1;
    }
};

struct MassBasis {
    Eigen::MatrixXd psi_bar;
    CouplingVector k;
    bool normalized = true;
};

/// k = lambda / (sqrt(lambda^2 + m^2) + m). Throws unless lambda > 0 and m >= 0.
double mass_to_coupling(double lambda, double mass);
/// Inverse of mass_to_coupling: m = lambda (1 - k^2) / (2k). Requires 0 < k <= 1.
double coupling_to_mass(double lambda, double k);

/// Assemble the basis with explicit per-column scales: minus column i is
/// scale_minus[i] * (k_minus[i] u_i; -v_i), plus column i is
/// scale_plus[i] * (u_i; k_plus[i] v_i). Harmonic columns are unscaled.
Eigen::MatrixXd mass_basis_matrix(const SpectralDecomposition& d, const Eigen::VectorXd& k_minus,
                                  const Eigen::VectorXd& k_plus, const Eigen::VectorXd& scale_minus,
                                  const Eigen::VectorXd& scale_plus);

/// Unit-norm scale 1/sqrt(1+k^2), entrywise.
Eigen::VectorXd unit_scale(const Eigen::VectorXd& k);

MassBasis build_mass_basis(const SpectralDecomposition& d, const CouplingVector& k, bool normalized = true);

/// max |Psi^T Psi - I|.
double gram_deviation(const MassBasis& basis);

struct TransformResult {
    Eigen::VectorXd values;
    /// Set when the basis is not orthonormal to 1e-6, in which case forward
    /// and inverse are not mutually inverse.
    bool non_orthogonal = false;
};

TransformResult forward_transform(const MassBasis& basis, const Eigen::VectorXd& s);
TransformResult inverse_transform(const MassBasis& basis, const Eigen::VectorXd& coefficients);

}  // namespace spinor
