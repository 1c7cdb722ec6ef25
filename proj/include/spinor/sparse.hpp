// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace spinor {

using Index = Eigen::Index;

struct SparseCode {
    /// Joint mode: shared support in selection order. Per-signal mode: sorted
    /// union of the per-signal supports.
    std::vector<Index> support;
    /// |support| x T, rows aligned with `support`.
    Eigen::MatrixXd coefficients;
    /// Frobenius norm of the final residual.
    double residual_norm = 0.0;
    /// Joint mode: residual norm after each selection (entry 0 is ||S||_F).
    std::vector<double> residual_history;
    /// Per-signal mode only: support of each signal in selection order.
    std::vector<std::vector<Index>> signal_supports;
    /// A least-squares refit needed the ridge fallback.
    bool rank_deficient = false;
};

/// Orthogonal matching pursuit over a unit-norm dictionary. Each step selects
/// the atom with the largest squared correlation with the residual (summed
/// over all signals when `joint`), then refits all selected coefficients by
/// least squares. Ties go to the lowest column index. Selection stops early
/// once the residual vanishes.
SparseCode omp(const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& signals, Index sparsity, bool joint = true);

/// Dense N x T code matrix from an OMP result.
Eigen::MatrixXd dense_codes(const SparseCode& code, Index num_atoms);
/// dictionary(:, support) * coefficients.
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& dictionary, const SparseCode& code);

/// Joint-OMP NMSE after 1..max_sparsity selections, computed from a single
/// greedy run (selections are nested). Entry j is the NMSE with j+1 atoms.
std::vector<double> omp_nmse_path(const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& signals,
                                  Index max_sparsity);

/// ||S - S_hat||_F^2 / ||S||_F^2. Throws when S is zero.
double nmse(const Eigen::MatrixXd& S, const Eigen::MatrixXd& S_hat);

struct RowThreshold {
    Eigen::MatrixXd value;
    std::vector<Index> kept_rows;  // ascending
    /// Fewer than eta0 of the kept rows are nonzero.
    bool deficient = false;
};

/// Keep the eta0 rows of largest l2 norm (ties to the lowest index), zero the rest.
RowThreshold row_hard_threshold(const Eigen::MatrixXd& M, Index eta0);

struct ColumnNormalization {
    Eigen::MatrixXd value;
    /// Columns that were zero and replaced by the matching canonical vector.
    std::vector<Index> degenerate_columns;
};

/// Retraction onto the oblique manifold.
ColumnNormalization column_normalize(const Eigen::MatrixXd& P);

}  // namespace spinor
