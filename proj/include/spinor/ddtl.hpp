// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spinor/sparse.hpp"
#include "spinor/topology.hpp"
#include "spinor/transform.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spinor {

enum class OmegaUpdate { paper_diagonal, exact_pair_block };
/// best_limit runs both limit-regime starts (k = 1 and k = 0) and keeps the one
/// whose thresholded codes give the smaller ||S - Psi X||^2.
enum class InitMode { dirac, laplacian, random_uniform_box, user, best_limit };

/// How the non-harmonic columns are scaled inside the solver.
///   lagged_unit: zeta_i = 1/sqrt(1 + k_i^2) taken from the previous iterate,
///                so each k-step stays a convex quadratic and the columns are
///                unit norm at a fixed point.
///   none:        raw affine columns (u; k v), (k u; -v).
enum class ColumnScaling { lagged_unit, none };

/// Which codes multiply the final basis in the reconstruction.
enum class Reconstruction { omega, x };

struct DdtlConfig {
    double c1 = 1.0;
    double c2 = 1.0;
    double rho1 = 10.0;
    double rho2 = 10.0;
    Index eta0 = 35;
    Index max_iter = 500;
    double primal_tol = 1e-4;
    double k_solver_tol = 1e-12;
    Index k_solver_max_sweeps = 50;
    OmegaUpdate omega_update = OmegaUpdate::exact_pair_block;
    InitMode init_mode = InitMode::dirac;
    ColumnScaling column_scaling = ColumnScaling::lagged_unit;
    Reconstruction reconstruction = Reconstruction::omega;
    std::optional<CouplingVector> user_k;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when a field is out of range for a basis of size `dim`.
    void validate(Index dim) const;
};

struct IterationRecord {
    /// ||S - Psi(k) X||_F^2, the learning objective at the feasible codes.
    double objective = 0.0;
    /// ||S - Psi(k) Omega||_F^2.
    double fit = 0.0;
    /// Scaled augmented Lagrangian.
    double lagrangian = 0.0;
    double basis_residual = 0.0;  // ||Psi(k) - P||_F
    double code_residual = 0.0;   // ||Omega - X||_F
    double relative_basis_residual = 0.0;
    double relative_code_residual = 0.0;
    bool within_tolerance = false;
};

struct DdtlState {
    CouplingVector k;
    Eigen::VectorXd scale_minus;
    Eigen::VectorXd scale_plus;
    Eigen::MatrixXd Omega;
    Eigen::MatrixXd P;
    Eigen::MatrixXd X;
    Eigen::MatrixXd H;
    Eigen::MatrixXd M;
    double initial_objective = 0.0;
    std::vector<IterationRecord> history;
};

enum class StopReason { tolerance, max_iter };

std::string to_string(StopReason reason);

struct ConvergenceReport {
    Index iterations = 0;
    StopReason stop_reason = StopReason::max_iter;
    std::vector<double> objective;
    std::vector<double> basis_residual;
    std::vector<double> code_residual;
    double final_relative_basis_residual = 0.0;
    double final_relative_code_residual = 0.0;
};

struct DdtlSolution {
    CouplingVector k_star;
    Eigen::MatrixXd Omega_star;
    Eigen::MatrixXd X_star;
    /// Column scales of the final iterate.
    Eigen::VectorXd scale_minus;
    Eigen::VectorXd scale_plus;
    /// Unit-norm basis at k*, used as a dictionary downstream.
    MassBasis basis;
    /// The solver's final Psi(k*), from which S_hat is formed.
    Eigen::MatrixXd solver_basis;
    Eigen::MatrixXd S_hat;
    double initial_objective = 0.0;
    /// ||S - Psi(k*) X*||_F^2 of the returned point; never above initial_objective.
    double final_objective = 0.0;
    /// The last iterate was worse than the start, so the start (k0, X0) was
    /// returned with Omega* = X0. The history still lists every iterate.
    bool restored_initial = false;
    std::vector<IterationRecord> history;
    StopReason stop_reason = StopReason::max_iter;
};

/// Psi(k) at the state's coupling and column scales.
Eigen::MatrixXd state_basis(const SpectralDecomposition& d, const DdtlState& state);

DdtlState ddtl_init(const Eigen::MatrixXd& S, const SpectralDecomposition& d, const DdtlConfig& cfg);

/// Box-constrained minimiser of
///   1/2 ||S - Psi(k) Omega||^2 + rho1/2 ||Psi(k) - P + H||^2
/// by cyclic projected coordinate descent. Every non-harmonic column is
/// affine in its own k along a unit direction, (u_i;0) or (0;v_i), so each
/// coordinate has a closed-form minimiser clipped to [-c2, c1].
CouplingVector update_k(const DdtlState& state, const Eigen::MatrixXd& S, const SpectralDecomposition& d,
                        const DdtlConfig& cfg);

/// Minimiser over Omega of 1/2 ||S - Psi Omega||^2 + rho2/2 ||Omega - X + M||^2.
/// paper_diagonal ignores the off-diagonal Gram entries; exact_pair_block
/// solves the 2x2 system of every (minus, plus) pair.
Eigen::MatrixXd update_omega(const DdtlState& state, const Eigen::MatrixXd& S, const SpectralDecomposition& d,
                             const DdtlConfig& cfg);

/// column_normalize(H + Psi).
Eigen::MatrixXd update_p(const DdtlState& state, const Eigen::MatrixXd& basis);
/// row_hard_threshold(Omega + M, eta0).
Eigen::MatrixXd update_x(const DdtlState& state, const DdtlConfig& cfg);
/// (H + Psi - P, M + Omega - X).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> update_duals(const DdtlState& state, const Eigen::MatrixXd& basis);

/// Runs k -> Omega -> P -> X -> H -> M until both relative primal residuals
/// are below primal_tol or max_iter iterations have run.
/// Throws DivergenceError if any variable becomes non-finite.
DdtlSolution ddtl_fit(const Eigen::MatrixXd& S, const SpectralDecomposition& d, const DdtlConfig& cfg);

ConvergenceReport convergence_report(const std::vector<IterationRecord>& history);

}  // namespace spinor
