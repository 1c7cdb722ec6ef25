// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/ddtl.hpp"

#include "spinor/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace spinor {

namespace {

enum class Branch { minus, plus };

Eigen::VectorXd scales_for(const Eigen::VectorXd& k, ColumnScaling scaling) {
    return scaling == ColumnScaling::lagged_unit ? unit_scale(k) : Eigen::VectorXd::Ones(k.size());
}

void check_finite(const Eigen::MatrixXd& A, Index iteration, const char* name) {
    if (!A.allFinite()) throw DivergenceError(static_cast<std::size_t>(iteration), name);
}

double relative(double value, double reference) {
    return reference > 0.0 ? value / reference : value;
}

CouplingVector initial_coupling(const SpectralDecomposition& d, const DdtlConfig& cfg) {
    const Index r = d.rank();
    switch (cfg.init_mode) {
        case InitMode::dirac:
            return CouplingVector::uniform(r, std::min(1.0, cfg.c1), cfg.c1, cfg.c2);
        case InitMode::laplacian:
            return CouplingVector::uniform(r, 0.0, cfg.c1, cfg.c2);
        case InitMode::random_uniform_box: {
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> dist(-cfg.c2, cfg.c1);
            CouplingVector k = CouplingVector::uniform(r, 0.0, cfg.c1, cfg.c2);
            for (Index i = 0; i < r; ++i) k.minus(i) = dist(rng);
            for (Index i = 0; i < r; ++i) k.plus(i) = dist(rng);
            return k;
        }
        case InitMode::best_limit:
            break;
        case InitMode::user: {
            if (!cfg.user_k) throw InvalidArgument("ddtl: init_mode=user requires user_k");
            CouplingVector k = *cfg.user_k;
            k.c1 = cfg.c1;
            k.c2 = cfg.c2;
            if (k.rank() != r) throw DimensionMismatch("ddtl: user_k length does not match the rank");
            k.validate();
            return k;
        }
    }
    throw InvalidArgument("ddtl: unknown init mode");
}

}  // namespace

std::string to_string(StopReason reason) {
    return reason == StopReason::tolerance ? "tolerance" : "max_iter";
}

void DdtlConfig::validate(Index dim) const {
    if (!(c1 >= 0.0 && c1 <= 1.0 && c2 >= 0.0 && c2 <= 1.0)) {
        throw InvalidArgument("ddtl: c1 and c2 must lie in [0, 1]");
    }
    if (!(rho1 > 0.0 && rho2 > 0.0)) throw InvalidArgument("ddtl: rho1 and rho2 must be positive");
    if (eta0 < 1 || eta0 > dim) {
        throw InvalidArgument("ddtl: eta0 must lie in [1, " + std::to_string(dim) + "]");
    }
    if (max_iter < 1) throw InvalidArgument("ddtl: max_iter must be positive");
    if (!(primal_tol > 0.0)) throw InvalidArgument("ddtl: primal_tol must be positive");
    if (!(k_solver_tol > 0.0) || k_solver_max_sweeps < 1) {
        throw InvalidArgument("ddtl: k solver tolerance and sweep budget must be positive");
    }
}

Eigen::MatrixXd state_basis(const SpectralDecomposition& d, const DdtlState& state) {
    return mass_basis_matrix(d, state.k.minus, state.k.plus, state.scale_minus, state.scale_plus);
}

DdtlState ddtl_init(const Eigen::MatrixXd& S, const SpectralDecomposition& d, const DdtlConfig& cfg) {
    if (cfg.init_mode == InitMode::best_limit) {
        DdtlConfig limit = cfg;
        limit.init_mode = InitMode::dirac;
        DdtlState dirac = ddtl_init(S, d, limit);
        limit.init_mode = InitMode::laplacian;
        DdtlState laplacian = ddtl_init(S, d, limit);
        return laplacian.initial_objective < dirac.initial_objective ? laplacian : dirac;
    }
    const Index n = d.dim();
    if (S.rows() != n) {
        throw DimensionMismatch("ddtl: data has " + std::to_string(S.rows()) + " rows, expected " +
                                std::to_string(n));
    }
    if (!S.allFinite()) throw InvalidArgument("ddtl: data contains non-finite values");
    cfg.validate(n);

    DdtlState state;
    state.k = initial_coupling(d, cfg);
    state.scale_minus = scales_for(state.k.minus, cfg.column_scaling);
    state.scale_plus = scales_for(state.k.plus, cfg.column_scaling);

    const Eigen::MatrixXd basis = state_basis(d, state);
    state.Omega = basis.colPivHouseholderQr().solve(S);
    state.X = row_hard_threshold(state.Omega, cfg.eta0).value;
    state.P = column_normalize(basis).value;
    state.H = Eigen::MatrixXd::Zero(n, n);
    state.M = Eigen::MatrixXd::Zero(n, S.cols());
    state.initial_objective = (S - basis * state.X).squaredNorm();
    check_finite(state.Omega, 0, "Omega");
    return state;
}

CouplingVector update_k(const DdtlState& state, const Eigen::MatrixXd& S, const SpectralDecomposition& d,
                        const DdtlConfig& cfg) {
    const BasisLayout layout(d);
    const Index nv = d.num_nodes();
    const Index ne = d.num_edges();
    const Index r = d.rank();

    CouplingVector k = state.k;
    k.c1 = cfg.c1;
    k.c2 = cfg.c2;
    Eigen::MatrixXd R = S - state_basis(d, state) * state.Omega;
    const Eigen::MatrixXd target = state.P - state.H;

    for (Index sweep = 0; sweep < cfg.k_solver_max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index i = 0; i < r; ++i) {
            for (Branch branch : {Branch::minus, Branch::plus}) {
                const bool minus = branch == Branch::minus;
                const Index col = minus ? layout.minus_column(i) : layout.plus_column(i);
                const double zeta = minus ? state.scale_minus(i) : state.scale_plus(i);
                double& ki = minus ? k.minus(i) : k.plus(i);

                // Unit direction along which this column moves with k.
                const auto dir = minus ? d.U.col(i) : d.V.col(i);
                auto R_block = minus ? R.topRows(nv) : R.bottomRows(ne);
                const auto target_block = minus ? target.col(col).head(nv) : target.col(col).tail(ne);

                const auto omega = state.Omega.row(col);
                const double w2 = omega.squaredNorm();
                const double curvature = zeta * zeta * (w2 + cfg.rho1);
                if (!(curvature > 0.0)) continue;

                const double corr = (dir.transpose() * R_block * omega.transpose()).value();
                const double numer = zeta * corr + zeta * zeta * ki * w2 + cfg.rho1 * zeta * dir.dot(target_block);
                const double next = std::clamp(numer / curvature, -cfg.c2, cfg.c1);
                const double delta = next - ki;
                if (delta != 0.0) {
                    R_block.noalias() -= (zeta * delta) * dir * omega;
                    ki = next;
                }
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < cfg.k_solver_tol) break;
    }
    return k;
}

Eigen::MatrixXd update_omega(const DdtlState& state, const Eigen::MatrixXd& S, const SpectralDecomposition& d,
                             const DdtlConfig& cfg) {
    const BasisLayout layout(d);
    const Eigen::MatrixXd basis = state_basis(d, state);
    const Eigen::MatrixXd rhs = basis.transpose() * S + cfg.rho2 * (state.X - state.M);
    const Eigen::VectorXd col_sq = basis.colwise().squaredNorm().transpose();

    Eigen::MatrixXd Omega(rhs.rows(), rhs.cols());
    if (cfg.omega_update == OmegaUpdate::paper_diagonal) {
        for (Index c = 0; c < rhs.rows(); ++c) Omega.row(c) = rhs.row(c) / (col_sq(c) + cfg.rho2);
        return Omega;
    }

    for (Index c = layout.harmonic_begin(); c < layout.harmonic_begin() + layout.xi0 + layout.xi1; ++c) {
        Omega.row(c) = rhs.row(c) / (col_sq(c) + cfg.rho2);
    }
    for (Index i = 0; i < layout.rank; ++i) {
        const Index a = layout.minus_column(i);
        const Index b = layout.plus_column(i);
        const double gaa = col_sq(a) + cfg.rho2;
        const double gbb = col_sq(b) + cfg.rho2;
        const double gab = basis.col(a).dot(basis.col(b));
        const double det = gaa * gbb - gab * gab;
        if (!(det > 0.0)) throw NumericalError("update_omega: singular pair block at mode " + std::to_string(i));
        const Eigen::RowVectorXd ra = rhs.row(a);
        const Eigen::RowVectorXd rb = rhs.row(b);
        Omega.row(a) = (gbb * ra - gab * rb) / det;
        Omega.row(b) = (gaa * rb - gab * ra) / det;
    }
    return Omega;
}

Eigen::MatrixXd update_p(const DdtlState& state, const Eigen::MatrixXd& basis) {
    return column_normalize(state.H + basis).value;
}

Eigen::MatrixXd update_x(const DdtlState& state, const DdtlConfig& cfg) {
    return row_hard_threshold(state.Omega + state.M, cfg.eta0).value;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> update_duals(const DdtlState& state, const Eigen::MatrixXd& basis) {
    return {state.H + (basis - state.P), state.M + (state.Omega - state.X)};
}

DdtlSolution ddtl_fit(const Eigen::MatrixXd& S, const SpectralDecomposition& d, const DdtlConfig& cfg) {
    DdtlState state = ddtl_init(S, d, cfg);
    Eigen::MatrixXd basis = state_basis(d, state);
    // The scheme is not monotone; keep the start in case nothing beats it.
    const DdtlState start = state;
    StopReason stop = StopReason::max_iter;

    for (Index it = 1; it <= cfg.max_iter; ++it) {
        if (cfg.column_scaling == ColumnScaling::lagged_unit) {
            state.scale_minus = unit_scale(state.k.minus);
            state.scale_plus = unit_scale(state.k.plus);
        }

        state.k = update_k(state, S, d, cfg);
        check_finite(state.k.stacked(), it, "k");
        basis = state_basis(d, state);

        state.Omega = update_omega(state, S, d, cfg);
        check_finite(state.Omega, it, "Omega");
        state.P = update_p(state, basis);
        check_finite(state.P, it, "P");
        state.X = update_x(state, cfg);
        auto [H, M] = update_duals(state, basis);
        state.H = std::move(H);
        state.M = std::move(M);
        check_finite(state.H, it, "H");
        check_finite(state.M, it, "M");

        IterationRecord rec;
        rec.fit = (S - basis * state.Omega).squaredNorm();
        rec.objective = (S - basis * state.X).squaredNorm();
        rec.basis_residual = (basis - state.P).norm();
        rec.code_residual = (state.Omega - state.X).norm();
        rec.relative_basis_residual = relative(rec.basis_residual, state.P.norm());
        rec.relative_code_residual = relative(rec.code_residual, state.X.norm());
        rec.lagrangian = 0.5 * rec.fit + 0.5 * cfg.rho1 * (basis - state.P + state.H).squaredNorm() +
                         0.5 * cfg.rho2 * (state.Omega - state.X + state.M).squaredNorm();
        rec.within_tolerance =
            rec.relative_basis_residual <= cfg.primal_tol && rec.relative_code_residual <= cfg.primal_tol;
        state.history.push_back(rec);
        if (rec.within_tolerance) {
            stop = StopReason::tolerance;
            break;
        }
    }

    DdtlSolution sol;
    sol.final_objective = state.history.empty() ? state.initial_objective : state.history.back().objective;
    if (sol.final_objective > state.initial_objective) {
        std::vector<IterationRecord> history = std::move(state.history);
        state = start;
        state.history = std::move(history);
        state.Omega = state.X;
        basis = state_basis(d, state);
        sol.final_objective = state.initial_objective;
        sol.restored_initial = true;
    }
    sol.k_star = state.k;
    sol.Omega_star = std::move(state.Omega);
    sol.X_star = std::move(state.X);
    sol.scale_minus = state.scale_minus;
    sol.scale_plus = state.scale_plus;
    sol.basis = build_mass_basis(d, sol.k_star, true);
    sol.solver_basis = std::move(basis);
    sol.S_hat = sol.solver_basis * (cfg.reconstruction == Reconstruction::omega ? sol.Omega_star : sol.X_star);
    sol.initial_objective = state.initial_objective;
    sol.history = std::move(state.history);
    sol.stop_reason = stop;
    return sol;
}

ConvergenceReport convergence_report(const std::vector<IterationRecord>& history) {
    ConvergenceReport report;
    report.iterations = static_cast<Index>(history.size());
    for (const auto& rec : history) {
        report.objective.push_back(rec.objective);
        report.basis_residual.push_back(rec.basis_residual);
        report.code_residual.push_back(rec.code_residual);
    }
    if (!history.empty()) {
        report.stop_reason = history.back().within_tolerance ? StopReason::tolerance : StopReason::max_iter;
        report.final_relative_basis_residual = history.back().relative_basis_residual;
        report.final_relative_code_residual = history.back().relative_code_residual;
    }
    return report;
}

}  // namespace spinor
