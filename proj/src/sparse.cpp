// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/sparse.hpp"

#include "spinor/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spinor {

namespace {

constexpr double kUnitNormTol = 1e-6;
constexpr double kRidge = 1e-12;
// Residuals below this fraction of ||S||_F count as exact recovery.
constexpr double kExactResidual = 1e-13;

void require_unit_columns(const Eigen::MatrixXd& D) {
    for (Index j = 0; j < D.cols(); ++j) {
        const double n = D.col(j).norm();
        if (!(std::abs(n - 1.0) <= kUnitNormTol)) {
            throw InvalidArgument("omp: dictionary column " + std::to_string(j) + " has norm " + std::to_string(n));
        }
    }
}

// Least-squares coefficients of S on the columns of A; falls back to a small
// ridge when A is numerically rank deficient.
Eigen::MatrixXd refit(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S, bool& rank_deficient) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() == A.cols()) {
        return qr.solve(S);
    }
    rank_deficient = true;
    Eigen::MatrixXd G = A.transpose() * A;
    G.diagonal().array() += kRidge;
    return G.ldlt().solve(A.transpose() * S);
}

struct GreedyRun {
    std::vector<Index> support;
    Eigen::MatrixXd coefficients;
    std::vector<double> residual_history;
    bool rank_deficient = false;
};

GreedyRun greedy(const Eigen::MatrixXd& D, const Eigen::MatrixXd& S, Index sparsity) {
    GreedyRun run;
    const double s_norm = S.norm();
    Eigen::MatrixXd R = S;
    std::vector<bool> taken(static_cast<std::size_t>(D.cols()), false);
    run.residual_history.push_back(s_norm);
    run.coefficients.resize(0, S.cols());

    Eigen::MatrixXd A(D.rows(), 0);
    for (Index step = 0; step < sparsity; ++step) {
        if (run.residual_history.back() <= kExactResidual * s_norm) break;
        const Eigen::VectorXd score = (D.transpose() * R).rowwise().squaredNorm();
        Index best = -1;
        double best_score = -1.0;
        for (Index j = 0; j < D.cols(); ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            if (score(j) > best_score) {
                best_score = score(j);
                best = j;
            }
        }
        if (best < 0) break;
        taken[static_cast<std::size_t>(best)] = true;
        run.support.push_back(best);
        A.conservativeResize(Eigen::NoChange, A.cols() + 1);
        A.col(A.cols() - 1) = D.col(best);
        run.coefficients = refit(A, S, run.rank_deficient);
        R = S - A * run.coefficients;
        run.residual_history.push_back(R.norm());
    }
    return run;
}

}  // namespace

SparseCode omp(const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& signals, Index sparsity, bool joint) {
    if (dictionary.rows() != signals.rows()) {
        throw DimensionMismatch("omp: dictionary and signals have different row counts");
    }
    if (sparsity < 1 || sparsity > dictionary.cols()) {
        throw InvalidArgument("omp: sparsity must lie in [1, " + std::to_string(dictionary.cols()) + "]");
    }
    require_unit_columns(dictionary);

    SparseCode code;
    if (joint) {
        GreedyRun run = greedy(dictionary, signals, sparsity);
        code.support = std::move(run.support);
        code.coefficients = std::move(run.coefficients);
        code.residual_history = std::move(run.residual_history);
        code.residual_norm = code.residual_history.back();
        code.rank_deficient = run.rank_deficient;
        return code;
    }

    // Per-signal pursuit; columns are independent and merged in signal order.
    const Index T = signals.cols();
    std::vector<GreedyRun> runs;
    runs.reserve(static_cast<std::size_t>(T));
    for (Index t = 0; t < T; ++t) {
        runs.push_back(greedy(dictionary, signals.col(t), sparsity));
    }
    std::vector<Index> all;
    for (const auto& run : runs) all.insert(all.end(), run.support.begin(), run.support.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::vector<Index> row_of(static_cast<std::size_t>(dictionary.cols()), -1);
    for (std::size_t i = 0; i < all.size(); ++i) row_of[static_cast<std::size_t>(all[i])] = static_cast<Index>(i);

    code.support = all;
    code.coefficients = Eigen::MatrixXd::Zero(static_cast<Index>(all.size()), T);
    double residual_sq = 0.0;
    for (Index t = 0; t < T; ++t) {
        const GreedyRun& run = runs[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < run.support.size(); ++i) {
            code.coefficients(row_of[static_cast<std::size_t>(run.support[i])], t) =
                run.coefficients(static_cast<Index>(i), 0);
        }
        residual_sq += run.residual_history.back() * run.residual_history.back();
        code.rank_deficient = code.rank_deficient || run.rank_deficient;
        code.signal_supports.push_back(run.support);
    }
    code.residual_norm = std::sqrt(residual_sq);
    return code;
}

Eigen::MatrixXd dense_codes(const SparseCode& code, Index num_atoms) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(num_atoms, code.coefficients.cols());
    for (std::size_t i = 0; i < code.support.size(); ++i) {
        out.row(code.support[i]) = code.coefficients.row(static_cast<Index>(i));
    }
    return out;
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& dictionary, const SparseCode& code) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dictionary.rows(), code.coefficients.cols());
    for (std::size_t i = 0; i < code.support.size(); ++i) {
        out += dictionary.col(code.support[i]) * code.coefficients.row(static_cast<Index>(i));
    }
    return out;
}

std::vector<double> omp_nmse_path(const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& signals,
                                  Index max_sparsity) {
    const SparseCode code = omp(dictionary, signals, max_sparsity, true);
    const double s_sq = signals.squaredNorm();
    if (s_sq == 0.0) throw InvalidArgument("omp_nmse_path: signals are identically zero");
    std::vector<double> path(static_cast<std::size_t>(max_sparsity));
    for (Index j = 0; j < max_sparsity; ++j) {
        const std::size_t h = std::min(static_cast<std::size_t>(j) + 1, code.residual_history.size() - 1);
        path[static_cast<std::size_t>(j)] = code.residual_history[h] * code.residual_history[h] / s_sq;
    }
    return path;
}

double nmse(const Eigen::MatrixXd& S, const Eigen::MatrixXd& S_hat) {
    if (S.rows() != S_hat.rows() || S.cols() != S_hat.cols()) {
        throw DimensionMismatch("nmse: shapes differ");
    }
    const double denom = S.squaredNorm();
    if (denom == 0.0) throw InvalidArgument("nmse: reference signal has zero norm");
    return (S - S_hat).squaredNorm() / denom;
}

RowThreshold row_hard_threshold(const Eigen::MatrixXd& M, Index eta0) {
    const Index N = M.rows();
    if (eta0 < 1 || eta0 > N) {
        throw InvalidArgument("row_hard_threshold: eta0 must lie in [1, " + std::to_string(N) + "]");
    }
    const Eigen::VectorXd norms = M.rowwise().squaredNorm();
    std::vector<Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });

    RowThreshold out;
    out.kept_rows.assign(order.begin(), order.begin() + eta0);
    std::sort(out.kept_rows.begin(), out.kept_rows.end());
    out.value = Eigen::MatrixXd::Zero(N, M.cols());
    Index nonzero = 0;
    for (Index row : out.kept_rows) {
        out.value.row(row) = M.row(row);
        if (norms(row) > 0.0) ++nonzero;
    }
    out.deficient = nonzero < eta0;
    return out;
}

ColumnNormalization column_normalize(const Eigen::MatrixXd& P) {
    ColumnNormalization out;
    out.value = P;
    for (Index j = 0; j < P.cols(); ++j) {
        const double n = P.col(j).norm();
        if (n > 0.0) {
            out.value.col(j) /= n;
        } else {
            out.value.col(j).setZero();
            if (P.rows() > 0) out.value(j % P.rows(), j) = 1.0;
            out.degenerate_columns.push_back(j);
        }
    }
    return out;
}

}  // namespace spinor
