// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace spinor {

using Index = Eigen::Index;

struct Edge {
    Index tail;
    Index head;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple oriented graph. Edge order is significant: edge `e` is column `e`
/// of the incidence matrix and entry `e` of every edge signal.
class OrientedGraph {
public:
    /// Throws InvalidGraph on self-loops, out-of-range endpoints, or a
    /// repeated undirected pair.
    OrientedGraph(Index num_nodes, std::vector<Edge> edges);

    Index num_nodes() const noexcept { return num_nodes_; }
    Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    friend bool operator==(const OrientedGraph&, const OrientedGraph&) = default;

private:
    Index num_nodes_;
    std::vector<Edge> edges_;
};

/// Signed V x E node-edge incidence: +1 at the head, -1 at the tail.
class IncidenceMatrix {
public:
    /// Validates the column structure (one +1, one -1, zeros elsewhere).
    explicit IncidenceMatrix(Eigen::MatrixXd matrix);

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    Index num_nodes() const noexcept { return matrix_.rows(); }
    Index num_edges() const noexcept { return matrix_.cols(); }
    Index dim() const noexcept { return matrix_.rows() + matrix_.cols(); }

private:
    Eigen::MatrixXd matrix_;
};

/// Joint node-edge signal stored as one vector, node block first.
class Spinor {
public:
    Spinor(Eigen::VectorXd values, Index num_nodes);
    Spinor(const Eigen::VectorXd& node_part, const Eigen::VectorXd& edge_part);

    const Eigen::VectorXd& values() const noexcept { return values_; }
    Index num_nodes() const noexcept { return num_nodes_; }
    Index num_edges() const noexcept { return values_.size() - num_nodes_; }

    auto node_part() const { return values_.head(num_nodes_); }
    auto edge_part() const { return values_.tail(num_edges()); }

private:
    Eigen::VectorXd values_;
    Index num_nodes_;
};

/// SVD of B split into its nonzero-singular part and the two harmonic
/// null spaces. Non-harmonic modes are ordered by descending singular value.
struct SpectralDecomposition {
    Eigen::MatrixXd U;           // V x r, left singular vectors
    Eigen::MatrixXd V;           // E x r, right singular vectors
    Eigen::VectorXd sigma;       // r, descending, all > zero_tol
    Eigen::MatrixXd U_harmonic;  // V x xi0, spans ker(B^T)
    Eigen::MatrixXd V_harmonic;  // E x xi1, spans ker(B)
    double zero_tol = 0.0;

    Index num_nodes() const noexcept { return U.rows(); }
    Index num_edges() const noexcept { return V.rows(); }
    Index dim() const noexcept { return U.rows() + V.rows(); }
    Index rank() const noexcept { return sigma.size(); }
    /// Node-harmonic count; equals the number of connected components.
    Index xi0() const noexcept { return U_harmonic.cols(); }
    /// Edge-harmonic (cycle space) count.
    Index xi1() const noexcept { return V_harmonic.cols(); }
    Index harmonic_count() const noexcept { return xi0() + xi1(); }
};

/// Orthonormal eigenbasis with its eigenvalues, column-aligned.
struct Eigenbasis {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

IncidenceMatrix build_incidence(const OrientedGraph& g);

/// B^T x0: per-edge difference head minus tail.
Eigen::VectorXd gradient(const IncidenceMatrix& B, const Eigen::VectorXd& x0);
/// B x1: net inflow at every node.
Eigen::VectorXd divergence(const IncidenceMatrix& B, const Eigen::VectorXd& x1);

Eigen::MatrixXd graph_laplacian(const IncidenceMatrix& B);
Eigen::MatrixXd hodge_laplacian_1(const IncidenceMatrix& B);
/// blkdiag(L0, L1).
Eigen::MatrixXd super_laplacian(const IncidenceMatrix& B);
/// [[0, B], [B^T, 0]].
Eigen::MatrixXd dirac_matrix(const IncidenceMatrix& B);

Spinor dirac_apply(const IncidenceMatrix& B, const Spinor& s);
/// Column-wise Dirac action on a (V+E) x T batch.
Eigen::MatrixXd dirac_apply(const IncidenceMatrix& B, const Eigen::MatrixXd& batch);

/// Singular values below `zero_tol` are classified harmonic. Without an
/// explicit tolerance, 1e-8 times the largest singular value is used.
/// Each u_i (and its partner v_i) is signed so that the largest-magnitude
/// entry of u_i is positive.
SpectralDecomposition spectral_decompose(const IncidenceMatrix& B,
                                         std::optional<double> zero_tol = std::nullopt);

/// Dirac eigenbasis. Column blocks: (u;-v)/sqrt2 | (0;v_H) | (u_H;0) | (u;v)/sqrt2,
/// eigenvalues -sigma | 0 | 0 | +sigma.
Eigenbasis dirac_eigenbasis(const SpectralDecomposition& d);

/// Super-Laplacian eigenbasis. Column blocks: (u_H;0) | (0;v_H) | (u;0) | (0;v),
/// eigenvalues 0 | 0 | sigma^2 | sigma^2.
Eigenbasis super_laplacian_eigenbasis(const SpectralDecomposition& d);

}  // namespace spinor
