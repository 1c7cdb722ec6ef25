// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/topology.hpp"

#include "spinor/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace spinor {

namespace {

std::string edge_label(std::size_t e, const Edge& edge) {
    return "edge " + std::to_string(e) + " (" + std::to_string(edge.tail) + " -> " +
           std::to_string(edge.head) + ")";
}

void require_size(Index actual, Index expected, const char* what) {
    if (actual != expected) {
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(expected) +
                                ", got " + std::to_string(actual));
    }
}

// Flip the sign of column i of `u` (and of `partner` when given) so that its
// largest-magnitude entry is positive.
void fix_sign(Eigen::MatrixXd& u, Index i, Eigen::MatrixXd* partner) {
    if (u.rows() == 0) return;
    Index arg = 0;
    double best = -1.0;
    for (Index n = 0; n < u.rows(); ++n) {
        const double a = std::abs(u(n, i));
        if (a > best) {
            best = a;
            arg = n;
        }
    }
    if (u(arg, i) < 0.0) {
        u.col(i) *= -1.0;
        if (partner) partner->col(i) *= -1.0;
    }
}

}  // namespace

OrientedGraph::OrientedGraph(Index num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
    if (num_nodes_ <= 0) {
        throw InvalidArgument("graph must have at least one node");
    }
    std::set<std::pair<Index, Index>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if (edge.tail < 0 || edge.tail >= num_nodes_ || edge.head < 0 || edge.head >= num_nodes_) {
            throw InvalidGraph(e, edge_label(e, edge) + ": endpoint out of range [0, " +
                                      std::to_string(num_nodes_) + ")");
        }
        if (edge.tail == edge.head) {
            throw InvalidGraph(e, edge_label(e, edge) + ": self-loop");
        }
        const auto key = std::minmax(edge.tail, edge.head);
        if (!seen.insert({key.first, key.second}).second) {
            throw InvalidGraph(e, edge_label(e, edge) + ": duplicate undirected edge");
        }
    }
}

IncidenceMatrix::IncidenceMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    for (Index e = 0; e < matrix_.cols(); ++e) {
        int plus = 0;
        int minus = 0;
        for (Index n = 0; n < matrix_.rows(); ++n) {
            const double x = matrix_(n, e);
            if (x == 1.0) {
                ++plus;
            } else if (x == -1.0) {
                ++minus;
            } else if (x != 0.0) {
                throw InvalidGraph(static_cast<std::size_t>(e),
                                   "incidence column " + std::to_string(e) + " has an entry outside {-1,0,1}");
            }
        }
        if (plus != 1 || minus != 1) {
            throw InvalidGraph(static_cast<std::size_t>(e),
                               "incidence column " + std::to_string(e) + " must hold exactly one +1 and one -1");
        }
    }
}

Spinor::Spinor(Eigen::VectorXd values, Index num_nodes) : values_(std::move(values)), num_nodes_(num_nodes) {
    if (num_nodes_ < 0 || num_nodes_ > values_.size()) {
        throw DimensionMismatch("spinor node count exceeds its length");
    }
}

Spinor::Spinor(const Eigen::VectorXd& node_part, const Eigen::VectorXd& edge_part)
    : values_(node_part.size() + edge_part.size()), num_nodes_(node_part.size()) {
    values_ << node_part, edge_part;
}

IncidenceMatrix build_incidence(const OrientedGraph& g) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.num_nodes(), g.num_edges());
    for (Index e = 0; e < g.num_edges(); ++e) {
        const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
        B(edge.head, e) = 1.0;
        B(edge.tail, e) = -1.0;
    }
    return IncidenceMatrix(std::move(B));
}

Eigen::VectorXd gradient(const IncidenceMatrix& B, const Eigen::VectorXd& x0) {
    require_size(x0.size(), B.num_nodes(), "gradient");
    return B.matrix().transpose() * x0;
}

Eigen::VectorXd divergence(const IncidenceMatrix& B, const Eigen::VectorXd& x1) {
    require_size(x1.size(), B.num_edges(), "divergence");
    return B.matrix() * x1;
}

Eigen::MatrixXd graph_laplacian(const IncidenceMatrix& B) {
    return B.matrix() * B.matrix().transpose();
}

Eigen::MatrixXd hodge_laplacian_1(const IncidenceMatrix& B) {
    return B.matrix().transpose() * B.matrix();
}

Eigen::MatrixXd super_laplacian(const IncidenceMatrix& B) {
    const Index nv = B.num_nodes();
    const Index ne = B.num_edges();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nv + ne, nv + ne);
    L.topLeftCorner(nv, nv) = graph_laplacian(B);
    L.bottomRightCorner(ne, ne) = hodge_laplacian_1(B);
    return L;
}

Eigen::MatrixXd dirac_matrix(const IncidenceMatrix& B) {
    const Index nv = B.num_nodes();
    const Index ne = B.num_edges();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nv + ne, nv + ne);
    D.topRightCorner(nv, ne) = B.matrix();
    D.bottomLeftCorner(ne, nv) = B.matrix().transpose();
    return D;
}

Spinor dirac_apply(const IncidenceMatrix& B, const Spinor& s) {
    require_size(s.num_nodes(), B.num_nodes(), "dirac_apply node part");
    require_size(s.num_edges(), B.num_edges(), "dirac_apply edge part");
    return Spinor(B.matrix() * s.edge_part(), B.matrix().transpose() * s.node_part());
}

Eigen::MatrixXd dirac_apply(const IncidenceMatrix& B, const Eigen::MatrixXd& batch) {
    const Index nv = B.num_nodes();
    const Index ne = B.num_edges();
    require_size(batch.rows(), nv + ne, "dirac_apply batch");
    Eigen::MatrixXd out(batch.rows(), batch.cols());
    out.topRows(nv) = B.matrix() * batch.bottomRows(ne);
    out.bottomRows(ne) = B.matrix().transpose() * batch.topRows(nv);
    return out;
}

SpectralDecomposition spectral_decompose(const IncidenceMatrix& B, std::optional<double> zero_tol) {
    const Eigen::MatrixXd& Bm = B.matrix();
    if (!Bm.allFinite()) {
        throw NumericalError("spectral_decompose: incidence matrix has non-finite entries");
    }
    if (zero_tol && !(*zero_tol > 0.0)) {
        throw InvalidArgument("spectral_decompose: zero_tol must be positive");
    }
    const Index nv = Bm.rows();
    const Index ne = Bm.cols();

    SpectralDecomposition d;
    if (ne == 0) {
        d.zero_tol = zero_tol.value_or(1e-8);
        d.U.resize(nv, 0);
        d.V.resize(0, 0);
        d.sigma.resize(0);
        d.U_harmonic = Eigen::MatrixXd::Identity(nv, nv);
        d.V_harmonic.resize(0, 0);
        return d;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(Bm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
        throw NumericalError("spectral_decompose: SVD did not converge");
    }
    Eigen::MatrixXd U = svd.matrixU();
    Eigen::MatrixXd V = svd.matrixV();
    const Eigen::VectorXd& s = svd.singularValues();

    const double smax = s.size() > 0 ? s(0) : 0.0;
    d.zero_tol = zero_tol.value_or(smax > 0.0 ? 1e-8 * smax : 1e-8);

    Index r = 0;
    while (r < s.size() && s(r) > d.zero_tol) ++r;

    for (Index i = 0; i < r; ++i) fix_sign(U, i, &V);
    for (Index i = r; i < nv; ++i) fix_sign(U, i, nullptr);
    for (Index i = r; i < ne; ++i) fix_sign(V, i, nullptr);

    d.U = U.leftCols(r);
    d.V = V.leftCols(r);
    d.sigma = s.head(r);
    d.U_harmonic = U.rightCols(nv - r);
    d.V_harmonic = V.rightCols(ne - r);
    return d;
}

Eigenbasis dirac_eigenbasis(const SpectralDecomposition& d) {
    const Index nv = d.num_nodes();
    const Index ne = d.num_edges();
    const Index r = d.rank();
    const Index h0 = d.xi0();
    const Index h1 = d.xi1();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    Eigenbasis out;
    out.vectors = Eigen::MatrixXd::Zero(nv + ne, nv + ne);
    out.values = Eigen::VectorXd::Zero(nv + ne);

    auto& Phi = out.vectors;
    // -sigma block
    Phi.block(0, 0, nv, r) = inv_sqrt2 * d.U;
    Phi.block(nv, 0, ne, r) = -inv_sqrt2 * d.V;
    out.values.head(r) = -d.sigma;
    // edge-harmonic block
    Phi.block(nv, r, ne, h1) = d.V_harmonic;
    // node-harmonic block
    Phi.block(0, r + h1, nv, h0) = d.U_harmonic;
    // +sigma block
    const Index plus = r + h1 + h0;
    Phi.block(0, plus, nv, r) = inv_sqrt2 * d.U;
    Phi.block(nv, plus, ne, r) = inv_sqrt2 * d.V;
    out.values.tail(r) = d.sigma;
    return out;
}

Eigenbasis super_laplacian_eigenbasis(const SpectralDecomposition& d) {
    const Index nv = d.num_nodes();
    const Index ne = d.num_edges();
    const Index r = d.rank();
    const Index h0 = d.xi0();
    const Index h1 = d.xi1();

    Eigenbasis out;
    out.vectors = Eigen::MatrixXd::Zero(nv + ne, nv + ne);
    out.values = Eigen::VectorXd::Zero(nv + ne);

    auto& Theta = out.vectors;
    Theta.block(0, 0, nv, h0) = d.U_harmonic;
    Theta.block(nv, h0, ne, h1) = d.V_harmonic;
    Theta.block(0, h0 + h1, nv, r) = d.U;
    Theta.block(nv, h0 + h1 + r, ne, r) = d.V;
    const Eigen::VectorXd sq = d.sigma.array().square();
    out.values.segment(h0 + h1, r) = sq;
    out.values.tail(r) = sq;
    return out;
}

}  // namespace spinor
