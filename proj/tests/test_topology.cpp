// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "spinor/error.hpp"
#include "spinor/synth.hpp"
#include "spinor/topology.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace spinor;
using spinor::testing::max_abs;

namespace {

// Union-find component count, independent of any spectral computation.
Index count_components(const OrientedGraph& g) {
    std::vector<Index> parent(static_cast<std::size_t>(g.num_nodes()));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (const Edge& e : g.edges()) parent[static_cast<std::size_t>(find(e.tail))] = find(e.head);
    std::set<Index> roots;
    for (Index v = 0; v < g.num_nodes(); ++v) roots.insert(find(v));
    return static_cast<Index>(roots.size());
}

OrientedGraph random_simple_graph(Index nodes, Index edges, std::mt19937_64& rng) {
    std::vector<std::pair<Index, Index>> all;
    for (Index a = 0; a < nodes; ++a)
        for (Index b = a + 1; b < nodes; ++b) all.emplace_back(a, b);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Edge> out;
    for (Index e = 0; e < edges; ++e) {
        auto [a, b] = all[static_cast<std::size_t>(e)];
        out.push_back(rng() % 2 ? Edge{a, b} : Edge{b, a});
    }
    return OrientedGraph(nodes, out);
}

Eigen::VectorXd sorted(Eigen::VectorXd v) {
    std::sort(v.data(), v.data() + v.size());
    return v;
}

}  // namespace

TEST_CASE("incidence matrices of the small examples") {
    Eigen::MatrixXd p3(3, 2);
    p3 << -1, 0, 1, -1, 0, 1;
    CHECK(build_incidence(testing::path3()).matrix() == p3);

    Eigen::MatrixXd single(2, 1);
    single << -1, 1;
    CHECK(build_incidence(OrientedGraph(2, {{0, 1}})).matrix() == single);

    Eigen::MatrixXd tri(3, 3);
    tri << -1, 0, 1, 1, -1, 0, 0, 1, -1;
    CHECK(build_incidence(testing::triangle()).matrix() == tri);
}

TEST_CASE("graph construction rejects invalid edges and names them") {
    try {
        OrientedGraph(3, {{0, 1}, {2, 2}});
        FAIL("self-loop accepted");
    } catch (const InvalidGraph& e) {
        CHECK(e.edge_index() == 1);
        CHECK(e.kind() == "invalid_graph");
    }
    CHECK_THROWS_AS(OrientedGraph(3, {{0, 1}, {1, 0}}), InvalidGraph);
    CHECK_THROWS_AS(OrientedGraph(3, {{0, 3}}), InvalidGraph);
    CHECK_THROWS_AS(OrientedGraph(0, {}), InvalidArgument);

    Eigen::MatrixXd bad(2, 1);
    bad << 1, 1;
    CHECK_THROWS_AS(IncidenceMatrix{bad}, InvalidGraph);
}

TEST_CASE("gradient and divergence") {
    const IncidenceMatrix p3 = build_incidence(testing::path3());
    CHECK(gradient(p3, Eigen::Vector3d(1, 2, 3)) == Eigen::Vector2d(1, 1));
    CHECK(divergence(p3, Eigen::Vector2d(1, 1)) == Eigen::Vector3d(-1, 0, 1));

    const IncidenceMatrix tri = build_incidence(testing::triangle());
    CHECK(gradient(tri, Eigen::Vector3d(1, 0, 0)) == Eigen::Vector3d(-1, 0, 1));
    CHECK(divergence(tri, Eigen::Vector3d(1, 1, 1)) == Eigen::Vector3d::Zero());

    const IncidenceMatrix single = build_incidence(OrientedGraph(2, {{0, 1}}));
    CHECK(divergence(single, Eigen::VectorXd::Ones(1)) == Eigen::Vector2d(-1, 1));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const IncidenceMatrix B = build_incidence(random_graph(12, 20, rng()));
        CHECK(max_abs(gradient(B, Eigen::VectorXd::Constant(12, 4.5))) == 0.0);
    }
    CHECK_THROWS_AS(gradient(p3, Eigen::Vector2d(1, 1)), DimensionMismatch);
    CHECK_THROWS_AS(divergence(p3, Eigen::Vector3d(1, 1, 1)), DimensionMismatch);
}

TEST_CASE("laplacians of P3 and the triangle") {
    const IncidenceMatrix p3 = build_incidence(testing::path3());
    Eigen::Matrix3d L0;
    L0 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(graph_laplacian(p3) == L0);
    // Characteristic polynomial of L0(P3) is -x(x-1)(x-3).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(graph_laplacian(p3));
    CHECK(max_abs(es0.eigenvalues() - Eigen::Vector3d(0, 1, 3)) < 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(hodge_laplacian_1(build_incidence(testing::triangle())));
    CHECK(max_abs(es1.eigenvalues() - Eigen::Vector3d(0, 3, 3)) < 1e-12);
}

TEST_CASE("spectral decomposition of the small examples") {
    const SpectralDecomposition p3 = spectral_decompose(build_incidence(testing::path3()));
    REQUIRE(p3.rank() == 2);
    CHECK(p3.sigma(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(p3.sigma(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p3.xi0() == 1);
    CHECK(p3.xi1() == 0);

    const SpectralDecomposition tri = spectral_decompose(build_incidence(testing::triangle()));
    REQUIRE(tri.rank() == 2);
    CHECK(max_abs(tri.sigma - Eigen::Vector2d::Constant(std::sqrt(3.0))) < 1e-12);
    CHECK(tri.xi0() == 1);
    CHECK(tri.xi1() == 1);

    CHECK_THROWS_AS(spectral_decompose(build_incidence(testing::path3()), 0.0), InvalidArgument);
}

TEST_CASE("node-harmonic count equals the number of components") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const Index nodes = 3 + static_cast<Index>(rng() % 14);
        const Index edges = static_cast<Index>(rng() % static_cast<std::uint64_t>(nodes * (nodes - 1) / 2 + 1));
        const OrientedGraph g = random_simple_graph(nodes, edges, rng);
        const SpectralDecomposition d = spectral_decompose(build_incidence(g));
        CHECK(d.xi0() == count_components(g));
        CHECK(d.xi1() == edges - nodes + count_components(g));
    }
}

TEST_CASE("spectral decomposition invariants on random graphs") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const IncidenceMatrix B = build_incidence(random_simple_graph(15, 24, rng));
        const SpectralDecomposition d = spectral_decompose(B);

        CHECK(max_abs(B.matrix() - d.U * d.sigma.asDiagonal() * d.V.transpose()) < 1e-10);
        CHECK(max_abs(B.matrix().transpose() * d.U_harmonic) < 1e-10);
        CHECK(max_abs(B.matrix() * d.V_harmonic) < 1e-10);
        for (Index i = 1; i < d.rank(); ++i) CHECK(d.sigma(i) <= d.sigma(i - 1));
        CHECK(d.sigma.minCoeff() > d.zero_tol);

        Eigen::MatrixXd Ufull(15, 15);
        Ufull << d.U, d.U_harmonic;
        CHECK(max_abs(Ufull.transpose() * Ufull - Eigen::MatrixXd::Identity(15, 15)) < 1e-10);
        Eigen::MatrixXd Vfull(24, 24);
        Vfull << d.V, d.V_harmonic;
        CHECK(max_abs(Vfull.transpose() * Vfull - Eigen::MatrixXd::Identity(24, 24)) < 1e-10);

        // Sign rule: the largest-magnitude entry of each u_i is positive.
        for (Index i = 0; i < d.rank(); ++i) {
            Index arg = 0;
            d.U.col(i).cwiseAbs().maxCoeff(&arg);
            CHECK(d.U(arg, i) > 0.0);
        }
    }
}

TEST_CASE("dirac operator action") {
    const IncidenceMatrix B = build_incidence(random_graph(10, 16, 3));
    std::mt19937_64 rng(8);
    const Eigen::VectorXd x0 = testing::gaussian(10, 1, rng);
    const Eigen::VectorXd x1 = testing::gaussian(16, 1, rng);

    const Spinor node_only = dirac_apply(B, Spinor(x0, Eigen::VectorXd::Zero(16)));
    CHECK(max_abs(node_only.node_part()) == 0.0);
    CHECK(max_abs(node_only.edge_part() - B.matrix().transpose() * x0) < 1e-14);

    const Spinor edge_only = dirac_apply(B, Spinor(Eigen::VectorXd::Zero(10), x1));
    CHECK(max_abs(edge_only.node_part() - B.matrix() * x1) < 1e-14);
    CHECK(max_abs(edge_only.edge_part()) == 0.0);

    const Spinor twice = dirac_apply(B, dirac_apply(B, Spinor(x0, x1)));
    CHECK(max_abs(twice.node_part() - graph_laplacian(B) * x0) < 1e-12);
    CHECK(max_abs(twice.edge_part() - hodge_laplacian_1(B) * x1) < 1e-12);

    const Eigen::MatrixXd batch = testing::gaussian(26, 4, rng);
    CHECK(max_abs(dirac_apply(B, batch) - dirac_matrix(B) * batch) < 1e-12);
    CHECK_THROWS_AS(dirac_apply(B, Eigen::MatrixXd::Zero(25, 2)), DimensionMismatch);
}

TEST_CASE("dirac squared equals the super-laplacian on random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const IncidenceMatrix B = build_incidence(random_graph(8 + static_cast<Index>(seed), 14 + 2 * static_cast<Index>(seed), seed));
        const Eigen::MatrixXd D = dirac_matrix(B);
        CHECK(max_abs(D * D - super_laplacian(B)) < 1e-10);
    }
}

TEST_CASE("dirac eigenbasis") {
    SUBCASE("P3 eigenvalues match a direct eigensolve of D") {
        const IncidenceMatrix B = build_incidence(testing::path3());
        const Eigenbasis phi = dirac_eigenbasis(spectral_decompose(B));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dirac_matrix(B));
        CHECK(max_abs(sorted(phi.values) - es.eigenvalues()) < 1e-12);
        const double s3 = std::sqrt(3.0);
        Eigen::VectorXd expected(5);
        expected << -s3, -1, 0, 1, s3;
        CHECK(max_abs(sorted(phi.values) - expected) < 1e-12);
    }
    SUBCASE("triangle eigenvalues") {
        const IncidenceMatrix B = build_incidence(testing::triangle());
        const Eigenbasis phi = dirac_eigenbasis(spectral_decompose(B));
        const double s3 = std::sqrt(3.0);
        Eigen::VectorXd expected(6);
        expected << -s3, -s3, 0, 0, s3, s3;
        CHECK(max_abs(sorted(phi.values) - expected) < 1e-12);
    }
    SUBCASE("orthonormal and diagonalizing on random graphs") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const IncidenceMatrix B = build_incidence(random_graph(20, 35, 100 + seed));
            const SpectralDecomposition d = spectral_decompose(B);
            const Eigenbasis phi = dirac_eigenbasis(d);
            const Index n = B.dim();
            CHECK(max_abs(phi.vectors * phi.vectors.transpose() - Eigen::MatrixXd::Identity(n, n)) < 1e-10);
            CHECK(max_abs(phi.vectors * phi.values.asDiagonal() * phi.vectors.transpose() - dirac_matrix(B)) <
                  1e-10);
            // Block order: the minus block carries -sigma, the plus block +sigma.
            CHECK(max_abs(phi.values.head(d.rank()) + d.sigma) == 0.0);
            CHECK(max_abs(phi.values.tail(d.rank()) - d.sigma) == 0.0);
        }
    }
}

TEST_CASE("super-laplacian eigenbasis") {
    const IncidenceMatrix p3 = build_incidence(testing::path3());
    const Eigenbasis t3 = super_laplacian_eigenbasis(spectral_decompose(p3));
    Eigen::VectorXd expected(5);
    expected << 0, 1, 1, 3, 3;
    CHECK(max_abs(sorted(t3.values) - expected) < 1e-12);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const IncidenceMatrix B = build_incidence(random_graph(18, 30, 200 + seed));
        const Eigenbasis theta = super_laplacian_eigenbasis(spectral_decompose(B));
        const Index n = B.dim();
        const Index nv = B.num_nodes();
        CHECK(max_abs(theta.vectors * theta.vectors.transpose() - Eigen::MatrixXd::Identity(n, n)) < 1e-10);
        CHECK(max_abs(super_laplacian(B) * theta.vectors - theta.vectors * theta.values.asDiagonal()) < 1e-10);
        for (Index c = 0; c < n; ++c) {
            const bool on_nodes = theta.vectors.col(c).head(nv).norm() > 0.0;
            const bool on_edges = theta.vectors.col(c).tail(n - nv).norm() > 0.0;
            CHECK(on_nodes != on_edges);
        }
    }
}
