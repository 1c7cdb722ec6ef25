// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "spinor/error.hpp"
#include "spinor/sparse.hpp"
#include "spinor/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace spinor;
using spinor::testing::max_abs;

namespace {

bool connected(const OrientedGraph& g) {
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(g.num_nodes()));
    for (const Edge& e : g.edges()) {
        adj[static_cast<std::size_t>(e.tail)].push_back(e.head);
        adj[static_cast<std::size_t>(e.head)].push_back(e.tail);
    }
    std::vector<bool> seen(adj.size(), false);
    std::vector<Index> stack{0};
    seen[0] = true;
    Index count = 1;
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (Index w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == g.num_nodes();
}

SpectralDecomposition forty_eighty_graph(std::uint64_t seed) {
    return spectral_decompose(build_incidence(random_graph(40, 80, seed)));
}

SignalClassSpec spec_for(SignalClass c, std::uint64_t seed) {
    SignalClassSpec spec;
    spec.signal_class = c;
    spec.num_signals = 100;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("random graphs are connected with the requested size") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const OrientedGraph g = random_graph(40, 80, seed);
        CHECK(g.num_edges() == 80);
        CHECK(connected(g));
        const SpectralDecomposition d = spectral_decompose(build_incidence(g));
        CHECK(d.xi0() == 1);
        CHECK(d.xi1() == 80 - 40 + 1);
    }
    const SpectralDecomposition tree = spectral_decompose(build_incidence(random_graph(3, 2, 1)));
    CHECK(tree.xi1() == 0);
    CHECK(random_graph(1, 0, 3).num_edges() == 0);
    CHECK(random_graph(5, 10, 3).num_edges() == 10);

    CHECK(random_graph(30, 50, 9) == random_graph(30, 50, 9));
    CHECK_FALSE(random_graph(30, 50, 9) == random_graph(30, 50, 10));

    CHECK_THROWS_AS(random_graph(5, 3, 0), InvalidArgument);
    CHECK_THROWS_AS(random_graph(5, 11, 0), InvalidArgument);
}

TEST_CASE("signal class names") {
    for (SignalClass c : {SignalClass::fully_coupled, SignalClass::fully_decoupled, SignalClass::partially_coupled,
                          SignalClass::mixture_of_dirac}) {
        CHECK(signal_class_from_string(to_string(c)) == c);
    }
    CHECK(signal_class_from_string("iii") == SignalClass::partially_coupled);
    CHECK_THROWS_AS(signal_class_from_string("v"), InvalidArgument);
}

TEST_CASE("derived seeds") {
    CHECK(derive_seed(1, 0, "graph") == derive_seed(1, 0, "graph"));
    std::set<std::uint64_t> seen;
    for (std::uint64_t master : {0ULL, 1ULL, 2ULL})
        for (std::uint64_t idx = 0; idx < 10; ++idx)
            for (const char* stage : {"graph", "signals", "noise", "ddtl"}) seen.insert(derive_seed(master, idx, stage));
    CHECK(seen.size() == 3 * 10 * 4);
}

TEST_CASE("fully coupled signals lie in the dirac span of their support") {
    const SpectralDecomposition d = forty_eighty_graph(1);
    const GeneratedSignals gen = gen_signals(d, spec_for(SignalClass::fully_coupled, 2));
    CHECK(gen.truth.support.size() == 35);
    CHECK(std::is_sorted(gen.truth.support.begin(), gen.truth.support.end()));

    // Map the mass-basis layout onto the dirac eigenbasis layout.
    const Eigen::MatrixXd phi = dirac_eigenbasis(d).vectors;
    const BasisLayout layout(d);
    const Index r = d.rank();
    Eigen::MatrixXd A(d.dim(), 35);
    for (Index j = 0; j < 35; ++j) {
        const Index c = gen.truth.support[static_cast<std::size_t>(j)];
        REQUIRE_FALSE(layout.is_harmonic(c));
        const Index col = c < r ? c : (c - layout.plus_column(0)) + r + d.harmonic_count();
        A.col(j) = phi.col(col);
    }
    const Eigen::MatrixXd residual = gen.S - testing::projector(A) * gen.S;
    CHECK(residual.norm() < 1e-10 * gen.S.norm());

    // In the laplacian basis every touched frequency splits into a node and an
    // edge mode; its minus and plus atoms share that pair.
    std::set<Index> modes;
    for (Index c : gen.truth.support) modes.insert(c < r ? c : c - layout.plus_column(0));
    const Eigen::MatrixXd theta = super_laplacian_eigenbasis(d).vectors;
    const Eigen::VectorXd energy = (theta.transpose() * gen.S).rowwise().squaredNorm();
    Index occupied = 0;
    for (Index j = 0; j < energy.size(); ++j) occupied += energy(j) > 1e-20 * gen.S.squaredNorm();
    CHECK(occupied == 2 * static_cast<Index>(modes.size()));
}

TEST_CASE("generating dictionary recovers clean signals exactly") {
    const SpectralDecomposition d = forty_eighty_graph(3);
    for (SignalClass c : {SignalClass::fully_coupled, SignalClass::fully_decoupled, SignalClass::partially_coupled,
                          SignalClass::mixture_of_dirac}) {
        const GeneratedSignals gen = gen_signals(d, spec_for(c, 4));
        const SparseCode code = omp(gen.truth.basis, gen.S, 35);
        CHECK(nmse(gen.S, reconstruct(gen.truth.basis, code)) < 1e-10);
        CHECK(gram_deviation(MassBasis{gen.truth.basis, gen.truth.k, true}) < 1e-10);
    }
}

TEST_CASE("coupling profiles of each class") {
    const SpectralDecomposition d = forty_eighty_graph(5);
    const Index r = d.rank();

    CHECK(gen_signals(d, spec_for(SignalClass::fully_coupled, 1)).truth.k.stacked() ==
          Eigen::VectorXd::Ones(2 * r));
    CHECK(gen_signals(d, spec_for(SignalClass::fully_decoupled, 1)).truth.k.stacked() ==
          Eigen::VectorXd::Zero(2 * r));

    SUBCASE("mixture of dirac is non-increasing in frequency") {
        const CouplingVector k = gen_signals(d, spec_for(SignalClass::mixture_of_dirac, 1)).truth.k;
        CHECK(k.minus == k.plus);
        for (Index i = 0; i < r; ++i) {
            for (Index j = 0; j < r; ++j) {
                if (d.sigma(i) > d.sigma(j)) CHECK(k.minus(i) <= k.minus(j));
            }
        }
        const Eigen::VectorXd expected = (1.0 + (d.sigma.array() / 2.0).square()).inverse().matrix();
        CHECK(max_abs(cauchy_coupling(d.sigma, 2.0) - expected) < 1e-15);
        SignalClassSpec wide = spec_for(SignalClass::mixture_of_dirac, 1);
        wide.cauchy_scale = 1e9;
        CHECK(max_abs(gen_signals(d, wide).truth.k.stacked() - Eigen::VectorXd::Ones(2 * r)) < 1e-12);
    }
    SUBCASE("partially coupled splits the touched modes") {
        const GeneratedSignals gen = gen_signals(d, spec_for(SignalClass::partially_coupled, 6));
        const BasisLayout layout(d);
        std::set<Index> touched;
        for (Index c : gen.truth.support) touched.insert(c < r ? c : c - layout.plus_column(0));
        Index coupled = 0;
        for (Index m : touched) {
            CHECK(gen.truth.k.minus(m) == gen.truth.k.plus(m));
            CHECK((gen.truth.k.minus(m) == 0.0 || gen.truth.k.minus(m) == 1.0));
            coupled += gen.truth.k.minus(m) == 1.0;
        }
        CHECK(coupled == std::llround(0.5 * static_cast<double>(touched.size())));
    }
}

TEST_CASE("generator options and determinism") {
    const SpectralDecomposition d = spectral_decompose(build_incidence(random_graph(10, 15, 2)));
    SignalClassSpec spec = spec_for(SignalClass::mixture_of_dirac, 7);
    spec.eta0 = 5;
    const GeneratedSignals a = gen_signals(d, spec, 0.1);
    const GeneratedSignals b = gen_signals(d, spec, 0.1);
    CHECK(a.S == b.S);
    CHECK(a.truth.support == b.truth.support);
    CHECK((a.S - a.truth.clean).norm() > 0.0);

    spec.exclude_harmonics = false;
    spec.eta0 = d.dim();
    CHECK(gen_signals(d, spec).truth.support.size() == static_cast<std::size_t>(d.dim()));
    spec.exclude_harmonics = true;
    CHECK_THROWS_AS(gen_signals(d, spec), InvalidArgument);
    spec.eta0 = 3;
    spec.num_signals = 0;
    CHECK_THROWS_AS(gen_signals(d, spec), InvalidArgument);
}

TEST_CASE("additive white gaussian noise") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd S = testing::gaussian(100, 120, rng);

    CHECK(add_awgn(S, std::numeric_limits<double>::infinity(), 1).S == S);
    CHECK(add_awgn(S, 200.0, 1).noise_std < 1e-9);

    double zero_db = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) zero_db += nmse(S, add_awgn(S, 0.0, seed).S);
    CHECK(std::abs(zero_db / 10.0 - 1.0) < 0.1);

    for (double snr : {0.0, 5.0, 10.0, 20.0}) {
        const NoisySignals noisy = add_awgn(S, snr, 17);
        const double empirical = 10.0 * std::log10(S.squaredNorm() / (noisy.S - S).squaredNorm());
        CHECK(std::abs(empirical - snr) < 0.5);
        CHECK(noisy.noise_std == doctest::Approx(std::sqrt(S.squaredNorm() / (12000.0 * std::pow(10.0, snr / 10.0)))));
    }
    CHECK(add_awgn(S, 5.0, 4).S == add_awgn(S, 5.0, 4).S);
}
