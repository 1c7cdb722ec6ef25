// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/synth.hpp"

#include "spinor/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>

namespace spinor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Decode a Pruefer sequence into the edges of a labelled tree on n nodes.
std::vector<std::pair<Index, Index>> pruefer_tree(const std::vector<Index>& code, Index n) {
    std::vector<Index> degree(static_cast<std::size_t>(n), 1);
    for (Index v : code) ++degree[static_cast<std::size_t>(v)];
    std::priority_queue<Index, std::vector<Index>, std::greater<>> leaves;
    for (Index v = 0; v < n; ++v) {
        if (degree[static_cast<std::size_t>(v)] == 1) leaves.push(v);
    }
    std::vector<std::pair<Index, Index>> edges;
    for (Index v : code) {
        const Index leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(leaf, v);
        if (--degree[static_cast<std::size_t>(v)] == 1) leaves.push(v);
    }
    const Index a = leaves.top();
    leaves.pop();
    const Index b = leaves.top();
    edges.emplace_back(a, b);
    return edges;
}

double median(Eigen::VectorXd values) {
    if (values.size() == 0) return 1.0;
    std::sort(values.data(), values.data() + values.size());
    const Index m = values.size() / 2;
    return values.size() % 2 == 1 ? values(m) : 0.5 * (values(m - 1) + values(m));
}

}  // namespace

std::string to_string(SignalClass c) {
    switch (c) {
        case SignalClass::fully_coupled: return "fully_coupled";
        case SignalClass::fully_decoupled: return "fully_decoupled";
        case SignalClass::partially_coupled: return "partially_coupled";
        case SignalClass::mixture_of_dirac: return "mixture_of_dirac";
    }
    return "unknown";
}

SignalClass signal_class_from_string(std::string_view name) {
    if (name == "fully_coupled" || name == "i") return SignalClass::fully_coupled;
    if (name == "fully_decoupled" || name == "ii") return SignalClass::fully_decoupled;
    if (name == "partially_coupled" || name == "iii") return SignalClass::partially_coupled;
    if (name == "mixture_of_dirac" || name == "iv") return SignalClass::mixture_of_dirac;
    throw InvalidArgument("unknown signal class '" + std::string(name) + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view stage) {
    return splitmix64(master ^ splitmix64(index ^ splitmix64(fnv1a(stage))));
}

OrientedGraph random_graph(Index num_nodes, Index num_edges, std::uint64_t seed) {
    if (num_nodes < 1) throw InvalidArgument("random_graph: need at least one node");
    const Index max_edges = num_nodes * (num_nodes - 1) / 2;
    if (num_edges < num_nodes - 1 || num_edges > max_edges) {
        throw InvalidArgument("random_graph: a connected simple graph on " + std::to_string(num_nodes) +
                              " nodes needs between " + std::to_string(num_nodes - 1) + " and " +
                              std::to_string(max_edges) + " edges");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Index, Index>> pairs;
    if (num_nodes == 2) {
        pairs.emplace_back(0, 1);
    } else if (num_nodes > 2) {
        std::uniform_int_distribution<Index> node(0, num_nodes - 1);
        std::vector<Index> code(static_cast<std::size_t>(num_nodes - 2));
        for (auto& v : code) v = node(rng);
        pairs = pruefer_tree(code, num_nodes);
    }

    std::set<std::pair<Index, Index>> used;
    for (auto& [a, b] : pairs) used.insert(std::minmax(a, b));
    std::vector<std::pair<Index, Index>> candidates;
    for (Index a = 0; a < num_nodes; ++a) {
        for (Index b = a + 1; b < num_nodes; ++b) {
            if (!used.count({a, b})) candidates.emplace_back(a, b);
        }
    }
    const Index extra = num_edges - static_cast<Index>(pairs.size());
    // Partial Fisher-Yates: the first `extra` candidates form a uniform sample.
    for (Index i = 0; i < extra; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), candidates.size() - 1);
        std::swap(candidates[static_cast<std::size_t>(i)], candidates[pick(rng)]);
        pairs.push_back(candidates[static_cast<std::size_t>(i)]);
    }

    std::bernoulli_distribution coin(0.5);
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto& [a, b] : pairs) {
        edges.push_back(coin(rng) ? Edge{a, b} : Edge{b, a});
    }
    return OrientedGraph(num_nodes, std::move(edges));
}

Eigen::VectorXd cauchy_coupling(const Eigen::VectorXd& sigma, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("cauchy_coupling: gamma must be positive");
    return (1.0 + (sigma.array() / gamma).square()).inverse().matrix();
}

GeneratedSignals gen_signals(const SpectralDecomposition& d, const SignalClassSpec& spec, double noise_std) {
    const BasisLayout layout(d);
    const Index r = d.rank();
    const Index n = d.dim();

    std::vector<Index> candidates;
    for (Index c = 0; c < n; ++c) {
        if (!spec.exclude_harmonics || !layout.is_harmonic(c)) candidates.push_back(c);
    }
    if (spec.eta0 < 1 || spec.eta0 > static_cast<Index>(candidates.size())) {
        throw InvalidArgument("gen_signals: eta0 = " + std::to_string(spec.eta0) + " exceeds the " +
                              std::to_string(candidates.size()) + " available columns");
    }
    if (spec.num_signals < 1) throw InvalidArgument("gen_signals: need at least one signal");
    if (!(spec.coeff_std > 0.0)) throw InvalidArgument("gen_signals: coeff_std must be positive");
    if (!(noise_std >= 0.0)) throw InvalidArgument("gen_signals: noise_std must be nonnegative");

    std::mt19937_64 rng(spec.seed);
    for (Index i = 0; i < spec.eta0; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), candidates.size() - 1);
        std::swap(candidates[static_cast<std::size_t>(i)], candidates[pick(rng)]);
    }
    std::vector<Index> support(candidates.begin(), candidates.begin() + spec.eta0);
    std::sort(support.begin(), support.end());

    CouplingVector k = CouplingVector::uniform(r, 1.0);
    switch (spec.signal_class) {
        case SignalClass::fully_coupled:
            break;
        case SignalClass::fully_decoupled:
            k = CouplingVector::uniform(r, 0.0);
            break;
        case SignalClass::partially_coupled: {
            if (!(spec.coupled_fraction >= 0.0 && spec.coupled_fraction <= 1.0)) {
                throw InvalidArgument("gen_signals: coupled_fraction must lie in [0, 1]");
            }
            std::vector<Index> touched;
            for (Index c : support) {
                if (layout.is_harmonic(c)) continue;
                const Index mode = c < r ? c : c - layout.plus_column(0);
                if (std::find(touched.begin(), touched.end(), mode) == touched.end()) touched.push_back(mode);
            }
            std::sort(touched.begin(), touched.end());
            std::shuffle(touched.begin(), touched.end(), rng);
            const auto coupled = static_cast<std::size_t>(
                std::llround(spec.coupled_fraction * static_cast<double>(touched.size())));
            for (std::size_t j = coupled; j < touched.size(); ++j) {
                k.minus(touched[j]) = 0.0;
                k.plus(touched[j]) = 0.0;
            }
            break;
        }
        case SignalClass::mixture_of_dirac: {
            const double gamma = spec.cauchy_scale > 0.0 ? spec.cauchy_scale : median(d.sigma);
            k = CouplingVector::shared(cauchy_coupling(d.sigma, gamma));
            break;
        }
    }

    GeneratedSignals out;
    out.truth.support = support;
    out.truth.k = k;
    out.truth.basis = build_mass_basis(d, k, true).psi_bar;

    const Index T = spec.num_signals;
    std::normal_distribution<double> coeff(0.0, spec.coeff_std);
    out.truth.coefficients.resize(static_cast<Index>(support.size()), T);
    for (Index t = 0; t < T; ++t) {
        for (Index j = 0; j < out.truth.coefficients.rows(); ++j) out.truth.coefficients(j, t) = coeff(rng);
    }
    out.truth.clean = Eigen::MatrixXd::Zero(n, T);
    for (std::size_t j = 0; j < support.size(); ++j) {
        out.truth.clean += out.truth.basis.col(support[j]) * out.truth.coefficients.row(static_cast<Index>(j));
    }
    out.S = out.truth.clean;
    if (noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_std);
        for (Index t = 0; t < T; ++t) {
            for (Index row = 0; row < n; ++row) out.S(row, t) += noise(rng);
        }
    }
    return out;
}

NoisySignals add_awgn(const Eigen::MatrixXd& S, double snr_db, std::uint64_t seed) {
    NoisySignals out{S, 0.0};
    if (std::isinf(snr_db) && snr_db > 0.0) return out;
    const double count = static_cast<double>(S.size());
    if (count == 0.0) return out;
    out.noise_std = std::sqrt(S.squaredNorm() / (count * std::pow(10.0, snr_db / 10.0)));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, out.noise_std);
    for (Index t = 0; t < S.cols(); ++t) {
        for (Index row = 0; row < S.rows(); ++row) out.S(row, t) += noise(rng);
    }
    return out;
}

}  // namespace spinor
