// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spinor/topology.hpp"
#include "spinor/transform.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spinor {

enum class SignalClass { fully_coupled, fully_decoupled, partially_coupled, mixture_of_dirac };

std::string to_string(SignalClass c);
/// Accepts the enumerator names and the short forms i, ii, iii, iv.
SignalClass signal_class_from_string(std::string_view name);

struct SignalClassSpec {
    SignalClass signal_class = SignalClass::fully_coupled;
    Index eta0 = 35;
    Index num_signals = 600;
    double coeff_std = 1.0;
    /// Fraction of touched modes held in the coupled regime (partially_coupled).
    double coupled_fraction = 0.5;
    /// Cauchy kernel width (mixture_of_dirac); non-positive selects the median singular value.
    double cauchy_scale = 0.0;
    bool exclude_harmonics = true;
    std::uint64_t seed = 0;
};

struct GroundTruth {
    /// Basis column indices carrying the signal, ascending, shared by all signals.
    std::vector<Index> support;
    /// |support| x T expansion coefficients.
    Eigen::MatrixXd coefficients;
    CouplingVector k;
    /// Unit-norm generating basis.
    Eigen::MatrixXd basis;
    Eigen::MatrixXd clean;
};

struct GeneratedSignals {
    Eigen::MatrixXd S;
    GroundTruth truth;
};

/// Deterministic sub-seed for (master, index, stage); splitmix64 over the
/// three inputs with an FNV-1a hash of the stage tag.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view stage);

/// Connected simple graph with exactly num_edges edges: a uniform random
/// labelled spanning tree (Pruefer code) plus uniformly chosen extra pairs,
/// each edge oriented by a fair coin.
OrientedGraph random_graph(Index num_nodes, Index num_edges, std::uint64_t seed);

/// Cauchy-profile coupling 1 / (1 + (sigma/gamma)^2).
Eigen::VectorXd cauchy_coupling(const Eigen::VectorXd& sigma, double gamma);

GeneratedSignals gen_signals(const SpectralDecomposition& d, const SignalClassSpec& spec, double noise_std = 0.0);

struct NoisySignals {
    Eigen::MatrixXd S;
    double noise_std = 0.0;
};

/// White Gaussian noise scaled so that ||S||^2 / (sigma^2 * rows * cols)
/// equals 10^(snr_db/10). An infinite SNR returns S unchanged.
NoisySignals add_awgn(const Eigen::MatrixXd& S, double snr_db, std::uint64_t seed);

}  // namespace spinor
