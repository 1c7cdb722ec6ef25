// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spinor/ddtl.hpp"
#include "spinor/io.hpp"
#include "spinor/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spinor::cli {

namespace fs = std::filesystem;

// Run configurations. Every field has a default; JSON configs and flags
// override them in that order.

struct SpectraConfig {
    fs::path edge_list;
    fs::path output;  // results base path
};

struct SynthConfig {
    std::optional<fs::path> edge_list;  // random graph when absent
    Index num_nodes = 40;
    Index num_edges = 80;
    SignalClassSpec signals;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    fs::path output;  // output directory
};

struct FitConfig {
    fs::path edge_list;
    fs::path node_csv;
    fs::path edge_csv;
    DdtlConfig ddtl;
    fs::path output;  // results base path
};

struct SweepConfig {
    Index num_nodes = 40;
    Index num_edges = 80;
    SignalClassSpec signals;
    DdtlConfig ddtl;
    std::vector<Index> sparsity_grid{5, 10, 15, 20, 25, 30, 35, 40, 50, 60, 70};
    Index realizations = 10;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
    fs::path output;       // empty = do not write files
};

struct DenoiseConfig {
    // A dataset on disk; when absent a synthetic network surrogate is drawn.
    std::optional<fs::path> edge_list;
    std::optional<fs::path> node_csv;
    std::optional<fs::path> edge_csv;
    Index num_nodes = 22;
    Index num_edges = 41;
    SignalClassSpec signals;
    DdtlConfig ddtl;
    std::vector<double> snr_grid{0, 5, 10, 15, 20};
    std::vector<Index> bandwidth_grid{10, 30};
    Index realizations = 10;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    fs::path output;
};

SweepConfig default_sweep_config();
DenoiseConfig default_denoise_config();

// JSON mapping. Unknown keys are rejected so that typos do not silently
// fall back to defaults.
nlohmann::json to_json(const DdtlConfig& cfg);
DdtlConfig ddtl_config_from_json(const nlohmann::json& j, DdtlConfig base = {});
nlohmann::json to_json(const SignalClassSpec& spec);
SignalClassSpec signal_spec_from_json(const nlohmann::json& j, SignalClassSpec base = {});

nlohmann::json to_json(const SpectraConfig& cfg);
nlohmann::json to_json(const SynthConfig& cfg);
nlohmann::json to_json(const FitConfig& cfg);
nlohmann::json to_json(const SweepConfig& cfg);
nlohmann::json to_json(const DenoiseConfig& cfg);
SpectraConfig spectra_config_from_json(const nlohmann::json& j, SpectraConfig base = {});
SynthConfig synth_config_from_json(const nlohmann::json& j, SynthConfig base = {});
FitConfig fit_config_from_json(const nlohmann::json& j, FitConfig base = {});
SweepConfig sweep_config_from_json(const nlohmann::json& j, SweepConfig base = default_sweep_config());
DenoiseConfig denoise_config_from_json(const nlohmann::json& j, DenoiseConfig base = default_denoise_config());

// Per-fit diagnostics kept alongside the NMSE tables.
struct FitDiagnostics {
    Index iterations = 0;
    StopReason stop_reason = StopReason::max_iter;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    bool restored_initial = false;
    double relative_basis_residual = 0.0;
    double relative_code_residual = 0.0;
    double seconds = 0.0;  // wall time, never written to results files
};

FitDiagnostics diagnostics_of(const DdtlSolution& sol);
nlohmann::json to_json(const FitDiagnostics& diag);

struct SpectraReport {
    Eigen::VectorXd sigma;
    Index xi0 = 0;
    Index xi1 = 0;
    double dirac_square_residual = 0.0;  // max |D^2 - L_G|
    double phi_orthonormality = 0.0;     // max |Phi Phi^T - I|
    double theta_orthonormality = 0.0;
    double frame_tightness = 0.0;        // max |F F^T - 2I|
    double svd_residual = 0.0;           // max |B - U diag(sigma) V^T|
};

SpectraReport compute_spectra(const OrientedGraph& g);
SpectraReport cmd_spectra(const SpectraConfig& cfg);

struct SynthOutput {
    OrientedGraph graph;
    GeneratedSignals signals;
};

SynthOutput run_synth(const SynthConfig& cfg);
SynthOutput cmd_synth(const SynthConfig& cfg);

/// A DDTL fit as stored on disk: everything needed to rebuild S_hat.
struct StoredFit {
    CouplingVector k;
    Eigen::VectorXd scale_minus;
    Eigen::VectorXd scale_plus;
    Eigen::MatrixXd Omega;
    double nmse = 0.0;
};

DdtlSolution cmd_ddtl_fit(const FitConfig& cfg);
/// Writes `<base>.json`, `<base>_omega.csv` and `<base>_history.{json,csv}`.
void save_fit(const fs::path& base, const DdtlSolution& sol, const SpectralDecomposition& d, double fit_nmse,
              const nlohmann::json& config);
StoredFit load_fit(const fs::path& base);
/// S_hat rebuilt from a stored fit.
Eigen::MatrixXd stored_reconstruction(const StoredFit& fit, const SpectralDecomposition& d);

struct SweepRealization {
    std::uint64_t graph_seed = 0;
    std::uint64_t signal_seed = 0;
    std::uint64_t ddtl_seed = 0;
    Index rank = 0;
    Index xi0 = 0;
    Index xi1 = 0;
    FitDiagnostics fit;
    double fit_nmse = 0.0;  // nmse(S, S_hat) of the DDTL fit
    std::vector<IterationRecord> history;
    // method -> NMSE per grid entry
    std::vector<double> dirac;
    std::vector<double> laplacian;
    std::vector<double> frame;
    std::vector<double> ddtl;
};

struct SweepResult {
    ResultTable table;  // method, sparsity, realization, nmse
    std::vector<SweepRealization> realizations;
    /// Mean NMSE of `method` at grid position `index`.
    double mean(const std::string& method, std::size_t index) const;
};

/// One realization of the sweep; realizations are independent and can run
/// on separate threads.
SweepRealization run_sweep_realization(const SweepConfig& cfg, Index realization);
SweepResult run_sparsity_sweep(const SweepConfig& cfg);

struct DenoiseCell {
    double snr_db = 0.0;
    Index bandwidth = 0;
    Index realization = 0;
    double noisy = 0.0;
    double dirac_truncation = 0.0;
    double laplacian_truncation = 0.0;
    double ddtl = 0.0;
    FitDiagnostics fit;
};

struct DenoiseResult {
    ResultTable table;  // method, snr_db, bandwidth, realization, nmse
    std::vector<DenoiseCell> cells;
    /// Mean NMSE of `method` over realizations at (snr_db, bandwidth).
    double mean(const std::string& method, double snr_db, Index bandwidth) const;
};

/// Clean (V+E) x T signals used by the denoising study, loaded or drawn.
TimeSeriesDataset denoise_dataset(const DenoiseConfig& cfg);
DenoiseResult run_denoise(const DenoiseConfig& cfg);

/// Runs `task(i)` for i in [0, count) on up to `threads` workers.
void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& task);

/// One JSON line, {"error": kind, "message": ..., "command": ...}.
std::string error_line(const std::string& kind, const std::string& message, const std::string& command);

}  // namespace spinor::cli
