// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include "spinor/error.hpp"
#include "spinor/frames.hpp"
#include "spinor/sparse.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace spinor::cli {

namespace {

using nlohmann::json;

// ---- enum names ------------------------------------------------------------

template <class E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<OmegaUpdate> kOmegaUpdates[] = {{OmegaUpdate::exact_pair_block, "exact_pair_block"},
                                                     {OmegaUpdate::paper_diagonal, "paper_diagonal"}};
constexpr EnumName<InitMode> kInitModes[] = {{InitMode::dirac, "dirac"},
                                               {InitMode::laplacian, "laplacian"},
                                               {InitMode::random_uniform_box, "random_uniform_box"},
                                               {InitMode::user, "user"},
                                               {InitMode::best_limit, "best_limit"}};
constexpr EnumName<ColumnScaling> kScalings[] = {{ColumnScaling::lagged_unit, "lagged_unit"},
                                                   {ColumnScaling::none, "none"}};
constexpr EnumName<Reconstruction> kReconstructions[] = {{Reconstruction::omega, "omega"},
                                                           {Reconstruction::x, "x"}};

template <class E, std::size_t N>
std::string name_of(const EnumName<E> (&table)[N], E value) {
    for (const auto& entry : table) {
        if (entry.value == value) return entry.name;
    }
    throw InvalidArgument("unnamed enumerator");
}

template <class E, std::size_t N>
E value_of(const EnumName<E> (&table)[N], const std::string& name, const char* what) {
    for (const auto& entry : table) {
        if (name == entry.name) return entry.value;
    }
    std::string choices;
    for (const auto& entry : table) choices += std::string(choices.empty() ? "" : ", ") + entry.name;
    throw InvalidArgument(std::string("config: unknown ") + what + " '" + name + "' (expected one of " + choices +
                          ")");
}

// ---- JSON readers ------------------------------------------------------------

void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw InvalidArgument(std::string("config: ") + what + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) throw InvalidArgument(std::string("config: unknown key '") + item.key() + "' in " + what);
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

void read_path(const json& j, const char* key, fs::path& out) {
    std::string s;
    if (j.contains(key)) {
        read(j, key, s);
        out = s;
    }
}

void read_path(const json& j, const char* key, std::optional<fs::path>& out) {
    if (j.contains(key)) {
        if (j.at(key).is_null()) {
            out.reset();
            return;
        }
        std::string s;
        read(j, key, s);
        out = fs::path(s);
    }
}

json path_json(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json graph_summary(const OrientedGraph& g, const SpectralDecomposition& d) {
    return {{"num_nodes", g.num_nodes()},
            {"num_edges", g.num_edges()},
            {"rank", d.rank()},
            {"xi0", d.xi0()},
            {"xi1", d.xi1()}};
}

// Keep the eta0 highest-energy modes of an orthonormal basis.
Eigen::MatrixXd truncate(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& S, Index eta0) {
    return basis * row_hard_threshold(basis.transpose() * S, eta0).value;
}

void validate_grid(const std::vector<Index>& grid, Index max_value, const char* what) {
    if (grid.empty()) throw InvalidArgument(std::string(what) + " must not be empty");
    for (Index v : grid) {
        if (v < 1 || v > max_value) {
            throw InvalidArgument(std::string(what) + " entry " + std::to_string(v) + " outside [1, " +
                                  std::to_string(max_value) + "]");
        }
    }
}

}  // namespace

// ---- configuration -----------------------------------------------------------

SweepConfig default_sweep_config() {
    SweepConfig cfg;
    cfg.ddtl.init_mode = InitMode::best_limit;
    return cfg;
}

DenoiseConfig default_denoise_config() {
    DenoiseConfig cfg;
    cfg.signals.signal_class = SignalClass::mixture_of_dirac;
    cfg.signals.eta0 = 10;
    cfg.signals.num_signals = 240;
    cfg.ddtl.init_mode = InitMode::best_limit;
    return cfg;
}

json to_json(const DdtlConfig& cfg) {
    json j = {{"c1", cfg.c1},
              {"c2", cfg.c2},
              {"rho1", cfg.rho1},
              {"rho2", cfg.rho2},
              {"eta0", cfg.eta0},
              {"max_iter", cfg.max_iter},
              {"primal_tol", cfg.primal_tol},
              {"k_solver_tol", cfg.k_solver_tol},
              {"k_solver_max_sweeps", cfg.k_solver_max_sweeps},
              {"omega_update", name_of(kOmegaUpdates, cfg.omega_update)},
              {"init_mode", name_of(kInitModes, cfg.init_mode)},
              {"column_scaling", name_of(kScalings, cfg.column_scaling)},
              {"reconstruction", name_of(kReconstructions, cfg.reconstruction)},
              {"seed", cfg.seed}};
    if (cfg.user_k) {
        j["user_k"] = {{"minus", to_vector(cfg.user_k->minus)}, {"plus", to_vector(cfg.user_k->plus)}};
    }
    return j;
}

DdtlConfig ddtl_config_from_json(const json& j, DdtlConfig cfg) {
    require_object(j, "ddtl");
    reject_unknown(j,
                   {"c1", "c2", "rho1", "rho2", "eta0", "max_iter", "primal_tol", "k_solver_tol",
                    "k_solver_max_sweeps", "omega_update", "init_mode", "column_scaling", "reconstruction", "seed",
                    "user_k"},
                   "ddtl");
    read(j, "c1", cfg.c1);
    read(j, "c2", cfg.c2);
    read(j, "rho1", cfg.rho1);
    read(j, "rho2", cfg.rho2);
    read(j, "eta0", cfg.eta0);
    read(j, "max_iter", cfg.max_iter);
    read(j, "primal_tol", cfg.primal_tol);
    read(j, "k_solver_tol", cfg.k_solver_tol);
    read(j, "k_solver_max_sweeps", cfg.k_solver_max_sweeps);
    read(j, "seed", cfg.seed);
    std::string name;
    if (j.contains("omega_update")) {
        read(j, "omega_update", name);
        cfg.omega_update = value_of(kOmegaUpdates, name, "omega_update");
    }
    if (j.contains("init_mode")) {
        read(j, "init_mode", name);
        cfg.init_mode = value_of(kInitModes, name, "init_mode");
    }
    if (j.contains("column_scaling")) {
        read(j, "column_scaling", name);
        cfg.column_scaling = value_of(kScalings, name, "column_scaling");
    }
    if (j.contains("reconstruction")) {
        read(j, "reconstruction", name);
        cfg.reconstruction = value_of(kReconstructions, name, "reconstruction");
    }
    if (j.contains("user_k")) {
        const json& k = j.at("user_k");
        require_object(k, "ddtl.user_k");
        reject_unknown(k, {"minus", "plus"}, "ddtl.user_k");
        std::vector<double> minus;
        std::vector<double> plus;
        read(k, "minus", minus);
        read(k, "plus", plus);
        CouplingVector user;
        user.minus = from_vector(minus);
        user.plus = from_vector(plus);
        cfg.user_k = user;
    }
    return cfg;
}

json to_json(const SignalClassSpec& spec) {
    return {{"class", to_string(spec.signal_class)},
            {"eta0", spec.eta0},
            {"num_signals", spec.num_signals},
            {"coeff_std", spec.coeff_std},
            {"coupled_fraction", spec.coupled_fraction},
            {"cauchy_scale", spec.cauchy_scale},
            {"exclude_harmonics", spec.exclude_harmonics}};
}

SignalClassSpec signal_spec_from_json(const json& j, SignalClassSpec spec) {
    require_object(j, "signals");
    reject_unknown(j, {"class", "eta0", "num_signals", "coeff_std", "coupled_fraction", "cauchy_scale",
                       "exclude_harmonics"},
                   "signals");
    if (j.contains("class")) {
        std::string name;
        read(j, "class", name);
        spec.signal_class = signal_class_from_string(name);
    }
    read(j, "eta0", spec.eta0);
    read(j, "num_signals", spec.num_signals);
    read(j, "coeff_std", spec.coeff_std);
    read(j, "coupled_fraction", spec.coupled_fraction);
    read(j, "cauchy_scale", spec.cauchy_scale);
    read(j, "exclude_harmonics", spec.exclude_harmonics);
    return spec;
}

json to_json(const SpectraConfig& cfg) {
    return {{"graph", cfg.edge_list.string()}, {"output", cfg.output.string()}};
}

SpectraConfig spectra_config_from_json(const json& j, SpectraConfig cfg) {
    require_object(j, "spectra config");
    reject_unknown(j, {"graph", "output"}, "spectra config");
    read_path(j, "graph", cfg.edge_list);
    read_path(j, "output", cfg.output);
    return cfg;
}

json to_json(const SynthConfig& cfg) {
    return {{"graph", path_json(cfg.edge_list)}, {"num_nodes", cfg.num_nodes}, {"num_edges", cfg.num_edges},
            {"signals", to_json(cfg.signals)},   {"noise_std", cfg.noise_std}, {"seed", cfg.seed},
            {"output", cfg.output.string()}};
}

SynthConfig synth_config_from_json(const json& j, SynthConfig cfg) {
    require_object(j, "synth config");
    reject_unknown(j, {"graph", "num_nodes", "num_edges", "signals", "noise_std", "seed", "output", "eta0"},
                   "synth config");
    read_path(j, "graph", cfg.edge_list);
    read(j, "num_nodes", cfg.num_nodes);
    read(j, "num_edges", cfg.num_edges);
    read(j, "eta0", cfg.signals.eta0);
    if (j.contains("signals")) cfg.signals = signal_spec_from_json(j.at("signals"), cfg.signals);
    read(j, "noise_std", cfg.noise_std);
    read(j, "seed", cfg.seed);
    read_path(j, "output", cfg.output);
    return cfg;
}

json to_json(const FitConfig& cfg) {
    return {{"graph", cfg.edge_list.string()},
            {"node_csv", cfg.node_csv.string()},
            {"edge_csv", cfg.edge_csv.string()},
            {"ddtl", to_json(cfg.ddtl)},
            {"output", cfg.output.string()}};
}

FitConfig fit_config_from_json(const json& j, FitConfig cfg) {
    require_object(j, "ddtl-fit config");
    reject_unknown(j, {"graph", "node_csv", "edge_csv", "ddtl", "output", "eta0", "seed"}, "ddtl-fit config");
    read_path(j, "graph", cfg.edge_list);
    read_path(j, "node_csv", cfg.node_csv);
    read_path(j, "edge_csv", cfg.edge_csv);
    read(j, "eta0", cfg.ddtl.eta0);
    read(j, "seed", cfg.ddtl.seed);
    if (j.contains("ddtl")) cfg.ddtl = ddtl_config_from_json(j.at("ddtl"), cfg.ddtl);
    read_path(j, "output", cfg.output);
    return cfg;
}

json to_json(const SweepConfig& cfg) {
    return {{"num_nodes", cfg.num_nodes},
            {"num_edges", cfg.num_edges},
            {"signals", to_json(cfg.signals)},
            {"ddtl", to_json(cfg.ddtl)},
            {"sparsity_grid", cfg.sparsity_grid},
            {"realizations", cfg.realizations},
            {"seed", cfg.seed},
            {"output", cfg.output.string()}};
}

SweepConfig sweep_config_from_json(const json& j, SweepConfig cfg) {
    require_object(j, "sparsity-sweep config");
    reject_unknown(j,
                   {"num_nodes", "num_edges", "signals", "ddtl", "sparsity_grid", "realizations", "seed", "threads",
                    "output", "eta0"},
                   "sparsity-sweep config");
    read(j, "num_nodes", cfg.num_nodes);
    read(j, "num_edges", cfg.num_edges);
    if (j.contains("eta0")) {
        read(j, "eta0", cfg.signals.eta0);
        cfg.ddtl.eta0 = cfg.signals.eta0;
    }
    if (j.contains("signals")) cfg.signals = signal_spec_from_json(j.at("signals"), cfg.signals);
    if (j.contains("ddtl")) cfg.ddtl = ddtl_config_from_json(j.at("ddtl"), cfg.ddtl);
    read(j, "sparsity_grid", cfg.sparsity_grid);
    read(j, "realizations", cfg.realizations);
    read(j, "seed", cfg.seed);
    read(j, "threads", cfg.threads);
    read_path(j, "output", cfg.output);
    return cfg;
}

json to_json(const DenoiseConfig& cfg) {
    return {{"graph", path_json(cfg.edge_list)},
            {"node_csv", path_json(cfg.node_csv)},
            {"edge_csv", path_json(cfg.edge_csv)},
            {"num_nodes", cfg.num_nodes},
            {"num_edges", cfg.num_edges},
            {"signals", to_json(cfg.signals)},
            {"ddtl", to_json(cfg.ddtl)},
            {"snr_grid", cfg.snr_grid},
            {"bandwidth_grid", cfg.bandwidth_grid},
            {"realizations", cfg.realizations},
            {"seed", cfg.seed},
            {"output", cfg.output.string()}};
}

DenoiseConfig denoise_config_from_json(const json& j, DenoiseConfig cfg) {
    require_object(j, "denoise config");
    reject_unknown(j,
                   {"graph", "node_csv", "edge_csv", "num_nodes", "num_edges", "signals", "ddtl", "snr_grid",
                    "bandwidth_grid", "realizations", "seed", "threads", "output"},
                   "denoise config");
    read_path(j, "graph", cfg.edge_list);
    read_path(j, "node_csv", cfg.node_csv);
    read_path(j, "edge_csv", cfg.edge_csv);
    read(j, "num_nodes", cfg.num_nodes);
    read(j, "num_edges", cfg.num_edges);
    if (j.contains("signals")) cfg.signals = signal_spec_from_json(j.at("signals"), cfg.signals);
    if (j.contains("ddtl")) cfg.ddtl = ddtl_config_from_json(j.at("ddtl"), cfg.ddtl);
    read(j, "snr_grid", cfg.snr_grid);
    read(j, "bandwidth_grid", cfg.bandwidth_grid);
    read(j, "realizations", cfg.realizations);
    read(j, "seed", cfg.seed);
    read(j, "threads", cfg.threads);
    read_path(j, "output", cfg.output);
    return cfg;
}

// ---- shared pieces -------------------------------------------------------------

FitDiagnostics diagnostics_of(const DdtlSolution& sol) {
    FitDiagnostics diag;
    diag.iterations = static_cast<Index>(sol.history.size());
    diag.stop_reason = sol.stop_reason;
    diag.initial_objective = sol.initial_objective;
    diag.final_objective = sol.final_objective;
    diag.restored_initial = sol.restored_initial;
    if (!sol.history.empty()) {
        diag.relative_basis_residual = sol.history.back().relative_basis_residual;
        diag.relative_code_residual = sol.history.back().relative_code_residual;
    }
    return diag;
}

json to_json(const FitDiagnostics& diag) {
    return {{"iterations", diag.iterations},
            {"stop_reason", to_string(diag.stop_reason)},
            {"initial_objective", diag.initial_objective},
            {"final_objective", diag.final_objective},
            {"restored_initial", diag.restored_initial},
            {"relative_basis_residual", diag.relative_basis_residual},
            {"relative_code_residual", diag.relative_code_residual}};
}

void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& task) {
    if (count <= 0) return;
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<Index>(workers, count));
    if (workers <= 1) {
        for (Index i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (Index i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    // Report the failure of the lowest index, as a sequential run would.
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string error_line(const std::string& kind, const std::string& message, const std::string& command) {
    return json{{"error", kind}, {"message", message}, {"command", command}}.dump();
}

// ---- spectra -------------------------------------------------------------------

SpectraReport compute_spectra(const OrientedGraph& g) {
    const IncidenceMatrix B = build_incidence(g);
    const SpectralDecomposition d = spectral_decompose(B);
    const Index n = B.dim();
    auto max_abs = [](const Eigen::MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; };

    SpectraReport rep;
    rep.sigma = d.sigma;
    rep.xi0 = d.xi0();
    rep.xi1 = d.xi1();
    const Eigen::MatrixXd D = dirac_matrix(B);
    rep.dirac_square_residual = max_abs(D * D - super_laplacian(B));
    const Eigen::MatrixXd phi = dirac_eigenbasis(d).vectors;
    const Eigen::MatrixXd theta = super_laplacian_eigenbasis(d).vectors;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    rep.phi_orthonormality = max_abs(phi * phi.transpose() - I);
    rep.theta_orthonormality = max_abs(theta * theta.transpose() - I);
    const DiracLaplacianFrame F = build_frame(phi, theta);
    rep.frame_tightness = max_abs(F.matrix() * F.matrix().transpose() - 2.0 * I);
    rep.svd_residual = max_abs(B.matrix() - d.U * d.sigma.asDiagonal() * d.V.transpose());
    return rep;
}

SpectraReport cmd_spectra(const SpectraConfig& cfg) {
    if (cfg.edge_list.empty()) throw InvalidArgument("spectra: --graph is required");
    const OrientedGraph g = load_edge_list(cfg.edge_list);
    SpectraReport rep = compute_spectra(g);
    if (!cfg.output.empty()) {
        ResultTable table;
        table.metadata = {{"config", to_json(cfg)},
                          {"num_nodes", g.num_nodes()},
                          {"num_edges", g.num_edges()},
                          {"rank", rep.sigma.size()},
                          {"xi0", rep.xi0},
                          {"xi1", rep.xi1},
                          {"sigma", to_vector(rep.sigma)},
                          {"residuals",
                           {{"dirac_square", rep.dirac_square_residual},
                            {"phi_orthonormality", rep.phi_orthonormality},
                            {"theta_orthonormality", rep.theta_orthonormality},
                            {"frame_tightness", rep.frame_tightness},
                            {"svd", rep.svd_residual}}}};
        table.columns = {"index", "sigma"};
        for (Index i = 0; i < rep.sigma.size(); ++i) table.rows.push_back({std::int64_t{i}, rep.sigma(i)});
        save_results(cfg.output, table);
    }
    return rep;
}

// ---- synth -----------------------------------------------------------------------

SynthOutput run_synth(const SynthConfig& cfg) {
    OrientedGraph g = cfg.edge_list ? load_edge_list(*cfg.edge_list)
                                    : random_graph(cfg.num_nodes, cfg.num_edges, derive_seed(cfg.seed, 0, "graph"));
    const SpectralDecomposition d = spectral_decompose(build_incidence(g));
    SignalClassSpec spec = cfg.signals;
    spec.seed = derive_seed(cfg.seed, 0, "signals");
    GeneratedSignals sig = gen_signals(d, spec, cfg.noise_std);
    return SynthOutput{std::move(g), std::move(sig)};
}

SynthOutput cmd_synth(const SynthConfig& cfg) {
    if (cfg.output.empty()) throw InvalidArgument("synth: --output directory is required");
    SynthOutput out = run_synth(cfg);
    fs::create_directories(cfg.output);
    save_edge_list(cfg.output / "graph.txt", out.graph);
    save_time_series(TimeSeriesDataset::from_spinors(out.graph, out.signals.S), cfg.output / "nodes.csv",
                     cfg.output / "edges.csv");
    save_time_series(TimeSeriesDataset::from_spinors(out.graph, out.signals.truth.clean),
                     cfg.output / "clean_nodes.csv", cfg.output / "clean_edges.csv");
    const GroundTruth& t = out.signals.truth;
    const json truth = {{"config", to_json(cfg)},
                        {"seeds",
                         {{"graph", cfg.edge_list ? json(nullptr) : json(derive_seed(cfg.seed, 0, "graph"))},
                          {"signals", derive_seed(cfg.seed, 0, "signals")}}},
                        {"support", t.support},
                        {"k_minus", to_vector(t.k.minus)},
                        {"k_plus", to_vector(t.k.plus)}};
    write_json(cfg.output / "truth.json", truth);
    save_csv_matrix(cfg.output / "coefficients.csv", t.coefficients);
    return out;
}

// ---- ddtl-fit --------------------------------------------------------------------

void save_fit(const fs::path& base, const DdtlSolution& sol, const SpectralDecomposition& d, double fit_nmse,
              const json& config) {
    const json meta = {{"config", config},
                       {"rank", d.rank()},
                       {"xi0", d.xi0()},
                       {"xi1", d.xi1()},
                       {"k_star", to_vector(sol.k_star.stacked())},
                       {"scale_minus", to_vector(sol.scale_minus)},
                       {"scale_plus", to_vector(sol.scale_plus)},
                       {"nmse", fit_nmse},
                       {"diagnostics", to_json(diagnostics_of(sol))}};
    write_json(fs::path(base.string() + ".json"), meta);
    save_csv_matrix(fs::path(base.string() + "_omega.csv"), sol.Omega_star);
    save_csv_matrix(fs::path(base.string() + "_x.csv"), sol.X_star);

    ResultTable hist;
    hist.metadata = {{"initial_objective", sol.initial_objective}};
    hist.columns = {"iteration", "objective", "fit", "lagrangian", "basis_residual", "code_residual",
                    "relative_basis_residual", "relative_code_residual"};
    for (std::size_t i = 0; i < sol.history.size(); ++i) {
        const IterationRecord& r = sol.history[i];
        hist.rows.push_back({static_cast<std::int64_t>(i + 1), r.objective, r.fit, r.lagrangian, r.basis_residual,
                             r.code_residual, r.relative_basis_residual, r.relative_code_residual});
    }
    save_results(fs::path(base.string() + "_history"), hist);
}

StoredFit load_fit(const fs::path& base) {
    const json meta = read_json(fs::path(base.string() + ".json"));
    StoredFit fit;
    const Eigen::VectorXd k = from_vector(meta.at("k_star").get<std::vector<double>>());
    const Index r = meta.at("rank").get<Index>();
    if (k.size() != 2 * r) throw ParseError(1, "k_star must hold 2r entries");
    const json& ddtl = meta.at("config").at("ddtl");
    fit.k = CouplingVector{k.head(r), k.tail(r), ddtl.value("c1", 1.0), ddtl.value("c2", 1.0)};
    fit.scale_minus = from_vector(meta.at("scale_minus").get<std::vector<double>>());
    fit.scale_plus = from_vector(meta.at("scale_plus").get<std::vector<double>>());
    fit.nmse = meta.at("nmse").get<double>();
    const std::string codes =
        ddtl.value("reconstruction", std::string("omega")) == "x" ? "_x.csv" : "_omega.csv";
    fit.Omega = load_csv_matrix(fs::path(base.string() + codes)).values;
    return fit;
}

Eigen::MatrixXd stored_reconstruction(const StoredFit& fit, const SpectralDecomposition& d) {
    return mass_basis_matrix(d, fit.k.minus, fit.k.plus, fit.scale_minus, fit.scale_plus) * fit.Omega;
}

DdtlSolution cmd_ddtl_fit(const FitConfig& cfg) {
    if (cfg.edge_list.empty() || cfg.node_csv.empty() || cfg.edge_csv.empty()) {
        throw InvalidArgument("ddtl-fit: --graph, --node-csv and --edge-csv are required");
    }
    const OrientedGraph g = load_edge_list(cfg.edge_list);
    const TimeSeriesDataset data = load_time_series(g, cfg.node_csv, cfg.edge_csv);
    const SpectralDecomposition d = spectral_decompose(build_incidence(g));
    const Eigen::MatrixXd S = data.spinors();
    DdtlSolution sol = ddtl_fit(S, d, cfg.ddtl);
    if (!cfg.output.empty()) save_fit(cfg.output, sol, d, nmse(S, sol.S_hat), to_json(cfg));
    return sol;
}

// ---- sparsity sweep --------------------------------------------------------------

double SweepResult::mean(const std::string& method, std::size_t index) const {
    double sum = 0.0;
    for (const auto& r : realizations) {
        const std::vector<double>* v = method == "dirac"       ? &r.dirac
                                       : method == "laplacian" ? &r.laplacian
                                       : method == "frame"     ? &r.frame
                                       : method == "ddtl"      ? &r.ddtl
                                                               : nullptr;
        if (!v) throw InvalidArgument("unknown method '" + method + "'");
        sum += v->at(index);
    }
    return realizations.empty() ? 0.0 : sum / static_cast<double>(realizations.size());
}

SweepRealization run_sweep_realization(const SweepConfig& cfg, Index realization) {
    const auto index = static_cast<std::uint64_t>(realization);
    SweepRealization out;
    out.graph_seed = derive_seed(cfg.seed, index, "graph");
    out.signal_seed = derive_seed(cfg.seed, index, "signals");
    out.ddtl_seed = derive_seed(cfg.seed, index, "ddtl");

    const OrientedGraph g = random_graph(cfg.num_nodes, cfg.num_edges, out.graph_seed);
    const SpectralDecomposition d = spectral_decompose(build_incidence(g));
    out.rank = d.rank();
    out.xi0 = d.xi0();
    out.xi1 = d.xi1();

    SignalClassSpec spec = cfg.signals;
    spec.seed = out.signal_seed;
    const Eigen::MatrixXd S = gen_signals(d, spec).S;

    DdtlConfig ddtl = cfg.ddtl;
    ddtl.seed = out.ddtl_seed;
    const auto t0 = std::chrono::steady_clock::now();
    DdtlSolution sol = ddtl_fit(S, d, ddtl);
    out.fit = diagnostics_of(sol);
    out.fit.seconds = seconds_since(t0);
    out.fit_nmse = nmse(S, sol.S_hat);
    out.history = std::move(sol.history);

    const Eigen::MatrixXd phi = dirac_eigenbasis(d).vectors;
    const Eigen::MatrixXd theta = super_laplacian_eigenbasis(d).vectors;
    const DiracLaplacianFrame frame = build_frame(phi, theta);
    const Index top = *std::max_element(cfg.sparsity_grid.begin(), cfg.sparsity_grid.end());

    auto sample = [&](const Eigen::MatrixXd& dict) {
        const std::vector<double> path = omp_nmse_path(dict, S, top);
        std::vector<double> at;
        for (Index s : cfg.sparsity_grid) at.push_back(path[static_cast<std::size_t>(s - 1)]);
        return at;
    };
    out.laplacian = sample(theta);
    out.dirac = sample(phi);
    out.frame = sample(frame.matrix());
    out.ddtl = sample(sol.basis.psi_bar);
    return out;
}

SweepResult run_sparsity_sweep(const SweepConfig& cfg) {
    if (cfg.realizations < 1) throw InvalidArgument("sparsity-sweep: realizations must be positive");
    validate_grid(cfg.sparsity_grid, 2 * (cfg.num_nodes + cfg.num_edges), "sparsity grid");

    SweepResult result;
    result.realizations.resize(static_cast<std::size_t>(cfg.realizations));
    parallel_for(cfg.realizations, cfg.threads, [&](Index i) {
        result.realizations[static_cast<std::size_t>(i)] = run_sweep_realization(cfg, i);
    });

    ResultTable& table = result.table;
    table.columns = {"method", "sparsity", "realization", "nmse"};
    json per_realization = json::array();
    for (std::size_t i = 0; i < result.realizations.size(); ++i) {
        const SweepRealization& r = result.realizations[i];
        const std::pair<const char*, const std::vector<double>*> methods[] = {
            {"laplacian", &r.laplacian}, {"dirac", &r.dirac}, {"frame", &r.frame}, {"ddtl", &r.ddtl}};
        for (const auto& [name, values] : methods) {
            for (std::size_t s = 0; s < cfg.sparsity_grid.size(); ++s) {
                table.rows.push_back({std::string(name), std::int64_t{cfg.sparsity_grid[s]},
                                      static_cast<std::int64_t>(i), (*values)[s]});
            }
        }
        per_realization.push_back({{"realization", i},
                                   {"seeds", {{"graph", r.graph_seed}, {"signals", r.signal_seed}, {"ddtl", r.ddtl_seed}}},
                                   {"graph", {{"num_nodes", cfg.num_nodes},
                                              {"num_edges", cfg.num_edges},
                                              {"rank", r.rank},
                                              {"xi0", r.xi0},
                                              {"xi1", r.xi1}}},
                                   {"ddtl", to_json(r.fit)},
                                   {"ddtl_fit_nmse", r.fit_nmse}});
    }
    table.metadata = {{"command", "sparsity-sweep"},
                      {"config", to_json(cfg)},
                      {"seed_rule", "derive_seed(seed, realization, stage)"},
                      {"realizations", per_realization}};
    if (!cfg.output.empty()) save_results(cfg.output, table);
    return result;
}

// ---- denoise -------------------------------------------------------------------------

double DenoiseResult::mean(const std::string& method, double snr_db, Index bandwidth) const {
    double sum = 0.0;
    Index count = 0;
    for (const auto& c : cells) {
        if (c.snr_db != snr_db || c.bandwidth != bandwidth) continue;
        sum += method == "noisy"                  ? c.noisy
               : method == "dirac_truncation"     ? c.dirac_truncation
               : method == "laplacian_truncation" ? c.laplacian_truncation
               : method == "ddtl"                 ? c.ddtl
                                                  : throw InvalidArgument("unknown method '" + method + "'");
        ++count;
    }
    if (count == 0) throw InvalidArgument("no denoising cells at the requested grid point");
    return sum / static_cast<double>(count);
}

TimeSeriesDataset denoise_dataset(const DenoiseConfig& cfg) {
    if (cfg.edge_list || cfg.node_csv || cfg.edge_csv) {
        if (!(cfg.edge_list && cfg.node_csv && cfg.edge_csv)) {
            throw InvalidArgument("denoise: --graph, --node-csv and --edge-csv must be given together");
        }
        return load_time_series(load_edge_list(*cfg.edge_list), *cfg.node_csv, *cfg.edge_csv);
    }
    OrientedGraph g = random_graph(cfg.num_nodes, cfg.num_edges, derive_seed(cfg.seed, 0, "graph"));
    const SpectralDecomposition d = spectral_decompose(build_incidence(g));
    SignalClassSpec spec = cfg.signals;
    spec.seed = derive_seed(cfg.seed, 0, "signals");
    const Eigen::MatrixXd clean = gen_signals(d, spec).S;
    return TimeSeriesDataset::from_spinors(std::move(g), clean);
}

DenoiseResult run_denoise(const DenoiseConfig& cfg) {
    if (cfg.realizations < 1) throw InvalidArgument("denoise: realizations must be positive");
    if (cfg.snr_grid.empty()) throw InvalidArgument("denoise: SNR grid must not be empty");
    const TimeSeriesDataset data = denoise_dataset(cfg);
    const SpectralDecomposition d = spectral_decompose(build_incidence(data.graph));
    validate_grid(cfg.bandwidth_grid, d.dim(), "bandwidth grid");
    const Eigen::MatrixXd clean = data.spinors();
    const Eigen::MatrixXd phi = dirac_eigenbasis(d).vectors;
    const Eigen::MatrixXd theta = super_laplacian_eigenbasis(d).vectors;

    const Index num_snr = static_cast<Index>(cfg.snr_grid.size());
    const std::size_t per_task = cfg.bandwidth_grid.size();
    std::vector<DenoiseCell> cells(static_cast<std::size_t>(num_snr * cfg.realizations) * per_task);

    parallel_for(num_snr * cfg.realizations, cfg.threads, [&](Index task) {
        const Index a = task / cfg.realizations;
        const Index j = task % cfg.realizations;
        const double snr = cfg.snr_grid[static_cast<std::size_t>(a)];
        const std::string stage = "noise/" + std::to_string(a);
        const Eigen::MatrixXd noisy = add_awgn(clean, snr, derive_seed(cfg.seed, static_cast<std::uint64_t>(j), stage)).S;
        const double noisy_nmse = nmse(clean, noisy);
        for (std::size_t b = 0; b < per_task; ++b) {
            DenoiseCell& cell = cells[static_cast<std::size_t>(task) * per_task + b];
            cell.snr_db = snr;
            cell.bandwidth = cfg.bandwidth_grid[b];
            cell.realization = j;
            cell.noisy = noisy_nmse;
            cell.dirac_truncation = nmse(clean, truncate(phi, noisy, cell.bandwidth));
            cell.laplacian_truncation = nmse(clean, truncate(theta, noisy, cell.bandwidth));
            DdtlConfig ddtl = cfg.ddtl;
            ddtl.eta0 = cell.bandwidth;
            ddtl.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(j), "ddtl");
            const auto t0 = std::chrono::steady_clock::now();
            const DdtlSolution sol = ddtl_fit(noisy, d, ddtl);
            cell.fit = diagnostics_of(sol);
            cell.fit.seconds = seconds_since(t0);
            cell.ddtl = nmse(clean, sol.S_hat);
        }
    });

    DenoiseResult result;
    result.cells = std::move(cells);
    ResultTable& table = result.table;
    table.columns = {"method", "snr_db", "bandwidth", "realization", "nmse"};
    json fits = json::array();
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const DenoiseCell& cell = result.cells[c];
        // The noisy input does not depend on the bandwidth; it is listed once
        // per (snr, realization) with bandwidth 0.
        if (c % per_task == 0) {
            table.rows.push_back({std::string("noisy"), cell.snr_db, std::int64_t{0},
                                  std::int64_t{cell.realization}, cell.noisy});
        }
        const auto bw = std::int64_t{cell.bandwidth};
        const auto rz = std::int64_t{cell.realization};
        table.rows.push_back({std::string("dirac_truncation"), cell.snr_db, bw, rz, cell.dirac_truncation});
        table.rows.push_back({std::string("laplacian_truncation"), cell.snr_db, bw, rz, cell.laplacian_truncation});
        table.rows.push_back({std::string("ddtl"), cell.snr_db, bw, rz, cell.ddtl});
        json f = to_json(cell.fit);
        f["snr_db"] = cell.snr_db;
        f["bandwidth"] = cell.bandwidth;
        f["realization"] = cell.realization;
        fits.push_back(f);
    }
    table.metadata = {{"command", "denoise"},
                      {"config", to_json(cfg)},
                      {"seed_rule", "derive_seed(seed, realization, stage)"},
                      {"graph", graph_summary(data.graph, d)},
                      {"num_steps", data.num_steps()},
                      {"ddtl_fits", fits}};
    if (!cfg.output.empty()) save_results(cfg.output, table);
    return result;
}

}  // namespace spinor::cli
