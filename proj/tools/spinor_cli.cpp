// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Each subcommand starts from its defaults, applies
// an optional --config JSON file and then any flags given explicitly.

#include "commands.hpp"

#include "spinor/error.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace spinor;
using namespace spinor::cli;
using nlohmann::json;

namespace {

template <class T>
void override_with(const std::optional<T>& flag, T& target) {
    if (flag) target = *flag;
}

void override_with(const std::optional<std::string>& flag, fs::path& target) {
    if (flag) target = *flag;
}

void override_with(const std::optional<std::string>& flag, std::optional<fs::path>& target) {
    if (flag) target = fs::path(*flag);
}

json load_config(const std::optional<std::string>& path) {
    return path ? read_json(*path) : json::object();
}

struct DdtlFlags {
    std::optional<double> c1, c2, rho1, rho2, tol;
    std::optional<Index> eta0, max_iter;
    std::optional<std::string> init, omega_update, column_scaling, reconstruction;

    void add(CLI::App* cmd, bool with_eta0) {
        if (with_eta0) cmd->add_option("--eta0", eta0, "Row sparsity of the codes");
        cmd->add_option("--c1", c1, "Upper coupling bound");
        cmd->add_option("--c2", c2, "Lower coupling bound magnitude");
        cmd->add_option("--rho1", rho1, "Basis penalty");
        cmd->add_option("--rho2", rho2, "Code penalty");
        cmd->add_option("--max-iter", max_iter, "Iteration limit");
        cmd->add_option("--tol", tol, "Relative primal residual tolerance");
        cmd->add_option("--init", init, "dirac, laplacian, best_limit or random_uniform_box");
        cmd->add_option("--omega-update", omega_update, "exact_pair_block or paper_diagonal");
        cmd->add_option("--column-scaling", column_scaling, "lagged_unit or none");
        cmd->add_option("--reconstruction", reconstruction, "omega or x");
    }

    void apply_to(DdtlConfig& cfg) const {
        json j = json::object();
        if (init) j["init_mode"] = *init;
        if (omega_update) j["omega_update"] = *omega_update;
        if (column_scaling) j["column_scaling"] = *column_scaling;
        if (reconstruction) j["reconstruction"] = *reconstruction;
        cfg = ddtl_config_from_json(j, cfg);
        override_with(c1, cfg.c1);
        override_with(c2, cfg.c2);
        override_with(rho1, cfg.rho1);
        override_with(rho2, cfg.rho2);
        override_with(eta0, cfg.eta0);
        override_with(max_iter, cfg.max_iter);
        override_with(tol, cfg.primal_tol);
    }
};

struct SignalFlags {
    std::optional<std::string> signal_class;
    std::optional<Index> num_signals;
    std::optional<double> coeff_std, coupled_fraction, cauchy_scale;

    void add(CLI::App* cmd, const char* count_flag) {
        cmd->add_option("--class", signal_class, "i, ii, iii, iv or a class name");
        cmd->add_option(count_flag, num_signals, "Number of signals");
        cmd->add_option("--coeff-std", coeff_std, "Coefficient standard deviation");
        cmd->add_option("--coupled-fraction", coupled_fraction, "Coupled share for class iii");
        cmd->add_option("--cauchy-scale", cauchy_scale, "Cauchy width for class iv (0 = median sigma)");
    }

    void apply_to(SignalClassSpec& spec) const {
        if (signal_class) spec.signal_class = signal_class_from_string(*signal_class);
        override_with(num_signals, spec.num_signals);
        override_with(coeff_std, spec.coeff_std);
        override_with(coupled_fraction, spec.coupled_fraction);
        override_with(cauchy_scale, spec.cauchy_scale);
    }
};

void print(const json& j) { std::cout << j.dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological spinor signal processing and transform learning"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> graph, node_csv, edge_csv;
    std::optional<Index> num_nodes, num_edges;
    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("-o,--output", output, "Output path");
    };

    CLI::App* spectra = app.add_subcommand("spectra", "Spectral summary of a graph");
    common(spectra);
    spectra->add_option("-g,--graph", graph, "Edge list file");

    CLI::App* synth = app.add_subcommand("synth", "Draw a graph and synthetic spinor signals");
    common(synth);
    SignalFlags synth_signals;
    std::optional<Index> synth_eta0;
    std::optional<double> noise_std;
    bool include_harmonics = false;
    synth->add_option("-g,--graph", graph, "Edge list file (random graph when omitted)");
    synth->add_option("--num-nodes", num_nodes, "Nodes of the random graph");
    synth->add_option("--num-edges", num_edges, "Edges of the random graph");
    synth->add_option("--eta0", synth_eta0, "Atoms per signal set");
    synth->add_option("--noise-std", noise_std, "Gaussian noise standard deviation");
    synth->add_option("--seed", seed, "Master seed");
    synth->add_flag("--include-harmonics", include_harmonics, "Allow harmonic atoms in the support");
    synth_signals.add(synth, "--num-signals");

    CLI::App* fit = app.add_subcommand("ddtl-fit", "Learn a mass basis from data on disk");
    common(fit);
    DdtlFlags fit_flags;
    fit->add_option("-g,--graph", graph, "Edge list file");
    fit->add_option("--node-csv", node_csv, "Node series, T x V");
    fit->add_option("--edge-csv", edge_csv, "Edge series, T x E");
    fit->add_option("--seed", seed, "Seed for random initialisation");
    fit_flags.add(fit, true);

    CLI::App* sweep = app.add_subcommand("sparsity-sweep", "NMSE against sparsity for every dictionary");
    common(sweep);
    SignalFlags sweep_signals;
    DdtlFlags sweep_flags;
    std::optional<Index> sweep_eta0, realizations;
    std::optional<std::vector<Index>> sparsity_grid;
    sweep->add_option("--num-nodes", num_nodes, "Nodes per random graph");
    sweep->add_option("--num-edges", num_edges, "Edges per random graph");
    sweep->add_option("--eta0", sweep_eta0, "Generating and learning sparsity");
    sweep->add_option("--sparsity-grid", sparsity_grid, "Sparsity levels")->delimiter(',');
    sweep->add_option("--realizations", realizations, "Independent realizations");
    sweep->add_option("--seed", seed, "Master seed");
    sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sweep_signals.add(sweep, "--num-signals");
    sweep_flags.add(sweep, false);

    CLI::App* denoise = app.add_subcommand("denoise", "Denoising study across SNR levels");
    common(denoise);
    SignalFlags denoise_signals;
    DdtlFlags denoise_flags;
    std::optional<Index> signal_eta0;
    std::optional<std::vector<double>> snr_grid;
    std::optional<std::vector<Index>> bandwidth_grid;
    denoise->add_option("-g,--graph", graph, "Edge list file (synthetic surrogate when omitted)");
    denoise->add_option("--node-csv", node_csv, "Clean node series, T x V");
    denoise->add_option("--edge-csv", edge_csv, "Clean edge series, T x E");
    denoise->add_option("--num-nodes", num_nodes, "Nodes of the surrogate graph");
    denoise->add_option("--num-edges", num_edges, "Edges of the surrogate graph");
    denoise->add_option("--signal-eta0", signal_eta0, "Generating sparsity of the surrogate");
    denoise->add_option("--snr-grid", snr_grid, "SNR levels in dB")->delimiter(',');
    denoise->add_option("--bandwidth-grid", bandwidth_grid, "DDTL and truncation bandwidths")->delimiter(',');
    denoise->add_option("--realizations", realizations, "Noise realizations");
    denoise->add_option("--seed", seed, "Master seed");
    denoise->add_option("--threads", threads, "Worker threads (0 = all cores)");
    denoise_signals.add(denoise, "--num-steps");
    denoise_flags.add(denoise, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_line("usage_error", e.what(), "") << '\n';
        return 2;
    }

    std::string command;
    try {
        if (spectra->parsed()) {
            command = "spectra";
            SpectraConfig cfg = spectra_config_from_json(load_config(config_path));
            override_with(graph, cfg.edge_list);
            override_with(output, cfg.output);
            const SpectraReport rep = cmd_spectra(cfg);
            print({{"command", command},
                   {"sigma", std::vector<double>(rep.sigma.data(), rep.sigma.data() + rep.sigma.size())},
                   {"xi0", rep.xi0},
                   {"xi1", rep.xi1},
                   {"dirac_square_residual", rep.dirac_square_residual},
                   {"frame_tightness", rep.frame_tightness}});
        } else if (synth->parsed()) {
            command = "synth";
            SynthConfig cfg = synth_config_from_json(load_config(config_path));
            override_with(graph, cfg.edge_list);
            override_with(num_nodes, cfg.num_nodes);
            override_with(num_edges, cfg.num_edges);
            override_with(synth_eta0, cfg.signals.eta0);
            override_with(noise_std, cfg.noise_std);
            override_with(seed, cfg.seed);
            override_with(output, cfg.output);
            if (include_harmonics) cfg.signals.exclude_harmonics = false;
            synth_signals.apply_to(cfg.signals);
            const SynthOutput out = cmd_synth(cfg);
            print({{"command", command},
                   {"num_nodes", out.graph.num_nodes()},
                   {"num_edges", out.graph.num_edges()},
                   {"num_signals", out.signals.S.cols()},
                   {"output", cfg.output.string()}});
        } else if (fit->parsed()) {
            command = "ddtl-fit";
            FitConfig cfg = fit_config_from_json(load_config(config_path));
            override_with(graph, cfg.edge_list);
            override_with(node_csv, cfg.node_csv);
            override_with(edge_csv, cfg.edge_csv);
            override_with(seed, cfg.ddtl.seed);
            override_with(output, cfg.output);
            fit_flags.apply_to(cfg.ddtl);
            const DdtlSolution sol = cmd_ddtl_fit(cfg);
            json summary = to_json(diagnostics_of(sol));
            summary["command"] = command;
            print(summary);
        } else if (sweep->parsed()) {
            command = "sparsity-sweep";
            SweepConfig cfg = sweep_config_from_json(load_config(config_path));
            override_with(num_nodes, cfg.num_nodes);
            override_with(num_edges, cfg.num_edges);
            if (sweep_eta0) cfg.signals.eta0 = cfg.ddtl.eta0 = *sweep_eta0;
            override_with(sparsity_grid, cfg.sparsity_grid);
            override_with(realizations, cfg.realizations);
            override_with(seed, cfg.seed);
            override_with(threads, cfg.threads);
            override_with(output, cfg.output);
            sweep_signals.apply_to(cfg.signals);
            sweep_flags.apply_to(cfg.ddtl);
            const SweepResult res = run_sparsity_sweep(cfg);
            json means = json::object();
            for (const char* m : {"laplacian", "dirac", "frame", "ddtl"}) {
                std::vector<double> row;
                for (std::size_t i = 0; i < cfg.sparsity_grid.size(); ++i) row.push_back(res.mean(m, i));
                means[m] = row;
            }
            print({{"command", command}, {"sparsity_grid", cfg.sparsity_grid}, {"mean_nmse", means}});
        } else if (denoise->parsed()) {
            command = "denoise";
            DenoiseConfig cfg = denoise_config_from_json(load_config(config_path));
            override_with(graph, cfg.edge_list);
            override_with(node_csv, cfg.node_csv);
            override_with(edge_csv, cfg.edge_csv);
            override_with(num_nodes, cfg.num_nodes);
            override_with(num_edges, cfg.num_edges);
            override_with(signal_eta0, cfg.signals.eta0);
            override_with(snr_grid, cfg.snr_grid);
            override_with(bandwidth_grid, cfg.bandwidth_grid);
            override_with(realizations, cfg.realizations);
            override_with(seed, cfg.seed);
            override_with(threads, cfg.threads);
            override_with(output, cfg.output);
            denoise_signals.apply_to(cfg.signals);
            denoise_flags.apply_to(cfg.ddtl);
            const DenoiseResult res = run_denoise(cfg);
            json means = json::array();
            for (double snr : cfg.snr_grid) {
                for (Index bw : cfg.bandwidth_grid) {
                    means.push_back({{"snr_db", snr},
                                     {"bandwidth", bw},
                                     {"noisy", res.mean("noisy", snr, bw)},
                                     {"ddtl", res.mean("ddtl", snr, bw)},
                                     {"dirac_truncation", res.mean("dirac_truncation", snr, bw)},
                                     {"laplacian_truncation", res.mean("laplacian_truncation", snr, bw)}});
                }
            }
            print({{"command", command}, {"mean_nmse", means}});
        }
    } catch (const Error& e) {
        std::cerr << error_line(e.kind(), e.what(), command) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_line("internal_error", e.what(), command) << '\n';
        return 1;
    }
    return 0;
}
