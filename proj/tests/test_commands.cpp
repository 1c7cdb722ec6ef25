// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"
#include "fixtures.hpp"
#include "spinor/error.hpp"
#include "spinor/sparse.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>

using namespace spinor;
using namespace spinor::cli;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("spinor_cmd_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SweepConfig small_sweep(SignalClass c) {
    SweepConfig cfg = default_sweep_config();
    cfg.num_nodes = 12;
    cfg.num_edges = 20;
    cfg.signals.signal_class = c;
    cfg.signals.eta0 = 8;
    cfg.signals.num_signals = 60;
    cfg.ddtl.eta0 = 8;
    cfg.ddtl.max_iter = 100;
    cfg.sparsity_grid = {4, 8, 16};
    cfg.realizations = 3;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("spectra of small graphs") {
    const SpectraReport p3 = compute_spectra(testing::path3());
    REQUIRE(p3.sigma.size() == 2);
    CHECK(p3.sigma(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(p3.sigma(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p3.xi0 == 1);
    CHECK(p3.xi1 == 0);

    const SpectraReport tri = compute_spectra(testing::triangle());
    CHECK(tri.xi1 == 1);
    for (const SpectraReport* r : {&p3, &tri}) {
        CHECK(r->dirac_square_residual < 1e-10);
        CHECK(r->phi_orthonormality < 1e-10);
        CHECK(r->theta_orthonormality < 1e-10);
        CHECK(r->frame_tightness < 1e-10);
        CHECK(r->svd_residual < 1e-10);
    }
}

TEST_CASE("configs survive a JSON round trip") {
    SweepConfig sweep = small_sweep(SignalClass::partially_coupled);
    sweep.ddtl.omega_update = OmegaUpdate::paper_diagonal;
    sweep.ddtl.rho1 = 3.5;
    sweep.output = "out/sweep";
    const SweepConfig back = sweep_config_from_json(to_json(sweep));
    CHECK(to_json(back) == to_json(sweep));
    CHECK(back.ddtl.omega_update == OmegaUpdate::paper_diagonal);
    CHECK(back.signals.signal_class == SignalClass::partially_coupled);

    DenoiseConfig den = default_denoise_config();
    den.snr_grid = {1.5, 3};
    den.edge_list = fs::path("g.txt");
    CHECK(to_json(denoise_config_from_json(to_json(den))) == to_json(den));

    DdtlConfig ddtl;
    ddtl.init_mode = InitMode::user;
    ddtl.user_k = CouplingVector::uniform(3, 0.25);
    const DdtlConfig ddtl_back = ddtl_config_from_json(to_json(ddtl));
    REQUIRE(ddtl_back.user_k.has_value());
    CHECK(ddtl_back.user_k->plus == ddtl.user_k->plus);

    CHECK_THROWS_AS(sweep_config_from_json({{"etaa0", 3}}), InvalidArgument);
    CHECK_THROWS_AS(ddtl_config_from_json({{"init_mode", "warm"}}), InvalidArgument);
    CHECK_THROWS_AS(ddtl_config_from_json({{"rho1", "ten"}}), InvalidArgument);
    CHECK(sweep_config_from_json({{"eta0", 12}}).ddtl.eta0 == 12);
}

TEST_CASE("sparsity sweep tables") {
    const SweepConfig cfg = small_sweep(SignalClass::fully_coupled);
    const SweepResult res = run_sparsity_sweep(cfg);
    CHECK(res.realizations.size() == 3);
    CHECK(res.table.columns == std::vector<std::string>{"method", "sparsity", "realization", "nmse"});

    std::map<std::pair<std::string, std::int64_t>, int> rows;
    for (const auto& row : res.table.rows) {
        ++rows[{std::get<std::string>(row[0]), std::get<std::int64_t>(row[1])}];
    }
    CHECK(rows.size() == 4 * 3);
    for (const auto& [key, count] : rows) CHECK(count == 3);

    // Class i is exactly Dirac-sparse at the generating sparsity.
    for (const auto& r : res.realizations) CHECK(r.dirac[1] < 1e-6);
    CHECK_FALSE(res.table.metadata.dump().find("seconds") != std::string::npos);

    SweepConfig bad = cfg;
    bad.sparsity_grid = {0};
    CHECK_THROWS_AS(run_sparsity_sweep(bad), InvalidArgument);
}

TEST_CASE("same seed gives byte-identical outputs") {
    const fs::path dir = scratch_dir("determinism");
    SweepConfig cfg = small_sweep(SignalClass::mixture_of_dirac);
    cfg.realizations = 2;
    cfg.output = dir / "a";
    run_sparsity_sweep(cfg);
    cfg.output = dir / "b";
    cfg.threads = 1;
    run_sparsity_sweep(cfg);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(!slurp(dir / "a.csv").empty());

    SynthConfig synth;
    synth.num_nodes = 8;
    synth.num_edges = 12;
    synth.signals.eta0 = 4;
    synth.signals.num_signals = 10;
    synth.seed = 3;
    synth.output = dir / "s1";
    cmd_synth(synth);
    synth.output = dir / "s2";
    cmd_synth(synth);
    for (const char* f : {"graph.txt", "nodes.csv", "edges.csv", "coefficients.csv"}) {
        CHECK(slurp(dir / "s1" / f) == slurp(dir / "s2" / f));
    }
}

TEST_CASE("stored fits rebuild their reconstruction") {
    const fs::path dir = scratch_dir("fit");
    SynthConfig synth;
    synth.num_nodes = 10;
    synth.num_edges = 16;
    synth.signals.signal_class = SignalClass::mixture_of_dirac;
    synth.signals.eta0 = 6;
    synth.signals.num_signals = 80;
    synth.seed = 5;
    synth.output = dir / "data";
    cmd_synth(synth);

    FitConfig fit;
    fit.edge_list = dir / "data" / "graph.txt";
    fit.node_csv = dir / "data" / "nodes.csv";
    fit.edge_csv = dir / "data" / "edges.csv";
    fit.ddtl.eta0 = 6;
    fit.output = dir / "fit";
    const DdtlSolution sol = cmd_ddtl_fit(fit);

    const OrientedGraph g = load_edge_list(fit.edge_list);
    const SpectralDecomposition d = spectral_decompose(build_incidence(g));
    const Eigen::MatrixXd S = load_time_series(g, fit.node_csv, fit.edge_csv).spinors();
    const StoredFit stored = load_fit(dir / "fit");
    CHECK(stored.k.stacked() == sol.k_star.stacked());
    CHECK(stored.k.stacked().size() == 2 * d.rank());
    const double recomputed = nmse(S, stored_reconstruction(stored, d));
    CHECK(std::abs(recomputed - stored.nmse) < 1e-12);
    CHECK(fs::exists(dir / "fit_history.csv"));

    const ResultTable hist = load_results(dir / "fit_history");
    CHECK(hist.rows.size() == sol.history.size());
}

TEST_CASE("denoising beats the noisy input") {
    DenoiseConfig cfg = default_denoise_config();
    cfg.num_nodes = 10;
    cfg.num_edges = 16;
    cfg.signals.eta0 = 4;
    cfg.signals.num_signals = 60;
    cfg.snr_grid = {0.0, 10.0};
    cfg.bandwidth_grid = {4};
    cfg.realizations = 2;
    cfg.ddtl.max_iter = 200;
    cfg.seed = 2;
    const DenoiseResult res = run_denoise(cfg);
    CHECK(res.cells.size() == 4);
    for (double snr : cfg.snr_grid) {
        CHECK(res.mean("ddtl", snr, 4) < res.mean("noisy", snr, 4));
    }
    CHECK(res.mean("noisy", 10.0, 4) < res.mean("noisy", 0.0, 4));
    // one noisy row per (snr, realization) plus three methods per cell
    CHECK(res.table.rows.size() == 4 + 3 * 4);

    cfg.bandwidth_grid = {1000};
    CHECK_THROWS_AS(run_denoise(cfg), InvalidArgument);
    cfg.bandwidth_grid = {4};
    cfg.edge_list = fs::path("only_the_graph.txt");
    CHECK_THROWS_AS(run_denoise(cfg), InvalidArgument);
}

TEST_CASE("parallel_for reports the lowest failing index") {
    std::vector<int> hits(50, 0);
    parallel_for(50, 4, [&](Index i) { hits[static_cast<std::size_t>(i)] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    try {
        parallel_for(20, 3, [](Index i) {
            if (i == 7 || i == 13) throw InvalidArgument("task " + std::to_string(i));
        });
        FAIL("no exception");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()) == "task 7");
    }
    const nlohmann::json line = nlohmann::json::parse(error_line("parse_error", "line 3: bad", "spectra"));
    CHECK(line.at("error") == "parse_error");
    CHECK(line.at("command") == "spectra");
}
