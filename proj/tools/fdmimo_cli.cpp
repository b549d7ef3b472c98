// SPDX-License-Identifier: Apache-2.0
//
// fdmimo: elevation beamforming simulator for full-dimension MIMO arrays
// Copyright (C) 2026 the fdmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "fdmimo/fdmimo.hpp"

namespace {

struct CommonArgs
{
    std::string config_path;
    std::string out_path;
    uint64_t seed = 0;
    long trials = 0;
    int threads = -1;
    bool have_seed = false;
};

fdmimo::ExperimentConfig make_config(const CommonArgs& a, fdmimo::Scenario scenario)
{
    fdmimo::ExperimentConfig cfg;
    if (!a.config_path.empty())
        cfg = fdmimo::load_config(a.config_path);
    cfg.scenario = scenario;
    if (a.have_seed)
        cfg.master_seed = a.seed;
    if (a.trials > 0)
        cfg.trials = a.trials;
    if (a.threads >= 0)
        cfg.threads = a.threads;
    if (!a.out_path.empty())
        cfg.output_path = a.out_path;
    return cfg;
}

void add_common(CLI::App* sub, CommonArgs& a)
{
    sub->add_option("--config", a.config_path, "experiment config file (JSON)");
    sub->add_option("--seed", a.seed, "master seed")->each([&](const std::string&) { a.have_seed = true; });
    sub->add_option("--trials", a.trials, "trial count override");
    sub->add_option("--out", a.out_path, "output CSV path");
    sub->add_option("--threads", a.threads, "worker threads (0 = hardware)");
}

int run_scenario(const CommonArgs& a, fdmimo::Scenario sc)
{
    fdmimo::ExperimentConfig cfg = make_config(a, sc);
    const fdmimo::ResultTable table = fdmimo::run_experiment(cfg);
    fdmimo::export_csv(table, cfg.output_path);
    std::printf("%s: %zu result rows -> %s\n", fdmimo::to_string(sc).c_str(), table.rows.size(),
                cfg.output_path.c_str());
    // compact on-screen summary of the aggregate rows
    for (const auto& r : table.rows)
        if (r.metric != "gain_db")
        {
            if (r.std_error > 0.0)
                std::printf("  %-18s sweep=%-6g %-16s %.6g (+/- %.3g)\n", r.strategy.c_str(), r.sweep,
                            r.metric.c_str(), r.value, r.std_error);
            else if (table.rows.size() < 80)
                std::printf("  %-18s sweep=%-6g %-16s %.6g\n", r.strategy.c_str(), r.sweep,
                            r.metric.c_str(), r.value);
        }
    return 0;
}

struct Check
{
    std::string name;
    bool ok;
};

/// Fast runtime self-checks of the module invariants.
std::vector<Check> run_validation(uint64_t seed)
{
    using namespace fdmimo;
    std::vector<Check> checks;
    auto check = [&](const std::string& name, bool ok) { checks.push_back({name, ok}); };

    const ArrayGeometry g{};

    // pattern bounds and symmetry
    {
        bool bounded = true, symmetric = true;
        for (double phi = -180.0; bounded && phi <= 180.0; phi += 7.0)
            for (double th = 0.0; th <= 180.0; th += 7.0)
            {
                const double v = element_pattern_db(g.element, phi, th);
                bounded = bounded && v <= g.element.gain_max_dbi + 1e-12;
                symmetric = symmetric &&
                            std::abs(v - element_pattern_db(g.element, -phi, th)) < 1e-12 &&
                            std::abs(v - element_pattern_db(g.element, phi, 180.0 - th)) < 1e-12;
            }
        check("element pattern bounded by peak gain", bounded);
        check("element pattern symmetric about boresight", symmetric);
    }

    // virtualization orthonormality
    {
        const TiltWeights w = weights_1d(8, 0.8, 96.0);
        const MatrixXcd wt = build_virtualization(g, w).dense();
        const MatrixXcd gram = wt.adjoint() * wt;
        check("W~^H W~ = I", (gram - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }

    // density normalization
    {
        const AzimuthSpectrum az = VonMises{10.0, 6.0};
        const ElevationSpectrum el = Laplacian{96.0, 8.0};
        check("von Mises density integrates to 1",
              std::abs(density_integral(az) - 1.0) < 1e-6);
        check("laplacian density integrates to 1",
              std::abs(density_integral(el) - 1.0) < 1e-6);
    }

    // covariance contracts
    {
        const CovarianceMatrix re = element_covariance(g, VonMises{0.0, 6.0}, Laplacian{96.0, 8.0});
        check("element covariance Hermitian", re.hermitian_defect() < 1e-12);
        check("element covariance PSD", re.min_eigenvalue() >= -1e-10);
    }

    // ZF nulling on a random full-rank instance
    {
        Rng rng(seed + 17);
        MatrixXcd h(4, 8);
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
                h(i, j) = rng.cnormal();
        const MatrixXcd gm = zf(h, VectorXd::Ones(4));
        double cross = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j)
                    cross = std::max(cross, std::abs((h.row(i) * gm.col(j))(0)));
        check("ZF nulls cross links", cross < 1e-10);
    }

    // deterministic replay of a tiny experiment
    {
        ExperimentConfig cfg;
        cfg.scenario = Scenario::single_user;
        cfg.trials = 64;
        cfg.master_seed = seed;
        cfg.threads = 2;
        const ResultTable a = run_experiment(cfg);
        cfg.threads = 1;
        const ResultTable b = run_experiment(cfg);
        check("fixed seed reproducibility across worker counts", a == b);
    }
    return checks;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fdmimo: 3D channel, spatial correlation and elevation beamforming simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::map<std::string, fdmimo::Scenario> scenario_of = {
        {"pattern", fdmimo::Scenario::pattern_compare},
        {"corr", fdmimo::Scenario::corr_compare},
        {"single-user", fdmimo::Scenario::single_user},
        {"multi-user", fdmimo::Scenario::multi_user},
        {"multi-cell", fdmimo::Scenario::multi_cell},
    };
    add_common(app.add_subcommand("pattern", "radiation pattern comparison scan"), args);
    add_common(app.add_subcommand("corr", "spatial correlation comparison"), args);
    add_common(app.add_subcommand("single-user", "single-user MISO downtilt study"), args);
    add_common(app.add_subcommand("multi-user", "single-cell multi-user MISO study"), args);
    add_common(app.add_subcommand("multi-cell", "multi-cell MISO study"), args);
    add_common(app.add_subcommand("validate", "run the module invariant suite"), args);

    CLI11_PARSE(app, argc, argv);

    try
    {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "validate")
        {
            const auto checks = run_validation(args.have_seed ? args.seed : 1);
            bool all_ok = true;
            for (const auto& c : checks)
            {
                std::printf("[%s] %s\n", c.ok ? "PASS" : "FAIL", c.name.c_str());
                all_ok = all_ok && c.ok;
            }
            return all_ok ? 0 : 1;
        }
        return run_scenario(args, scenario_of.at(sub));
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
