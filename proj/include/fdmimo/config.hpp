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
//
// Declarative experiment configuration. JSON files mirror the parameter
// grouping of the simulation setup (aaa / itu / elevation / azimuth /
// clusters / placement / general); every field has a default matching the
// 3D-UMa NLoS baseline.

#ifndef FDMIMO_CONFIG_HPP
#define FDMIMO_CONFIG_HPP

#include <fstream>
#include <limits>
#include <optional>

#include <json.hpp>

#include "fdmimo/array.hpp"
#include "fdmimo/channel.hpp"
#include "fdmimo/sdb.hpp"
#include "fdmimo/spectra.hpp"

namespace fdmimo {

enum class Scenario
{
    pattern_compare,
    corr_compare,
    single_user,
    multi_user,
    multi_cell
};

inline Scenario scenario_from_string(const std::string& s)
{
    if (s == "pattern-compare" || s == "pattern")
        return Scenario::pattern_compare;
    if (s == "corr-compare" || s == "corr")
        return Scenario::corr_compare;
    if (s == "single-user")
        return Scenario::single_user;
    if (s == "multi-user")
        return Scenario::multi_user;
    if (s == "multi-cell")
        return Scenario::multi_cell;
    throw std::invalid_argument("config: unknown scenario '" + s + "'");
}

inline std::string to_string(Scenario s)
{
    switch (s)
    {
    case Scenario::pattern_compare: return "pattern-compare";
    case Scenario::corr_compare: return "corr-compare";
    case Scenario::single_user: return "single-user";
    case Scenario::multi_user: return "multi-user";
    case Scenario::multi_cell: return "multi-cell";
    }
    return "?";
}

/// Random user drops: uniform over the annulus between the minimum distance
/// and the cell radius, within the boresight sector.
struct UserPlacement
{
    double cell_radius_m = 250.0;
    double min_distance_m = 30.0;
    double bs_height_m = 25.0;
    double user_height_m = 1.5;
    double sector_half_angle_deg = 60.0;

    void validate() const
    {
        if (!(cell_radius_m > min_distance_m) || !(min_distance_m > 0.0))
            throw std::invalid_argument("placement: need radius > min distance > 0");
    }
};

/// One downtilting strategy. kind is one of cst / los / com / muab / eigen /
/// sdb; cst carries its fixed tilt.
struct Strategy
{
    std::string kind = "cst";
    double tilt_deg = 90.0;

    std::string label() const
    {
        if (kind == "cst")
        {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "cst-%g", tilt_deg);
            return buf;
        }
        return kind;
    }
};

struct ExperimentConfig
{
    Scenario scenario = Scenario::single_user;
    ArrayGeometry geometry{};
    ItuPortPatternParams itu{};
    AzimuthSpectrum azimuth = VonMises{0.0, 6.0};
    ElevationSpectrum elevation = Laplacian{90.0, 8.0};
    ClusterConfig clusters{};
    UserPlacement placement{};
    std::vector<Strategy> strategies{};
    int n_users = 4;
    int n_cells = 3;
    long trials = 100;
    int draws_per_trial = 20;
    uint64_t master_seed = 1;
    std::string output_path = "results.csv";
    int threads = 0; // 0 = hardware concurrency
    double theta_tilt_deg = 90.0;
    double p_tx_dbm = 56.0;
    double noise_dbm = -100.0;
    PathLossModel path_loss{};
    double shadow_fading_std_db = 6.0;
    double inter_site_distance_m = 500.0;
    double leakage_cap = std::numeric_limits<double>::infinity(); // linear
    SdbOptions sdb{};
    QuadSpec quad{};
    std::vector<std::string> covariance_csv{}; // standalone optimizer input

    std::vector<Strategy> strategies_or_default() const
    {
        if (!strategies.empty())
            return strategies;
        switch (scenario)
        {
        case Scenario::single_user:
            return {{"cst", 90.0}, {"cst", 100.0}, {"los", 0.0}, {"eigen", 0.0}};
        case Scenario::multi_user:
            return {{"cst", 90.0}, {"cst", 100.0}, {"com", 0.0}, {"sdb", 0.0}};
        case Scenario::multi_cell:
            return {{"cst", 90.0}, {"cst", 100.0}, {"com", 0.0}, {"sdb", 0.0}};
        default:
            return {};
        }
    }

    void validate() const
    {
        geometry.validate();
        itu.validate();
        clusters.validate();
        placement.validate();
        if (trials < 1 || draws_per_trial < 1)
            throw std::invalid_argument("config: trials and draws_per_trial must be >= 1");
        if (n_users < 1 || n_cells < 2)
            throw std::invalid_argument("config: need n_users >= 1 and n_cells >= 2");
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& section)
{
    for (const auto& [key, _] : j.items())
    {
        bool ok = false;
        for (const char* k : known)
            if (key == k)
                ok = true;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + key + "' in section '" + section + "'");
    }
}

template <class T>
void get_opt(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

inline AzimuthSpectrum parse_azimuth(const json& j)
{
    std::string variant = "von-mises";
    get_opt(j, "variant", variant);
    if (variant == "von-mises")
    {
        reject_unknown(j, {"variant", "mu_deg", "kappa"}, "azimuth");
        VonMises v;
        get_opt(j, "mu_deg", v.mu_deg);
        get_opt(j, "kappa", v.kappa);
        return v;
    }
    if (variant == "wrapped-gaussian")
    {
        reject_unknown(j, {"variant", "mu_deg", "sigma_deg"}, "azimuth");
        WrappedGaussian v;
        get_opt(j, "mu_deg", v.mu_deg);
        get_opt(j, "sigma_deg", v.sigma_deg);
        return v;
    }
    if (variant == "uniform")
    {
        reject_unknown(j, {"variant", "lo_deg", "hi_deg"}, "azimuth");
        UniformAngle v{-180.0, 180.0};
        get_opt(j, "lo_deg", v.lo_deg);
        get_opt(j, "hi_deg", v.hi_deg);
        return v;
    }
    throw std::invalid_argument("config: unknown azimuth variant '" + variant + "'");
}

inline ElevationSpectrum parse_elevation(const json& j)
{
    std::string variant = "laplacian";
    get_opt(j, "variant", variant);
    if (variant == "laplacian")
    {
        reject_unknown(j, {"variant", "theta0_deg", "spread_deg"}, "elevation");
        Laplacian v;
        get_opt(j, "theta0_deg", v.theta0_deg);
        get_opt(j, "spread_deg", v.spread_deg);
        return v;
    }
    if (variant == "uniform")
    {
        reject_unknown(j, {"variant", "lo_deg", "hi_deg"}, "elevation");
        UniformAngle v{0.0, 180.0};
        get_opt(j, "lo_deg", v.lo_deg);
        get_opt(j, "hi_deg", v.hi_deg);
        return v;
    }
    throw std::invalid_argument("config: unknown elevation variant '" + variant + "'");
}

inline Strategy parse_strategy(const json& j)
{
    Strategy s;
    if (j.is_string())
    {
        const std::string v = j.get<std::string>();
        const size_t dash = v.rfind('-');
        if (v.rfind("cst-", 0) == 0)
        {
            s.kind = "cst";
            s.tilt_deg = std::stod(v.substr(dash + 1));
        }
        else
            s.kind = v;
    }
    else
    {
        reject_unknown(j, {"kind", "tilt_deg"}, "strategies");
        get_opt(j, "kind", s.kind);
        get_opt(j, "tilt_deg", s.tilt_deg);
    }
    if (s.kind != "cst" && s.kind != "los" && s.kind != "com" && s.kind != "muab" &&
        s.kind != "eigen" && s.kind != "sdb")
        throw std::invalid_argument("config: unknown strategy '" + s.kind + "'");
    return s;
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j)
{
    using detail::get_opt;
    ExperimentConfig c;
    detail::reject_unknown(j,
                           {"scenario", "aaa", "itu", "azimuth", "elevation", "clusters", "placement",
                            "strategies", "general"},
                           "<root>");
    if (j.contains("scenario"))
        c.scenario = scenario_from_string(j.at("scenario").get<std::string>());

    if (j.contains("aaa"))
    {
        const auto& a = j.at("aaa");
        detail::reject_unknown(a,
                               {"m_per_port", "n_ports", "polarization", "slant_deg", "d_v", "d_h",
                                "gain_max_dbi", "phi_3db_deg", "theta_3db_deg", "front_back_ratio_db",
                                "sla_v_db"},
                               "aaa");
        get_opt(a, "m_per_port", c.geometry.m_per_port);
        get_opt(a, "n_ports", c.geometry.n_ports);
        get_opt(a, "polarization", c.geometry.polarization);
        get_opt(a, "slant_deg", c.geometry.slant_deg);
        get_opt(a, "d_v", c.geometry.d_v);
        get_opt(a, "d_h", c.geometry.d_h);
        get_opt(a, "gain_max_dbi", c.geometry.element.gain_max_dbi);
        get_opt(a, "phi_3db_deg", c.geometry.element.phi_3db_deg);
        get_opt(a, "theta_3db_deg", c.geometry.element.theta_3db_deg);
        get_opt(a, "front_back_ratio_db", c.geometry.element.front_back_ratio_db);
        get_opt(a, "sla_v_db", c.geometry.element.sla_v_db);
    }
    if (j.contains("itu"))
    {
        const auto& a = j.at("itu");
        detail::reject_unknown(a, {"gain_max_dbi", "phi_3db_deg", "theta_3db_deg", "front_back_ratio_db"},
                               "itu");
        get_opt(a, "gain_max_dbi", c.itu.gain_max_dbi);
        get_opt(a, "phi_3db_deg", c.itu.phi_3db_deg);
        get_opt(a, "theta_3db_deg", c.itu.theta_3db_deg);
        get_opt(a, "front_back_ratio_db", c.itu.front_back_ratio_db);
    }
    if (j.contains("azimuth"))
        c.azimuth = detail::parse_azimuth(j.at("azimuth"));
    if (j.contains("elevation"))
        c.elevation = detail::parse_elevation(j.at("elevation"));
    if (j.contains("clusters"))
    {
        const auto& a = j.at("clusters");
        detail::reject_unknown(a,
                               {"n_clusters", "subpaths_per_cluster", "c_theta_deg", "c_phi_deg",
                                "c_vartheta_deg", "c_varphi_deg", "subpath_offsets", "xpr_db",
                                "rician_k_db"},
                               "clusters");
        get_opt(a, "n_clusters", c.clusters.n_clusters);
        get_opt(a, "subpaths_per_cluster", c.clusters.subpaths_per_cluster);
        get_opt(a, "c_theta_deg", c.clusters.c_theta_deg);
        get_opt(a, "c_phi_deg", c.clusters.c_phi_deg);
        get_opt(a, "c_vartheta_deg", c.clusters.c_vartheta_deg);
        get_opt(a, "c_varphi_deg", c.clusters.c_varphi_deg);
        get_opt(a, "subpath_offsets", c.clusters.subpath_offsets);
        get_opt(a, "xpr_db", c.clusters.xpr_db);
        if (a.contains("rician_k_db"))
            c.clusters.rician_k_db = a.at("rician_k_db").get<double>();
    }
    if (j.contains("placement"))
    {
        const auto& a = j.at("placement");
        detail::reject_unknown(a,
                               {"cell_radius_m", "min_distance_m", "bs_height_m", "user_height_m",
                                "sector_half_angle_deg"},
                               "placement");
        get_opt(a, "cell_radius_m", c.placement.cell_radius_m);
        get_opt(a, "min_distance_m", c.placement.min_distance_m);
        get_opt(a, "bs_height_m", c.placement.bs_height_m);
        get_opt(a, "user_height_m", c.placement.user_height_m);
        get_opt(a, "sector_half_angle_deg", c.placement.sector_half_angle_deg);
    }
    if (j.contains("strategies"))
        for (const auto& s : j.at("strategies"))
            c.strategies.push_back(detail::parse_strategy(s));
    if (j.contains("general"))
    {
        const auto& a = j.at("general");
        detail::reject_unknown(a,
                               {"n_users", "n_cells", "trials", "draws_per_trial", "master_seed",
                                "output_path", "threads", "theta_tilt_deg", "p_tx_dbm", "noise_dbm",
                                "pl0_db", "path_loss_exponent", "shadow_fading_std_db",
                                "inter_site_distance_m", "leakage_cap_db", "randomization_count",
                                "dinkelbach_tol", "dinkelbach_max_iters", "quad_tol", "covariance_csv"},
                               "general");
        get_opt(a, "n_users", c.n_users);
        get_opt(a, "n_cells", c.n_cells);
        get_opt(a, "trials", c.trials);
        get_opt(a, "draws_per_trial", c.draws_per_trial);
        get_opt(a, "master_seed", c.master_seed);
        get_opt(a, "output_path", c.output_path);
        get_opt(a, "threads", c.threads);
        get_opt(a, "theta_tilt_deg", c.theta_tilt_deg);
        get_opt(a, "p_tx_dbm", c.p_tx_dbm);
        get_opt(a, "noise_dbm", c.noise_dbm);
        get_opt(a, "pl0_db", c.path_loss.pl0_db);
        get_opt(a, "path_loss_exponent", c.path_loss.exponent);
        get_opt(a, "shadow_fading_std_db", c.shadow_fading_std_db);
        get_opt(a, "inter_site_distance_m", c.inter_site_distance_m);
        if (a.contains("leakage_cap_db"))
            c.leakage_cap = db_to_pow(a.at("leakage_cap_db").get<double>());
        get_opt(a, "randomization_count", c.sdb.randomization_count);
        get_opt(a, "dinkelbach_tol", c.sdb.dinkelbach_tol);
        get_opt(a, "dinkelbach_max_iters", c.sdb.dinkelbach_max_iters);
        get_opt(a, "quad_tol", c.quad.abs_tol);
        get_opt(a, "covariance_csv", c.covariance_csv);
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    f >> j;
    return parse_config(j);
}

} // namespace fdmimo

#endif
