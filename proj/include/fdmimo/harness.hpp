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
// Experiment orchestration: user placement, per-trial RNG streams,
// Monte-Carlo loops over the five scenarios, and aggregation into result
// tables. Trials are embarrassingly parallel; every value is a pure function
// of (config, master seed) regardless of worker count.

#ifndef FDMIMO_HARNESS_HPP
#define FDMIMO_HARNESS_HPP

#include <atomic>
#include <mutex>
#include <thread>

#include "fdmimo/beamforming.hpp"
#include "fdmimo/channel.hpp"
#include "fdmimo/config.hpp"
#include "fdmimo/correlation.hpp"
#include "fdmimo/csv.hpp"
#include "fdmimo/pattern_analysis.hpp"
#include "fdmimo/sdb.hpp"

namespace fdmimo {

/// One user drop: uniform over the annulus area within the sector, LoS
/// elevation from the height difference and horizontal distance.
inline UserGeometry place_user(const UserPlacement& p, Rng& rng)
{
    p.validate();
    const double r0 = p.min_distance_m, r1 = p.cell_radius_m;
    const double d = std::sqrt(rng.uniform() * (r1 * r1 - r0 * r0) + r0 * r0);
    UserGeometry u;
    u.distance_m = d;
    u.los_azimuth_deg = rng.uniform(-p.sector_half_angle_deg, p.sector_half_angle_deg);
    u.los_elevation_deg = 90.0 + rad2deg(std::atan((p.bs_height_m - p.user_height_m) / d));
    return u;
}

inline std::vector<UserGeometry> place_users(const ExperimentConfig& cfg, Rng& rng)
{
    std::vector<UserGeometry> users(static_cast<size_t>(cfg.n_users));
    for (auto& u : users)
        u = place_user(cfg.placement, rng);
    return users;
}

/// Spectra re-centered on a user's LoS direction, keeping the spreads.
inline AzimuthSpectrum recenter(AzimuthSpectrum s, double mu_deg)
{
    if (auto* v = std::get_if<VonMises>(&s))
        v->mu_deg = mu_deg;
    else if (auto* w = std::get_if<WrappedGaussian>(&s))
        w->mu_deg = mu_deg;
    else
    {
        auto& u = std::get<UniformAngle>(s);
        const double half = 0.5 * (u.hi_deg - u.lo_deg);
        u.lo_deg = mu_deg - half;
        u.hi_deg = mu_deg + half;
    }
    return s;
}

inline ElevationSpectrum recenter(ElevationSpectrum s, double theta0_deg)
{
    if (auto* l = std::get_if<Laplacian>(&s))
        l->theta0_deg = theta0_deg;
    else
    {
        auto& u = std::get<UniformAngle>(s);
        const double half = 0.5 * (u.hi_deg - u.lo_deg);
        u.lo_deg = std::max(0.0, theta0_deg - half);
        u.hi_deg = std::min(180.0, theta0_deg + half);
    }
    return s;
}

/// Combines master seed, trial index and a purpose tag into a deterministic
/// sub-seed.
inline uint64_t splitmix64_of(uint64_t master, uint64_t trial, std::string_view tag)
{
    uint64_t s = master ^ (trial * 0x9e3779b97f4a7c15ull) ^ hash_tag(tag);
    return splitmix64(s);
}

namespace detail {

/// Runs trials over a worker pool. A failing trial aborts the run; the error
/// carries the trial index and master seed for replay.
template <class F>
void parallel_trials(long n_trials, int threads, uint64_t master_seed, F&& body)
{
    auto guarded = [&](long i) {
        try
        {
            body(i);
        }
        catch (const std::exception& e)
        {
            throw std::runtime_error("trial " + std::to_string(i) + " (master seed " +
                                     std::to_string(master_seed) + "): " + e.what());
        }
    };
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    t = static_cast<int>(std::max<long>(1, std::min<long>(t, n_trials)));
    if (t == 1)
    {
        for (long i = 0; i < n_trials; ++i)
            guarded(i);
        return;
    }
    std::atomic<long> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(t));
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&]() {
            for (;;)
            {
                const long i = next.fetch_add(1);
                if (i >= n_trials)
                    return;
                try
                {
                    guarded(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lk(err_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    next.store(n_trials);
                    return;
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

struct MeanSe
{
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(std::span<const double> x)
{
    MeanSe r;
    const double n = static_cast<double>(x.size());
    r.mean = pairwise_sum(x) / n;
    if (x.size() < 2)
        return r;
    double ss = 0.0;
    for (double v : x)
        ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
    return r;
}

inline CovarianceMatrix user_element_covariance(const ExperimentConfig& cfg, double az_deg,
                                                double el_deg)
{
    ScfOptions opts;
    opts.quad = cfg.quad;
    return element_covariance(cfg.geometry, recenter(cfg.azimuth, az_deg),
                              recenter(cfg.elevation, el_deg), ScfMethod::quadrature, opts);
}

/// Downtilt weight vector for one strategy in a single-cell context.
inline TiltWeights strategy_weights(const Strategy& st, const ExperimentConfig& cfg,
                                    std::span<const UserGeometry> users,
                                    std::span<const MatrixXcd> user_covs, uint64_t sdb_seed)
{
    const int m = cfg.geometry.m_per_port;
    const double dv = cfg.geometry.d_v;
    if (st.kind == "cst")
        return weights_1d(m, dv, tilt_cst(st.tilt_deg));
    if (st.kind == "los")
        return weights_1d(m, dv, tilt_los(users[0]));
    if (st.kind == "com")
        return weights_1d(m, dv, tilt_com(users));
    if (st.kind == "muab")
    {
        const std::vector<double> w(users.size(), 1.0);
        return weights_1d(m, dv, tilt_muab(users, w));
    }
    if (st.kind == "eigen")
        return weights_eigen_single_user(user_covs[0].topLeftCorner(m, m));
    if (st.kind == "sdb")
    {
        SdbOptions o = cfg.sdb;
        o.seed = sdb_seed;
        return weights_sdb(user_covs, cfg.geometry, o).weights;
    }
    throw std::invalid_argument("harness: unknown strategy '" + st.kind + "'");
}

// ---- pattern comparison scenario ----

inline ResultTable run_pattern(const ExperimentConfig& cfg)
{
    const auto& g = cfg.geometry;
    const TiltWeights w = weights_1d(g.m_per_port, g.d_v, cfg.theta_tilt_deg);
    const std::span<const cxd> ws(w.weights.data(), static_cast<size_t>(w.weights.size()));

    ItuPortPatternParams matched = cfg.itu;
    matched.theta_3db_deg = port_hpbw_deg(g.m_per_port, g.d_v);
    matched.gain_max_dbi = port_peak_gain_dbi(g.element.gain_max_dbi, g.m_per_port);

    ResultTable t;
    auto add_scan = [&](const std::string& name, const std::function<double(double)>& f) {
        for (double th = 0.0; th <= 180.0 + 1e-9; th += 0.05)
            t.rows.push_back({"pattern-compare", name, th, "gain_db", f(th), 0.0, 1, cfg.master_seed});
        const PatternCutStats st = analyze_vertical_cut(f);
        t.rows.push_back({"pattern-compare", name, 0.0, "peak_gain_dbi", st.peak_db, 0.0, 1, cfg.master_seed});
        t.rows.push_back({"pattern-compare", name, 0.0, "hpbw_deg", st.hpbw_deg, 0.0, 1, cfg.master_seed});
        t.rows.push_back({"pattern-compare", name, 0.0, "sidelobe_present", st.has_sidelobe ? 1.0 : 0.0,
                          0.0, 1, cfg.master_seed});
        if (st.has_sidelobe)
            t.rows.push_back({"pattern-compare", name, 0.0, "sidelobe_db", st.sidelobe_db, 0.0, 1,
                              cfg.master_seed});
    };
    add_scan("element-approach",
             [&](double th) { return port_pattern_element_db(g, ws, 0.0, th); });
    add_scan("port-itu", [&](double th) {
        return itu_port_pattern_db(cfg.itu, 0.0, th, cfg.theta_tilt_deg);
    });
    add_scan("port-itu-matched",
             [&](double th) { return itu_port_pattern_db(matched, 0.0, th, cfg.theta_tilt_deg); });
    return t;
}

// ---- correlation comparison scenario ----

inline ResultTable run_corr(const ExperimentConfig& cfg)
{
    const auto& g = cfg.geometry;
    ScfOptions opts;
    opts.quad = cfg.quad;
    ResultTable t;
    const long n_mc = cfg.trials >= 2 ? cfg.trials : 10000;

    ItuPortPatternParams matched = cfg.itu;
    matched.theta_3db_deg = port_hpbw_deg(g.m_per_port, g.d_v);
    matched.gain_max_dbi = port_peak_gain_dbi(g.element.gain_max_dbi, g.m_per_port);

    auto push = [&](const std::string& strat, double lag, const std::string& metric, double v, double se,
                    long n) {
        t.rows.push_back({"corr-compare", strat, lag, metric, v, se, n, cfg.master_seed});
    };

    // element-approach port correlation, quadrature and Monte Carlo
    const TiltWeights w = weights_1d(g.m_per_port, g.d_v, cfg.theta_tilt_deg);
    const VirtualizationMatrix vm = build_virtualization(g, w);
    const CovarianceMatrix re_quad = element_covariance(g, cfg.azimuth, cfg.elevation,
                                                        ScfMethod::quadrature, opts);
    const CovarianceMatrix rbs_quad = port_covariance(re_quad, vm);
    Rng rng = derive_stream(cfg.master_seed, 0, "corr-mc");
    const CovarianceMatrix re_mc =
        element_covariance(g, cfg.azimuth, cfg.elevation, ScfMethod::monte_carlo, opts, n_mc, &rng);
    const CovarianceMatrix rbs_mc = port_covariance(re_mc, vm);
    for (int s = 1; s <= g.n_ports; ++s)
    {
        push("element-quad", s - 1, "corr_abs", std::abs(rbs_quad.r(0, s - 1)), 0.0, 1);
        push("element-mc", s - 1, "corr_abs", std::abs(rbs_mc.r(0, s - 1)), 0.0, n_mc);
    }

    // ITU port approach, stated beamwidth and matched beamwidth
    for (int s = 1; s <= g.n_ports; ++s)
    {
        const cxd q = scf_port_itu_quad(cfg.itu, g.d_h, cfg.azimuth, cfg.elevation, cfg.theta_tilt_deg,
                                        s, 1, opts);
        Rng r2 = derive_stream(cfg.master_seed, static_cast<uint64_t>(s), "corr-itu-mc");
        const McEstimate e = scf_port_itu_mc(cfg.itu, g.d_h, cfg.azimuth, cfg.elevation,
                                             cfg.theta_tilt_deg, s, 1, n_mc, r2,
                                             opts);
        push("port-itu-quad", s - 1, "corr_abs", std::abs(q), 0.0, 1);
        push("port-itu-mc", s - 1, "corr_abs", std::abs(e.value), e.std_error, n_mc);
        const cxd qm = scf_port_itu_quad(matched, g.d_h, cfg.azimuth, cfg.elevation, cfg.theta_tilt_deg,
                                         s, 1, opts);
        push("port-matched-quad", s - 1, "corr_abs", std::abs(qm), 0.0, 1);
        const cxd q2d = covariance_2d_restricted(cfg.itu, g.d_h, cfg.azimuth, s, 1, opts);
        push("port-2d-quad", s - 1, "corr_abs", std::abs(q2d), 0.0, 1);
    }
    return t;
}

// ---- link-level scenarios ----

struct StrategyAccum
{
    std::vector<double> trial_values; // per-trial means
};

/// Single-user MISO: deterministic cell-edge user, per-trial channel draws,
/// MRT, SNR-based rate.
inline ResultTable run_single_user(const ExperimentConfig& cfg)
{
    const auto& g = cfg.geometry;
    UserGeometry user;
    user.distance_m = cfg.placement.cell_radius_m;
    user.los_azimuth_deg = 0.0;
    user.los_elevation_deg =
        90.0 + rad2deg(std::atan((cfg.placement.bs_height_m - cfg.placement.user_height_m) /
                                 cfg.placement.cell_radius_m));

    const CovarianceMatrix re = user_element_covariance(cfg, user.los_azimuth_deg, user.los_elevation_deg);
    const std::vector<UserGeometry> users{user};
    const std::vector<MatrixXcd> covs{re.r};

    const auto strategies = cfg.strategies_or_default();
    std::vector<MatrixXcd> sqrts;
    for (const auto& st : strategies)
    {
        const TiltWeights w =
            strategy_weights(st, cfg, users, covs, splitmix64_of(cfg.master_seed, 0, st.label()));
        sqrts.push_back(port_covariance(re, build_virtualization(g, w)).sqrt_psd());
    }

    const double p_over_n = db_to_pow(cfg.p_tx_dbm - cfg.noise_dbm);
    const double pl = cfg.path_loss(user.distance_m);
    const long n_trials = cfg.trials;
    std::vector<std::vector<double>> rates(strategies.size(),
                                           std::vector<double>(static_cast<size_t>(n_trials)));

    parallel_trials(n_trials, cfg.threads, cfg.master_seed, [&](long trial) {
        Rng rng = derive_stream(cfg.master_seed, static_cast<uint64_t>(trial), "single-user");
        const double sf = cfg.shadow_fading_std_db * rng.normal();
        VectorXcd z(g.n_ports);
        for (int i = 0; i < g.n_ports; ++i)
            z(i) = rng.cnormal();
        const LargeScale ls{pl, sf};
        const double amp = ls.amplitude();
        for (size_t si = 0; si < strategies.size(); ++si)
        {
            const VectorXcd h = amp * (sqrts[si] * z);
            const double snr = p_over_n * h.squaredNorm();
            rates[si][static_cast<size_t>(trial)] = std::log2(1.0 + snr);
        }
    });

    ResultTable t;
    for (size_t si = 0; si < strategies.size(); ++si)
    {
        const MeanSe m = mean_se(rates[si]);
        t.rows.push_back({"single-user", strategies[si].label(), 0.0, "mean_rate", m.mean, m.se,
                          n_trials, cfg.master_seed});
    }
    return t;
}

/// Per-trial state shared across strategies in the multi-user scenario.
inline ResultTable run_multi_user(const ExperimentConfig& cfg)
{
    const auto& g = cfg.geometry;
    const auto strategies = cfg.strategies_or_default();
    const int k_users = static_cast<int>(cfg.covariance_csv.empty() ? cfg.n_users
                                                                    : cfg.covariance_csv.size());
    const long n_trials = cfg.covariance_csv.empty() ? cfg.trials : 1;
    const double p_user = db_to_pow(cfg.p_tx_dbm) / k_users; // mW
    const double noise = db_to_pow(cfg.noise_dbm);           // mW

    std::vector<MatrixXcd> csv_covs;
    for (const auto& path : cfg.covariance_csv)
        csv_covs.push_back(load_matrix_csv(path));

    std::vector<std::vector<double>> min_rate(strategies.size(),
                                              std::vector<double>(static_cast<size_t>(n_trials)));
    std::vector<std::vector<double>> min_sir(strategies.size(),
                                             std::vector<double>(static_cast<size_t>(n_trials)));

    parallel_trials(n_trials, cfg.threads, cfg.master_seed, [&](long trial) {
        Rng rng_place = derive_stream(cfg.master_seed, static_cast<uint64_t>(trial), "mu-place");
        std::vector<UserGeometry> users;
        std::vector<MatrixXcd> covs;
        std::vector<LargeScale> ls;
        if (!csv_covs.empty())
        {
            covs = csv_covs;
            users.assign(static_cast<size_t>(k_users), UserGeometry{});
            ls.assign(static_cast<size_t>(k_users), LargeScale{});
        }
        else
        {
            users = place_users(cfg, rng_place);
            for (const auto& u : users)
            {
                covs.push_back(user_element_covariance(cfg, u.los_azimuth_deg, u.los_elevation_deg).r);
                ls.push_back({cfg.path_loss(u.distance_m), cfg.shadow_fading_std_db * rng_place.normal()});
            }
        }

        std::vector<std::vector<MatrixXcd>> sqrts(strategies.size());
        for (size_t si = 0; si < strategies.size(); ++si)
        {
            const TiltWeights w = strategy_weights(
                strategies[si], cfg, users, covs,
                splitmix64_of(cfg.master_seed, static_cast<uint64_t>(trial), strategies[si].label()));
            const VirtualizationMatrix vm = build_virtualization(g, w);
            for (int k = 0; k < k_users; ++k)
                sqrts[si].push_back(
                    port_covariance(CovarianceMatrix{covs[static_cast<size_t>(k)],
                                                     CovarianceLevel::element},
                                    vm)
                        .sqrt_psd());
        }

        Rng rng_draw = derive_stream(cfg.master_seed, static_cast<uint64_t>(trial), "mu-draws");
        std::vector<double> rate_acc(strategies.size(), 0.0), sir_acc(strategies.size(), 0.0);
        MatrixXcd z(g.n_ports, k_users);
        const VectorXd ones = VectorXd::Ones(k_users);
        const VectorXd noise_vec = VectorXd::Constant(k_users, noise);
        for (int d = 0; d < cfg.draws_per_trial; ++d)
        {
            for (int k = 0; k < k_users; ++k)
                for (int i = 0; i < g.n_ports; ++i)
                    z(i, k) = rng_draw.cnormal();
            for (size_t si = 0; si < strategies.size(); ++si)
            {
                MatrixXcd h_rows(k_users, g.n_ports);
                MatrixXcd precoder(g.n_ports, k_users);
                for (int k = 0; k < k_users; ++k)
                {
                    const VectorXcd h =
                        ls[static_cast<size_t>(k)].amplitude() * (sqrts[si][static_cast<size_t>(k)] * z.col(k));
                    h_rows.row(k) = h.adjoint();
                    precoder.col(k) = mrt(h, p_user);
                }
                const LinkMetrics m = metrics(h_rows, precoder, ones, noise_vec);
                rate_acc[si] += m.rate.minCoeff();
                sir_acc[si] += m.sir.minCoeff();
            }
        }
        for (size_t si = 0; si < strategies.size(); ++si)
        {
            min_rate[si][static_cast<size_t>(trial)] = rate_acc[si] / cfg.draws_per_trial;
            min_sir[si][static_cast<size_t>(trial)] = sir_acc[si] / cfg.draws_per_trial;
        }
    });

    ResultTable t;
    for (size_t si = 0; si < strategies.size(); ++si)
    {
        const MeanSe mr = mean_se(min_rate[si]);
        const MeanSe ms = mean_se(min_sir[si]);
        t.rows.push_back({"multi-user", strategies[si].label(), static_cast<double>(k_users),
                          "min_rate", mr.mean, mr.se, n_trials, cfg.master_seed});
        t.rows.push_back({"multi-user", strategies[si].label(), static_cast<double>(k_users),
                          "min_sir", ms.mean, ms.se, n_trials, cfg.master_seed});
    }
    return t;
}

/// Symmetric multi-cell deployment on a regular polygon of base stations,
/// each boresight facing the centroid.
struct CellLayout
{
    std::vector<std::array<double, 2>> bs_pos;
    std::vector<double> boresight_rad;
};

inline CellLayout make_cell_layout(int n_cells, double isd)
{
    CellLayout lay;
    // regular polygon with circumradius r so neighbors sit isd apart
    const double r = n_cells == 2 ? isd / 2.0 : isd / (2.0 * std::sin(pi / n_cells));
    for (int i = 0; i < n_cells; ++i)
    {
        const double a = 2.0 * pi * i / n_cells;
        lay.bs_pos.push_back({r * std::cos(a), r * std::sin(a)});
        lay.boresight_rad.push_back(wrap_rad(a + pi)); // toward the centroid
    }
    return lay;
}

inline ResultTable run_multi_cell(const ExperimentConfig& cfg)
{
    const auto& g = cfg.geometry;
    const auto strategies = cfg.strategies_or_default();
    const int nc = cfg.n_cells;
    const int k_users = cfg.n_users;
    const CellLayout lay = make_cell_layout(nc, cfg.inter_site_distance_m);
    const double p_user = db_to_pow(cfg.p_tx_dbm) / k_users;
    const double noise = db_to_pow(cfg.noise_dbm);
    const double hd = cfg.placement.bs_height_m - cfg.placement.user_height_m;
    const long n_trials = cfg.trials;

    std::vector<std::vector<double>> min_rate(strategies.size(),
                                              std::vector<double>(static_cast<size_t>(n_trials)));
    std::vector<std::vector<double>> min_sir(strategies.size(),
                                             std::vector<double>(static_cast<size_t>(n_trials)));

    parallel_trials(n_trials, cfg.threads, cfg.master_seed, [&](long trial) {
        Rng rng_place = derive_stream(cfg.master_seed, static_cast<uint64_t>(trial), "mc-place");
        // users in global coordinates, grouped by serving cell
        struct UserCtx
        {
            std::array<double, 2> pos;
            std::vector<double> az_deg;   // toward each BS, in that BS frame
            std::vector<double> el_deg;
            std::vector<double> dist_m;
            std::vector<double> sf_db;
        };
        std::vector<std::vector<UserCtx>> cells(static_cast<size_t>(nc));
        std::vector<std::vector<UserGeometry>> cell_users(static_cast<size_t>(nc));
        for (int c = 0; c < nc; ++c)
        {
            for (int k = 0; k < k_users; ++k)
            {
                const UserGeometry u = place_user(cfg.placement, rng_place);
                const double a = lay.boresight_rad[static_cast<size_t>(c)] + deg2rad(u.los_azimuth_deg);
                UserCtx ctx;
                ctx.pos = {lay.bs_pos[static_cast<size_t>(c)][0] + u.distance_m * std::cos(a),
                           lay.bs_pos[static_cast<size_t>(c)][1] + u.distance_m * std::sin(a)};
                for (int i = 0; i < nc; ++i)
                {
                    const double dx = ctx.pos[0] - lay.bs_pos[static_cast<size_t>(i)][0];
                    const double dy = ctx.pos[1] - lay.bs_pos[static_cast<size_t>(i)][1];
                    const double dist = std::hypot(dx, dy);
                    ctx.dist_m.push_back(dist);
                    ctx.az_deg.push_back(
                        rad2deg(wrap_rad(std::atan2(dy, dx) - lay.boresight_rad[static_cast<size_t>(i)])));
                    ctx.el_deg.push_back(90.0 + rad2deg(std::atan(hd / dist)));
                    ctx.sf_db.push_back(cfg.shadow_fading_std_db * rng_place.normal());
                }
                UserGeometry served = u;
                served.los_elevation_deg = ctx.el_deg[static_cast<size_t>(c)];
                served.los_azimuth_deg = ctx.az_deg[static_cast<size_t>(c)];
                cell_users[static_cast<size_t>(c)].push_back(served);
                cells[static_cast<size_t>(c)].push_back(std::move(ctx));
            }
        }

        // element covariances for every (BS, user) link
        // cov[i][c][k]: BS i toward user k of cell c
        std::vector<std::vector<std::vector<MatrixXcd>>> cov(
            static_cast<size_t>(nc),
            std::vector<std::vector<MatrixXcd>>(static_cast<size_t>(nc)));
        for (int i = 0; i < nc; ++i)
            for (int c = 0; c < nc; ++c)
                for (int k = 0; k < k_users; ++k)
                {
                    const UserCtx& ctx = cells[static_cast<size_t>(c)][static_cast<size_t>(k)];
                    cov[static_cast<size_t>(i)][static_cast<size_t>(c)].push_back(
                        user_element_covariance(cfg, ctx.az_deg[static_cast<size_t>(i)],
                                                ctx.el_deg[static_cast<size_t>(i)])
                            .r);
                }

        Rng rng_draw = derive_stream(cfg.master_seed, static_cast<uint64_t>(trial), "mc-draws");
        std::vector<double> rate_acc(strategies.size(), 0.0), sir_acc(strategies.size(), 0.0);

        // per strategy: weights per cell, then channel sqrt for every link
        std::vector<std::vector<std::vector<std::vector<MatrixXcd>>>> sqrts(strategies.size());
        for (size_t si = 0; si < strategies.size(); ++si)
        {
            const Strategy& st = strategies[si];
            std::vector<TiltWeights> w_cell;
            if (st.kind == "sdb")
            {
                std::vector<CellSdbInput> inputs(static_cast<size_t>(nc));
                for (int i = 0; i < nc; ++i)
                {
                    inputs[static_cast<size_t>(i)].user_covariances =
                        cov[static_cast<size_t>(i)][static_cast<size_t>(i)];
                    for (int c = 0; c < nc; ++c)
                        if (c != i)
                            for (int k = 0; k < k_users; ++k)
                            {
                                inputs[static_cast<size_t>(i)].leakage_covariances.push_back(
                                    cov[static_cast<size_t>(i)][static_cast<size_t>(c)]
                                       [static_cast<size_t>(k)]);
                                inputs[static_cast<size_t>(i)].leakage_caps.push_back(cfg.leakage_cap);
                            }
                }
                SdbOptions o = cfg.sdb;
                o.seed = splitmix64_of(cfg.master_seed, static_cast<uint64_t>(trial), "sdb-multicell");
                for (auto& r : weights_sdb_multicell(inputs, cfg.geometry, o))
                    w_cell.push_back(std::move(r.weights));
            }
            else
            {
                for (int i = 0; i < nc; ++i)
                {
                    const auto& users_i = cell_users[static_cast<size_t>(i)];
                    w_cell.push_back(strategy_weights(
                        st, cfg, users_i, cov[static_cast<size_t>(i)][static_cast<size_t>(i)],
                        splitmix64_of(cfg.master_seed, static_cast<uint64_t>(trial), st.label())));
                }
            }
            sqrts[si].resize(static_cast<size_t>(nc));
            for (int i = 0; i < nc; ++i)
            {
                const VirtualizationMatrix vm = build_virtualization(g, w_cell[static_cast<size_t>(i)]);
                sqrts[si][static_cast<size_t>(i)].resize(static_cast<size_t>(nc));
                for (int c = 0; c < nc; ++c)
                    for (int k = 0; k < k_users; ++k)
                        sqrts[si][static_cast<size_t>(i)][static_cast<size_t>(c)].push_back(
                            port_covariance(
                                CovarianceMatrix{cov[static_cast<size_t>(i)][static_cast<size_t>(c)]
                                                    [static_cast<size_t>(k)],
                                                 CovarianceLevel::element},
                                vm)
                                .sqrt_psd());
            }
        }

        // draws: z per (BS, user) link, shared across strategies
        const int n_links = nc * nc * k_users;
        std::vector<VectorXcd> z(static_cast<size_t>(n_links));
        for (int d = 0; d < cfg.draws_per_trial; ++d)
        {
            for (auto& zz : z)
            {
                zz.resize(g.n_ports);
                for (int i = 0; i < g.n_ports; ++i)
                    zz(i) = rng_draw.cnormal();
            }
            auto link_index = [&](int i, int c, int k) { return (i * nc + c) * k_users + k; };
            for (size_t si = 0; si < strategies.size(); ++si)
            {
                // channels for all links under this strategy
                std::vector<VectorXcd> h(static_cast<size_t>(n_links));
                for (int i = 0; i < nc; ++i)
                    for (int c = 0; c < nc; ++c)
                        for (int k = 0; k < k_users; ++k)
                        {
                            const UserCtx& ctx = cells[static_cast<size_t>(c)][static_cast<size_t>(k)];
                            const LargeScale ls{cfg.path_loss(ctx.dist_m[static_cast<size_t>(i)]),
                                                ctx.sf_db[static_cast<size_t>(i)]};
                            h[static_cast<size_t>(link_index(i, c, k))] =
                                ls.amplitude() * (sqrts[si][static_cast<size_t>(i)][static_cast<size_t>(c)]
                                                       [static_cast<size_t>(k)] *
                                                  z[static_cast<size_t>(link_index(i, c, k))]);
                        }
                // MRT per serving cell
                std::vector<MatrixXcd> precoder(static_cast<size_t>(nc));
                for (int i = 0; i < nc; ++i)
                {
                    precoder[static_cast<size_t>(i)].resize(g.n_ports, k_users);
                    for (int k = 0; k < k_users; ++k)
                        precoder[static_cast<size_t>(i)].col(k) =
                            mrt(h[static_cast<size_t>(link_index(i, i, k))], p_user);
                }
                double worst_sir = std::numeric_limits<double>::infinity();
                double worst_rate = std::numeric_limits<double>::infinity();
                for (int c = 0; c < nc; ++c)
                    for (int k = 0; k < k_users; ++k)
                    {
                        const VectorXcd& h_serv = h[static_cast<size_t>(link_index(c, c, k))];
                        const double sig = std::norm(h_serv.dot(precoder[static_cast<size_t>(c)].col(k)));
                        double interf = 0.0;
                        for (int i = 0; i < nc; ++i)
                        {
                            const VectorXcd& h_i = h[static_cast<size_t>(link_index(i, c, k))];
                            for (int kp = 0; kp < k_users; ++kp)
                            {
                                if (i == c && kp == k)
                                    continue;
                                interf += std::norm(h_i.dot(precoder[static_cast<size_t>(i)].col(kp)));
                            }
                        }
                        worst_sir = std::min(worst_sir, interf > 0.0
                                                            ? sig / interf
                                                            : std::numeric_limits<double>::infinity());
                        worst_rate = std::min(worst_rate, std::log2(1.0 + sig / (interf + noise)));
                    }
                sir_acc[si] += worst_sir;
                rate_acc[si] += worst_rate;
            }
        }
        for (size_t si = 0; si < strategies.size(); ++si)
        {
            min_rate[si][static_cast<size_t>(trial)] = rate_acc[si] / cfg.draws_per_trial;
            min_sir[si][static_cast<size_t>(trial)] = sir_acc[si] / cfg.draws_per_trial;
        }
    });

    ResultTable t;
    for (size_t si = 0; si < strategies.size(); ++si)
    {
        const MeanSe mr = mean_se(min_rate[si]);
        const MeanSe ms = mean_se(min_sir[si]);
        t.rows.push_back({"multi-cell", strategies[si].label(), static_cast<double>(k_users), "min_rate",
                          mr.mean, mr.se, n_trials, cfg.master_seed});
        t.rows.push_back({"multi-cell", strategies[si].label(), static_cast<double>(k_users), "min_sir",
                          ms.mean, ms.se, n_trials, cfg.master_seed});
    }
    return t;
}

} // namespace detail

/// Runs the configured scenario. Any module error is rethrown annotated with
/// the trial index and master seed so the drop can be replayed.
inline ResultTable run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    switch (cfg.scenario)
    {
    case Scenario::pattern_compare: return detail::run_pattern(cfg);
    case Scenario::corr_compare: return detail::run_corr(cfg);
    case Scenario::single_user: return detail::run_single_user(cfg);
    case Scenario::multi_user: return detail::run_multi_user(cfg);
    case Scenario::multi_cell: return detail::run_multi_cell(cfg);
    }
    throw std::logic_error("run_experiment: unhandled scenario");
}

} // namespace fdmimo

#endif
