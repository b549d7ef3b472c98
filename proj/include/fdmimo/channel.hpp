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
// 3D ray-tracing channel coefficient generation under the antenna-element
// and antenna-port approaches, plus covariance-based correlated Rayleigh and
// Kronecker channel draws.

#ifndef FDMIMO_CHANNEL_HPP
#define FDMIMO_CHANNEL_HPP

#include "fdmimo/array.hpp"
#include "fdmimo/correlation.hpp"
#include "fdmimo/spectra.hpp"
#include "fdmimo/txru.hpp"

namespace fdmimo {

/// Path loss and shadow fading, applied as sqrt(10^(-(PL + SF)/10)).
struct LargeScale
{
    double path_loss_db = 0.0;
    double shadow_fading_db = 0.0;

    double amplitude() const
    {
        if (!std::isfinite(path_loss_db) || !std::isfinite(shadow_fading_db))
            throw std::invalid_argument("large scale: loss terms must be finite");
        return std::sqrt(db_to_pow(-(path_loss_db + shadow_fading_db)));
    }
};

/// Log-distance path loss PL0 + 10 n log10(d / d0). Externally computed
/// per-user losses can be passed through LargeScale directly.
struct PathLossModel
{
    double pl0_db = 30.0;
    double exponent = 3.7;
    double d0_m = 1.0;

    double operator()(double distance_m) const
    {
        if (!(distance_m > 0.0))
            throw std::invalid_argument("path loss: distance must be positive");
        return pl0_db + 10.0 * exponent * std::log10(distance_m / d0_m);
    }
};

/// User-side geometry: LoS direction seen from the BS, link distance and the
/// receive ULA (a single isotropic element by default).
struct UserGeometry
{
    double los_azimuth_deg = 0.0;
    double los_elevation_deg = 90.0;
    double distance_m = 250.0;
    int rx_elements = 1;
    double rx_spacing = 0.5; // wavelengths
    double speed_mps = 0.0;
    double velocity_azimuth_deg = 0.0;

    void validate() const
    {
        if (!(los_elevation_deg > 0.0 && los_elevation_deg < 180.0))
            throw std::invalid_argument("user geometry: LoS elevation must lie in (0, 180) degrees");
        if (rx_elements < 1)
            throw std::invalid_argument("user geometry: need at least one receive element");
    }
};

enum class ChannelApproach
{
    element,
    port_itu
};

/// One channel matrix snapshot: rows = receive elements, columns = transmit
/// elements (element approach, NM per polarization) or ports (N).
struct ChannelSnapshot
{
    MatrixXcd h;
    double time_s = 0.0;
    ChannelApproach approach = ChannelApproach::element;
};

/// Transmit array response of element (m, s), 1-based:
/// exp(i 2 pi [(s-1) d_h sin phi sin theta + (m-1) d_v cos theta]).
inline cxd tx_array_response_element(const ArrayGeometry& geometry, int s, int m, double phi_deg,
                                     double theta_deg)
{
    if (s < 1 || s > geometry.n_ports || m < 1 || m > geometry.m_per_port)
        throw std::out_of_range("array response: element index out of range");
    const double phi = deg2rad(phi_deg), theta = deg2rad(theta_deg);
    return std::polar(1.0, 2.0 * pi * ((s - 1) * geometry.d_h * std::sin(phi) * std::sin(theta) +
                                       (m - 1) * geometry.d_v * std::cos(theta)));
}

namespace detail {

inline cxd rx_response(const UserGeometry& user, int u, double arr_az_rad, double arr_el_rad)
{
    return std::polar(1.0, 2.0 * pi * u * user.rx_spacing * std::sin(arr_az_rad) * std::sin(arr_el_rad));
}

/// Polarimetric subpath coupling g_r^T alpha g_t for one transmit layer.
inline cxd coupled_gain(const Subpath& sp, const std::array<double, 2>& g_t,
                        const std::array<double, 2>& g_r)
{
    const double x = std::sqrt(1.0 / sp.xpr_linear);
    const cxd a00 = std::polar(1.0, sp.phases_rad[0]);
    const cxd a01 = x * std::polar(1.0, sp.phases_rad[1]);
    const cxd a10 = x * std::polar(1.0, sp.phases_rad[2]);
    const cxd a11 = std::polar(1.0, sp.phases_rad[3]);
    return g_r[0] * (a00 * g_t[0] + a01 * g_t[1]) + g_r[1] * (a10 * g_t[0] + a11 * g_t[1]);
}

} // namespace detail

/// Per-element ray-traced channel, U x (NM P). Columns are laid out
/// (s-1)M + m per polarization layer, matching the element covariance and
/// virtualization ordering; a second layer (slant beta - 90) follows for
/// dual-polarized arrays.
inline ChannelSnapshot raytrace_element_channel(const ArrayGeometry& geometry, const UserGeometry& user,
                                                const PathRealization& paths, const LargeScale& large_scale,
                                                double t)
{
    geometry.validate();
    user.validate();
    const int n = geometry.n_ports, m = geometry.m_per_port, u_cnt = user.rx_elements;
    const int layers = geometry.polarization;
    const double scale = large_scale.amplitude();
    // receive side: single slant convention, vertical
    const std::array<double, 2> g_r = {0.0, 1.0};

    ChannelSnapshot snap;
    snap.time_s = t;
    snap.approach = ChannelApproach::element;
    snap.h = MatrixXcd::Zero(u_cnt, n * m * layers);

    for (const Cluster& cl : paths.clusters)
        for (const Subpath& sp : cl.subpaths)
        {
            const double dep_az = deg2rad(sp.dep_az_deg), dep_el = deg2rad(sp.dep_el_deg);
            const double arr_az = deg2rad(sp.arr_az_deg), arr_el = deg2rad(sp.arr_el_deg);
            const double a_e_lin = db_to_pow(detail::element_gain_db_rad(geometry.element, dep_az, dep_el));
            const cxd doppler = std::polar(1.0, 2.0 * pi * sp.doppler_hz * t);

            // per-layer coupled field gain
            std::array<cxd, 2> layer_gain{};
            if (layers == 1)
            {
                layer_gain[0] = std::sqrt(a_e_lin) * std::polar(1.0, sp.phase_rad);
            }
            else
            {
                for (int p = 0; p < 2; ++p)
                {
                    const double beta = geometry.slant_deg - 90.0 * p;
                    layer_gain[static_cast<size_t>(p)] =
                        detail::coupled_gain(sp, field_decompose(a_e_lin, beta), g_r);
                }
            }

            const cxd e_h = std::polar(1.0, 2.0 * pi * geometry.d_h * std::sin(dep_az) * std::sin(dep_el));
            const cxd e_v = std::polar(1.0, 2.0 * pi * geometry.d_v * std::cos(dep_el));
            for (int u = 0; u < u_cnt; ++u)
            {
                const cxd rx = detail::rx_response(user, u, arr_az, arr_el);
                for (int p = 0; p < layers; ++p)
                {
                    const cxd base = scale * sp.amplitude * layer_gain[static_cast<size_t>(p)] * rx * doppler;
                    cxd col_phase = base;
                    for (int s = 0; s < n; ++s)
                    {
                        cxd v = col_phase;
                        for (int mm = 0; mm < m; ++mm)
                        {
                            snap.h(u, p * n * m + s * m + mm) += v;
                            v *= e_v;
                        }
                        col_phase *= e_h;
                    }
                }
            }
        }
    return snap;
}

/// Port channel under the element approach: the element channel
/// right-multiplied by the virtualization matrix (port s = weighted column
/// sum of its M elements).
inline ChannelSnapshot raytrace_port_channel_element_approach(const ArrayGeometry& geometry,
                                                              const VirtualizationMatrix& w,
                                                              const UserGeometry& user,
                                                              const PathRealization& paths,
                                                              const LargeScale& large_scale, double t)
{
    ChannelSnapshot elem = raytrace_element_channel(geometry, user, paths, large_scale, t);
    if (elem.h.cols() != w.rows())
        throw std::invalid_argument("port channel: virtualization dimensions do not match geometry");
    ChannelSnapshot snap;
    snap.time_s = t;
    snap.approach = ChannelApproach::element;
    snap.h = elem.h * w.dense();
    return snap;
}

/// Port channel under the ITU antenna-port approach, with the port-level
/// array response and the approximate pattern.
inline ChannelSnapshot raytrace_port_channel_itu(const ItuPortPatternParams& itu, int n_ports, double d_h,
                                                 double theta_tilt_deg, const UserGeometry& user,
                                                 const PathRealization& paths,
                                                 const LargeScale& large_scale, double t)
{
    itu.validate();
    user.validate();
    if (n_ports < 1)
        throw std::invalid_argument("port channel: need at least one port");
    if (!(theta_tilt_deg > 0.0 && theta_tilt_deg < 180.0))
        throw std::invalid_argument("port channel: tilt must lie in (0, 180) degrees");
    const double tilt = deg2rad(theta_tilt_deg);
    const double scale = large_scale.amplitude();

    ChannelSnapshot snap;
    snap.time_s = t;
    snap.approach = ChannelApproach::port_itu;
    snap.h = MatrixXcd::Zero(user.rx_elements, n_ports);

    for (const Cluster& cl : paths.clusters)
        for (const Subpath& sp : cl.subpaths)
        {
            const double dep_az = deg2rad(sp.dep_az_deg), dep_el = deg2rad(sp.dep_el_deg);
            const double arr_az = deg2rad(sp.arr_az_deg), arr_el = deg2rad(sp.arr_el_deg);
            const double g_p = std::sqrt(db_to_pow(detail::itu_gain_db_rad(itu, dep_az, dep_el, tilt)));
            const cxd base = scale * sp.amplitude * g_p * std::polar(1.0, sp.phase_rad) *
                             std::polar(1.0, 2.0 * pi * sp.doppler_hz * t);
            const cxd e_h = std::polar(1.0, 2.0 * pi * d_h * std::sin(dep_az) * std::sin(dep_el));
            for (int u = 0; u < user.rx_elements; ++u)
            {
                cxd v = base * detail::rx_response(user, u, arr_az, arr_el);
                for (int s = 0; s < n_ports; ++s)
                {
                    snap.h(u, s) += v;
                    v *= e_h;
                }
            }
        }
    return snap;
}

/// h = scale * R^(1/2) z with i.i.d. unit-variance circular Gaussian z.
/// Prefer the sqrt overload when drawing repeatedly from one covariance.
inline VectorXcd draw_rayleigh_correlated_sqrt(const MatrixXcd& sqrt_r_bs, const LargeScale& large_scale,
                                               Rng& rng)
{
    VectorXcd z(sqrt_r_bs.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z(i) = rng.cnormal();
    return large_scale.amplitude() * (sqrt_r_bs * z);
}

inline VectorXcd draw_rayleigh_correlated(const CovarianceMatrix& r_bs, const LargeScale& large_scale,
                                          Rng& rng)
{
    return draw_rayleigh_correlated_sqrt(r_bs.sqrt_psd(), large_scale, rng);
}

/// Kronecker draw H = scale * R_MS^(1/2) X R_BS^(1/2).
inline MatrixXcd draw_kronecker(const CovarianceMatrix& r_ms, const CovarianceMatrix& r_bs,
                                const LargeScale& large_scale, Rng& rng)
{
    const MatrixXcd sq_ms = r_ms.sqrt_psd();
    const MatrixXcd sq_bs = r_bs.sqrt_psd();
    MatrixXcd x(sq_ms.cols(), sq_bs.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            x(i, j) = rng.cnormal();
    return large_scale.amplitude() * (sq_ms * x * sq_bs);
}

} // namespace fdmimo

#endif
