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
// Antenna element / port geometry and radiation pattern math: the 3GPP
// element pattern, the ITU approximate port pattern, array factors for
// vertically stacked elements, and the HPBW / peak-gain relations that tie
// the two modeling approaches together.

#ifndef FDMIMO_ARRAY_HPP
#define FDMIMO_ARRAY_HPP

#include <algorithm>
#include <array>
#include <utility>

#include "fdmimo/common.hpp"

namespace fdmimo {

/// Parameters of the directional pattern of a single active antenna element.
/// Defaults are the 3GPP values (8 dBi peak, 65 deg HPBWs, 30 dB front-back
/// ratio and vertical side-lobe attenuation).
struct ElementPatternParams
{
    double gain_max_dbi = 8.0;
    double phi_3db_deg = 65.0;
    double theta_3db_deg = 65.0;
    double front_back_ratio_db = 30.0; // A_m
    double sla_v_db = 30.0;

    void validate() const
    {
        if (!(phi_3db_deg > 0.0 && phi_3db_deg < 180.0) || !(theta_3db_deg > 0.0 && theta_3db_deg < 180.0))
            throw std::invalid_argument("element pattern: HPBWs must lie in (0, 180) degrees");
        if (!(front_back_ratio_db > 0.0) || !(sla_v_db > 0.0))
            throw std::invalid_argument("element pattern: attenuation floors must be positive");
    }
};

/// ITU approximate antenna-port pattern parameters (17 dBi, 70/15 deg HPBWs,
/// 20 dB front-back ratio).
struct ItuPortPatternParams
{
    double gain_max_dbi = 17.0;
    double phi_3db_deg = 70.0;
    double theta_3db_deg = 15.0;
    double front_back_ratio_db = 20.0;

    void validate() const
    {
        if (!(phi_3db_deg > 0.0 && phi_3db_deg < 180.0) || !(theta_3db_deg > 0.0 && theta_3db_deg < 180.0))
            throw std::invalid_argument("ITU port pattern: HPBWs must lie in (0, 180) degrees");
        if (!(front_back_ratio_db > 0.0))
            throw std::invalid_argument("ITU port pattern: front-back ratio must be positive");
    }
};

/// Uniform planar active antenna array: M co-polarized elements per column
/// (one column per port), N port columns, element (m, s) sitting at
/// ((s-1) d_h) e_y + ((m-1) d_v) e_z in wavelength units with the phase
/// reference at the origin.
struct ArrayGeometry
{
    int m_per_port = 8;      // M
    int n_ports = 4;         // N
    int polarization = 1;    // P, 1 = co-polarized, 2 = dual-polarized
    double slant_deg = 90.0; // beta
    double d_v = 0.8;        // vertical spacing, wavelengths
    double d_h = 0.5;        // horizontal spacing, wavelengths
    ElementPatternParams element{};

    int num_elements() const { return m_per_port * n_ports; }

    void validate() const
    {
        if (m_per_port < 1 || n_ports < 1)
            throw std::invalid_argument("array geometry: M and N must be >= 1");
        if (polarization != 1 && polarization != 2)
            throw std::invalid_argument("array geometry: polarization must be 1 or 2");
        if (!(d_v > 0.0) || !(d_h > 0.0))
            throw std::invalid_argument("array geometry: element spacings must be positive");
        element.validate();
    }
};

namespace detail {

/// Horizontal + vertical cut attenuations of the element pattern, in dB
/// (nonpositive). Angles in radians, phi wrapped to (-pi, pi].
inline double element_attenuation_db(const ElementPatternParams& p, double phi_rad, double theta_rad)
{
    const double ph = wrap_rad(phi_rad) / deg2rad(p.phi_3db_deg);
    const double th = (theta_rad - pi / 2.0) / deg2rad(p.theta_3db_deg);
    const double a_h = -std::min(12.0 * ph * ph, p.front_back_ratio_db);
    const double a_v = -std::min(12.0 * th * th, p.sla_v_db);
    return -std::min(-(a_h + a_v), p.front_back_ratio_db);
}

inline double itu_attenuation_db(const ItuPortPatternParams& p, double phi_rad, double theta_rad,
                                 double theta_tilt_rad)
{
    const double ph = wrap_rad(phi_rad) / deg2rad(p.phi_3db_deg);
    const double th = (theta_rad - theta_tilt_rad) / deg2rad(p.theta_3db_deg);
    const double a_h = -std::min(12.0 * ph * ph, p.front_back_ratio_db);
    const double a_v = -std::min(12.0 * th * th, p.front_back_ratio_db);
    return -std::min(-(a_h + a_v), p.front_back_ratio_db);
}

/// Radian-space fast paths used by the channel and correlation inner loops.
inline double element_gain_db_rad(const ElementPatternParams& p, double phi_rad, double theta_rad)
{
    return p.gain_max_dbi + element_attenuation_db(p, phi_rad, theta_rad);
}

inline double itu_gain_db_rad(const ItuPortPatternParams& p, double phi_rad, double theta_rad,
                              double theta_tilt_rad)
{
    return p.gain_max_dbi + itu_attenuation_db(p, phi_rad, theta_rad, theta_tilt_rad);
}

inline cxd array_factor_rad(std::span<const cxd> weights, double d_v, double theta_rad)
{
    if (weights.empty())
        throw std::invalid_argument("array factor: weight vector is empty");
    const double psi = 2.0 * pi * d_v * std::cos(theta_rad);
    const cxd step = std::polar(1.0, psi);
    cxd phase = 1.0, sum = 0.0;
    for (const cxd& w : weights)
    {
        sum += w * phase;
        phase *= step;
    }
    return sum;
}

} // namespace detail

/// Combined 3D element gain in dBi. theta in [0, 180], phi wrapped to
/// (-180, 180].
inline double element_pattern_db(const ElementPatternParams& params, double phi_deg, double theta_deg)
{
    return detail::element_gain_db_rad(params, deg2rad(phi_deg), deg2rad(theta_deg));
}

/// ITU approximate port gain in dBi for a port tilted to theta_tilt.
inline double itu_port_pattern_db(const ItuPortPatternParams& params, double phi_deg, double theta_deg,
                                  double theta_tilt_deg)
{
    return detail::itu_gain_db_rad(params, deg2rad(phi_deg), deg2rad(theta_deg), deg2rad(theta_tilt_deg));
}

/// Array factor of a column of K vertically stacked elements:
/// sum_k w_k exp(i 2 pi (k-1) d_v cos theta).
inline cxd array_factor(std::span<const cxd> weights, double d_v, double theta_deg)
{
    return detail::array_factor_rad(weights, d_v, deg2rad(theta_deg));
}

/// Exact port pattern under the element approach: element gain plus
/// 20 log10 |A_F| with the supplied downtilt weights (length M).
inline double port_pattern_element_db(const ArrayGeometry& geometry, std::span<const cxd> weights,
                                      double phi_deg, double theta_deg)
{
    if (static_cast<int>(weights.size()) != geometry.m_per_port)
        throw std::invalid_argument("port pattern: weight count must equal elements per port");
    const cxd af = array_factor(weights, geometry.d_v, theta_deg);
    return element_pattern_db(geometry.element, phi_deg, theta_deg) + 20.0 * std::log10(std::abs(af));
}

/// Half-power beamwidth of a K-element port, degrees:
/// 2 [pi/2 - arccos(1.391 / (pi K d_v))].
inline double port_hpbw_deg(int k, double d_v)
{
    if (k < 1 || !(d_v > 0.0))
        throw std::invalid_argument("port HPBW: need K >= 1 and d_v > 0");
    const double arg = 1.391 / (pi * static_cast<double>(k) * d_v);
    if (arg > 1.0)
        throw std::domain_error("beamwidth formula invalid for electrically small aperture");
    return rad2deg(2.0 * (pi / 2.0 - std::acos(arg)));
}

/// Peak directional gain of a K-element port: G_max,E + 20 log10 sqrt(K).
inline double port_peak_gain_dbi(double element_gain_dbi, int k)
{
    if (k < 1)
        throw std::invalid_argument("port peak gain: K must be >= 1");
    return element_gain_dbi + 20.0 * std::log10(std::sqrt(static_cast<double>(k)));
}

/// Splits a linear-scale global pattern value A into field components along
/// the two polarizations of an element slanted by beta:
/// (sqrt(A) cos beta, sqrt(A) sin beta). The second slot carries the whole
/// field at beta = 90 deg (vertically polarized elements).
inline std::array<double, 2> field_decompose(double pattern_linear, double slant_beta_deg)
{
    if (pattern_linear < 0.0)
        throw std::invalid_argument("field decompose: linear pattern value must be >= 0");
    const double a = std::sqrt(pattern_linear);
    const double b = deg2rad(slant_beta_deg);
    return {a * std::cos(b), a * std::sin(b)};
}

} // namespace fdmimo

#endif
