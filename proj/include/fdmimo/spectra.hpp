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
// Angular power spectra (azimuth and elevation), exact sampling routines,
// and the cluster/subpath realization feeding the ray-tracing channel.

#ifndef FDMIMO_SPECTRA_HPP
#define FDMIMO_SPECTRA_HPP

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "fdmimo/common.hpp"
#include "fdmimo/rng.hpp"

namespace fdmimo {

struct VonMises
{
    double mu_deg = 0.0;
    double kappa = 6.0;
};

struct WrappedGaussian
{
    double mu_deg = 0.0;
    double sigma_deg = 30.0;
};

struct UniformAngle
{
    double lo_deg = 0.0;
    double hi_deg = 360.0;
};

/// Laplacian elevation spectrum, truncated to [0, 180] degrees and
/// renormalized. spread_deg is the standard deviation of the untruncated
/// density exp(-sqrt(2)|theta - theta0| / sigma).
struct Laplacian
{
    double theta0_deg = 90.0;
    double spread_deg = 8.0;
};

using AzimuthSpectrum = std::variant<VonMises, UniformAngle, WrappedGaussian>;
using ElevationSpectrum = std::variant<Laplacian, UniformAngle>;

namespace detail {

/// I0(x) exp(-x), stable for arbitrarily large concentration.
inline double bessel_i0_scaled(double x)
{
    if (x < 30.0)
        return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    const double r = 1.0 / (8.0 * x);
    return (1.0 + r * (1.0 + r * (4.5 + r * 37.5))) / std::sqrt(2.0 * pi * x);
}

struct LaplacianNorm
{
    double b;      // scale sigma / sqrt(2), radians
    double t0;     // peak, radians
    double mass_l; // integral over [0, t0]
    double mass_r; // integral over [t0, pi]
};

inline LaplacianNorm laplacian_norm(const Laplacian& s)
{
    if (!(s.spread_deg > 0.0))
        throw std::invalid_argument("laplacian spectrum: spread must be positive");
    const double t0 = deg2rad(s.theta0_deg);
    if (!(t0 >= 0.0 && t0 <= pi))
        throw std::invalid_argument("laplacian spectrum: peak must lie in [0, 180] degrees");
    const double b = deg2rad(s.spread_deg) / std::sqrt(2.0);
    return {b, t0, b * (1.0 - std::exp(-t0 / b)), b * (1.0 - std::exp(-(pi - t0) / b))};
}

inline double pdf_rad(const VonMises& s, double phi_rad)
{
    if (s.kappa < 0.0)
        throw std::invalid_argument("von mises spectrum: concentration must be >= 0");
    const double d = phi_rad - deg2rad(s.mu_deg);
    return std::exp(s.kappa * (std::cos(d) - 1.0)) / (2.0 * pi * bessel_i0_scaled(s.kappa));
}

inline double pdf_rad(const WrappedGaussian& s, double phi_rad)
{
    if (!(s.sigma_deg > 0.0))
        throw std::invalid_argument("wrapped gaussian spectrum: sigma must be positive");
    const double sig = deg2rad(s.sigma_deg);
    const double d = wrap_rad(phi_rad - deg2rad(s.mu_deg));
    const int kmax = static_cast<int>(std::ceil(4.0 * sig / (2.0 * pi))) + 1;
    double sum = 0.0;
    for (int k = -kmax; k <= kmax; ++k)
    {
        const double x = (d + 2.0 * pi * k) / sig;
        sum += std::exp(-0.5 * x * x);
    }
    return sum / (sig * std::sqrt(2.0 * pi));
}

inline double pdf_rad(const UniformAngle& s, double ang_rad)
{
    const double lo = deg2rad(s.lo_deg), hi = deg2rad(s.hi_deg);
    if (!(hi > lo))
        throw std::invalid_argument("uniform spectrum: need hi > lo");
    return (ang_rad >= lo && ang_rad <= hi) ? 1.0 / (hi - lo) : 0.0;
}

inline double pdf_rad(const Laplacian& s, double theta_rad)
{
    if (theta_rad < 0.0 || theta_rad > pi)
        return 0.0;
    const LaplacianNorm n = laplacian_norm(s);
    return std::exp(-std::abs(theta_rad - n.t0) / n.b) / (n.mass_l + n.mass_r);
}

/// Best-Fisher rejection sampler for the von Mises distribution.
inline double sample_rad(const VonMises& s, Rng& rng)
{
    const double mu = deg2rad(s.mu_deg);
    if (s.kappa < 1e-12)
        return wrap_rad(mu + rng.uniform(-pi, pi));
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * s.kappa * s.kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * s.kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;)
    {
        const double z = std::cos(pi * rng.uniform());
        const double f = (1.0 + r * z) / (r + z);
        const double c = s.kappa * (r - f);
        const double u2 = rng.uniform();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0)
        {
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            return wrap_rad(mu + sign * std::acos(f));
        }
    }
}

inline double sample_rad(const WrappedGaussian& s, Rng& rng)
{
    return wrap_rad(deg2rad(s.mu_deg) + deg2rad(s.sigma_deg) * rng.normal());
}

inline double sample_rad(const UniformAngle& s, Rng& rng)
{
    return rng.uniform(deg2rad(s.lo_deg), deg2rad(s.hi_deg));
}

/// Exact inverse-CDF draw from the truncated Laplacian.
inline double sample_rad(const Laplacian& s, Rng& rng)
{
    const LaplacianNorm n = laplacian_norm(s);
    const double m = rng.uniform() * (n.mass_l + n.mass_r);
    if (m < n.mass_l)
        return n.t0 + n.b * std::log(m / n.b + std::exp(-n.t0 / n.b));
    const double mr = m - n.mass_l;
    return n.t0 - n.b * std::log1p(-mr / n.b);
}

/// Integration support of a spectrum (radians).
inline std::pair<double, double> support_rad(const AzimuthSpectrum& s)
{
    if (const auto* u = std::get_if<UniformAngle>(&s))
        return {deg2rad(u->lo_deg), deg2rad(u->hi_deg)};
    const double mu = std::holds_alternative<VonMises>(s) ? deg2rad(std::get<VonMises>(s).mu_deg)
                                                          : deg2rad(std::get<WrappedGaussian>(s).mu_deg);
    return {mu - pi, mu + pi};
}

inline std::pair<double, double> support_rad(const ElevationSpectrum& s)
{
    if (const auto* u = std::get_if<UniformAngle>(&s))
        return {deg2rad(u->lo_deg), deg2rad(u->hi_deg)};
    return {0.0, pi};
}

/// Interior panel boundaries for quadrature: density peaks and kinks.
inline std::vector<double> breakpoints_rad(const AzimuthSpectrum& s)
{
    if (std::holds_alternative<UniformAngle>(s))
        return {};
    return {std::holds_alternative<VonMises>(s) ? deg2rad(std::get<VonMises>(s).mu_deg)
                                                : deg2rad(std::get<WrappedGaussian>(s).mu_deg)};
}

inline std::vector<double> breakpoints_rad(const ElevationSpectrum& s)
{
    if (std::holds_alternative<UniformAngle>(s))
        return {};
    const auto& l = std::get<Laplacian>(s);
    const double t0 = deg2rad(l.theta0_deg);
    const double b = deg2rad(l.spread_deg);
    std::vector<double> pts;
    for (double p : {t0 - 6.0 * b, t0 - b, t0, t0 + b, t0 + 6.0 * b})
        if (p > 0.0 && p < pi)
            pts.push_back(p);
    return pts;
}

inline double mean_angle_deg(const AzimuthSpectrum& s)
{
    if (const auto* u = std::get_if<UniformAngle>(&s))
        return 0.5 * (u->lo_deg + u->hi_deg);
    return std::holds_alternative<VonMises>(s) ? std::get<VonMises>(s).mu_deg
                                               : std::get<WrappedGaussian>(s).mu_deg;
}

inline double mean_angle_deg(const ElevationSpectrum& s)
{
    if (const auto* u = std::get_if<UniformAngle>(&s))
        return 0.5 * (u->lo_deg + u->hi_deg);
    return std::get<Laplacian>(s).theta0_deg;
}

} // namespace detail

/// Normalized angular density at `angle_deg`, per radian.
template <class Spectrum>
double pdf(const Spectrum& spectrum, double angle_deg)
{
    return std::visit([&](const auto& s) { return detail::pdf_rad(s, deg2rad(angle_deg)); }, spectrum);
}

/// n i.i.d. draws, degrees.
template <class Spectrum>
std::vector<double> sample(const Spectrum& spectrum, Rng& rng, int n)
{
    if (n < 1)
        throw std::invalid_argument("sample: need n >= 1");
    std::vector<double> out(static_cast<size_t>(n));
    for (auto& v : out)
        v = rad2deg(std::visit([&](const auto& s) { return detail::sample_rad(s, rng); }, spectrum));
    return out;
}

/// Standard 20-ray set of symmetric intra-cluster offsets. Provided as a
/// documented example; the offsets are always an explicit config input.
inline std::vector<double> ray_offsets_20()
{
    const std::array<double, 10> base = {0.0447, 0.1413, 0.2492, 0.3715, 0.5129,
                                         0.6797, 0.8844, 1.1481, 1.5195, 2.1551};
    std::vector<double> out;
    out.reserve(20);
    for (double v : base)
    {
        out.push_back(+v);
        out.push_back(-v);
    }
    return out;
}

/// Mobility context for per-subpath Doppler shifts. The shift follows
/// (speed / lambda) * cos(angle between velocity and arrival direction),
/// with a horizontal velocity vector at `azimuth_deg`.
struct DopplerModel
{
    double speed_mps = 0.0;
    double azimuth_deg = 0.0;
    double wavelength_m = 0.15;
};

/// Cluster/subpath generation settings. Power is uniform across clusters.
/// Intra-cluster spreads scale the symmetric offset set (degrees per unit
/// offset). subpaths_per_cluster = 1 yields the simplified model with no
/// intra-cluster dispersion.
struct ClusterConfig
{
    int n_clusters = 20;
    int subpaths_per_cluster = 1;
    double c_theta_deg = 0.0;   // departure elevation spread
    double c_phi_deg = 0.0;     // departure azimuth spread
    double c_vartheta_deg = 0.0; // arrival elevation spread
    double c_varphi_deg = 0.0;  // arrival azimuth spread
    std::vector<double> subpath_offsets = {0.0};
    double xpr_db = 9.0;                 // cross-polarization power ratio, P = 2 only
    std::optional<double> rician_k_db{}; // engaging this adds a deterministic LoS ray

    void validate() const
    {
        if (n_clusters < 1 || subpaths_per_cluster < 1)
            throw std::invalid_argument("cluster config: cluster and subpath counts must be >= 1");
        if (static_cast<int>(subpath_offsets.size()) != subpaths_per_cluster)
            throw std::invalid_argument("cluster config: need one offset per subpath");
        double s = 0.0;
        for (double a : subpath_offsets)
            s += a;
        if (std::abs(s) > 1e-9 * subpath_offsets.size())
            throw std::invalid_argument("cluster config: offsets must be symmetric about zero");
    }
};

struct Subpath
{
    double dep_az_deg = 0.0;
    double dep_el_deg = 90.0;
    double arr_az_deg = 0.0;
    double arr_el_deg = 90.0;
    double amplitude = 1.0; // sqrt(P_n / M_n), Rician-scaled when applicable
    double phase_rad = 0.0; // scalar initial phase (P = 1)
    std::array<double, 4> phases_rad{}; // theta-theta, theta-phi, phi-theta, phi-phi (P = 2)
    double xpr_linear = 1.0;
    double doppler_hz = 0.0;
};

struct Cluster
{
    double power = 1.0;
    double dep_az_deg = 0.0;
    double dep_el_deg = 90.0;
    double arr_az_deg = 0.0;
    double arr_el_deg = 90.0;
    std::vector<Subpath> subpaths;
};

struct PathRealization
{
    std::vector<Cluster> clusters;

    double total_power() const
    {
        double s = 0.0;
        for (const auto& c : clusters)
            s += c.power;
        return s;
    }
};

namespace detail {

inline double clip_elevation_deg(double el)
{
    return std::clamp(el, 0.0, 180.0);
}

inline double doppler_hz(const DopplerModel& d, double arr_az_deg, double arr_el_deg)
{
    if (d.speed_mps == 0.0)
        return 0.0;
    const double vt = std::sin(deg2rad(arr_el_deg)) * std::cos(deg2rad(arr_az_deg - d.azimuth_deg));
    return d.speed_mps / d.wavelength_m * vt;
}

} // namespace detail

/// Draws one full path realization: cluster angles i.i.d. from the four
/// spectra, uniform cluster powers, subpath angles offset per the symmetric
/// set, uniform initial phases. With a Rician factor, cluster 1 becomes the
/// power-weighted sum of its scaled subpaths and a deterministic ray in the
/// spectrum mean direction.
inline PathRealization realize_paths(const ClusterConfig& cfg, const AzimuthSpectrum& az_dep,
                                     const ElevationSpectrum& el_dep, const AzimuthSpectrum& az_arr,
                                     const ElevationSpectrum& el_arr, Rng& rng,
                                     const DopplerModel& doppler = {})
{
    cfg.validate();
    PathRealization out;
    out.clusters.resize(static_cast<size_t>(cfg.n_clusters));
    const double p = 1.0 / static_cast<double>(cfg.n_clusters);
    const double xpr_lin = db_to_pow(cfg.xpr_db);
    const int mbar = cfg.subpaths_per_cluster;

    for (int n = 0; n < cfg.n_clusters; ++n)
    {
        Cluster& cl = out.clusters[static_cast<size_t>(n)];
        cl.power = p;
        cl.dep_az_deg = rad2deg(std::visit([&](const auto& s) { return detail::sample_rad(s, rng); }, az_dep));
        cl.dep_el_deg = rad2deg(std::visit([&](const auto& s) { return detail::sample_rad(s, rng); }, el_dep));
        cl.arr_az_deg = rad2deg(std::visit([&](const auto& s) { return detail::sample_rad(s, rng); }, az_arr));
        cl.arr_el_deg = rad2deg(std::visit([&](const auto& s) { return detail::sample_rad(s, rng); }, el_arr));

        double amp = std::sqrt(cl.power / static_cast<double>(mbar));
        const bool rician_cluster = cfg.rician_k_db.has_value() && n == 0;
        if (rician_cluster)
            amp *= std::sqrt(1.0 / (db_to_pow(*cfg.rician_k_db) + 1.0));

        cl.subpaths.resize(static_cast<size_t>(mbar));
        for (int m = 0; m < mbar; ++m)
        {
            Subpath& sp = cl.subpaths[static_cast<size_t>(m)];
            const double a = cfg.subpath_offsets[static_cast<size_t>(m)];
            sp.dep_el_deg = detail::clip_elevation_deg(cl.dep_el_deg + cfg.c_theta_deg * a);
            sp.dep_az_deg = wrap_deg(cl.dep_az_deg + cfg.c_phi_deg * a);
            sp.arr_el_deg = detail::clip_elevation_deg(cl.arr_el_deg + cfg.c_vartheta_deg * a);
            sp.arr_az_deg = wrap_deg(cl.arr_az_deg + cfg.c_varphi_deg * a);
            sp.amplitude = amp;
            sp.phase_rad = rng.uniform(0.0, 2.0 * pi);
            for (auto& ph : sp.phases_rad)
                ph = rng.uniform(0.0, 2.0 * pi);
            sp.xpr_linear = xpr_lin;
            sp.doppler_hz = detail::doppler_hz(doppler, sp.arr_az_deg, sp.arr_el_deg);
        }

        if (rician_cluster)
        {
            const double kr = db_to_pow(*cfg.rician_k_db);
            Subpath los;
            los.dep_az_deg = detail::mean_angle_deg(az_dep);
            los.dep_el_deg = detail::mean_angle_deg(el_dep);
            los.arr_az_deg = detail::mean_angle_deg(az_arr);
            los.arr_el_deg = detail::mean_angle_deg(el_arr);
            los.amplitude = std::sqrt(cl.power * kr / (kr + 1.0));
            los.phase_rad = 0.0;
            los.phases_rad = {0.0, 0.0, 0.0, 0.0};
            los.xpr_linear = xpr_lin;
            los.doppler_hz = detail::doppler_hz(doppler, los.arr_az_deg, los.arr_el_deg);
            cl.subpaths.push_back(los);
        }
    }
    return out;
}

} // namespace fdmimo

#endif
