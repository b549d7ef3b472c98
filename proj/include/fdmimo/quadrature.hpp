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
// Panelized Gauss-Legendre quadrature over angular densities, refined by
// panel splitting until successive levels agree. All lags of a correlation
// table are integrated on one shared grid with positive weights, so the
// assembled matrices are positive semidefinite up to rounding.

#ifndef FDMIMO_QUADRATURE_HPP
#define FDMIMO_QUADRATURE_HPP

#include <functional>

#include "fdmimo/common.hpp"
#include "fdmimo/spectra.hpp"

namespace fdmimo {

struct QuadSpec
{
    double abs_tol = 1e-6;
    int max_level = 6;
    int min_az_panels = 4;
    int min_el_panels = 4;
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1].
inline const std::array<double, 8>& gl16_x()
{
    static const std::array<double, 8> x = {
        0.0950125098376374402, 0.2816035507792589132, 0.4580167776572273863, 0.6178762444026437484,
        0.7554044083550030339, 0.8656312023878317439, 0.9445750230732325761, 0.9894009349916499326};
    return x;
}

inline const std::array<double, 8>& gl16_w()
{
    static const std::array<double, 8> w = {
        0.1894506104550684963, 0.1826034150449235889, 0.1691565193950025382, 0.1495959888165767320,
        0.1246289712555338721, 0.0951585116824927848, 0.0622535239386478929, 0.0271524594117540949};
    return w;
}

struct Grid1D
{
    std::vector<double> x;
    std::vector<double> w;
};

/// Sorted unique panel edges on [lo, hi]: interior breakpoints plus uniform
/// subdivision up to a minimum panel count.
inline std::vector<double> panel_edges(double lo, double hi, std::vector<double> interior, int min_panels)
{
    std::vector<double> edges{lo, hi};
    for (double b : interior)
        if (b > lo && b < hi)
            edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                edges.end());
    while (static_cast<int>(edges.size()) - 1 < min_panels)
    {
        // split the widest panel
        size_t widest = 0;
        for (size_t i = 1; i + 1 < edges.size(); ++i)
            if (edges[i + 1] - edges[i] > edges[widest + 1] - edges[widest])
                widest = i;
        edges.insert(edges.begin() + static_cast<long>(widest) + 1,
                     0.5 * (edges[widest] + edges[widest + 1]));
        std::sort(edges.begin(), edges.end());
    }
    return edges;
}

/// 16-point rule per panel, each base panel split 2^level times.
inline Grid1D gl_grid(const std::vector<double>& edges, int level)
{
    const int split = 1 << level;
    Grid1D g;
    const size_t n_panels = (edges.size() - 1) * static_cast<size_t>(split);
    g.x.reserve(n_panels * 16);
    g.w.reserve(n_panels * 16);
    for (size_t p = 0; p + 1 < edges.size(); ++p)
    {
        const double step = (edges[p + 1] - edges[p]) / split;
        for (int s = 0; s < split; ++s)
        {
            const double a = edges[p] + s * step;
            const double c = a + 0.5 * step, h = 0.5 * step;
            for (int i = 0; i < 8; ++i)
            {
                g.x.push_back(c - h * gl16_x()[i]);
                g.w.push_back(h * gl16_w()[i]);
                g.x.push_back(c + h * gl16_x()[i]);
                g.w.push_back(h * gl16_w()[i]);
            }
        }
    }
    return g;
}

template <class Spectrum>
Grid1D density_grid(const Spectrum& s, int level, int min_panels)
{
    const auto [lo, hi] = support_rad(s);
    Grid1D g = gl_grid(panel_edges(lo, hi, breakpoints_rad(s), min_panels), level);
    for (size_t i = 0; i < g.x.size(); ++i)
        g.w[i] *= std::visit([&](const auto& v) { return pdf_rad(v, g.x[i]); }, s);
    return g;
}

/// One level of the lag-table expectation
///   E[ gain(phi, theta) exp(i 2 pi (d_h ds sin phi sin theta + d_v dm cos theta)) ]
/// for ds = 0..n-1 and dm = -(m-1)..m-1, laid out row-major as
/// tab[ds * (2m - 1) + (dm + m - 1)].
inline std::vector<cxd> scf_table_level(const std::function<double(double, double)>& gain,
                                        const AzimuthSpectrum& az, const ElevationSpectrum& el,
                                        double d_h, double d_v, int n, int m, int level,
                                        const QuadSpec& spec)
{
    const Grid1D ga = density_grid(az, level, spec.min_az_panels);
    const Grid1D ge = density_grid(el, level, spec.min_el_panels);
    const int w = 2 * m - 1;
    std::vector<cxd> tab(static_cast<size_t>(n) * w, cxd(0.0));
    std::vector<cxd> ph(static_cast<size_t>(n));
    std::vector<cxd> pv(static_cast<size_t>(w));

    for (size_t j = 0; j < ge.x.size(); ++j)
    {
        const double theta = ge.x[j];
        const double st = std::sin(theta), ct = std::cos(theta);
        const cxd ev = std::polar(1.0, 2.0 * pi * d_v * ct);
        pv[static_cast<size_t>(m - 1)] = 1.0;
        for (int k = 1; k < m; ++k)
        {
            pv[static_cast<size_t>(m - 1 + k)] = pv[static_cast<size_t>(m - 2 + k)] * ev;
            pv[static_cast<size_t>(m - 1 - k)] = std::conj(pv[static_cast<size_t>(m - 1 + k)]);
        }
        for (size_t i = 0; i < ga.x.size(); ++i)
        {
            const double phi = ga.x[i];
            const double wt = ga.w[i] * ge.w[j] * gain(phi, theta);
            if (wt == 0.0)
                continue;
            const cxd eh = std::polar(1.0, 2.0 * pi * d_h * std::sin(phi) * st);
            ph[0] = wt;
            for (int k = 1; k < n; ++k)
                ph[static_cast<size_t>(k)] = ph[static_cast<size_t>(k - 1)] * eh;
            for (int s = 0; s < n; ++s)
            {
                const cxd f = ph[static_cast<size_t>(s)];
                cxd* row = tab.data() + static_cast<size_t>(s) * w;
                for (int k = 0; k < w; ++k)
                    row[static_cast<size_t>(k)] += f * pv[static_cast<size_t>(k)];
            }
        }
    }
    return tab;
}

} // namespace detail

/// Lag table of the spatial correlation expectation, refined until two
/// successive levels agree within abs_tol on every lag. Throws on
/// non-convergence.
inline std::vector<cxd> scf_lag_table(const std::function<double(double, double)>& gain,
                                      const AzimuthSpectrum& az, const ElevationSpectrum& el, double d_h,
                                      double d_v, int n, int m, const QuadSpec& spec = {})
{
    std::vector<cxd> prev = detail::scf_table_level(gain, az, el, d_h, d_v, n, m, 0, spec);
    for (int level = 1; level <= spec.max_level; ++level)
    {
        std::vector<cxd> cur = detail::scf_table_level(gain, az, el, d_h, d_v, n, m, level, spec);
        double err = 0.0;
        for (size_t i = 0; i < cur.size(); ++i)
            err = std::max(err, std::abs(cur[i] - prev[i]));
        if (err <= spec.abs_tol)
            return cur;
        prev = std::move(cur);
    }
    throw std::runtime_error("quadrature did not converge to the requested tolerance at max refinement");
}

/// Scalar variant: a single (azimuth, vertical) phase-lag pair, with the lag
/// coefficients given directly in cycles (d_h (s - s') and d_v (m - m')).
inline cxd angular_expectation(const std::function<double(double, double)>& gain, const AzimuthSpectrum& az,
                               const ElevationSpectrum& el, double lag_h_cycles, double lag_v_cycles,
                               const QuadSpec& spec = {})
{
    auto level_value = [&](int level) {
        const detail::Grid1D ga = detail::density_grid(az, level, spec.min_az_panels);
        const detail::Grid1D ge = detail::density_grid(el, level, spec.min_el_panels);
        cxd acc = 0.0;
        for (size_t j = 0; j < ge.x.size(); ++j)
        {
            const double st = std::sin(ge.x[j]), ct = std::cos(ge.x[j]);
            for (size_t i = 0; i < ga.x.size(); ++i)
            {
                const double wt = ga.w[i] * ge.w[j] * gain(ga.x[i], ge.x[j]);
                if (wt == 0.0)
                    continue;
                acc += wt * std::polar(1.0, 2.0 * pi * (lag_h_cycles * std::sin(ga.x[i]) * st +
                                                        lag_v_cycles * ct));
            }
        }
        return acc;
    };
    cxd prev = level_value(0);
    for (int level = 1; level <= spec.max_level; ++level)
    {
        const cxd cur = level_value(level);
        if (std::abs(cur - prev) <= spec.abs_tol)
            return cur;
        prev = cur;
    }
    throw std::runtime_error("quadrature did not converge to the requested tolerance at max refinement");
}

/// Integral of a density over its support; the normalization self-check used
/// by the spectra tests and the validate command.
template <class Spectrum>
double density_integral(const Spectrum& s, int level = 4, int min_panels = 4)
{
    const detail::Grid1D g = detail::density_grid(s, level, min_panels);
    return pairwise_sum(std::span<const double>(g.w));
}

} // namespace fdmimo

#endif
