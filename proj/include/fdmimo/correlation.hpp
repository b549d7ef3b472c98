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
// Spatial correlation functions under the antenna-element and antenna-port
// modeling approaches, evaluated by quadrature or Monte Carlo, and the
// covariance assembly from element level to port level.
//
// Index convention follows the element-level correlation matrix definition
// R[(s'-1)M + m', (s-1)M + m] = rho((m, s), (m', s')): the row block is the
// primed pair. Monte-Carlo estimators in the tests use the same orientation.

#ifndef FDMIMO_CORRELATION_HPP
#define FDMIMO_CORRELATION_HPP

#include "fdmimo/array.hpp"
#include "fdmimo/quadrature.hpp"
#include "fdmimo/txru.hpp"

namespace fdmimo {

enum class CovarianceLevel
{
    element,
    port
};

/// Hermitian positive semidefinite correlation matrix, element level
/// (NM x NM) or port level (N x N).
struct CovarianceMatrix
{
    MatrixXcd r;
    CovarianceLevel level = CovarianceLevel::element;

    int dim() const { return static_cast<int>(r.rows()); }

    double hermitian_defect() const { return (r - r.adjoint()).cwiseAbs().maxCoeff(); }

    double min_eigenvalue() const
    {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (r + r.adjoint()),
                                                    Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }

    /// Symmetrizes (R + R^H)/2. Asymmetry beyond raw_tol indicates an
    /// assembly bug, not rounding noise, and is an error.
    void hermitize(double raw_tol = 1e-8)
    {
        if (hermitian_defect() > raw_tol)
            throw std::runtime_error("covariance: raw asymmetry exceeds tolerance");
        r = 0.5 * (r + r.adjoint()).eval();
    }

    /// Clamps small negative eigenvalues to zero; negativity below -neg_tol
    /// is rejected.
    void clamp_psd(double neg_tol = 1e-10)
    {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(r);
        if (es.eigenvalues()(0) < -neg_tol)
            throw std::runtime_error("covariance: matrix is not positive semidefinite");
        if (es.eigenvalues()(0) >= 0.0)
            return;
        VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }

    /// Hermitian square root with the same clamping policy.
    MatrixXcd sqrt_psd(double neg_tol = 1e-10) const
    {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (r + r.adjoint()));
        if (es.eigenvalues()(0) < -neg_tol)
            throw std::runtime_error("covariance: matrix is not positive semidefinite");
        VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }
};

/// Monte-Carlo estimate with its standard error (per complex component,
/// combined magnitude).
struct McEstimate
{
    cxd value{};
    double std_error = 0.0;
    long n_samples = 0;
};

struct ScfOptions
{
    bool isotropic_pattern = false; // |g|^2 = 1, for normalization checks
    QuadSpec quad{};
};

namespace detail {

inline std::function<double(double, double)> element_gain_fn(const ArrayGeometry& g, bool isotropic)
{
    if (isotropic)
        return [](double, double) { return 1.0; };
    const ElementPatternParams p = g.element;
    return [p](double phi, double theta) { return db_to_pow(element_gain_db_rad(p, phi, theta)); };
}

inline std::function<double(double, double)> itu_gain_fn(const ItuPortPatternParams& p,
                                                         double theta_tilt_rad, bool isotropic)
{
    if (isotropic)
        return [](double, double) { return 1.0; };
    return [p, theta_tilt_rad](double phi, double theta) {
        return db_to_pow(itu_gain_db_rad(p, phi, theta, theta_tilt_rad));
    };
}

inline void check_element_index(const ArrayGeometry& g, std::pair<int, int> ms)
{
    if (ms.first < 1 || ms.first > g.m_per_port || ms.second < 1 || ms.second > g.n_ports)
        throw std::invalid_argument("scf: element index (m, s) out of range");
}

/// Sample-mean of f over angle draws, with standard error.
template <class F>
McEstimate mc_expectation(const AzimuthSpectrum& az, const ElevationSpectrum& el, long n, Rng& rng, F&& f)
{
    if (n < 1)
        throw std::invalid_argument("scf mc: need at least one sample");
    cxd sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < n; ++i)
    {
        const double phi = std::visit([&](const auto& s) { return sample_rad(s, rng); }, az);
        const double theta = std::visit([&](const auto& s) { return sample_rad(s, rng); }, el);
        const cxd v = f(phi, theta);
        sum += v;
        sum_sq += std::norm(v);
    }
    McEstimate e;
    e.n_samples = n;
    e.value = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq / n - std::norm(e.value));
    e.std_error = std::sqrt(var / n);
    return e;
}

} // namespace detail

/// Element-pair correlation by nested quadrature:
/// E[|g_E|^2 exp(i 2 pi (d_h (s - s') sin phi sin theta + d_v (m - m') cos theta))].
inline cxd scf_element_quad(const ArrayGeometry& geometry, const AzimuthSpectrum& az,
                            const ElevationSpectrum& el, std::pair<int, int> ms,
                            std::pair<int, int> ms_prime, const ScfOptions& opts = {})
{
    geometry.validate();
    detail::check_element_index(geometry, ms);
    detail::check_element_index(geometry, ms_prime);
    const double lag_h = geometry.d_h * (ms.second - ms_prime.second);
    const double lag_v = geometry.d_v * (ms.first - ms_prime.first);
    return angular_expectation(detail::element_gain_fn(geometry, opts.isotropic_pattern), az, el, lag_h,
                               lag_v, opts.quad);
}

/// Monte-Carlo estimate of the same expectation, drawing angles from the
/// spectra.
inline McEstimate scf_element_mc(const ArrayGeometry& geometry, const AzimuthSpectrum& az,
                                 const ElevationSpectrum& el, std::pair<int, int> ms,
                                 std::pair<int, int> ms_prime, long n_samples, Rng& rng,
                                 const ScfOptions& opts = {})
{
    geometry.validate();
    detail::check_element_index(geometry, ms);
    detail::check_element_index(geometry, ms_prime);
    const double lag_h = geometry.d_h * (ms.second - ms_prime.second);
    const double lag_v = geometry.d_v * (ms.first - ms_prime.first);
    auto gain = detail::element_gain_fn(geometry, opts.isotropic_pattern);
    return detail::mc_expectation(az, el, n_samples, rng, [&](double phi, double theta) {
        const double w = gain(phi, theta);
        return w * std::polar(1.0, 2.0 * pi * (lag_h * std::sin(phi) * std::sin(theta) +
                                               lag_v * std::cos(theta)));
    });
}

/// Port-level correlation under the ITU pattern approximation:
/// E[A_P(phi, theta, tilt)|lin exp(i 2 pi d_h (s - s') sin phi sin theta)].
inline cxd scf_port_itu_quad(const ItuPortPatternParams& itu, double d_h, const AzimuthSpectrum& az,
                             const ElevationSpectrum& el, double theta_tilt_deg, int s, int s_prime,
                             const ScfOptions& opts = {})
{
    itu.validate();
    return angular_expectation(
        detail::itu_gain_fn(itu, deg2rad(theta_tilt_deg), opts.isotropic_pattern), az, el,
        d_h * (s - s_prime), 0.0, opts.quad);
}

inline McEstimate scf_port_itu_mc(const ItuPortPatternParams& itu, double d_h, const AzimuthSpectrum& az,
                                  const ElevationSpectrum& el, double theta_tilt_deg, int s, int s_prime,
                                  long n_samples, Rng& rng, const ScfOptions& opts = {})
{
    itu.validate();
    auto gain = detail::itu_gain_fn(itu, deg2rad(theta_tilt_deg), opts.isotropic_pattern);
    const double lag_h = d_h * (s - s_prime);
    return detail::mc_expectation(az, el, n_samples, rng, [&](double phi, double theta) {
        return gain(phi, theta) * std::polar(1.0, 2.0 * pi * lag_h * std::sin(phi) * std::sin(theta));
    });
}

/// 2D SCM comparison point: the port correlation with the elevation frozen
/// at theta = theta_tilt = 90 degrees, leaving a 1D azimuth expectation.
inline cxd covariance_2d_restricted(const ItuPortPatternParams& itu, double d_h, const AzimuthSpectrum& az,
                                    int s, int s_prime, const ScfOptions& opts = {})
{
    itu.validate();
    auto gain = detail::itu_gain_fn(itu, pi / 2.0, opts.isotropic_pattern);
    auto level_value = [&](int level) {
        const detail::Grid1D ga = detail::density_grid(az, level, opts.quad.min_az_panels);
        cxd acc = 0.0;
        for (size_t i = 0; i < ga.x.size(); ++i)
            acc += ga.w[i] * gain(ga.x[i], pi / 2.0) *
                   std::polar(1.0, 2.0 * pi * d_h * (s - s_prime) * std::sin(ga.x[i]));
        return acc;
    };
    cxd prev = level_value(0);
    for (int level = 1; level <= opts.quad.max_level; ++level)
    {
        const cxd cur = level_value(level);
        if (std::abs(cur - prev) <= opts.quad.abs_tol)
            return cur;
        prev = cur;
    }
    throw std::runtime_error("quadrature did not converge to the requested tolerance at max refinement");
}

enum class ScfMethod
{
    quadrature,
    monte_carlo
};

namespace detail {

/// Fills the NM x NM matrix from the lag table
/// tab[ds * (2M - 1) + (dm + M - 1)], ds = s - s' >= 0.
inline MatrixXcd matrix_from_lag_table(const std::vector<cxd>& tab, int n, int m)
{
    const int w = 2 * m - 1;
    MatrixXcd r(n * m, n * m);
    for (int s = 1; s <= n; ++s)
        for (int sp = 1; sp <= n; ++sp)
            for (int mm = 1; mm <= m; ++mm)
                for (int mp = 1; mp <= m; ++mp)
                {
                    const int ds = s - sp, dm = mm - mp;
                    const cxd v = ds >= 0 ? tab[static_cast<size_t>(ds) * w + (dm + m - 1)]
                                          : std::conj(tab[static_cast<size_t>(-ds) * w + (-dm + m - 1)]);
                    r((sp - 1) * m + (mp - 1), (s - 1) * m + (mm - 1)) = v;
                }
    return r;
}

/// Monte-Carlo lag table sharing one set of angle draws across all lags, so
/// the assembled matrix stays positive semidefinite.
inline std::vector<cxd> mc_lag_table(const std::function<double(double, double)>& gain,
                                     const AzimuthSpectrum& az, const ElevationSpectrum& el, double d_h,
                                     double d_v, int n, int m, long n_samples, Rng& rng)
{
    const int w = 2 * m - 1;
    std::vector<cxd> tab(static_cast<size_t>(n) * w, cxd(0.0));
    std::vector<cxd> ph(static_cast<size_t>(n)), pv(static_cast<size_t>(w));
    for (long it = 0; it < n_samples; ++it)
    {
        const double phi = std::visit([&](const auto& s) { return sample_rad(s, rng); }, az);
        const double theta = std::visit([&](const auto& s) { return sample_rad(s, rng); }, el);
        const double st = std::sin(theta), ct = std::cos(theta);
        const double wt = gain(phi, theta) / static_cast<double>(n_samples);
        const cxd ev = std::polar(1.0, 2.0 * pi * d_v * ct);
        const cxd eh = std::polar(1.0, 2.0 * pi * d_h * std::sin(phi) * st);
        pv[static_cast<size_t>(m - 1)] = 1.0;
        for (int k = 1; k < m; ++k)
        {
            pv[static_cast<size_t>(m - 1 + k)] = pv[static_cast<size_t>(m - 2 + k)] * ev;
            pv[static_cast<size_t>(m - 1 - k)] = std::conj(pv[static_cast<size_t>(m - 1 + k)]);
        }
        ph[0] = wt;
        for (int k = 1; k < n; ++k)
            ph[static_cast<size_t>(k)] = ph[static_cast<size_t>(k - 1)] * eh;
        for (int s = 0; s < n; ++s)
            for (int k = 0; k < w; ++k)
                tab[static_cast<size_t>(s) * w + k] += ph[static_cast<size_t>(s)] * pv[static_cast<size_t>(k)];
    }
    return tab;
}

} // namespace detail

/// Full element-level correlation matrix. Entries depend only on the index
/// lags, so one lag table covers the whole Toeplitz-block structure. The
/// result is hermitized and PSD-clamped.
inline CovarianceMatrix element_covariance(const ArrayGeometry& geometry, const AzimuthSpectrum& az,
                                           const ElevationSpectrum& el,
                                           ScfMethod method = ScfMethod::quadrature,
                                           const ScfOptions& opts = {}, long mc_samples = 100000,
                                           Rng* rng = nullptr)
{
    geometry.validate();
    auto gain = detail::element_gain_fn(geometry, opts.isotropic_pattern);
    std::vector<cxd> tab;
    if (method == ScfMethod::quadrature)
    {
        tab = scf_lag_table(gain, az, el, geometry.d_h, geometry.d_v, geometry.n_ports,
                            geometry.m_per_port, opts.quad);
    }
    else
    {
        if (rng == nullptr)
            throw std::invalid_argument("element_covariance: Monte-Carlo method needs an rng");
        tab = detail::mc_lag_table(gain, az, el, geometry.d_h, geometry.d_v, geometry.n_ports,
                                   geometry.m_per_port, mc_samples, *rng);
    }
    CovarianceMatrix cov{detail::matrix_from_lag_table(tab, geometry.n_ports, geometry.m_per_port),
                         CovarianceLevel::element};
    cov.hermitize();
    cov.clamp_psd();
    return cov;
}

/// Port covariance R_BS = W^H R^E W for the block-diagonal virtualization
/// matrix: entry (s', s) = sum_m sum_m' w_m w_m'* rho((m, s), (m', s')).
inline CovarianceMatrix port_covariance(const CovarianceMatrix& r_element, const VirtualizationMatrix& w)
{
    if (r_element.level != CovarianceLevel::element)
        throw std::invalid_argument("port_covariance: element-level covariance expected");
    if (r_element.dim() != w.rows())
        throw std::invalid_argument("port_covariance: dimension mismatch with virtualization matrix");
    const MatrixXcd wd = w.dense();
    CovarianceMatrix cov{wd.adjoint() * r_element.r * wd, CovarianceLevel::port};
    cov.hermitize();
    cov.clamp_psd();
    return cov;
}

} // namespace fdmimo

#endif
