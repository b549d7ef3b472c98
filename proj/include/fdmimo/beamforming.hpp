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
// Digital precoders, link metrics, downtilt selection strategies, the
// single-user eigenvector weight solution and the deterministic SIR
// surrogate used by the statistical downtilt optimizers.

#ifndef FDMIMO_BEAMFORMING_HPP
#define FDMIMO_BEAMFORMING_HPP

#include <limits>
#include <numeric>

#include "fdmimo/channel.hpp"
#include "fdmimo/correlation.hpp"
#include "fdmimo/txru.hpp"

namespace fdmimo {

/// Per-user transmit powers under a total average power budget
/// E||x||^2 = tr(P G^H G) <= P_total.
struct PowerAllocation
{
    VectorXd p;
    double total_budget = 1.0;

    static PowerAllocation equal(int k, double total)
    {
        if (k < 1 || !(total > 0.0))
            throw std::invalid_argument("power allocation: need K >= 1 and a positive budget");
        PowerAllocation a;
        a.p = VectorXd::Constant(k, total / k);
        a.total_budget = total;
        return a;
    }

    void validate(const MatrixXcd& g) const
    {
        if (g.cols() != p.size())
            throw std::invalid_argument("power allocation: size mismatch with precoder");
        if ((p.array() < 0.0).any())
            throw std::invalid_argument("power allocation: powers must be nonnegative");
        double used = 0.0;
        for (Eigen::Index k = 0; k < p.size(); ++k)
            used += p(k) * g.col(k).squaredNorm();
        if (used > total_budget * (1.0 + 1e-9))
            throw std::invalid_argument("power allocation: total power constraint violated");
    }
};

struct LinkMetrics
{
    VectorXd sinr; // linear
    VectorXd sir;  // linear, noise-free
    VectorXd rate; // bit/s/Hz, log2(1 + sinr)
};

/// Maximum ratio transmission, ||g||^2 = p_tx.
inline VectorXcd mrt(const VectorXcd& h, double p_tx)
{
    const double n = h.norm();
    if (!(n > 0.0))
        throw std::invalid_argument("mrt: zero channel vector");
    return std::sqrt(p_tx) * h / n;
}

/// Zero-forcing precoder. h_rows is K x N with row k = h_k^H; columns of the
/// result are scaled to the per-user powers.
inline MatrixXcd zf(const MatrixXcd& h_rows, const VectorXd& p)
{
    const Eigen::Index k = h_rows.rows(), n = h_rows.cols();
    if (k > n)
        throw std::invalid_argument("zf: more users than ports");
    if (p.size() != k)
        throw std::invalid_argument("zf: power vector size mismatch");
    const MatrixXcd gram = h_rows * h_rows.adjoint();
    Eigen::FullPivLU<MatrixXcd> lu(gram);
    if (!lu.isInvertible())
        throw std::invalid_argument("zf: channel rows are rank deficient");
    MatrixXcd g = h_rows.adjoint() * lu.inverse();
    for (Eigen::Index j = 0; j < k; ++j)
        g.col(j) *= std::sqrt(p(j)) / g.col(j).norm();
    return g;
}

/// Regularized zero-forcing, H^H (H H^H + delta I)^-1 column-scaled.
inline MatrixXcd rzf(const MatrixXcd& h_rows, const VectorXd& p, double regularizer)
{
    const Eigen::Index k = h_rows.rows();
    if (p.size() != k)
        throw std::invalid_argument("rzf: power vector size mismatch");
    if (!(regularizer > 0.0))
        throw std::invalid_argument("rzf: regularizer must be positive");
    const MatrixXcd gram =
        h_rows * h_rows.adjoint() + regularizer * MatrixXcd::Identity(k, k);
    MatrixXcd g = h_rows.adjoint() * gram.inverse();
    for (Eigen::Index j = 0; j < k; ++j)
    {
        const double nrm = g.col(j).norm();
        if (nrm > 0.0)
            g.col(j) *= std::sqrt(p(j)) / nrm;
    }
    return g;
}

/// SINR_k = p_k |h_k^H g_k|^2 / (sum_{j != k} p_j |h_k^H g_j|^2 + sigma_k^2);
/// SIR is the noise-free variant. A zero denominator yields +inf.
inline LinkMetrics metrics(const MatrixXcd& h_rows, const MatrixXcd& g, const VectorXd& p,
                           const VectorXd& noise_vars)
{
    const Eigen::Index k = h_rows.rows();
    if (g.cols() != k || g.rows() != h_rows.cols() || p.size() != k || noise_vars.size() != k)
        throw std::invalid_argument("metrics: inconsistent dimensions");
    const MatrixXcd cross = h_rows * g; // (k, j) = h_k^H g_j
    LinkMetrics m;
    m.sinr.resize(k);
    m.sir.resize(k);
    m.rate.resize(k);
    const double inf = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i)
    {
        const double sig = p(i) * std::norm(cross(i, i));
        double interf = 0.0;
        for (Eigen::Index j = 0; j < k; ++j)
            if (j != i)
                interf += p(j) * std::norm(cross(i, j));
        m.sir(i) = interf > 0.0 ? sig / interf : inf;
        const double den = interf + noise_vars(i);
        m.sinr(i) = den > 0.0 ? sig / den : inf;
        m.rate(i) = std::log2(1.0 + m.sinr(i));
    }
    return m;
}

// ---- downtilt selection strategies ----

inline double tilt_cst(double theta_fixed_deg) { return theta_fixed_deg; }

inline double tilt_los(const UserGeometry& user) { return user.los_elevation_deg; }

inline double tilt_com(std::span<const UserGeometry> users)
{
    if (users.empty())
        throw std::invalid_argument("tilt_com: empty user set");
    double s = 0.0;
    for (const auto& u : users)
        s += u.los_elevation_deg;
    return s / static_cast<double>(users.size());
}

inline double tilt_muab(std::span<const UserGeometry> users, std::span<const double> weights)
{
    if (users.empty() || users.size() != weights.size())
        throw std::invalid_argument("tilt_muab: need one weight per user");
    double s = 0.0, wsum = 0.0;
    for (size_t i = 0; i < users.size(); ++i)
    {
        if (weights[i] < 0.0)
            throw std::invalid_argument("tilt_muab: weights must be nonnegative");
        s += weights[i] * users[i].los_elevation_deg;
        wsum += weights[i];
    }
    if (!(wsum > 0.0))
        throw std::invalid_argument("tilt_muab: weights must not all be zero");
    return s / wsum;
}

/// Single-user optimal downtilt weights: the unit-norm eigenvector of the
/// per-port element covariance block belonging to its largest eigenvalue.
/// Deterministic output: ties broken toward the lowest eigenvalue index and
/// the first non-negligible entry rotated to be real positive.
inline TiltWeights weights_eigen_single_user(const MatrixXcd& r_element_block)
{
    if (r_element_block.rows() != r_element_block.cols())
        throw std::invalid_argument("eigen weights: matrix must be square");
    const double scale = std::max(1.0, r_element_block.cwiseAbs().maxCoeff());
    if ((r_element_block - r_element_block.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::invalid_argument("eigen weights: matrix must be Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (r_element_block + r_element_block.adjoint()));
    const Eigen::Index n = r_element_block.rows();
    const double lmax = es.eigenvalues()(n - 1);
    Eigen::Index pick = n - 1;
    for (Eigen::Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) >= lmax - 1e-12 * std::max(1.0, std::abs(lmax)))
        {
            pick = i;
            break;
        }
    VectorXcd v = es.eigenvectors().col(pick);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(v(i)) > 1e-12)
        {
            v *= std::conj(v(i)) / std::abs(v(i));
            break;
        }
    return TiltWeights(std::move(v));
}

/// Large-N deterministic SIR surrogate under equal-power MRT:
/// SIR_k = (tr R_k)^2 / sum_{j != k} tr(R_k R_j).
inline VectorXd sir_deterministic(std::span<const CovarianceMatrix> port_covariances)
{
    const size_t k = port_covariances.size();
    if (k < 2)
        throw std::invalid_argument("sir surrogate: need at least two users");
    const Eigen::Index n = port_covariances[0].r.rows();
    std::vector<double> traces(k);
    for (size_t i = 0; i < k; ++i)
    {
        if (port_covariances[i].r.rows() != n || port_covariances[i].r.cols() != n)
            throw std::invalid_argument("sir surrogate: covariance dimensions differ");
        traces[i] = port_covariances[i].r.trace().real();
        if (!(traces[i] > 0.0))
            throw std::invalid_argument("sir surrogate: covariance has zero trace");
    }
    VectorXd sir(static_cast<Eigen::Index>(k));
    for (size_t i = 0; i < k; ++i)
    {
        double den = 0.0;
        for (size_t j = 0; j < k; ++j)
            if (j != i)
                den += (port_covariances[i].r * port_covariances[j].r).trace().real();
        sir(static_cast<Eigen::Index>(i)) =
            den > 0.0 ? traces[i] * traces[i] / den : std::numeric_limits<double>::infinity();
    }
    return sir;
}

} // namespace fdmimo

#endif
