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
// Statistical downtilt beamforming: max-min surrogate-SIR optimization of
// the common per-port weight vector. The fractional program is handled by
// Dinkelbach's method; each parametric subproblem is relaxed over the lifted
// variable W = w w^H (PSD, unit trace) and solved by projected gradient
// ascent on the spectraplex; a rank-1 weight vector is recovered by Gaussian
// randomization. The multi-cell variant adds linear interference-leakage
// constraints tr(L W) <= cap, handled by Dykstra projections.

#ifndef FDMIMO_SDB_HPP
#define FDMIMO_SDB_HPP

#include <algorithm>
#include <limits>

#include "fdmimo/beamforming.hpp"
#include "fdmimo/rng.hpp"

namespace fdmimo {

struct SdbOptions
{
    int randomization_count = 200;
    double dinkelbach_tol = 1e-6;
    int dinkelbach_max_iters = 50;
    int pg_max_iters = 300;
    double pg_tol = 1e-10;
    uint64_t seed = 0x5db5eed;
};

struct SdbResult
{
    TiltWeights weights;
    double objective = 0.0; // min-user surrogate SIR at the returned weights
    double relaxed_objective = 0.0; // final Dinkelbach lambda (relaxed optimum)
    bool converged = false;
    int dinkelbach_iters = 0;
    std::vector<double> f_history;      // F(lambda_t), strictly decreasing
    std::vector<double> lambda_history; // lambda_t, strictly increasing
};

namespace detail {

inline double trace_prod(const MatrixXcd& a, const MatrixXcd& b)
{
    // tr(a b) for Hermitian a, b
    return a.cwiseProduct(b.transpose()).sum().real();
}

/// Projection onto {W Hermitian, W >= 0, tr W = 1}: eigenvalues projected
/// onto the unit simplex.
inline MatrixXcd project_spectraplex(const MatrixXcd& c)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (c + c.adjoint()));
    VectorXd lam = es.eigenvalues();
    // simplex projection of the spectrum
    std::vector<double> u(lam.data(), lam.data() + lam.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double csum = 0.0, tau = 0.0;
    for (size_t j = 0; j < u.size(); ++j)
    {
        csum += u[j];
        const double t = (csum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0)
            tau = t;
    }
    VectorXd x = (lam.array() - tau).max(0.0);
    return es.eigenvectors() * x.asDiagonal() * es.eigenvectors().adjoint();
}

struct LinearCap
{
    MatrixXcd l; // Hermitian
    double cap;
    double l_norm_sq;
};

/// Dykstra alternating projections onto spectraplex and cap half-spaces.
inline MatrixXcd project_feasible(const MatrixXcd& c, const std::vector<LinearCap>& caps)
{
    if (caps.empty())
        return project_spectraplex(c);
    const size_t n_sets = caps.size() + 1;
    std::vector<MatrixXcd> corr(n_sets, MatrixXcd::Zero(c.rows(), c.cols()));
    MatrixXcd x = c;
    for (int iter = 0; iter < 60; ++iter)
    {
        double moved = 0.0;
        for (size_t s = 0; s < n_sets; ++s)
        {
            const MatrixXcd y = x + corr[s];
            MatrixXcd px;
            if (s == 0)
                px = project_spectraplex(y);
            else
            {
                const LinearCap& lc = caps[s - 1];
                const double v = trace_prod(lc.l, y);
                px = v <= lc.cap ? y : (y - ((v - lc.cap) / lc.l_norm_sq) * lc.l).eval();
            }
            corr[s] = y - px;
            moved = std::max(moved, (px - x).cwiseAbs().maxCoeff());
            x = px;
        }
        if (moved < 1e-13)
            break;
    }
    return x;
}

inline bool caps_satisfied(const MatrixXcd& w, const std::vector<LinearCap>& caps, double tol)
{
    for (const auto& lc : caps)
        if (trace_prod(lc.l, w) > lc.cap + tol)
            return false;
    return true;
}

/// Per-user quadratic data: the M x M blocks of the element covariance and
/// the diagonal-block sum behind tr R_BS(W).
struct UserQuadratic
{
    int n = 0, m = 0;
    std::vector<MatrixXcd> block; // block[a * n + b] = B(a, b), row-block a, col-block b
    MatrixXcd s_sum;

    static UserQuadratic from_covariance(const MatrixXcd& r_element, int n_ports, int m_per_port)
    {
        if (r_element.rows() != n_ports * m_per_port || r_element.cols() != r_element.rows())
            throw std::invalid_argument("sdb: element covariance must be NM x NM");
        UserQuadratic q;
        q.n = n_ports;
        q.m = m_per_port;
        q.block.resize(static_cast<size_t>(n_ports) * n_ports);
        q.s_sum = MatrixXcd::Zero(m_per_port, m_per_port);
        for (int a = 0; a < n_ports; ++a)
            for (int b = 0; b < n_ports; ++b)
            {
                q.block[static_cast<size_t>(a) * n_ports + b] =
                    r_element.block(a * m_per_port, b * m_per_port, m_per_port, m_per_port);
                if (a == b)
                    q.s_sum += q.block[static_cast<size_t>(a) * n_ports + b];
            }
        return q;
    }

    /// Lifted port covariance P(W), entry (a, b) = tr(B(a, b) W).
    MatrixXcd lifted_port_cov(const MatrixXcd& w) const
    {
        MatrixXcd p(n, n);
        for (int a = 0; a < n; ++a)
        {
            p(a, a) = trace_prod(block[static_cast<size_t>(a) * n + a], w);
            for (int b = a + 1; b < n; ++b)
            {
                const cxd t = block[static_cast<size_t>(a) * n + b].cwiseProduct(w.transpose()).sum();
                p(a, b) = t;
                p(b, a) = std::conj(t);
            }
        }
        return p;
    }
};

struct CellData
{
    std::vector<UserQuadratic> users;
    std::vector<LinearCap> caps;
    double norm_scale = 1.0;
};

struct Evaluation
{
    std::vector<double> num;
    std::vector<double> den;
    std::vector<MatrixXcd> p; // lifted port covariances
    std::vector<double> tau;  // tr(S_k W)
};

inline Evaluation evaluate(const CellData& cell, const MatrixXcd& w)
{
    const size_t k = cell.users.size();
    Evaluation e;
    e.num.resize(k);
    e.den.resize(k);
    e.tau.resize(k);
    e.p.resize(k);
    for (size_t i = 0; i < k; ++i)
    {
        e.tau[i] = trace_prod(cell.users[i].s_sum, w);
        e.num[i] = e.tau[i] * e.tau[i];
        e.p[i] = cell.users[i].lifted_port_cov(w);
    }
    for (size_t i = 0; i < k; ++i)
    {
        double d = 0.0;
        for (size_t j = 0; j < k; ++j)
            if (j != i)
                d += e.p[i].cwiseProduct(e.p[j].transpose()).sum().real();
        e.den[i] = std::max(d, 0.0);
    }
    return e;
}

inline double dinkelbach_objective(const Evaluation& e, double lambda)
{
    double v = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < e.num.size(); ++i)
        v = std::min(v, e.num[i] - lambda * e.den[i]);
    return v;
}

/// Gradient of num_k - lambda den_k at W, Hermitian.
inline MatrixXcd subgradient(const CellData& cell, const Evaluation& e, size_t k, double lambda)
{
    const auto& users = cell.users;
    const int n = users[k].n, m = users[k].m;
    MatrixXcd g = 2.0 * e.tau[k] * users[k].s_sum;
    if (lambda != 0.0)
    {
        MatrixXcd gden = MatrixXcd::Zero(m, m);
        for (size_t j = 0; j < users.size(); ++j)
        {
            if (j == k)
                continue;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                {
                    gden += e.p[j](b, a) * users[k].block[static_cast<size_t>(a) * n + b];
                    gden += e.p[k](a, b) * users[j].block[static_cast<size_t>(b) * n + a];
                }
        }
        g -= lambda * gden;
    }
    return 0.5 * (g + g.adjoint());
}

/// Projected gradient ascent for max_W min_k [num_k - lambda den_k] over the
/// feasible spectraplex.
inline MatrixXcd solve_subproblem(const CellData& cell, double lambda, MatrixXcd w,
                                  const SdbOptions& opts, double* value_out)
{
    w = project_feasible(w, cell.caps);
    Evaluation e = evaluate(cell, w);
    double best = dinkelbach_objective(e, lambda);
    MatrixXcd best_w = w;
    double step = 1.0;
    int stall = 0;
    for (int it = 0; it < opts.pg_max_iters && stall < 8; ++it)
    {
        size_t kmin = 0;
        double vmin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < e.num.size(); ++i)
        {
            const double v = e.num[i] - lambda * e.den[i];
            if (v < vmin)
            {
                vmin = v;
                kmin = i;
            }
        }
        const MatrixXcd g = subgradient(cell, e, kmin, lambda);
        const double gnorm = g.norm();
        if (gnorm < 1e-15)
            break;
        bool improved = false;
        for (int bt = 0; bt < 24; ++bt)
        {
            const MatrixXcd cand = project_feasible(w + (step / gnorm) * g, cell.caps);
            const Evaluation ec = evaluate(cell, cand);
            const double vc = dinkelbach_objective(ec, lambda);
            if (vc > best + opts.pg_tol * std::max(1.0, std::abs(best)))
            {
                w = cand;
                e = ec;
                best = vc;
                best_w = w;
                step *= 1.6;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved)
            ++stall;
        else
            stall = 0;
    }
    if (value_out != nullptr)
        *value_out = best;
    return best_w;
}

/// Surrogate SIR values at a rank-1 weight vector.
inline std::vector<double> surrogate_at(const CellData& cell, const VectorXcd& w)
{
    const MatrixXcd lifted = w * w.adjoint();
    const Evaluation e = evaluate(cell, lifted);
    std::vector<double> sir(e.num.size());
    for (size_t i = 0; i < e.num.size(); ++i)
        sir[i] = e.den[i] > 1e-300 ? e.num[i] / e.den[i] : std::numeric_limits<double>::infinity();
    return sir;
}

inline double min_of(const std::vector<double>& v)
{
    return *std::min_element(v.begin(), v.end());
}

/// Gaussian randomization: rank-1 candidates from the relaxed solution, the
/// best true objective wins. The dominant eigenvector of the relaxed W is
/// always in the pool.
inline VectorXcd randomize(const CellData& cell, const MatrixXcd& w_star, const SdbOptions& opts,
                           double* objective_out)
{
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (w_star + w_star.adjoint()));
    const Eigen::Index m = w_star.rows();
    MatrixXcd sqrt_w = es.eigenvectors() *
                       es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                       es.eigenvectors().adjoint();
    Rng rng(opts.seed);

    VectorXcd best_w;
    double best_obj = -1.0;
    auto consider = [&](VectorXcd cand) {
        const double nrm = cand.norm();
        if (!(nrm > 1e-12))
            return;
        cand /= nrm;
        if (!cell.caps.empty())
        {
            const MatrixXcd lifted = cand * cand.adjoint();
            if (!caps_satisfied(lifted, cell.caps, 1e-9))
                return;
        }
        const double obj = min_of(surrogate_at(cell, cand));
        if (obj > best_obj)
        {
            best_obj = obj;
            best_w = std::move(cand);
        }
    };

    consider(es.eigenvectors().col(m - 1));
    for (int c = 0; c < opts.randomization_count; ++c)
    {
        VectorXcd g(m);
        for (Eigen::Index i = 0; i < m; ++i)
            g(i) = rng.cnormal();
        consider(sqrt_w * g);
    }
    if (best_w.size() == 0)
        throw std::runtime_error("sdb: no feasible randomization candidate (leakage caps too tight)");
    if (objective_out != nullptr)
        *objective_out = best_obj;
    return best_w;
}

inline SdbResult solve_cell(CellData cell, const SdbOptions& opts)
{
    const size_t k = cell.users.size();
    if (k == 0)
        throw std::invalid_argument("sdb: need at least one user covariance");
    const int m = cell.users[0].m;

    // common scaling so the Dinkelbach values are O(1); the surrogate SIR is
    // scale invariant
    double smax = 0.0;
    for (const auto& u : cell.users)
        smax = std::max(smax, u.s_sum.trace().real());
    if (!(smax > 0.0))
        throw std::invalid_argument("sdb: covariances have zero trace");
    const double c = 1.0 / smax;
    for (auto& u : cell.users)
    {
        u.s_sum *= c;
        for (auto& b : u.block)
            b *= c;
    }
    for (auto& lc : cell.caps)
    {
        lc.cap *= c;
        lc.l_norm_sq = lc.l.squaredNorm();
    }
    cell.norm_scale = c;

    SdbResult res;

    // initial lifted iterate: dominant eigenvector of the summed diagonal
    // blocks
    MatrixXcd s_all = MatrixXcd::Zero(m, m);
    for (const auto& u : cell.users)
        s_all += u.s_sum;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es0(s_all);
    VectorXcd v0 = es0.eigenvectors().col(m - 1);
    MatrixXcd w_lift = project_feasible(v0 * v0.adjoint(), cell.caps);

    if (k == 1)
    {
        // degenerate mode: no interference, maximize the numerator trace form
        double val = 0.0;
        w_lift = solve_subproblem(cell, 0.0, w_lift, opts, &val);
        double obj = 0.0;
        VectorXcd w = randomize(cell, w_lift, opts, &obj);
        res.weights = TiltWeights(std::move(w));
        const Evaluation e = evaluate(cell, res.weights.weights * res.weights.weights.adjoint());
        res.objective = e.tau[0];
        res.relaxed_objective = val;
        res.converged = true;
        res.dinkelbach_iters = 0;
        return res;
    }

    double lambda = min_of(surrogate_at(cell, v0));
    if (!std::isfinite(lambda))
    {
        res.weights = TiltWeights(std::move(v0));
        res.objective = lambda;
        res.relaxed_objective = lambda;
        res.converged = true;
        return res;
    }

    bool converged = false;
    double f_val = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.dinkelbach_max_iters; ++it)
    {
        w_lift = solve_subproblem(cell, lambda, w_lift, opts, &f_val);
        res.f_history.push_back(f_val);
        res.lambda_history.push_back(lambda);
        res.dinkelbach_iters = it + 1;
        if (std::abs(f_val) < opts.dinkelbach_tol)
        {
            converged = true;
            break;
        }
        const Evaluation e = evaluate(cell, w_lift);
        double next = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < k; ++i)
            next = std::min(next, e.den[i] > 1e-300 ? e.num[i] / e.den[i]
                                                    : std::numeric_limits<double>::infinity());
        if (!std::isfinite(next) || next <= lambda)
            break; // stalled subproblem; keep the best incumbent
        lambda = next;
    }

    double obj = 0.0;
    VectorXcd w = randomize(cell, w_lift, opts, &obj);
    res.weights = TiltWeights(std::move(w));
    res.objective = obj;
    res.relaxed_objective = lambda;
    res.converged = converged;
    return res;
}

} // namespace detail

/// Max-min surrogate-SIR downtilt weights for one cell. The element
/// covariances are NM x NM, one per user, sharing the common weight vector
/// across ports.
inline SdbResult weights_sdb(std::span<const MatrixXcd> element_covariances,
                             const ArrayGeometry& geometry, const SdbOptions& opts = {})
{
    geometry.validate();
    detail::CellData cell;
    for (const MatrixXcd& r : element_covariances)
        cell.users.push_back(
            detail::UserQuadratic::from_covariance(r, geometry.n_ports, geometry.m_per_port));
    return detail::solve_cell(std::move(cell), opts);
}

/// Per-cell SDB input: intra-cell user covariances plus the cross-link
/// covariances toward out-of-cell users with their leakage caps.
struct CellSdbInput
{
    std::vector<MatrixXcd> user_covariances;
    std::vector<MatrixXcd> leakage_covariances;
    std::vector<double> leakage_caps;
};

/// Multi-cell SDB: each cell maximizes its own min-user surrogate SIR under
/// tr(Leak(W)) <= cap for every out-of-cell user. Cells are coupled only
/// through the shared covariances, so they are solved independently.
inline std::vector<SdbResult> weights_sdb_multicell(std::span<const CellSdbInput> cells,
                                                    const ArrayGeometry& geometry,
                                                    const SdbOptions& opts = {})
{
    geometry.validate();
    if (cells.size() < 2)
        throw std::invalid_argument("multi-cell sdb: need at least two cells");
    std::vector<SdbResult> out;
    out.reserve(cells.size());
    for (const CellSdbInput& ci : cells)
    {
        if (ci.leakage_covariances.size() != ci.leakage_caps.size())
            throw std::invalid_argument("multi-cell sdb: one cap per leakage covariance");
        detail::CellData cell;
        for (const MatrixXcd& r : ci.user_covariances)
            cell.users.push_back(
                detail::UserQuadratic::from_covariance(r, geometry.n_ports, geometry.m_per_port));
        for (size_t q = 0; q < ci.leakage_covariances.size(); ++q)
        {
            if (!(ci.leakage_caps[q] > 0.0))
                throw std::invalid_argument("multi-cell sdb: leakage caps must be positive");
            if (std::isinf(ci.leakage_caps[q]))
                continue; // inactive
            const auto uq = detail::UserQuadratic::from_covariance(ci.leakage_covariances[q],
                                                                   geometry.n_ports, geometry.m_per_port);
            detail::LinearCap lc;
            lc.l = uq.s_sum;
            lc.cap = ci.leakage_caps[q];
            lc.l_norm_sq = lc.l.squaredNorm();
            cell.caps.push_back(std::move(lc));
        }
        out.push_back(detail::solve_cell(std::move(cell), opts));
    }
    return out;
}

} // namespace fdmimo

#endif
