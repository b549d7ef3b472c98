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
// TXRU virtualization: 1D/2D sub-array-partition weight vectors and the
// block-diagonal virtualization matrix mapping port signals to element
// signals.

#ifndef FDMIMO_TXRU_HPP
#define FDMIMO_TXRU_HPP

#include <optional>
#include <utility>
#include <vector>

#include "fdmimo/array.hpp"
#include "fdmimo/common.hpp"

namespace fdmimo {

/// Unit-norm downtilt weight vector for one TXRU/port, optionally tagged with
/// the tilt angle it was generated for.
struct TiltWeights
{
    VectorXcd weights;
    std::optional<double> theta_tilt_deg;

    TiltWeights() = default;

    explicit TiltWeights(VectorXcd w, std::optional<double> tilt = std::nullopt)
        : weights(std::move(w)), theta_tilt_deg(tilt)
    {
        const double n = weights.norm();
        if (!(n > 0.0))
            throw std::invalid_argument("tilt weights: zero weight vector");
        if (std::abs(n - 1.0) > 1e-6)
            throw std::invalid_argument("tilt weights: vector must be unit norm");
        weights /= n;
    }

    int size() const { return static_cast<int>(weights.size()); }
};

/// Phase-only sub-array-partition weights:
/// w_k = (1/sqrt(K)) exp(-i 2 pi (k-1) d_v cos theta_tilt).
inline TiltWeights weights_1d(int k, double d_v, double theta_tilt_deg)
{
    if (k < 1 || !(d_v > 0.0))
        throw std::invalid_argument("weights_1d: need K >= 1 and d_v > 0");
    VectorXcd w(k);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    const double psi = -2.0 * pi * d_v * std::cos(deg2rad(theta_tilt_deg));
    for (int i = 0; i < k; ++i)
        w(i) = std::polar(scale, psi * static_cast<double>(i));
    return TiltWeights(std::move(w), theta_tilt_deg);
}

/// 2D sub-array weights: vertical tilt vector (length K) and horizontal scan
/// vector v_l = (1/sqrt(L)) exp(-i 2 pi (l-1) d_h sin phi_scan).
inline std::pair<TiltWeights, TiltWeights> weights_2d(int k, int l, double d_v, double d_h,
                                                      double theta_tilt_deg, double phi_scan_deg)
{
    if (k < 1 || l < 1)
        throw std::invalid_argument("weights_2d: need K >= 1 and L >= 1");
    TiltWeights vert = weights_1d(k, d_v, theta_tilt_deg);
    VectorXcd v(l);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l));
    const double psi = -2.0 * pi * d_h * std::sin(deg2rad(phi_scan_deg));
    for (int i = 0; i < l; ++i)
        v(i) = std::polar(scale, psi * static_cast<double>(i));
    return {std::move(vert), TiltWeights(std::move(v))};
}

/// 1D sub-array mapping q = x (Kronecker) w.
inline VectorXcd map_subarray_1d(const VectorXcd& txru_signals, const TiltWeights& w)
{
    if (txru_signals.size() == 0)
        throw std::invalid_argument("map_subarray_1d: empty TXRU signal vector");
    const int k = w.size();
    VectorXcd q(txru_signals.size() * k);
    for (int i = 0; i < txru_signals.size(); ++i)
        q.segment(i * k, k) = txru_signals(i) * w.weights;
    return q;
}

/// 2D sub-array mapping for one TXRU: q = x * (v (Kronecker) w).
inline VectorXcd map_subarray_2d(cxd txru_signal, const TiltWeights& v, const TiltWeights& w)
{
    VectorXcd q(static_cast<Eigen::Index>(v.size()) * w.size());
    for (int i = 0; i < v.size(); ++i)
        q.segment(i * w.size(), w.size()) = txru_signal * v.weights(i) * w.weights;
    return q;
}

/// Block-diagonal virtualization matrix: column s carries the weight vector
/// of port s on rows (s-1)M+1 .. sM. Per-port vectors may differ; the 1D
/// sub-array architecture uses a common one.
class VirtualizationMatrix
{
  public:
    VirtualizationMatrix(int m_per_port, std::vector<VectorXcd> per_port)
        : m_(m_per_port), w_(std::move(per_port))
    {
        if (m_ < 1 || w_.empty())
            throw std::invalid_argument("virtualization: need M >= 1 and at least one port");
        for (const auto& w : w_)
        {
            if (w.size() != m_)
                throw std::invalid_argument("virtualization: weight vector length must equal M");
            if (std::abs(w.norm() - 1.0) > 1e-6)
                throw std::invalid_argument("virtualization: weight vectors must be unit norm");
        }
    }

    int ports() const { return static_cast<int>(w_.size()); }
    int elements_per_port() const { return m_; }
    int rows() const { return m_ * ports(); }

    const VectorXcd& port_weights(int s) const { return w_.at(s); }

    /// Dense NM x N representation.
    MatrixXcd dense() const
    {
        MatrixXcd w = MatrixXcd::Zero(rows(), ports());
        for (int s = 0; s < ports(); ++s)
            w.block(s * m_, s, m_, 1) = w_[s];
        return w;
    }

    /// q = W x for TXRU signals x (one per port).
    VectorXcd apply(const VectorXcd& txru_signals) const
    {
        if (txru_signals.size() != ports())
            throw std::invalid_argument("virtualization: TXRU signal count must equal port count");
        VectorXcd q(rows());
        for (int s = 0; s < ports(); ++s)
            q.segment(s * m_, m_) = txru_signals(s) * w_[s];
        return q;
    }

  private:
    int m_;
    std::vector<VectorXcd> w_;
};

inline VirtualizationMatrix build_virtualization(const ArrayGeometry& geometry,
                                                 std::vector<VectorXcd> per_port_weights)
{
    if (static_cast<int>(per_port_weights.size()) != geometry.n_ports)
        throw std::invalid_argument("virtualization: need exactly N per-port weight vectors");
    return VirtualizationMatrix(geometry.m_per_port, std::move(per_port_weights));
}

/// Common-tilt convenience used by every downtilting strategy.
inline VirtualizationMatrix build_virtualization(const ArrayGeometry& geometry, const TiltWeights& common)
{
    std::vector<VectorXcd> w(static_cast<size_t>(geometry.n_ports), common.weights);
    return VirtualizationMatrix(geometry.m_per_port, std::move(w));
}

} // namespace fdmimo

#endif
