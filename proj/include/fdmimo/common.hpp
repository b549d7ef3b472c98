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

#ifndef FDMIMO_COMMON_HPP
#define FDMIMO_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdmimo {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

/// Wraps an azimuth angle to (-180, 180].
inline double wrap_deg(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0)
        w += 360.0;
    else if (w > 180.0)
        w -= 360.0;
    return w;
}

/// Wraps an angle in radians to (-pi, pi].
inline double wrap_rad(double rad)
{
    double w = std::fmod(rad, 2.0 * pi);
    if (w <= -pi)
        w += 2.0 * pi;
    else if (w > pi)
        w -= 2.0 * pi;
    return w;
}

// dB <-> linear. Power quantities use 10^(x/10), field quantities 10^(x/20).
inline double db_to_pow(double db) { return std::pow(10.0, db / 10.0); }
inline double pow_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double db_to_mag(double db) { return std::pow(10.0, db / 20.0); }
inline double mag_to_db(double lin) { return 20.0 * std::log10(lin); }

/// Order-independent sum with pairwise recursion for numerical stability.
inline double pairwise_sum(std::span<const double> x)
{
    if (x.size() <= 8)
    {
        double s = 0.0;
        for (double v : x)
            s += v;
        return s;
    }
    size_t h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

inline cxd pairwise_sum(std::span<const cxd> x)
{
    if (x.size() <= 8)
    {
        cxd s = 0.0;
        for (cxd v : x)
            s += v;
        return s;
    }
    size_t h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

} // namespace fdmimo

#endif
