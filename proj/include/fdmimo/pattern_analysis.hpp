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
// Scan-based measurements on vertical pattern cuts: half-power width, peak,
// and sidelobe structure.

#ifndef FDMIMO_PATTERN_ANALYSIS_HPP
#define FDMIMO_PATTERN_ANALYSIS_HPP

#include <functional>

#include "fdmimo/common.hpp"

namespace fdmimo {

struct PatternCutStats
{
    double peak_theta_deg = 0.0;
    double peak_db = 0.0;
    double hpbw_deg = 0.0;
    bool has_sidelobe = false;
    double sidelobe_db = 0.0;       // level of the first sidelobe
    double sidelobe_theta_deg = 0.0;
};

/// Measures a vertical cut pattern_db(theta) on a uniform scan. The 3 dB
/// width is refined by bisection on each side of the peak; the first
/// sidelobe is the first strict local maximum beyond the first local
/// minimum when walking away from the peak (larger of the two sides).
inline PatternCutStats analyze_vertical_cut(const std::function<double(double)>& pattern_db,
                                            double lo_deg = 0.0, double hi_deg = 180.0,
                                            double step_deg = 0.01)
{
    PatternCutStats st;
    const int n = static_cast<int>(std::round((hi_deg - lo_deg) / step_deg)) + 1;
    std::vector<double> th(static_cast<size_t>(n)), g(static_cast<size_t>(n));
    int ipk = 0;
    for (int i = 0; i < n; ++i)
    {
        th[static_cast<size_t>(i)] = lo_deg + i * step_deg;
        g[static_cast<size_t>(i)] = pattern_db(th[static_cast<size_t>(i)]);
        if (g[static_cast<size_t>(i)] > g[static_cast<size_t>(ipk)])
            ipk = i;
    }
    st.peak_theta_deg = th[static_cast<size_t>(ipk)];
    st.peak_db = g[static_cast<size_t>(ipk)];

    // half-power crossings by bisection
    const double target = st.peak_db - 3.0103; // half power on the magnitude-squared pattern
    auto crossing = [&](double inner, double outer) {
        for (int it = 0; it < 60; ++it)
        {
            const double mid = 0.5 * (inner + outer);
            if (pattern_db(mid) >= target)
                inner = mid;
            else
                outer = mid;
        }
        return 0.5 * (inner + outer);
    };
    int iup = ipk;
    while (iup + 1 < n && g[static_cast<size_t>(iup)] >= target)
        ++iup;
    int idn = ipk;
    while (idn > 0 && g[static_cast<size_t>(idn)] >= target)
        --idn;
    const double up = iup < n - 1 || g[static_cast<size_t>(n - 1)] < target
                          ? crossing(th[static_cast<size_t>(iup - 1)], th[static_cast<size_t>(iup)])
                          : hi_deg;
    const double dn = idn > 0 || g[0] < target
                          ? crossing(th[static_cast<size_t>(idn + 1)], th[static_cast<size_t>(idn)])
                          : lo_deg;
    st.hpbw_deg = up - dn;

    // first sidelobe: walk away from the peak past the first dip
    auto first_lobe = [&](int dir) -> std::pair<bool, int> {
        int i = ipk;
        // leave the main lobe
        while (i + dir > 0 && i + dir < n - 1 && g[static_cast<size_t>(i + dir)] <= g[static_cast<size_t>(i)])
            i += dir;
        if (i == ipk || i + dir <= 0 || i + dir >= n - 1)
            return {false, 0};
        // climb the sidelobe; the ascent must be strict so a clamped flat
        // floor does not count
        int j = i;
        while (j + dir > 0 && j + dir < n - 1 && g[static_cast<size_t>(j + dir)] > g[static_cast<size_t>(j)])
            j += dir;
        if (j == i)
            return {false, 0};
        return {true, j};
    };
    const auto [ok_up, j_up] = first_lobe(+1);
    const auto [ok_dn, j_dn] = first_lobe(-1);
    if (ok_up || ok_dn)
    {
        st.has_sidelobe = true;
        int j = ok_up ? j_up : j_dn;
        if (ok_up && ok_dn && g[static_cast<size_t>(j_dn)] > g[static_cast<size_t>(j_up)])
            j = j_dn;
        st.sidelobe_db = g[static_cast<size_t>(j)];
        st.sidelobe_theta_deg = th[static_cast<size_t>(j)];
    }
    return st;
}

} // namespace fdmimo

#endif
