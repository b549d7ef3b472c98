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

#include <catch2/catch_amalgamated.hpp>

#include "fdmimo/array.hpp"
#include "fdmimo/pattern_analysis.hpp"
#include "fdmimo/rng.hpp"
#include "fdmimo/txru.hpp"

using namespace fdmimo;

TEST_CASE("element pattern hits the tabulated anchor points")
{
    const ElementPatternParams p{};
    CHECK(element_pattern_db(p, 0.0, 90.0) == Catch::Approx(8.0));
    // 3 dB point: 12 (32.5/65)^2 = 3
    CHECK(element_pattern_db(p, 32.5, 90.0) == Catch::Approx(5.0));
    // rear direction: horizontal cut clamps at 30, combined min clamps at A_m
    CHECK(element_pattern_db(p, 180.0, 90.0) == Catch::Approx(-22.0));
}

TEST_CASE("element pattern is bounded and symmetric")
{
    const ElementPatternParams p{};
    Rng rng(7);
    for (int i = 0; i < 2000; ++i)
    {
        const double phi = rng.uniform(-360.0, 360.0);
        const double th = rng.uniform(0.0, 180.0);
        const double v = element_pattern_db(p, phi, th);
        CHECK(v <= p.gain_max_dbi + 1e-12);
        CHECK(element_pattern_db(p, -phi, th) == Catch::Approx(v).margin(1e-12));
        CHECK(element_pattern_db(p, phi, 180.0 - th) == Catch::Approx(v).margin(1e-12));
    }
    CHECK(element_pattern_db(p, 0.0, 90.0) == Catch::Approx(p.gain_max_dbi));
}

TEST_CASE("ITU port pattern anchors")
{
    const ItuPortPatternParams p{};
    const double tilt = 102.0;
    CHECK(itu_port_pattern_db(p, 0.0, tilt, tilt) == Catch::Approx(17.0));
    CHECK(itu_port_pattern_db(p, 0.0, tilt + 7.5, tilt) == Catch::Approx(14.0));
    // far off the main lobe the vertical term clamps at A_m = 20
    CHECK(itu_port_pattern_db(p, 0.0, tilt + 90.0, tilt) == Catch::Approx(-3.0));
    for (double th = 1.0; th < 180.0; th += 3.7)
        CHECK(itu_port_pattern_db(p, 13.0, th, tilt) <= p.gain_max_dbi + 1e-12);
}

TEST_CASE("array factor: coherent combining and degenerate cases")
{
    const TiltWeights w = weights_1d(8, 0.8, 104.0);
    const cxd af = array_factor({w.weights.data(), 8}, 0.8, 104.0);
    CHECK(af.real() == Catch::Approx(std::sqrt(8.0)));
    CHECK(af.imag() == Catch::Approx(0.0).margin(1e-12));

    const std::vector<cxd> one{1.0};
    CHECK(std::abs(array_factor(one, 0.8, 31.0) - cxd(1.0)) < 1e-15);

    CHECK_THROWS_AS(array_factor({}, 0.8, 90.0), std::invalid_argument);

    // |A_F| <= ||w||_1 with equality only at coherent combining
    Rng rng(3);
    double l1 = 0.0;
    for (int i = 0; i < 8; ++i)
        l1 += std::abs(w.weights(i));
    for (int i = 0; i < 200; ++i)
    {
        const double th = rng.uniform(0.0, 180.0);
        CHECK(std::abs(array_factor({w.weights.data(), 8}, 0.8, th)) <= l1 + 1e-12);
    }
}

TEST_CASE("array factor magnitude drops 3 dB at the half-power formula width")
{
    const TiltWeights w = weights_1d(8, 0.8, 90.0);
    const double hpbw = port_hpbw_deg(8, 0.8);
    const auto af_pow_db = [&](double th) {
        return 20.0 * std::log10(std::abs(array_factor({w.weights.data(), 8}, 0.8, th)));
    };
    const double peak = af_pow_db(90.0);
    CHECK(af_pow_db(90.0 + hpbw / 2.0) == Catch::Approx(peak - 3.0).margin(0.12));
    CHECK(af_pow_db(90.0 - hpbw / 2.0) == Catch::Approx(peak - 3.0).margin(0.12));
}

TEST_CASE("port pattern via the element approach")
{
    ArrayGeometry g{};
    const TiltWeights w = weights_1d(8, 0.8, 90.0);
    const double peak = port_pattern_element_db(g, {w.weights.data(), 8}, 0.0, 90.0);
    CHECK(peak == Catch::Approx(8.0 + 20.0 * std::log10(std::sqrt(8.0))).epsilon(1e-12));
    CHECK(peak == Catch::Approx(17.03).margin(0.01));

    // degenerate port equals the element pattern pointwise
    ArrayGeometry g1 = g;
    g1.m_per_port = 1;
    const std::vector<cxd> one{1.0};
    for (double th = 0.0; th <= 180.0; th += 11.0)
        CHECK(port_pattern_element_db(g1, one, 0.0, th) ==
              Catch::Approx(element_pattern_db(g.element, 0.0, th)).margin(1e-12));

    CHECK_THROWS_AS(port_pattern_element_db(g, one, 0.0, 90.0), std::invalid_argument);

    // measured main-lobe 3 dB width
    const PatternCutStats st = analyze_vertical_cut(
        [&](double th) { return port_pattern_element_db(g, {w.weights.data(), 8}, 0.0, th); });
    CHECK(st.hpbw_deg == Catch::Approx(7.9341).margin(0.1));
}

TEST_CASE("half-power beamwidth formula")
{
    CHECK(port_hpbw_deg(8, 0.8) == Catch::Approx(7.9341).margin(1e-3));
    CHECK(port_hpbw_deg(1, 0.5) == Catch::Approx(124.6).margin(0.1));
    CHECK_THROWS_AS(port_hpbw_deg(1, 0.4), std::domain_error);
    double prev = 1e9;
    for (int k = 1; k <= 64; k *= 2)
    {
        const double v = port_hpbw_deg(k, 0.8);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("measured width tracks the formula for K d_v >= 2")
{
    for (const auto& [k, dv] : std::vector<std::pair<int, double>>{{4, 0.5}, {8, 0.8}, {16, 0.5}})
    {
        ArrayGeometry g{};
        g.m_per_port = k;
        g.d_v = dv;
        const TiltWeights w = weights_1d(k, dv, 90.0);
        const PatternCutStats st = analyze_vertical_cut([&](double th) {
            return port_pattern_element_db(g, {w.weights.data(), static_cast<size_t>(k)}, 0.0, th);
        });
        CHECK(st.hpbw_deg == Catch::Approx(port_hpbw_deg(k, dv)).margin(0.2));
    }
}

TEST_CASE("port peak gain")
{
    CHECK(port_peak_gain_dbi(8.0, 8) == Catch::Approx(17.03).margin(0.01));
    CHECK(port_peak_gain_dbi(8.0, 1) == Catch::Approx(8.0));
    CHECK(port_peak_gain_dbi(0.0, 100) == Catch::Approx(20.0));
}

TEST_CASE("field decomposition")
{
    const auto [v90, h90] = field_decompose(1.0, 90.0);
    CHECK(v90 == Catch::Approx(0.0).margin(1e-15));
    CHECK(h90 == Catch::Approx(1.0));
    const auto [v45, h45] = field_decompose(1.0, 45.0);
    CHECK(v45 == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(h45 == Catch::Approx(1.0 / std::sqrt(2.0)));
    Rng rng(11);
    for (int i = 0; i < 100; ++i)
    {
        const double a = rng.uniform(0.0, 10.0), b = rng.uniform(-180.0, 180.0);
        const auto [fv, fh] = field_decompose(a, b);
        CHECK(fv * fv + fh * fh == Catch::Approx(a).margin(1e-12));
    }
    CHECK_THROWS_AS(field_decompose(-0.1, 45.0), std::invalid_argument);
}

TEST_CASE("element approach keeps sidelobes the ITU pattern clamps away")
{
    // under the baseline geometry there are directions outside the main lobe
    // where the exact pattern exceeds the matched ITU approximation by > 5 dB
    ArrayGeometry g{};
    const TiltWeights w = weights_1d(8, 0.8, 90.0);
    ItuPortPatternParams matched{};
    matched.theta_3db_deg = port_hpbw_deg(8, 0.8);
    matched.gain_max_dbi = port_peak_gain_dbi(8.0, 8);
    double max_gap = -1e9;
    for (double th = 0.0; th <= 180.0; th += 0.02)
    {
        if (std::abs(th - 90.0) < matched.theta_3db_deg)
            continue;
        const double elem = port_pattern_element_db(g, {w.weights.data(), 8}, 0.0, th);
        const double itu = itu_port_pattern_db(matched, 0.0, th, 90.0);
        max_gap = std::max(max_gap, elem - itu);
    }
    CHECK(max_gap > 5.0);
}
