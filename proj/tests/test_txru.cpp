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
#include "fdmimo/rng.hpp"
#include "fdmimo/txru.hpp"

using namespace fdmimo;

TEST_CASE("1D downtilt weights")
{
    const TiltWeights w90 = weights_1d(2, 0.5, 90.0);
    CHECK(std::abs(w90.weights(0) - cxd(1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(w90.weights(1) - cxd(1.0 / std::sqrt(2.0))) < 1e-15);

    // cos 120 = -1/2 so the second entry advances by pi/2
    const TiltWeights w120 = weights_1d(2, 0.5, 120.0);
    CHECK(std::abs(w120.weights(0) - cxd(1.0 / std::sqrt(2.0))) < 1e-12);
    CHECK(std::abs(w120.weights(1) - std::polar(1.0 / std::sqrt(2.0), pi / 2.0)) < 1e-12);

    Rng rng(5);
    for (int i = 0; i < 50; ++i)
    {
        const int k = 1 + static_cast<int>(rng.uniform(0.0, 15.9));
        const TiltWeights w = weights_1d(k, rng.uniform(0.1, 1.5), rng.uniform(1.0, 179.0));
        CHECK(w.weights.norm() == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("2D weights: vertical tilt plus horizontal scan")
{
    const auto [v, h] = weights_2d(4, 3, 0.8, 0.5, 100.0, 0.0);
    CHECK(v.size() == 4);
    CHECK(h.size() == 3);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(h.weights(i) - cxd(1.0 / std::sqrt(3.0))) < 1e-12);

    const auto [v1, h1] = weights_2d(1, 1, 0.8, 0.5, 100.0, 30.0);
    CHECK(std::abs(v1.weights(0) - cxd(1.0)) < 1e-15);
    CHECK(std::abs(h1.weights(0) - cxd(1.0)) < 1e-15);

    // Kronecker product of unit-norm vectors is unit norm
    const auto [v2, h2] = weights_2d(4, 3, 0.8, 0.5, 95.0, 20.0);
    const VectorXcd kron = map_subarray_2d(1.0, h2, v2);
    CHECK(kron.norm() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sub-array signal mapping")
{
    VectorXcd x1(1);
    x1 << 1.0;
    const TiltWeights w = weights_1d(2, 0.5, 90.0);
    const VectorXcd q1 = map_subarray_1d(x1, w);
    CHECK(q1.size() == 2);
    CHECK(std::abs(q1(0) - cxd(1.0 / std::sqrt(2.0))) < 1e-15);

    VectorXcd x2(2);
    x2 << 1.0, 0.0;
    VectorXcd ab(2);
    ab << cxd(0.6, 0.3), cxd(0.0, std::sqrt(1.0 - 0.45));
    const TiltWeights wab{ab};
    const VectorXcd q2 = map_subarray_1d(x2, wab);
    REQUIRE(q2.size() == 4);
    CHECK(std::abs(q2(0) - ab(0)) < 1e-15);
    CHECK(std::abs(q2(1) - ab(1)) < 1e-15);
    CHECK(std::abs(q2(2)) < 1e-15);
    CHECK(std::abs(q2(3)) < 1e-15);

    // norm preservation for unit-norm weights
    Rng rng(9);
    VectorXcd x(3);
    for (int i = 0; i < 3; ++i)
        x(i) = rng.cnormal();
    const TiltWeights w3 = weights_1d(4, 0.8, 97.0);
    CHECK(map_subarray_1d(x, w3).norm() == Catch::Approx(x.norm()).epsilon(1e-12));

    // 2D: energy equals |x|^2 for unit-norm v, w
    const auto [vv, hh] = weights_2d(2, 2, 0.8, 0.5, 93.0, -10.0);
    const VectorXcd q3 = map_subarray_2d(cxd(2.0, 0.0), hh, vv);
    CHECK(q3.squaredNorm() == Catch::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("virtualization matrix structure")
{
    ArrayGeometry g{};
    g.m_per_port = 2;
    g.n_ports = 1;
    VectorXcd ab(2);
    ab << cxd(0.8, 0.0), cxd(0.0, 0.6);
    const VirtualizationMatrix w1 = build_virtualization(g, std::vector<VectorXcd>{ab});
    const MatrixXcd d1 = w1.dense();
    REQUIRE(d1.rows() == 2);
    REQUIRE(d1.cols() == 1);
    CHECK(std::abs(d1(0, 0) - ab(0)) < 1e-15);
    CHECK(std::abs(d1(1, 0) - ab(1)) < 1e-15);

    // 2 x 2 array: block-diagonal with each column supported on its port rows
    g.n_ports = 2;
    const TiltWeights w = weights_1d(2, 0.8, 100.0);
    const VirtualizationMatrix w2 = build_virtualization(g, w);
    const MatrixXcd d2 = w2.dense();
    REQUIRE(d2.rows() == 4);
    REQUIRE(d2.cols() == 2);
    CHECK(std::abs(d2(2, 0)) == 0.0);
    CHECK(std::abs(d2(3, 0)) == 0.0);
    CHECK(std::abs(d2(0, 1)) == 0.0);
    CHECK(std::abs(d2(1, 1)) == 0.0);
    CHECK(std::abs(d2(2, 1) - w.weights(0)) < 1e-15);

    // W^H W = I for unit-norm columns
    Rng rng(21);
    for (int rep = 0; rep < 20; ++rep)
    {
        ArrayGeometry gg{};
        gg.m_per_port = 3;
        gg.n_ports = 4;
        std::vector<VectorXcd> cols;
        for (int s = 0; s < 4; ++s)
        {
            VectorXcd v(3);
            for (int i = 0; i < 3; ++i)
                v(i) = rng.cnormal();
            cols.push_back(v / v.norm());
        }
        const MatrixXcd d = build_virtualization(gg, cols).dense();
        CHECK((d.adjoint() * d - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }

    CHECK_THROWS_AS(build_virtualization(g, std::vector<VectorXcd>{ab}), std::invalid_argument);
}

TEST_CASE("weights through the array factor peak at the tilt angle")
{
    for (double tilt : {84.0, 90.0, 102.5})
    {
        const TiltWeights w = weights_1d(8, 0.8, tilt);
        double best_th = 0.0, best = -1.0;
        for (double th = 60.0; th <= 120.0; th += 0.01)
        {
            const double v = std::abs(array_factor({w.weights.data(), 8}, 0.8, th));
            if (v > best)
            {
                best = v;
                best_th = th;
            }
        }
        CHECK(best_th == Catch::Approx(tilt).margin(0.011));
    }
}

TEST_CASE("map_subarray composed with the virtualization matrix")
{
    ArrayGeometry g{};
    g.m_per_port = 4;
    g.n_ports = 3;
    const TiltWeights w = weights_1d(4, 0.8, 95.0);
    const VirtualizationMatrix vm = build_virtualization(g, w);
    Rng rng(13);
    VectorXcd x(3);
    for (int i = 0; i < 3; ++i)
        x(i) = rng.cnormal();
    const VectorXcd q_kron = map_subarray_1d(x, w);
    const VectorXcd q_mat = vm.dense() * x;
    const VectorXcd q_apply = vm.apply(x);
    CHECK((q_kron - q_mat).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((q_apply - q_mat).cwiseAbs().maxCoeff() < 1e-14);
}
