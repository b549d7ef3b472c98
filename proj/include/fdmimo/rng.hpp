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

#ifndef FDMIMO_RNG_HPP
#define FDMIMO_RNG_HPP

#include <cstdint>
#include <cstring>
#include <string_view>

#include "fdmimo/common.hpp"

namespace fdmimo {

/// splitmix64 mixing step, used both as a tiny generator and as a seed mixer.
inline uint64_t splitmix64(uint64_t& state)
{
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Self-contained xoshiro256++ generator. The standard library engines and
/// distributions are avoided on purpose: draw sequences must be identical
/// across toolchains for the reproducibility contract.
class Rng
{
  public:
    explicit Rng(uint64_t seed = 0)
    {
        uint64_t sm = seed;
        for (auto& w : s_)
            w = splitmix64(sm);
        has_cached_normal_ = false;
    }

    uint64_t next_u64()
    {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (deterministic two-draws-per-pair).
    double normal()
    {
        if (has_cached_normal_)
        {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_normal_ = r * std::sin(2.0 * pi * u2);
        has_cached_normal_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    /// Circularly symmetric complex Gaussian, unit variance (0.5 per component).
    cxd cnormal()
    {
        const double inv_sqrt2 = 0.70710678118654752440;
        const double re = normal() * inv_sqrt2;
        const double im = normal() * inv_sqrt2;
        return {re, im};
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_;
};

/// FNV-1a hash of a purpose tag, feeding the stream derivation below.
inline uint64_t hash_tag(std::string_view tag)
{
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : tag)
    {
        h ^= static_cast<uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Derives an independent stream from (master seed, trial index, purpose tag).
/// Parallel and serial trial execution see identical draws by construction.
inline Rng derive_stream(uint64_t master_seed, uint64_t trial_index, std::string_view purpose)
{
    uint64_t sm = master_seed;
    uint64_t a = splitmix64(sm);
    sm ^= 0x6a09e667f3bcc909ull + trial_index * 0x9e3779b97f4a7c15ull;
    uint64_t b = splitmix64(sm);
    sm ^= hash_tag(purpose);
    uint64_t c = splitmix64(sm);
    return Rng(a ^ (b * 0x2545f4914f6cdd1dull) ^ c);
}

} // namespace fdmimo

#endif
