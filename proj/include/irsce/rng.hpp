// SPDX-License-Identifier: Apache-2.0
//
// irsce - compressive channel estimation for IRS-aided mmWave massive MIMO-OFDM
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

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "irsce/common.hpp"

namespace irsce {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Derives a child seed from a master seed and a list of stream tags.
/// Distinct tag tuples give statistically independent streams, so concurrent
/// trials can each own a generator without coordination.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t t : tags) s = splitmix64(s ^ splitmix64(t));
    return s;
}

/// Seeded random stream. All draw paths map raw 64-bit words to doubles
/// explicitly, so sequences are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform phase on [0, 2*pi).
    double phase() { return 2.0 * kPi * uniform(); }

    /// Unit-modulus phasor e^{j*phi}, phi ~ U[0, 2*pi).
    cxd phasor() { return std::polar(1.0, phase()); }

    /// Standard normal via Box-Muller (no cached spare, keeps streams simple).
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        // 1-u1 in (0,1] avoids log(0)
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Circular complex Gaussian CN(0, var).
    cxd cgaussian(double var = 1.0) {
        double s = std::sqrt(var / 2.0);
        return {s * gaussian(), s * gaussian()};
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace irsce
