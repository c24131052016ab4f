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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace irsce {

using cxd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad dimensions, missing keys, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Operand shapes do not match.
struct DimensionError : Error {
    using Error::Error;
};

/// A linear system was too ill-conditioned to solve reliably.
struct SingularMatrixError : Error {
    SingularMatrixError(const std::string& what, double cond)
        : Error(what), condition_number(cond) {}
    double condition_number;
};

/// A metric is undefined for the given inputs (e.g. NMSE of a zero truth).
struct MetricError : Error {
    using Error::Error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// FNV-1a 64-bit, used for stable config hashes embedded in reports.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace irsce
