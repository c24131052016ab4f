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

#include <Eigen/Dense>

#include "irsce/common.hpp"

namespace irsce {

/// One propagation angle: horizontal component theta, vertical component phi.
/// Both are restricted to [-pi/2, pi/2) so the map angle -> steering vector is
/// injective on the forward half-space.
struct AnglePair {
    double theta;
    double phi;

    AnglePair(double theta_, double phi_) : theta(theta_), phi(phi_) {
        if (theta < -kPi / 2 || theta >= kPi / 2 || phi < -kPi / 2 || phi >= kPi / 2)
            throw ConfigError("AnglePair components must lie in [-pi/2, pi/2)");
    }
};

/// Element counts of a half-wavelength-spaced uniform planar array.
struct ArrayDims {
    int nx;
    int ny;

    ArrayDims(int nx_, int ny_) : nx(nx_), ny(ny_) {
        if (nx < 1 || ny < 1) throw ConfigError("ArrayDims must be positive");
    }

    int count() const { return nx * ny; }

    /// Flat element index. Horizontal-major: the horizontal ramp is the left
    /// Kronecker factor, so element (mx, my) sits at mx*ny + my. Every
    /// dictionary and channel matrix in the library uses this ordering.
    int flat(int mx, int my) const { return mx * ny + my; }
};

using SteeringVector = Eigen::VectorXcd;

/// Spatial frequencies (in units of pi per element) of a UPA path:
/// horizontal sin(theta), vertical cos(theta)*sin(phi).
inline double spatial_freq_x(const AnglePair& a) { return std::sin(a.theta); }
inline double spatial_freq_y(const AnglePair& a) { return std::cos(a.theta) * std::sin(a.phi); }

/// Unit-norm UPA steering vector: the Kronecker product of a horizontal phase
/// ramp with frequency pi*sin(theta) and a vertical ramp with frequency
/// pi*cos(theta)*sin(phi), scaled by 1/sqrt(n).
inline SteeringVector steering_vector(const ArrayDims& dims, const AnglePair& angles) {
    const int n = dims.count();
    const double wx = kPi * spatial_freq_x(angles);
    const double wy = kPi * spatial_freq_y(angles);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    SteeringVector v(n);
    for (int mx = 0; mx < dims.nx; ++mx)
        for (int my = 0; my < dims.ny; ++my)
            v(dims.flat(mx, my)) = std::polar(scale, wx * mx + wy * my);
    return v;
}

/// Nearest exactly-representable angle pair on a (gx, gy)-point angular grid.
/// Grid frequencies are 2*g/G with g in [-G/2, G/2); the vertical component is
/// compensated by cos(theta) so the snapped pair maps onto a dictionary column
/// with zero quantization error.
inline AnglePair snap_to_grid(const AnglePair& a, int gx, int gy) {
    auto snap_axis = [](double freq, int g) {
        long idx = std::lround(freq * g / 2.0);
        long lo = -g / 2;
        long hi = (g - 1) / 2; // inclusive; [-G/2, G/2) for even G, symmetric for odd
        if (idx < lo) idx = lo;
        if (idx > hi) idx = hi;
        return idx;
    };
    long ix = snap_axis(spatial_freq_x(a), gx);
    double u = 2.0 * static_cast<double>(ix) / gx;
    double theta = std::asin(u);
    double ct = std::cos(theta);

    long iy = snap_axis(spatial_freq_y(a), gy);
    // back off toward broadside until the vertical frequency is reachable
    while (std::abs(2.0 * static_cast<double>(iy) / gy) > ct && iy != 0) iy += (iy > 0) ? -1 : 1;
    double v = 2.0 * static_cast<double>(iy) / gy;
    double phi = (ct > 0.0) ? std::asin(v / ct) : 0.0;
    return {theta, phi};
}

} // namespace irsce
