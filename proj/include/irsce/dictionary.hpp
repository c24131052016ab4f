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
#include <vector>

#include <Eigen/Dense>

#include "irsce/array.hpp"
#include "irsce/common.hpp"

namespace irsce {

/// Oversampled angular transform for one UPA: the first nx (ny) rows of a
/// gx-point (gy-point) unitary DFT, Kronecker-combined and scaled by
/// sqrt(n/G). Columns are ordered by ascending signed grid frequency on each
/// axis; column c = ax*gy + ay carries frequencies (ax - gx/2, ay - gy/2).
///
/// The grid list reports one angle pair per column using the independent
/// per-axis arcsine map. A physical path matches column c when its spatial
/// frequencies (sin(theta), cos(theta)*sin(phi)) equal (2*fx/gx, 2*fy/gy);
/// the vertical grid coordinate is that frequency, not a bare angle.
struct Dictionary {
    Eigen::MatrixXcd matrix; // n x G
    std::vector<AnglePair> grid;
    ArrayDims dims;
    int gx, gy;

    int cols() const { return gx * gy; }
};

/// Signed grid frequency of axis position a on a g-point grid.
inline int grid_freq(int a, int g) { return a - g / 2; }

inline Dictionary redundant_dictionary(const ArrayDims& dims, int gx, int gy) {
    if (gx < dims.nx || gy < dims.ny)
        throw ConfigError("dictionary grid must be at least as fine as the array");
    const int n = dims.count();
    const int G = gx * gy;
    Dictionary dict{Eigen::MatrixXcd(n, G), {}, dims, gx, gy};
    dict.grid.reserve(G);
    // sqrt(n/G) prefactor times the two unitary DFT factors' 1/sqrt(gx*gy)
    const double scale = std::sqrt(double(n) / double(G)) / std::sqrt(double(gx) * double(gy));
    for (int ax = 0; ax < gx; ++ax) {
        const int fx = grid_freq(ax, gx);
        for (int ay = 0; ay < gy; ++ay) {
            const int fy = grid_freq(ay, gy);
            const int c = ax * gy + ay;
            for (int mx = 0; mx < dims.nx; ++mx)
                for (int my = 0; my < dims.ny; ++my)
                    dict.matrix(dims.flat(mx, my), c) = std::polar(
                        scale,
                        2.0 * kPi * (double(mx) * fx / double(gx) + double(my) * fy / double(gy)));
            dict.grid.emplace_back(std::asin(2.0 * fx / double(gx)),
                                   std::asin(2.0 * fy / double(gy)));
        }
    }
    return dict;
}

/// Block-diagonal change of basis for the stacked effective channel: with
/// h^T = h_a^T A^H per link, the stacked spatial vector is
/// [h_d; h_r] = blockdiag(conj(A_d), conj(A_r)) * [h_da; h_ra].
struct EffectiveDictionary {
    Eigen::MatrixXcd psi; // (M+N) x (G_M+G_N)
    int spatial_split;    // M, rows of the top block
    int angular_split;    // G_M, columns of the left block
};

inline EffectiveDictionary effective_dictionary(const Dictionary& A_d, const Dictionary& A_r) {
    const int M = int(A_d.matrix.rows());
    const int N = int(A_r.matrix.rows());
    const int GM = int(A_d.matrix.cols());
    const int GN = int(A_r.matrix.cols());
    EffectiveDictionary eff{Eigen::MatrixXcd::Zero(M + N, GM + GN), M, GM};
    eff.psi.topLeftCorner(M, GM) = A_d.matrix.conjugate();
    eff.psi.bottomRightCorner(N, GN) = A_r.matrix.conjugate();
    return eff;
}

/// Angular coefficients back to a spatial channel row: h^T = coeffs^T A^H.
inline Eigen::RowVectorXcd reconstruct_spatial(const Eigen::VectorXcd& coeffs,
                                               const Dictionary& A) {
    if (coeffs.size() != A.matrix.cols())
        throw DimensionError("coefficient length does not match dictionary columns");
    return coeffs.transpose() * A.matrix.adjoint();
}

} // namespace irsce
