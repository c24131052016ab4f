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

#include <catch2/catch_amalgamated.hpp>

#include "irsce/dictionary.hpp"
#include "irsce/rng.hpp"

using namespace irsce;

TEST_CASE("square-grid dictionary is unitary") {
    for (int n : {2, 4}) {
        ArrayDims dims(n, n);
        auto dict = redundant_dictionary(dims, n, n);
        Eigen::MatrixXcd gram = dict.matrix.adjoint() * dict.matrix;
        Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n * n, n * n);
        CHECK((gram - eye).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("redundant dictionary has equal positive column norms") {
    ArrayDims dims(2, 2);
    auto dict = redundant_dictionary(dims, 4, 4);
    REQUIRE(dict.matrix.cols() == 16);
    const double expect = double(dims.count()) / 16.0;
    for (int c = 0; c < 16; ++c)
        CHECK(dict.matrix.col(c).norm() == Catch::Approx(expect).epsilon(1e-12));
}

// Oracle: evaluate every entry straight from the two-axis DFT definition.
TEST_CASE("dictionary entries match the per-entry DFT evaluation") {
    ArrayDims dims(3, 2);
    const int gx = 4, gy = 4;
    auto dict = redundant_dictionary(dims, gx, gy);
    const double scale = std::sqrt(6.0 / 16.0) / std::sqrt(16.0);
    for (int ax = 0; ax < gx; ++ax) {
        for (int ay = 0; ay < gy; ++ay) {
            const int fx = ax - gx / 2, fy = ay - gy / 2;
            for (int mx = 0; mx < dims.nx; ++mx) {
                for (int my = 0; my < dims.ny; ++my) {
                    cxd expect =
                        scale * std::exp(cxd(0.0, 2.0 * kPi * (double(mx * fx) / gx +
                                                               double(my * fy) / gy)));
                    cxd got = dict.matrix(dims.flat(mx, my), ax * gy + ay);
                    CHECK(std::abs(got - expect) < 1e-14);
                }
            }
        }
    }
}

TEST_CASE("coarse grid columns reappear in the doubled grid") {
    ArrayDims dims(2, 2);
    auto a1 = redundant_dictionary(dims, 2, 2);
    auto a2 = redundant_dictionary(dims, 4, 4);
    // frequency f on the coarse grid is frequency 2f on the doubled grid;
    // column scaling shrinks by the grid-size ratio
    const double ratio = 16.0 / 4.0;
    for (int ax = 0; ax < 2; ++ax) {
        for (int ay = 0; ay < 2; ++ay) {
            const int fx = ax - 1, fy = ay - 1;
            const int c1 = ax * 2 + ay;
            const int c2 = (2 * fx + 2) * 4 + (2 * fy + 2);
            Eigen::VectorXcd rescaled = a2.matrix.col(c2) * ratio;
            CHECK((rescaled - a1.matrix.col(c1)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("snapped angles map onto dictionary columns") {
    ArrayDims dims(4, 4);
    const int gx = 8, gy = 8;
    auto dict = redundant_dictionary(dims, gx, gy);
    const double scale = double(dims.count()) / double(gx * gy);
    Rng rng(derive_seed(21, {0}));
    for (int t = 0; t < 50; ++t) {
        AnglePair raw(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        AnglePair s = snap_to_grid(raw, gx, gy);
        const int fx = int(std::lround(spatial_freq_x(s) * gx / 2.0));
        const int fy = int(std::lround(spatial_freq_y(s) * gy / 2.0));
        const int c = (fx + gx / 2) * gy + (fy + gy / 2);
        Eigen::VectorXcd expect = scale * steering_vector(dims, s);
        CHECK((dict.matrix.col(c) - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("grid angles stay in the valid domain and sort by axis frequency") {
    auto dict = redundant_dictionary(ArrayDims(2, 2), 6, 4);
    REQUIRE(int(dict.grid.size()) == 24);
    for (int ax = 1; ax < 6; ++ax)
        CHECK(dict.grid[ax * 4].theta > dict.grid[(ax - 1) * 4].theta);
    for (int ay = 1; ay < 4; ++ay)
        CHECK(dict.grid[ay].phi > dict.grid[ay - 1].phi);
}

TEST_CASE("effective dictionary is exactly block diagonal") {
    auto a_d = redundant_dictionary(ArrayDims(2, 2), 4, 2);
    auto a_r = redundant_dictionary(ArrayDims(2, 1), 2, 2);
    auto eff = effective_dictionary(a_d, a_r);
    REQUIRE(eff.psi.rows() == 6);
    REQUIRE(eff.psi.cols() == 12);
    CHECK(eff.spatial_split == 4);
    CHECK(eff.angular_split == 8);
    CHECK(eff.psi.topRightCorner(4, 4).norm() == 0.0);
    CHECK(eff.psi.bottomLeftCorner(2, 8).norm() == 0.0);
    CHECK((eff.psi.topLeftCorner(4, 8) - a_d.matrix.conjugate()).norm() == 0.0);
    CHECK((eff.psi.bottomRightCorner(2, 4) - a_r.matrix.conjugate()).norm() == 0.0);
}

TEST_CASE("effective dictionary maps angular vectors consistently") {
    auto a_d = redundant_dictionary(ArrayDims(2, 2), 4, 4);
    auto a_r = redundant_dictionary(ArrayDims(2, 2), 4, 4);
    auto eff = effective_dictionary(a_d, a_r);
    Rng rng(3);
    Eigen::VectorXcd ha(32);
    for (int i = 0; i < 32; ++i) ha(i) = rng.cgaussian();
    Eigen::VectorXcd stacked = eff.psi * ha;
    Eigen::RowVectorXcd hd = reconstruct_spatial(ha.head(16), a_d);
    Eigen::RowVectorXcd hr = reconstruct_spatial(ha.tail(16), a_r);
    CHECK((stacked.head(4).transpose() - hd).norm() < 1e-12);
    CHECK((stacked.tail(4).transpose() - hr).norm() < 1e-12);
}

TEST_CASE("one-hot coefficients select a conjugated column") {
    auto dict = redundant_dictionary(ArrayDims(2, 2), 4, 4);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(16);
    e(5) = 1.0;
    Eigen::RowVectorXcd row = reconstruct_spatial(e, dict);
    CHECK((row.transpose() - dict.matrix.col(5).conjugate()).norm() < 1e-14);
}

TEST_CASE("unitary dictionary round-trips spatial rows") {
    auto dict = redundant_dictionary(ArrayDims(2, 2), 2, 2);
    Rng rng(17);
    Eigen::RowVectorXcd row(4);
    for (int i = 0; i < 4; ++i) row(i) = rng.cgaussian();
    Eigen::VectorXcd coeffs = dict.matrix.transpose() * row.transpose();
    CHECK((reconstruct_spatial(coeffs, dict) - row).norm() < 1e-10);
}

TEST_CASE("least-squares re-projection leaves residual orthogonal to the support") {
    auto dict = redundant_dictionary(ArrayDims(2, 2), 4, 4);
    Rng rng(29);
    Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(16);
    std::vector<int> supp{1, 7, 12};
    for (int s : supp) coeffs(s) = rng.cgaussian();
    Eigen::VectorXcd h = reconstruct_spatial(coeffs, dict).transpose();
    Eigen::MatrixXcd basis(4, 3);
    for (int j = 0; j < 3; ++j) basis.col(j) = dict.matrix.col(supp[j]).conjugate();
    Eigen::VectorXcd fit = basis.completeOrthogonalDecomposition().solve(h);
    Eigen::VectorXcd resid = h - basis * fit;
    CHECK((basis.adjoint() * resid).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(resid.norm() < 1e-10); // h lies in the span by construction
}

TEST_CASE("dictionary construction rejects undersized grids") {
    CHECK_THROWS_AS(redundant_dictionary(ArrayDims(4, 4), 2, 4), ConfigError);
    CHECK_THROWS_AS(redundant_dictionary(ArrayDims(4, 4), 4, 3), ConfigError);
    Eigen::VectorXcd bad(7);
    auto dict = redundant_dictionary(ArrayDims(2, 2), 2, 2);
    CHECK_THROWS_AS(reconstruct_spatial(bad, dict), DimensionError);
}
