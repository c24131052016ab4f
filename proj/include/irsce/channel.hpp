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

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "irsce/array.hpp"
#include "irsce/common.hpp"
#include "irsce/rng.hpp"

namespace irsce {

enum class LinkKind { bs_to_irs, bs_to_user, irs_to_user };

/// OFDM numerology needed for the delay-to-frequency conversion.
struct OfdmParams {
    int num_subcarriers;    // K
    int cp_len;             // N_CP, taps summed in the DFT window
    double sample_period_s; // Ts = 1 / bandwidth
    double rolloff;
};

/// One propagation path. The channel coefficient of the path is gain /
/// large_scale; large_scale is a linear amplitude loss, so it divides.
struct PathComponent {
    cxd gain;
    double large_scale;
    double delay_s;
    AnglePair aod;
    std::optional<AnglePair> aoa; // absent on the single-antenna user side
};

/// Multipath description of one of the three links. rx dims are present only
/// for the matrix-valued BS-IRS link.
struct LinkChannel {
    LinkKind kind;
    ArrayDims tx;
    std::optional<ArrayDims> rx;
    std::optional<PathComponent> los_path;
    std::vector<PathComponent> nlos_paths;
};

/// Frequency-domain subchannels, split into LoS and NLoS parts so the total
/// is los[k] + nlos[k] exactly. Matrix link: rx.count() x tx.count() per
/// subcarrier; vector links: 1 x tx.count() rows.
struct FreqChannelSet {
    LinkKind kind;
    std::vector<Eigen::MatrixXcd> los;
    std::vector<Eigen::MatrixXcd> nlos;

    Eigen::MatrixXcd total(int k) const { return los[k] + nlos[k]; }
};

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

/// Raised-cosine impulse response, normalized so the peak value is 1. At the
/// two points where the closed form is 0/0 the analytic limit is returned.
inline double raised_cosine(double t, double Ts, double rolloff) {
    if (Ts <= 0.0) throw ConfigError("raised_cosine requires Ts > 0");
    const double x = t / Ts;
    if (rolloff == 0.0) return sinc(x);
    const double bx = 2.0 * rolloff * x;
    const double den = 1.0 - bx * bx;
    if (std::abs(den) < 1e-8) return (kPi / 4.0) * sinc(1.0 / (2.0 * rolloff));
    return sinc(x) * std::cos(kPi * rolloff * x) / den;
}

/// Frequency gain of one path at every subcarrier: the CP-windowed DFT of the
/// pulse taps, scaled by the path coefficient. k is zero-based here; the
/// phase uses k directly.
inline Eigen::VectorXcd freq_gains(const PathComponent& path, const OfdmParams& ofdm) {
    const int K = ofdm.num_subcarriers;
    const int D = ofdm.cp_len;
    Eigen::VectorXd taps(D);
    for (int d = 0; d < D; ++d)
        taps(d) = raised_cosine(d * ofdm.sample_period_s - path.delay_s, ofdm.sample_period_s,
                                ofdm.rolloff);
    const cxd coeff = path.gain / path.large_scale;
    Eigen::VectorXcd g(K);
    for (int k = 0; k < K; ++k) {
        cxd acc(0.0, 0.0);
        for (int d = 0; d < D; ++d)
            acc += taps(d) * std::polar(1.0, 2.0 * kPi * double(k) * double(d) / double(K));
        g(k) = coeff * acc;
    }
    return g;
}

inline cxd freq_gain(const PathComponent& path, int k, const OfdmParams& ofdm) {
    if (k < 0 || k >= ofdm.num_subcarriers) throw DimensionError("subcarrier index out of range");
    return freq_gains(path, ofdm)(k);
}

/// 3GPP TR 38.901 UMi street-canyon path loss in dB.
inline double pathloss_umi_los_db(double distance_m, double carrier_hz) {
    return 32.4 + 21.0 * std::log10(distance_m) + 20.0 * std::log10(carrier_hz / 1e9);
}

inline double pathloss_umi_nlos_db(double distance_m, double carrier_hz, double h_ut_m) {
    const double nlos = 22.4 + 35.3 * std::log10(distance_m) +
                        21.3 * std::log10(carrier_hz / 1e9) - 0.3 * (h_ut_m - 1.5);
    return std::max(pathloss_umi_los_db(distance_m, carrier_hz), nlos);
}

/// Everything sample_link needs about one link. aperture_gain folds the
/// endpoint array gain sqrt(n_tx * n_rx) into large_scale, restoring the
/// element-level energy transfer that unit-norm steering vectors strip out.
struct LinkSpec {
    LinkKind kind;
    ArrayDims tx;
    std::optional<ArrayDims> rx;
    bool has_los;
    int num_nlos;
    double rician_linear; // K_f, LoS power over total NLoS power
    double distance_m;
    double carrier_hz;
    double h_ut_m;
    double max_delay_s;      // (N_CP - 1) * Ts
    double angle_sector_rad; // angles drawn uniform on [-sector, sector)
    bool aperture_gain;
};

/// Draws one link realization. Draw order is fixed (NLoS paths first, each as
/// aod, aoa, delay, gain; then LoS angles and phase) so identical seeds give
/// identical links on every platform.
inline LinkChannel sample_link(const LinkSpec& spec, Rng& rng) {
    if (!spec.has_los && spec.num_nlos < 1)
        throw ConfigError("NLoS-only link requires at least one NLoS path");
    if (spec.num_nlos < 0) throw ConfigError("negative NLoS path count");

    const double aperture =
        spec.aperture_gain
            ? std::sqrt(double(spec.tx.count()) * double(spec.rx ? spec.rx->count() : 1))
            : 1.0;
    const double rho_nlos =
        db_to_amp(pathloss_umi_nlos_db(spec.distance_m, spec.carrier_hz, spec.h_ut_m)) / aperture;
    const double rho_los =
        db_to_amp(pathloss_umi_los_db(spec.distance_m, spec.carrier_hz)) / aperture;

    auto draw_angles = [&rng, &spec]() {
        const double th = rng.uniform(-spec.angle_sector_rad, spec.angle_sector_rad);
        const double ph = rng.uniform(-spec.angle_sector_rad, spec.angle_sector_rad);
        return AnglePair(th, ph);
    };

    LinkChannel link{spec.kind, spec.tx, spec.rx, std::nullopt, {}};
    link.nlos_paths.reserve(spec.num_nlos);
    double nlos_eff_power = 0.0;
    for (int l = 0; l < spec.num_nlos; ++l) {
        AnglePair aod = draw_angles();
        std::optional<AnglePair> aoa;
        if (spec.rx) aoa = draw_angles();
        const double delay = rng.uniform(0.0, spec.max_delay_s);
        const cxd gain = rng.cgaussian(1.0);
        link.nlos_paths.push_back({gain, rho_nlos, delay, aod, aoa});
        nlos_eff_power += std::norm(gain) / (rho_nlos * rho_nlos);
    }

    if (spec.has_los) {
        AnglePair aod = draw_angles();
        std::optional<AnglePair> aoa;
        if (spec.rx) aoa = draw_angles();
        const double delay = spec.distance_m / kSpeedOfLight;
        if (delay > spec.max_delay_s)
            throw ConfigError("LoS propagation delay exceeds the CP window");
        // |gain/rho|^2 = K_f * realized NLoS power; without scatterers the
        // ratio has no reference, so fall back to unit small-scale amplitude.
        const double amp = (nlos_eff_power > 0.0)
                               ? rho_los * std::sqrt(spec.rician_linear * nlos_eff_power)
                               : 1.0;
        link.los_path = PathComponent{std::polar(amp, rng.phase()), rho_los, delay, aod, aoa};
    }
    return link;
}

/// Converts a sampled link to per-subcarrier matrices, keeping the LoS/NLoS
/// split so recovery can treat only the LoS part as known.
inline FreqChannelSet assemble_freq_channels(const LinkChannel& link, const OfdmParams& ofdm) {
    const int K = ofdm.num_subcarriers;
    const bool matrix = link.rx.has_value();
    const int rows = matrix ? link.rx->count() : 1;
    const int cols = link.tx.count();

    FreqChannelSet out;
    out.kind = link.kind;
    out.los.assign(K, Eigen::MatrixXcd::Zero(rows, cols));
    out.nlos.assign(K, Eigen::MatrixXcd::Zero(rows, cols));

    auto accumulate = [&](const PathComponent& path, std::vector<Eigen::MatrixXcd>& dst) {
        if (matrix && !path.aoa) throw DimensionError("matrix link path lacks an AoA");
        const Eigen::VectorXcd g = freq_gains(path, ofdm);
        const Eigen::RowVectorXcd at = steering_vector(link.tx, path.aod).adjoint();
        if (matrix) {
            const Eigen::MatrixXcd outer = steering_vector(*link.rx, *path.aoa) * at;
            for (int k = 0; k < K; ++k) dst[k] += g(k) * outer;
        } else {
            for (int k = 0; k < K; ++k) dst[k] += g(k) * at;
        }
    };

    if (link.los_path) accumulate(*link.los_path, out.los);
    for (const auto& path : link.nlos_paths) accumulate(path, out.nlos);
    return out;
}

/// Rank-1 factors of the LoS part of the matrix link: los matrix at
/// subcarrier k is g(k) * a_rx * a_tx^H. Avoids materializing dense NxM
/// matrices on the hot path.
struct LosFactors {
    Eigen::VectorXcd g;    // K frequency gains
    Eigen::VectorXcd a_rx; // steering at the IRS
    Eigen::VectorXcd a_tx; // steering at the BS
};

inline LosFactors los_factors(const LinkChannel& link, const OfdmParams& ofdm) {
    if (!link.rx) throw DimensionError("los_factors requires the matrix link");
    if (!link.los_path) throw ConfigError("link has no LoS path");
    const PathComponent& p = *link.los_path;
    return {freq_gains(p, ofdm), steering_vector(*link.rx, *p.aoa), steering_vector(link.tx, p.aod)};
}

/// Replaces every departure angle of a vector link with its nearest grid
/// point, producing channels that are exactly sparse in a (gx, gy) dictionary.
inline LinkChannel snap_link_angles(const LinkChannel& link, int gx, int gy) {
    LinkChannel out = link;
    if (out.los_path) out.los_path->aod = snap_to_grid(out.los_path->aod, gx, gy);
    for (auto& path : out.nlos_paths) path.aod = snap_to_grid(path.aod, gx, gy);
    return out;
}

} // namespace irsce
