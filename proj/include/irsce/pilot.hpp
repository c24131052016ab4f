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
#include "irsce/channel.hpp"
#include "irsce/common.hpp"
#include "irsce/rng.hpp"

namespace irsce {

enum class PilotVariant { designed, fully_random };

/// One sounding slot: BS RF/baseband precoders, the IRS phase vector, and the
/// cached transmit vector s = F_RF * f_BB.
struct PilotSlot {
    Eigen::MatrixXcd F_RF;  // M x N_RF, constant-modulus entries 1/sqrt(M)
    Eigen::VectorXcd f_BB;  // N_RF, flat allocation sqrt(P/N_RF)
    Eigen::VectorXcd theta; // N, unit-modulus
    Eigen::VectorXcd s;     // M
};

struct PilotBook {
    std::vector<PilotSlot> slots;

    int num_slots() const { return int(slots.size()); }
};

struct PilotSpec {
    ArrayDims m_dims;
    int irs_count; // N
    int num_slots; // N_P
    int n_rf;
    int n_rf_irs;  // chains beamformed at the BS-IRS LoS AoD
    int n_rf_user;
    double p_tx_watt;
    PilotVariant variant;
};

/// Builds the sounding sequence. Designed variant: the IRS-dedicated RF
/// columns of every slot equal the steering vector at the known BS-IRS LoS
/// AoD (full coherent gain toward the surface); user columns and all IRS
/// phases are i.i.d. random. Fully-random variant: every RF column is
/// random-phase, same power. Draw order per slot is random F_RF columns
/// entry by entry, then theta entries.
inline PilotBook build_pilot_book(const PilotSpec& spec, const AnglePair& los_aod, Rng& rng) {
    if (spec.n_rf_irs + spec.n_rf_user != spec.n_rf)
        throw ConfigError("n_rf_irs + n_rf_user must equal n_rf");
    if (spec.num_slots < 1) throw ConfigError("pilot book needs at least one slot");
    const int m = spec.m_dims.count();
    const double entry_mod = 1.0 / std::sqrt(double(m));
    const Eigen::VectorXcd beam = steering_vector(spec.m_dims, los_aod);
    const Eigen::VectorXcd f_bb =
        Eigen::VectorXcd::Constant(spec.n_rf, std::sqrt(spec.p_tx_watt / double(spec.n_rf)));
    const int beamed = (spec.variant == PilotVariant::designed) ? spec.n_rf_irs : 0;

    PilotBook book;
    book.slots.reserve(spec.num_slots);
    for (int i = 0; i < spec.num_slots; ++i) {
        PilotSlot slot;
        slot.F_RF.resize(m, spec.n_rf);
        for (int c = 0; c < spec.n_rf; ++c) {
            if (c < beamed) {
                slot.F_RF.col(c) = beam;
            } else {
                for (int row = 0; row < m; ++row)
                    slot.F_RF(row, c) = std::polar(entry_mod, rng.phase());
            }
        }
        slot.theta.resize(spec.irs_count);
        for (int nidx = 0; nidx < spec.irs_count; ++nidx) slot.theta(nidx) = rng.phasor();
        slot.f_BB = f_bb;
        slot.s = slot.F_RF * f_bb;
        book.slots.push_back(std::move(slot));
    }
    return book;
}

/// Known sensing matrices, one per subcarrier: row i is
/// [s_i^T, (diag(theta_i) * G_L[k] * s_i)^T], size N_P x (M+N).
inline std::vector<Eigen::MatrixXcd> assemble_sensing(const PilotBook& pb,
                                                      const std::vector<Eigen::MatrixXcd>& G_L) {
    if (G_L.empty()) throw DimensionError("assemble_sensing needs at least one subcarrier");
    const int K = int(G_L.size());
    const int N = int(G_L[0].rows());
    const int M = int(G_L[0].cols());
    const int num_slots = pb.num_slots();
    for (const auto& slot : pb.slots) {
        if (slot.s.size() != M || slot.theta.size() != N)
            throw DimensionError("pilot book dimensions do not match the LoS matrices");
    }
    std::vector<Eigen::MatrixXcd> phi(K, Eigen::MatrixXcd(num_slots, M + N));
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < num_slots; ++i) {
            const auto& slot = pb.slots[i];
            phi[k].row(i).head(M) = slot.s.transpose();
            phi[k].row(i).tail(N) =
                (slot.theta.asDiagonal() * (G_L[k] * slot.s)).transpose();
        }
    }
    return phi;
}

/// k-independent factors of the sensing operator, exploiting the rank-1 LoS
/// matrix: Phi_k = [S, g(k) * T]. S rows are s_i^T; T rows are
/// (a_tx^H s_i) * (theta_i .* a_rx)^T.
struct SensingFactors {
    Eigen::MatrixXcd S; // N_P x M
    Eigen::MatrixXcd T; // N_P x N
    Eigen::VectorXcd g; // K
};

inline SensingFactors sensing_factors(const PilotBook& pb, const LosFactors& los) {
    const int num_slots = pb.num_slots();
    const int M = int(los.a_tx.size());
    const int N = int(los.a_rx.size());
    SensingFactors f{Eigen::MatrixXcd(num_slots, M), Eigen::MatrixXcd(num_slots, N), los.g};
    for (int i = 0; i < num_slots; ++i) {
        const auto& slot = pb.slots[i];
        if (slot.s.size() != M || slot.theta.size() != N)
            throw DimensionError("pilot book dimensions do not match the LoS factors");
        const cxd c = los.a_tx.dot(slot.s); // a_tx^H s_i
        f.S.row(i) = slot.s.transpose();
        f.T.row(i) = c * slot.theta.cwiseProduct(los.a_rx).transpose();
    }
    return f;
}

/// Dense expansion of the factored operator, for tests and small problems.
inline std::vector<Eigen::MatrixXcd> expand_sensing(const SensingFactors& f) {
    const int K = int(f.g.size());
    std::vector<Eigen::MatrixXcd> phi(K);
    for (int k = 0; k < K; ++k) {
        phi[k].resize(f.S.rows(), f.S.cols() + f.T.cols());
        phi[k].leftCols(f.S.cols()) = f.S;
        phi[k].rightCols(f.T.cols()) = f.g(k) * f.T;
    }
    return phi;
}

/// Physically received observations: direct path plus the full reflected path
/// (LoS and NLoS parts of the BS-IRS link) plus thermal noise. The rng is
/// consumed only for noise, and only when sigma_n2 > 0; draw order is k-major,
/// slot-minor.
inline std::vector<Eigen::VectorXcd> simulate_rx(const PilotBook& pb, const FreqChannelSet& bs_irs,
                                                 const FreqChannelSet& bs_user,
                                                 const FreqChannelSet& irs_user, double sigma_n2,
                                                 Rng& rng) {
    const int K = int(bs_irs.los.size());
    const int num_slots = pb.num_slots();
    std::vector<Eigen::VectorXcd> y(K, Eigen::VectorXcd(num_slots));
    for (int k = 0; k < K; ++k) {
        const Eigen::MatrixXcd g_total = bs_irs.total(k);
        const Eigen::RowVectorXcd hd = bs_user.total(k);
        const Eigen::RowVectorXcd hr = irs_user.total(k);
        for (int i = 0; i < num_slots; ++i) {
            const auto& slot = pb.slots[i];
            const cxd direct = (hd * slot.s)(0);
            const cxd reflected = (hr * (slot.theta.asDiagonal() * (g_total * slot.s)))(0);
            y[k](i) = direct + reflected;
        }
        if (sigma_n2 > 0.0)
            for (int i = 0; i < num_slots; ++i) y[k](i) += rng.cgaussian(sigma_n2);
    }
    return y;
}

/// Same observations computed from path factors instead of dense matrices.
/// Inner products per path pair are hoisted out of the subcarrier loop, so
/// the cost scales with path counts, not with M*N.
inline std::vector<Eigen::VectorXcd> simulate_rx_fast(const PilotBook& pb,
                                                      const LinkChannel& bs_irs,
                                                      const LinkChannel& bs_user,
                                                      const LinkChannel& irs_user,
                                                      const OfdmParams& ofdm, double sigma_n2,
                                                      Rng& rng) {
    const int K = ofdm.num_subcarriers;
    const int num_slots = pb.num_slots();

    auto collect = [](const LinkChannel& link) {
        std::vector<const PathComponent*> paths;
        if (link.los_path) paths.push_back(&*link.los_path);
        for (const auto& p : link.nlos_paths) paths.push_back(&p);
        return paths;
    };
    const auto pg = collect(bs_irs);
    const auto pd = collect(bs_user);
    const auto pr = collect(irs_user);
    const int Lg = int(pg.size()), Ld = int(pd.size()), Lr = int(pr.size());

    // per-path frequency gains, K x L
    auto gain_table = [&](const std::vector<const PathComponent*>& paths) {
        Eigen::MatrixXcd t(K, int(paths.size()));
        for (int l = 0; l < int(paths.size()); ++l) t.col(l) = freq_gains(*paths[l], ofdm);
        return t;
    };
    const Eigen::MatrixXcd gg = gain_table(pg);
    const Eigen::MatrixXcd gd = gain_table(pd);
    const Eigen::MatrixXcd gr = gain_table(pr);

    // BS-side projections a^H s_i for direct and reflected paths
    Eigen::MatrixXcd proj_d(Ld, num_slots), proj_g(Lg, num_slots);
    std::vector<Eigen::VectorXcd> a_d(Ld), a_g_tx(Lg), a_g_rx(Lg), a_r(Lr);
    for (int l = 0; l < Ld; ++l) a_d[l] = steering_vector(bs_user.tx, pd[l]->aod);
    for (int l = 0; l < Lg; ++l) {
        a_g_tx[l] = steering_vector(bs_irs.tx, pg[l]->aod);
        a_g_rx[l] = steering_vector(*bs_irs.rx, *pg[l]->aoa);
    }
    for (int l = 0; l < Lr; ++l) a_r[l] = steering_vector(irs_user.tx, pr[l]->aod);
    for (int i = 0; i < num_slots; ++i) {
        const auto& s = pb.slots[i].s;
        for (int l = 0; l < Ld; ++l) proj_d(l, i) = a_d[l].dot(s);
        for (int l = 0; l < Lg; ++l) proj_g(l, i) = a_g_tx[l].dot(s);
    }

    // F_i(m, l) = [a_r_m^H (theta_i .* a_g_rx_l)] * (a_g_tx_l^H s_i)
    std::vector<Eigen::MatrixXcd> cascade(num_slots);
    for (int i = 0; i < num_slots; ++i) {
        cascade[i].resize(Lr, Lg);
        const auto& theta = pb.slots[i].theta;
        for (int l = 0; l < Lg; ++l) {
            const Eigen::VectorXcd reflected = theta.cwiseProduct(a_g_rx[l]);
            for (int m = 0; m < Lr; ++m)
                cascade[i](m, l) = a_r[m].dot(reflected) * proj_g(l, i);
        }
    }

    std::vector<Eigen::VectorXcd> y(K, Eigen::VectorXcd(num_slots));
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < num_slots; ++i) {
            cxd acc(0.0, 0.0);
            for (int l = 0; l < Ld; ++l) acc += gd(k, l) * proj_d(l, i);
            for (int l = 0; l < Lg; ++l)
                for (int m = 0; m < Lr; ++m) acc += gr(k, m) * gg(k, l) * cascade[i](m, l);
            y[k](i) = acc;
        }
        if (sigma_n2 > 0.0)
            for (int i = 0; i < num_slots; ++i) y[k](i) += rng.cgaussian(sigma_n2);
    }
    return y;
}

} // namespace irsce
