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

#ifndef IRSCE_CONFIG_HPP
#define IRSCE_CONFIG_HPP

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsce/channel.hpp"
#include "irsce/common.hpp"
#include "irsce/pilot.hpp"

namespace irsce {

enum class UserKind { blocked, unblocked };
enum class Method { domp_designed, domp_fully_random, ls };

inline const char* to_string(UserKind k) {
    return k == UserKind::blocked ? "blocked" : "unblocked";
}

inline const char* to_string(Method m) {
    switch (m) {
    case Method::domp_designed: return "domp_designed";
    case Method::domp_fully_random: return "domp_fully_random";
    default: return "ls";
    }
}

inline const char* to_string(PilotVariant v) {
    return v == PilotVariant::designed ? "designed" : "fully_random";
}

inline UserKind parse_user_kind(const std::string& s) {
    if (s == "blocked") return UserKind::blocked;
    if (s == "unblocked") return UserKind::unblocked;
    throw ConfigError("unknown user_kind: " + s);
}

inline Method parse_method(const std::string& s) {
    if (s == "domp_designed") return Method::domp_designed;
    if (s == "domp_fully_random") return Method::domp_fully_random;
    if (s == "ls") return Method::ls;
    throw ConfigError("unknown method: " + s);
}

inline PilotVariant parse_pilot_variant(const std::string& s) {
    if (s == "designed") return PilotVariant::designed;
    if (s == "fully_random") return PilotVariant::fully_random;
    throw ConfigError("unknown pilot_variant: " + s);
}

/// Every experiment knob. Defaults are the full-scale operating point; the
/// "small" preset rescales the geometry so acceptance runs fit CI budgets.
struct SystemConfig {
    double carrier_hz = 3e10;
    double bandwidth_hz = 1e8;
    ArrayDims m_dims{16, 16};
    ArrayDims n_dims{16, 16};
    int num_subcarriers = 64; // K
    int cp_len = 64;          // N_CP, also the delay spread budget in samples
    int num_nlos = 6;         // per-link default L
    int num_nlos_bs_irs = -1; // per-link overrides, -1 means use num_nlos
    int num_nlos_bs_user = -1;
    int num_nlos_irs_user = -1;
    double rician_db = 20.0;
    double rolloff = 0.8;
    int n_rf = 2;
    int n_rf_irs = 1;
    int n_rf_user = 1;
    double nsd_dbm_hz = -174.0;
    double epsilon = -1.0;     // DOMP stop threshold; negative means auto
    double epsilon_rel = 2e-3; // auto policy: model-error floor as a fraction
                               // of the measured per-sample energy
    double r_p = 0.25;     // pilot overhead N_P/(M+N)
    int n_p = 0;           // explicit slot count, overrides r_p when > 0
    double r_dic = 4.0;    // dictionary redundancy G/n per array
    std::optional<ArrayDims> g_dims_bs;
    std::optional<ArrayDims> g_dims_irs;
    double p_tx_dbm = 40.0;
    std::vector<double> sweep_ptx_dbm = {20, 22, 24, 26, 28, 30, 32, 34, 36, 38, 40, 42, 44, 46};
    std::vector<double> sweep_rp = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
    std::vector<double> sweep_rdic = {1, 2, 3, 4};
    UserKind user_kind = UserKind::blocked;
    PilotVariant pilot_variant = PilotVariant::designed;
    std::vector<Method> methods = {Method::domp_designed, Method::domp_fully_random, Method::ls};
    double bs_irs_m = 100.0;
    double bs_user_m = 80.0;
    double irs_user_m = 20.0;
    double h_ut_m = 1.5;
    double angle_sector_deg = 60.0;
    int trials = 200;
    std::uint64_t master_seed = 1;
    int threads = 1;
    bool thermal_noise = true;
    bool know_los_gain = true;
    bool on_grid = false; // snap all departure angles to the dictionary grid
};

inline int resolved_nlos(const SystemConfig& cfg, LinkKind kind) {
    int v = cfg.num_nlos;
    switch (kind) {
    case LinkKind::bs_to_irs:
        if (cfg.num_nlos_bs_irs >= 0) v = cfg.num_nlos_bs_irs;
        break;
    case LinkKind::bs_to_user:
        if (cfg.num_nlos_bs_user >= 0) v = cfg.num_nlos_bs_user;
        break;
    case LinkKind::irs_to_user:
        if (cfg.num_nlos_irs_user >= 0) v = cfg.num_nlos_irs_user;
        break;
    }
    return v;
}

/// Thermal noise power per subcarrier in watts, from the configured spectral
/// density over one subchannel of width bandwidth/K.
inline double noise_power(const SystemConfig& cfg) {
    return dbm_to_watt(cfg.nsd_dbm_hz +
                       10.0 * std::log10(cfg.bandwidth_hz / cfg.num_subcarriers));
}

inline OfdmParams ofdm_params(const SystemConfig& cfg) {
    return {cfg.num_subcarriers, cfg.cp_len, 1.0 / cfg.bandwidth_hz, cfg.rolloff};
}

inline int pilot_count(const SystemConfig& cfg) {
    if (cfg.n_p > 0) return cfg.n_p;
    const long total = cfg.m_dims.count() + cfg.n_dims.count();
    return std::max(1L, std::lround(cfg.r_p * double(total)));
}

/// Redundancy is realized per axis: a total ratio r gives sqrt(r) more grid
/// points than antennas in each dimension.
inline ArrayDims grid_for(const ArrayDims& dims, double r_dic,
                          const std::optional<ArrayDims>& override_dims) {
    if (override_dims) return *override_dims;
    const double axis = std::sqrt(r_dic);
    const int gx = std::max(int(dims.nx), int(std::lround(axis * dims.nx)));
    const int gy = std::max(int(dims.ny), int(std::lround(axis * dims.ny)));
    return ArrayDims{gx, gy};
}

inline ArrayDims bs_grid(const SystemConfig& cfg, double r_dic) {
    return grid_for(cfg.m_dims, r_dic, cfg.g_dims_bs);
}

inline ArrayDims irs_grid(const SystemConfig& cfg, double r_dic) {
    return grid_for(cfg.n_dims, r_dic, cfg.g_dims_irs);
}

/// Blockage flips which single-antenna link keeps its LoS ray: a blocked user
/// sees the IRS (reflected path dominant), an unblocked one sees the BS.
inline LinkSpec link_spec(const SystemConfig& cfg, LinkKind kind) {
    const bool blocked = cfg.user_kind == UserKind::blocked;
    ArrayDims tx = cfg.m_dims;
    std::optional<ArrayDims> rx;
    bool has_los = true;
    double distance = cfg.bs_irs_m;
    switch (kind) {
    case LinkKind::bs_to_irs:
        rx = cfg.n_dims;
        break;
    case LinkKind::bs_to_user:
        has_los = !blocked;
        distance = cfg.bs_user_m;
        break;
    case LinkKind::irs_to_user:
        tx = cfg.n_dims;
        has_los = blocked;
        distance = cfg.irs_user_m;
        break;
    }
    return LinkSpec{kind,
                    tx,
                    rx,
                    has_los,
                    resolved_nlos(cfg, kind),
                    db_to_linear(cfg.rician_db),
                    distance,
                    cfg.carrier_hz,
                    cfg.h_ut_m,
                    (cfg.cp_len - 1) / cfg.bandwidth_hz,
                    cfg.angle_sector_deg * kPi / 180.0,
                    true};
}

inline LinkChannel sample_link(const SystemConfig& cfg, LinkKind kind, Rng& rng) {
    return sample_link(link_spec(cfg, kind), rng);
}

inline PilotSpec pilot_spec(const SystemConfig& cfg, double p_tx_dbm, int num_slots,
                            PilotVariant variant) {
    return {cfg.m_dims, int(cfg.n_dims.count()), num_slots,
            cfg.n_rf,   cfg.n_rf_irs,           cfg.n_rf_user,
            dbm_to_watt(p_tx_dbm), variant};
}

inline void validate_config(const SystemConfig& cfg) {
    if (cfg.carrier_hz <= 0 || cfg.bandwidth_hz <= 0)
        throw ConfigError("carrier and bandwidth must be positive");
    if (cfg.num_subcarriers < 1 || cfg.cp_len < 1)
        throw ConfigError("num_subcarriers and cp_len must be at least 1");
    if (cfg.num_nlos < 0) throw ConfigError("num_nlos must be non-negative");
    if (cfg.rolloff < 0.0 || cfg.rolloff > 1.0) throw ConfigError("rolloff must be in [0,1]");
    if (cfg.n_rf_irs + cfg.n_rf_user != cfg.n_rf)
        throw ConfigError("n_rf_irs + n_rf_user must equal n_rf");
    if (cfg.n_rf_irs < 0 || cfg.n_rf_user < 0 || cfg.n_rf < 1)
        throw ConfigError("RF chain counts must be positive");
    if (cfg.n_p == 0 && cfg.r_p <= 0.0) throw ConfigError("one of n_p or r_p must be positive");
    if (cfg.n_p < 0) throw ConfigError("n_p must be non-negative");
    if (cfg.r_dic < 1.0 && !(cfg.g_dims_bs && cfg.g_dims_irs))
        throw ConfigError("r_dic below 1 needs explicit grid dims");
    if (cfg.bs_irs_m <= 0 || cfg.bs_user_m <= 0 || cfg.irs_user_m <= 0)
        throw ConfigError("link distances must be positive");
    if (cfg.angle_sector_deg <= 0.0 || cfg.angle_sector_deg > 90.0)
        throw ConfigError("angle_sector_deg must be in (0,90]");
    if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
    if (cfg.methods.empty()) throw ConfigError("methods must be non-empty");
    if (cfg.sweep_ptx_dbm.empty() || cfg.sweep_rp.empty() || cfg.sweep_rdic.empty())
        throw ConfigError("sweep value lists must be non-empty");
    if (cfg.user_kind == UserKind::blocked && resolved_nlos(cfg, LinkKind::bs_to_user) < 1)
        throw ConfigError("blocked user needs at least one BS-user NLoS path");
    if (cfg.user_kind == UserKind::unblocked && resolved_nlos(cfg, LinkKind::irs_to_user) < 1)
        throw ConfigError("unblocked user needs at least one IRS-user NLoS path");
    // Every geometric LoS delay must fit inside the CP window.
    const double max_delay = (cfg.cp_len - 1) / cfg.bandwidth_hz;
    for (double d : {cfg.bs_irs_m, cfg.bs_user_m, cfg.irs_user_m})
        if (d / kSpeedOfLight > max_delay)
            throw ConfigError("LoS propagation delay exceeds the CP window");
}

namespace detail {

inline ArrayDims parse_dims(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(key + " must be a two-element array");
    return ArrayDims{j[0].get<int>(), j[1].get<int>()};
}

} // namespace detail

/// Overlays JSON keys onto an existing config. Unknown keys are errors so
/// typos cannot silently fall back to defaults.
inline void apply_json(SystemConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "carrier_hz") cfg.carrier_hz = val.get<double>();
            else if (key == "bandwidth_hz") cfg.bandwidth_hz = val.get<double>();
            else if (key == "m_dims") cfg.m_dims = detail::parse_dims(val, key);
            else if (key == "n_dims") cfg.n_dims = detail::parse_dims(val, key);
            else if (key == "num_subcarriers") cfg.num_subcarriers = val.get<int>();
            else if (key == "cp_len") cfg.cp_len = val.get<int>();
            else if (key == "num_nlos") cfg.num_nlos = val.get<int>();
            else if (key == "num_nlos_bs_irs") cfg.num_nlos_bs_irs = val.get<int>();
            else if (key == "num_nlos_bs_user") cfg.num_nlos_bs_user = val.get<int>();
            else if (key == "num_nlos_irs_user") cfg.num_nlos_irs_user = val.get<int>();
            else if (key == "rician_db") cfg.rician_db = val.get<double>();
            else if (key == "rolloff") cfg.rolloff = val.get<double>();
            else if (key == "n_rf") cfg.n_rf = val.get<int>();
            else if (key == "n_rf_irs") cfg.n_rf_irs = val.get<int>();
            else if (key == "n_rf_user") cfg.n_rf_user = val.get<int>();
            else if (key == "nsd_dbm_hz") cfg.nsd_dbm_hz = val.get<double>();
            else if (key == "epsilon") {
                if (val.is_string() && val.get<std::string>() == "auto") cfg.epsilon = -1.0;
                else cfg.epsilon = val.get<double>();
            }
            else if (key == "epsilon_rel") cfg.epsilon_rel = val.get<double>();
            else if (key == "r_p") cfg.r_p = val.get<double>();
            else if (key == "n_p") cfg.n_p = val.get<int>();
            else if (key == "r_dic") cfg.r_dic = val.get<double>();
            else if (key == "g_dims_bs") cfg.g_dims_bs = detail::parse_dims(val, key);
            else if (key == "g_dims_irs") cfg.g_dims_irs = detail::parse_dims(val, key);
            else if (key == "p_tx_dbm") cfg.p_tx_dbm = val.get<double>();
            else if (key == "sweep_ptx_dbm") cfg.sweep_ptx_dbm = val.get<std::vector<double>>();
            else if (key == "sweep_rp") cfg.sweep_rp = val.get<std::vector<double>>();
            else if (key == "sweep_rdic") cfg.sweep_rdic = val.get<std::vector<double>>();
            else if (key == "user_kind") cfg.user_kind = parse_user_kind(val.get<std::string>());
            else if (key == "pilot_variant")
                cfg.pilot_variant = parse_pilot_variant(val.get<std::string>());
            else if (key == "methods") {
                cfg.methods.clear();
                for (const auto& m : val) cfg.methods.push_back(parse_method(m.get<std::string>()));
            }
            else if (key == "bs_irs_m") cfg.bs_irs_m = val.get<double>();
            else if (key == "bs_user_m") cfg.bs_user_m = val.get<double>();
            else if (key == "irs_user_m") cfg.irs_user_m = val.get<double>();
            else if (key == "h_ut_m") cfg.h_ut_m = val.get<double>();
            else if (key == "angle_sector_deg") cfg.angle_sector_deg = val.get<double>();
            else if (key == "trials") cfg.trials = val.get<int>();
            else if (key == "master_seed") cfg.master_seed = val.get<std::uint64_t>();
            else if (key == "threads") cfg.threads = val.get<int>();
            else if (key == "thermal_noise") cfg.thermal_noise = val.get<bool>();
            else if (key == "know_los_gain") cfg.know_los_gain = val.get<bool>();
            else if (key == "on_grid") cfg.on_grid = val.get<bool>();
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    }
}

inline SystemConfig preset_config(const std::string& name) {
    SystemConfig cfg;
    if (name == "paper" || name.empty()) return cfg;
    if (name == "small") {
        cfg.m_dims = ArrayDims{8, 8};
        cfg.n_dims = ArrayDims{8, 8};
        cfg.num_subcarriers = 16;
        cfg.cp_len = 16;
        cfg.trials = 50;
        cfg.bs_irs_m = 30.0;
        cfg.bs_user_m = 24.0;
        cfg.irs_user_m = 6.0;
        // An 8x8 aperture cannot hold the full-scale path count inside a
        // quarter-overhead pilot budget; the miniature keeps the phenomena at
        // two NLoS paths per link and half overhead.
        cfg.num_nlos = 2;
        cfg.r_p = 0.5;
        return cfg;
    }
    throw ConfigError("unknown preset: " + name);
}

inline SystemConfig parse_config(const nlohmann::json& j, const std::string& preset = "") {
    SystemConfig cfg = preset_config(preset);
    apply_json(cfg, j);
    return cfg;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(v[i]);
    }
    return out;
}

} // namespace detail

/// Canonical text image of everything that affects experiment output. The
/// master seed and thread count are deliberately excluded: the seed travels
/// next to the hash in reports, and threading must not change results.
inline std::string canonical_string(const SystemConfig& cfg) {
    using detail::fmt_double;
    std::string s;
    auto add = [&s](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    add("carrier_hz", fmt_double(cfg.carrier_hz));
    add("bandwidth_hz", fmt_double(cfg.bandwidth_hz));
    add("m_dims", std::to_string(cfg.m_dims.nx) + "x" + std::to_string(cfg.m_dims.ny));
    add("n_dims", std::to_string(cfg.n_dims.nx) + "x" + std::to_string(cfg.n_dims.ny));
    add("num_subcarriers", std::to_string(cfg.num_subcarriers));
    add("cp_len", std::to_string(cfg.cp_len));
    add("num_nlos", std::to_string(cfg.num_nlos));
    add("num_nlos_bs_irs", std::to_string(cfg.num_nlos_bs_irs));
    add("num_nlos_bs_user", std::to_string(cfg.num_nlos_bs_user));
    add("num_nlos_irs_user", std::to_string(cfg.num_nlos_irs_user));
    add("rician_db", fmt_double(cfg.rician_db));
    add("rolloff", fmt_double(cfg.rolloff));
    add("n_rf", std::to_string(cfg.n_rf));
    add("n_rf_irs", std::to_string(cfg.n_rf_irs));
    add("n_rf_user", std::to_string(cfg.n_rf_user));
    add("nsd_dbm_hz", fmt_double(cfg.nsd_dbm_hz));
    add("epsilon", fmt_double(cfg.epsilon));
    add("epsilon_rel", fmt_double(cfg.epsilon_rel));
    add("r_p", fmt_double(cfg.r_p));
    add("n_p", std::to_string(cfg.n_p));
    add("r_dic", fmt_double(cfg.r_dic));
    auto dims_or_auto = [](const std::optional<ArrayDims>& d) {
        return d ? std::to_string(d->nx) + "x" + std::to_string(d->ny) : std::string("auto");
    };
    add("g_dims_bs", dims_or_auto(cfg.g_dims_bs));
    add("g_dims_irs", dims_or_auto(cfg.g_dims_irs));
    add("p_tx_dbm", fmt_double(cfg.p_tx_dbm));
    add("sweep_ptx_dbm", detail::fmt_list(cfg.sweep_ptx_dbm));
    add("sweep_rp", detail::fmt_list(cfg.sweep_rp));
    add("sweep_rdic", detail::fmt_list(cfg.sweep_rdic));
    add("user_kind", to_string(cfg.user_kind));
    add("pilot_variant", to_string(cfg.pilot_variant));
    std::string methods;
    for (size_t i = 0; i < cfg.methods.size(); ++i) {
        if (i) methods += ",";
        methods += to_string(cfg.methods[i]);
    }
    add("methods", methods);
    add("bs_irs_m", fmt_double(cfg.bs_irs_m));
    add("bs_user_m", fmt_double(cfg.bs_user_m));
    add("irs_user_m", fmt_double(cfg.irs_user_m));
    add("h_ut_m", fmt_double(cfg.h_ut_m));
    add("angle_sector_deg", fmt_double(cfg.angle_sector_deg));
    add("trials", std::to_string(cfg.trials));
    add("thermal_noise", cfg.thermal_noise ? "1" : "0");
    add("know_los_gain", cfg.know_los_gain ? "1" : "0");
    add("on_grid", cfg.on_grid ? "1" : "0");
    return s;
}

inline std::uint64_t config_hash(const SystemConfig& cfg) {
    return fnv1a64(canonical_string(cfg));
}

} // namespace irsce

#endif // IRSCE_CONFIG_HPP
