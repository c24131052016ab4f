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

#include "irsce/config.hpp"

using namespace irsce;

TEST_CASE("paper preset carries the full-scale operating point") {
    SystemConfig cfg = preset_config("paper");
    CHECK(cfg.carrier_hz == 3e10);
    CHECK(cfg.bandwidth_hz == 1e8);
    CHECK(cfg.m_dims.count() == 256);
    CHECK(cfg.n_dims.count() == 256);
    CHECK(cfg.num_subcarriers == 64);
    CHECK(cfg.cp_len == 64);
    CHECK(cfg.num_nlos == 6);
    CHECK(cfg.rician_db == 20.0);
    CHECK(cfg.rolloff == 0.8);
    CHECK(cfg.n_rf == 2);
    CHECK(cfg.r_p == 0.25);
    CHECK(cfg.r_dic == 4.0);
    CHECK(cfg.trials == 200);
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("small preset shrinks geometry but keeps the model") {
    SystemConfig cfg = preset_config("small");
    CHECK(cfg.m_dims.count() == 64);
    CHECK(cfg.num_subcarriers == 16);
    CHECK(cfg.trials == 50);
    CHECK(cfg.bs_irs_m == 30.0);
    CHECK(cfg.carrier_hz == 3e10); // unchanged physics
    CHECK_NOTHROW(validate_config(cfg));
    CHECK_THROWS_AS(preset_config("tiny"), ConfigError);
}

TEST_CASE("noise power follows the spectral density over one subchannel") {
    SystemConfig cfg;
    const double dbm = 10.0 * std::log10(noise_power(cfg)) + 30.0;
    CHECK(dbm == Catch::Approx(-112.0618).margin(1e-3));

    cfg.num_subcarriers = 1;
    CHECK(10.0 * std::log10(noise_power(cfg)) + 30.0 == Catch::Approx(-94.0).margin(1e-9));

    cfg.num_subcarriers = 64;
    const double p64 = noise_power(cfg);
    cfg.num_subcarriers = 128;
    CHECK(linear_to_db(p64 / noise_power(cfg)) == Catch::Approx(10.0 * std::log10(2.0)).margin(1e-12));
}

TEST_CASE("pilot count derives from overhead ratio unless pinned") {
    SystemConfig cfg;
    CHECK(pilot_count(cfg) == 128); // 0.25 * 512
    cfg.r_p = 0.3;
    CHECK(pilot_count(cfg) == 154); // round(153.6)
    cfg.n_p = 100;
    CHECK(pilot_count(cfg) == 100);
}

TEST_CASE("dictionary grids realize total redundancy per axis") {
    SystemConfig cfg;
    ArrayDims g4 = bs_grid(cfg, 4.0);
    CHECK(g4.nx == 32);
    CHECK(g4.ny == 32);
    ArrayDims g1 = bs_grid(cfg, 1.0);
    CHECK(g1.nx == 16);
    CHECK(g1.ny == 16);
    ArrayDims g2 = bs_grid(cfg, 2.0);
    CHECK(g2.nx == 23); // round(sqrt(2)*16)
    cfg.g_dims_bs = ArrayDims{20, 18};
    ArrayDims forced = bs_grid(cfg, 4.0);
    CHECK(forced.nx == 20);
    CHECK(forced.ny == 18);
}

TEST_CASE("json overlay is strict about keys and types") {
    SystemConfig cfg;
    apply_json(cfg, nlohmann::json{{"trials", 7}, {"epsilon", "auto"}, {"m_dims", {4, 8}}});
    CHECK(cfg.trials == 7);
    CHECK(cfg.epsilon == -1.0);
    CHECK(cfg.m_dims.nx == 4);
    CHECK(cfg.m_dims.ny == 8);

    apply_json(cfg, nlohmann::json{{"epsilon", 1e-12}});
    CHECK(cfg.epsilon == 1e-12);

    apply_json(cfg, nlohmann::json{{"methods", {"ls", "domp_designed"}}});
    REQUIRE(cfg.methods.size() == 2);
    CHECK(cfg.methods[0] == Method::ls);

    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"trails", 7}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"trials", "many"}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"m_dims", {4}}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"user_kind", "sideways"}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::array()), ConfigError);
}

TEST_CASE("validation rejects inconsistent setups") {
    SystemConfig good;
    CHECK_NOTHROW(validate_config(good));

    SystemConfig bad = good;
    bad.n_rf_irs = 2; // 2 + 1 != 2
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    bad = good;
    bad.user_kind = UserKind::blocked;
    bad.num_nlos_bs_user = 0; // NLoS-only link with no paths
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    bad = good;
    bad.bs_irs_m = 5e5; // LoS delay beyond the CP window
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    bad = good;
    bad.rolloff = 1.5;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    bad = good;
    bad.methods.clear();
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("blockage selects which single-antenna link keeps LoS") {
    SystemConfig cfg;
    cfg.user_kind = UserKind::blocked;
    CHECK(link_spec(cfg, LinkKind::bs_to_irs).has_los);
    CHECK_FALSE(link_spec(cfg, LinkKind::bs_to_user).has_los);
    CHECK(link_spec(cfg, LinkKind::irs_to_user).has_los);

    cfg.user_kind = UserKind::unblocked;
    CHECK(link_spec(cfg, LinkKind::bs_to_user).has_los);
    CHECK_FALSE(link_spec(cfg, LinkKind::irs_to_user).has_los);

    LinkSpec g = link_spec(cfg, LinkKind::bs_to_irs);
    CHECK(g.distance_m == 100.0);
    CHECK(g.rx.has_value());
    CHECK(g.max_delay_s == Catch::Approx(63e-8).epsilon(1e-12));

    cfg.num_nlos_irs_user = 9;
    CHECK(link_spec(cfg, LinkKind::irs_to_user).num_nlos == 9);
    CHECK(link_spec(cfg, LinkKind::bs_to_user).num_nlos == 6);
}

TEST_CASE("config hash ignores seed and threads but tracks physics") {
    SystemConfig a;
    SystemConfig b = a;
    b.master_seed = 999;
    b.threads = 8;
    CHECK(config_hash(a) == config_hash(b));

    b.trials = a.trials + 1;
    CHECK(config_hash(a) != config_hash(b));

    SystemConfig c = a;
    c.pilot_variant = PilotVariant::fully_random;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("name parsing round trips") {
    CHECK(parse_user_kind(to_string(UserKind::unblocked)) == UserKind::unblocked);
    CHECK(parse_method(to_string(Method::domp_fully_random)) == Method::domp_fully_random);
    CHECK(parse_pilot_variant(to_string(PilotVariant::designed)) == PilotVariant::designed);
    CHECK_THROWS_AS(parse_method("gradient_descent"), ConfigError);
}
