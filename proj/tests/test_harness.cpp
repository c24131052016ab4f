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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsce/harness.hpp"

using namespace irsce;

namespace {

// shrunk further than the small preset so harness tests stay instant
SystemConfig tiny_config() {
    SystemConfig cfg = preset_config("small");
    cfg.m_dims = ArrayDims{4, 4};
    cfg.n_dims = ArrayDims{4, 4};
    cfg.num_subcarriers = 8;
    cfg.cp_len = 8;
    cfg.num_nlos = 1;
    cfg.trials = 4;
    cfg.bs_irs_m = 12.0;
    cfg.bs_user_m = 9.0;
    cfg.irs_user_m = 4.0;
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("identical trial inputs give bit-identical results") {
    SystemConfig cfg = tiny_config();
    Dictionary Ad = redundant_dictionary(cfg.m_dims, 8, 8);
    Dictionary Ar = redundant_dictionary(cfg.n_dims, 8, 8);
    TrialContext ctx{&cfg, Method::domp_designed, 40.0, pilot_count(cfg), &Ad, &Ar};
    TrialResult a = run_trial(ctx, 3);
    TrialResult b = run_trial(ctx, 3);
    CHECK(a.nmse_hd_db == b.nmse_hd_db);
    CHECK(a.nmse_hr_db == b.nmse_hr_db);
    CHECK(a.domp_iterations == b.domp_iterations);
    CHECK(a.seed == b.seed);
    TrialResult c = run_trial(ctx, 4);
    CHECK(c.seed != a.seed);
}

TEST_CASE("the noiseless LS baseline is transmit-power invariant per trial") {
    SystemConfig cfg = tiny_config();
    Dictionary Ad = redundant_dictionary(cfg.m_dims, 8, 8);
    Dictionary Ar = redundant_dictionary(cfg.n_dims, 8, 8);
    TrialContext lo{&cfg, Method::ls, 20.0, pilot_count(cfg), &Ad, &Ar};
    TrialContext hi{&cfg, Method::ls, 46.0, pilot_count(cfg), &Ad, &Ar};
    for (int t = 0; t < 3; ++t) {
        TrialResult a = run_trial(lo, t);
        TrialResult b = run_trial(hi, t);
        CHECK(a.nmse_hr_db == Catch::Approx(b.nmse_hr_db).margin(1e-9));
        CHECK(a.nmse_hd_db == Catch::Approx(b.nmse_hd_db).margin(1e-9));
    }
}

TEST_CASE("worker threads do not change results") {
    SystemConfig cfg = tiny_config();
    Dictionary Ad = redundant_dictionary(cfg.m_dims, 8, 8);
    Dictionary Ar = redundant_dictionary(cfg.n_dims, 8, 8);
    TrialContext ctx{&cfg, Method::domp_designed, 40.0, pilot_count(cfg), &Ad, &Ar};
    std::vector<TrialResult> serial(6), threaded(6);
    run_trials(ctx, serial, 1);
    run_trials(ctx, threaded, 3);
    for (int i = 0; i < 6; ++i) {
        CHECK(serial[i].nmse_hd_db == threaded[i].nmse_hd_db);
        CHECK(serial[i].nmse_hr_db == threaded[i].nmse_hr_db);
        CHECK(serial[i].domp_iterations == threaded[i].domp_iterations);
    }
}

TEST_CASE("point summaries average in the linear domain") {
    SweepPoint p{1.0, Method::ls, 0.0, 0.0, std::vector<TrialResult>(2)};
    p.raw[0].nmse_hr_db = -10.0;
    p.raw[1].nmse_hr_db = -20.0;
    summarize_point(p, UserKind::blocked);
    CHECK(p.nmse_db_mean == Catch::Approx(linear_to_db(0.055)).margin(1e-12));
    // linear sd = 0.045*sqrt(2), se = sd/sqrt(2); in dB via the log derivative
    const double se_db = (10.0 / std::log(10.0)) * 0.045 / 0.055;
    CHECK(p.nmse_db_stderr == Catch::Approx(se_db).margin(1e-12));

    SweepPoint single{1.0, Method::ls, 0.0, 0.0, std::vector<TrialResult>(1)};
    single.raw[0].nmse_hd_db = -7.0;
    summarize_point(single, UserKind::unblocked);
    CHECK(single.nmse_db_mean == Catch::Approx(-7.0).margin(1e-12));
    CHECK(single.nmse_db_stderr == 0.0);
}

TEST_CASE("report layout is frozen") {
    CHECK(std::string(kSummaryHeader) ==
          "sweep_param,sweep_value,method,user_kind,nmse_db_mean,nmse_db_stderr,trials,seed,"
          "config_hash");

    Report rep{"ptx", UserKind::blocked, 42, 0x00ff00ff00ff00ffull, 2, {}};
    SweepPoint p{26.0, Method::ls, -12.5, 0.25, std::vector<TrialResult>(2)};
    p.raw[0] = TrialResult{-10.0, -11.0, 0, 7, 99.0, true};
    p.raw[1] = TrialResult{-20.0, -21.5, 3, 8, 99.0, false};
    rep.points.push_back(p);

    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "irsce_report_test";
    std::filesystem::remove_all(dir);
    write_report(rep, dir);

    CHECK(slurp(dir / "summary.csv") ==
          "sweep_param,sweep_value,method,user_kind,nmse_db_mean,nmse_db_stderr,trials,seed,"
          "config_hash\n"
          "ptx,26,ls,blocked,-12.5,0.25,2,42,00ff00ff00ff00ff\n");
    CHECK(slurp(dir / "raw_ptx_26.csv") ==
          "sweep_param,sweep_value,method,user_kind,trial_index,seed,nmse_hd_db,nmse_hr_db,"
          "domp_iterations,converged\n"
          "ptx,26,ls,blocked,0,7,-10,-11,0,1\n"
          "ptx,26,ls,blocked,1,8,-20,-21.5,3,0\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweeps produce one point per value and method and rerun identically") {
    SystemConfig cfg = tiny_config();
    cfg.sweep_ptx_dbm = {30.0, 40.0};
    cfg.methods = {Method::domp_designed, Method::ls};
    cfg.trials = 2;
    Report rep = run_sweep(cfg, SweepAxis::ptx);
    REQUIRE(rep.points.size() == 4);
    CHECK(rep.points[0].value == 30.0);
    CHECK(rep.points[0].method == Method::domp_designed);
    CHECK(rep.points[3].value == 40.0);
    CHECK(rep.points[3].method == Method::ls);
    for (const auto& p : rep.points) CHECK(p.raw.size() == 2);

    const auto base = std::filesystem::temp_directory_path();
    write_report(rep, base / "irsce_rerun_a");
    Report again = run_sweep(cfg, SweepAxis::ptx);
    write_report(again, base / "irsce_rerun_b");
    CHECK(slurp(base / "irsce_rerun_a" / "summary.csv") ==
          slurp(base / "irsce_rerun_b" / "summary.csv"));
    CHECK(slurp(base / "irsce_rerun_a" / "raw_ptx_30.csv") ==
          slurp(base / "irsce_rerun_b" / "raw_ptx_30.csv"));
    std::filesystem::remove_all(base / "irsce_rerun_a");
    std::filesystem::remove_all(base / "irsce_rerun_b");
}

TEST_CASE("nmse selection follows the user kind") {
    TrialResult t;
    t.nmse_hd_db = -5.0;
    t.nmse_hr_db = -15.0;
    CHECK(selected_nmse_db(t, UserKind::blocked) == -15.0);
    CHECK(selected_nmse_db(t, UserKind::unblocked) == -5.0);
}
