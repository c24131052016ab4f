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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irsce/irsce.hpp"

namespace {

irsce::SystemConfig load_config(const std::string& path, const std::string& preset) {
    irsce::SystemConfig cfg = irsce::preset_config(preset);
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw irsce::ConfigError("cannot open config file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw irsce::ConfigError(std::string("config parse error: ") + e.what());
        }
        irsce::apply_json(cfg, j);
    }
    return cfg;
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& sweep,
            const std::string& out_dir, bool has_seed, std::uint64_t seed, int threads) {
    irsce::SystemConfig cfg = load_config(config_path, preset);
    if (has_seed) cfg.master_seed = seed;
    if (threads > 0) cfg.threads = threads;
    const irsce::SweepAxis axis = irsce::parse_sweep_axis(sweep);
    irsce::Report rep = irsce::run_sweep(cfg, axis);
    irsce::write_report(rep, out_dir);
    std::printf("wrote %s/summary.csv (%zu rows, config %s, seed %llu)\n", out_dir.c_str(),
                rep.points.size(), irsce::detail::hex64(rep.hash).c_str(),
                static_cast<unsigned long long>(rep.master_seed));
    return 0;
}

int cmd_validate(const std::string& config_path, const std::string& preset) {
    irsce::SystemConfig cfg = load_config(config_path, preset);
    irsce::validate_config(cfg);
    const irsce::ArrayDims gm = irsce::bs_grid(cfg, cfg.r_dic);
    const irsce::ArrayDims gn = irsce::irs_grid(cfg, cfg.r_dic);
    const double sigma2 = irsce::noise_power(cfg);
    std::printf("config ok (hash %s)\n", irsce::detail::hex64(irsce::config_hash(cfg)).c_str());
    std::printf("noise_power_w   %.10g  (%.4f dBm)\n", sigma2,
                10.0 * std::log10(sigma2) + 30.0);
    std::printf("pilot_slots     %d\n", irsce::pilot_count(cfg));
    std::printf("bs_grid         %dx%d (%d columns)\n", gm.nx, gm.ny, gm.nx * gm.ny);
    std::printf("irs_grid        %dx%d (%d columns)\n", gn.nx, gn.ny, gn.nx * gn.ny);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS-aided mmWave channel estimation experiments"};
    app.require_subcommand(1);

    std::string config_path, preset = "paper", out_dir = "out", sweep = "ptx";
    std::uint64_t seed = 0;
    int threads = 0;
    bool has_seed = false;

    CLI::App* run = app.add_subcommand("run", "run a Monte Carlo sweep and write CSV reports");
    run->add_option("--config", config_path, "JSON config overlay");
    run->add_option("--preset", preset, "base preset")
        ->check(CLI::IsMember({"small", "paper"}));
    run->add_option("--sweep", sweep, "sweep axis")->check(CLI::IsMember({"ptx", "rp", "rdic"}));
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
        has_seed = true;
    });
    run->add_option("--threads", threads, "worker thread count override");

    CLI::App* validate = app.add_subcommand("validate", "check a config and print derived values");
    validate->add_option("--config", config_path, "JSON config overlay");
    validate->add_option("--preset", preset, "base preset")
        ->check(CLI::IsMember({"small", "paper"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return cmd_run(config_path, preset, sweep, out_dir, has_seed, seed, threads);
        return cmd_validate(config_path, preset);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
