// Copyright 2026 the gs2d authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gs2d/harness.hpp"

namespace gs2d {
namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* sc, CommonArgs& a) {
    sc->add_option("--config", a.config_path, "JSON config file");
    sc->add_option("--out", a.out_dir, "output directory (overrides config out_dir)");
    sc->add_option("--set", a.sets, "config override, key=value (repeatable)");
    sc->add_option("--seed", a.seed, "RNG seed (overrides config)")
        ->each([&a](const std::string&) { a.seed_given = true; });
}

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig cfg = a.config_path.empty() ? RunConfig{} : load_config_file(a.config_path);
    std::vector<std::pair<std::string, std::string>> kv;
    for (const std::string& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got: " + s);
        kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    apply_config_overrides(cfg, kv);
    if (a.seed_given) cfg.seed = a.seed;
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    return cfg;
}

int do_synth(const RunConfig& cfg) {
    Rng rng(cfg.seed);
    const Dataset data = synth_dataset(cfg, rng);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream idx(cfg.out_dir + "/views.csv");
    idx << std::setprecision(17)
        << "id,split,a,b,c,d,tx,ty\r\n";
    auto dump = [&](const AffineView& v, const char* split) {
        idx << v.id << "," << split << "," << v.linear.a << "," << v.linear.b << ","
            << v.linear.c << "," << v.linear.d << "," << v.translation.x << ","
            << v.translation.y << "\r\n";
        char name[32];
        std::snprintf(name, sizeof name, "/view_%03d.ppm", v.id);
        write_ppm(v.target, cfg.out_dir + name);
    };
    for (const AffineView& v : data.train_pool) dump(v, "train");
    for (const AffineView& v : data.test_views) dump(v, "test");
    write_resolved_config(cfg, cfg.out_dir + "/config.resolved.json");
    std::cout << "synth: wrote " << (data.train_pool.size() + data.test_views.size())
              << " views to " << cfg.out_dir << "\n";
    return 0;
}

void print_fit(const char* what, const FitResult& r) {
    std::cout << what << ": test_psnr=" << r.final_test_psnr
              << " test_ssim=" << r.final_test_ssim << " splats=" << r.splat_count
              << " steps=" << r.total_steps << "\n";
}

void print_search(const char* what, const SearchResult& r) {
    const Trial& b = r.trials.at(r.best);
    std::cout << what << ": best_objective=" << b.objective
              << " best_test_psnr=" << b.test_psnr << " trials=" << r.trials.size()
              << "\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"2D Gaussian-splat trainer with an RL hyperparameter controller"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string report_dir;
    CLI::App* synth = app.add_subcommand("synth", "generate a dataset and write its views");
    CLI::App* fit = app.add_subcommand("fit", "train once with fixed hyperparameters");
    CLI::App* rlgs = app.add_subcommand("tune-rlgs", "train with the RL controller");
    CLI::App* rs = app.add_subcommand("tune-rs", "random-search hyperparameters");
    CLI::App* tpe = app.add_subcommand("tune-tpe", "TPE-search hyperparameters");
    CLI::App* ablate = app.add_subcommand("ablate", "run the controller ablation grid");
    CLI::App* report = app.add_subcommand("report", "summarize run directories");
    for (CLI::App* sc : {synth, fit, rlgs, rs, tpe, ablate}) add_common(sc, args);
    report->add_option("--dir", report_dir, "directory to scan")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (report->parsed()) {
            std::string table;
            const int code = run_report(report_dir, &table);
            std::cout << table;
            return code;
        }
        const RunConfig cfg = resolve_config(args);
        if (synth->parsed()) return do_synth(cfg);
        if (fit->parsed()) {
            print_fit("fit", run_fit(cfg, cfg.out_dir));
        } else if (rlgs->parsed()) {
            print_fit("tune-rlgs", run_tune_rlgs(cfg, cfg.out_dir));
        } else if (rs->parsed()) {
            print_search("tune-rs", run_search(cfg, /*use_tpe=*/false, cfg.out_dir));
        } else if (tpe->parsed()) {
            print_search("tune-tpe", run_search(cfg, /*use_tpe=*/true, cfg.out_dir));
        } else if (ablate->parsed()) {
            return run_ablate(cfg, cfg.out_dir);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gs2d
