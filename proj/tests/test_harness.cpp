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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "gs2d/harness.hpp"

using namespace gs2d;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gs2d_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str() const { return path.string(); }
};

RunConfig tiny_cfg() {
    RunConfig cfg;
    cfg.seed = 2;
    cfg.data_canvas = 24;
    cfg.data_views = 12;
    cfg.data_gt_splats = 15;
    cfg.init_grid = 6;
    cfg.train_total_iters = 40;
    cfg.train_densify_interval = 20;
    cfg.train_densify_start = 20;
    cfg.train_densify_end = 40;
    cfg.train_budget = 60;
    cfg.train_log_interval = 20;
    cfg.rlgs_K = 20;
    cfg.rlgs_n_lr = 1;
    cfg.rlgs_n_ds = 1;
    cfg.rlgs_hidden = 4;
    cfg.search_n_trials = 3;
    return cfg;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("config files load, reject unknown keys, and ignore comments") {
    TempDir dir;
    const fs::path p = dir.path / "c.json";
    write_file(p, R"({"_note": "ignored", "seed": 9, "train.total_iters": 120,
                      "train.densify_start": 40, "train.densify_end": 120,
                      "hp.lr_scale": 0.05})");
    const RunConfig cfg = load_config_file(p.string());
    CHECK(cfg.seed == 9);
    CHECK(cfg.train_total_iters == 120);
    CHECK(cfg.hp.lr_scale == 0.05);
    CHECK(cfg.data_views == 16);  // untouched default

    write_file(p, R"({"train.totall_iters": 120})");
    CHECK_THROWS_AS(load_config_file(p.string()), ConfigError);
    write_file(p, R"({"seed": "not a number"})");
    CHECK_THROWS_AS(load_config_file(p.string()), ConfigError);
    write_file(p, "not json at all");
    CHECK_THROWS_AS(load_config_file(p.string()), ConfigError);
    CHECK_THROWS_AS(load_config_file((dir.path / "missing.json").string()), ConfigError);
}

TEST_CASE("config validation rejects inconsistent settings") {
    RunConfig bad = tiny_cfg();
    CHECK_THROWS_AS(apply_config_overrides(bad, {{"data.mode", "webcam"}}), ConfigError);
    bad = tiny_cfg();
    CHECK_THROWS_AS(apply_config_overrides(bad, {{"rlgs.K", "7"}}), ConfigError);
    bad = tiny_cfg();
    CHECK_THROWS_AS(apply_config_overrides(bad, {{"hp.lr_color", "-0.1"}}), ConfigError);
    bad = tiny_cfg();
    CHECK_THROWS_AS(apply_config_overrides(bad, {{"hp.split_factor", "0.9"}}), ConfigError);
}

TEST_CASE("overrides apply typed values and report bad input") {
    RunConfig cfg = tiny_cfg();
    apply_config_overrides(cfg, {{"seed", "77"},
                                 {"hp.lr_position", "0.25"},
                                 {"rlgs.verify_rollback", "true"},
                                 {"data.mode", "procedural"}});
    CHECK(cfg.seed == 77);
    CHECK(cfg.hp.lr_position == 0.25);
    CHECK(cfg.rlgs_verify_rollback);
    CHECK_THROWS_AS(apply_config_overrides(cfg, {{"seed", "banana"}}), ConfigError);
    CHECK_THROWS_AS(apply_config_overrides(cfg, {{"no.such.key", "1"}}), ConfigError);
}

TEST_CASE("resolved config round-trips through a file") {
    TempDir dir;
    RunConfig cfg = tiny_cfg();
    cfg.hp.lr_rotation = 0.0123;
    const fs::path p = dir.path / "resolved.json";
    write_resolved_config(cfg, p.string());
    const RunConfig back = load_config_file(p.string());
    CHECK(resolved_config_json(back) == resolved_config_json(cfg));
}

TEST_CASE("procedural dataset: split pattern, identity first view, unit range") {
    const RunConfig cfg = tiny_cfg();
    Rng rng(cfg.seed);
    const Dataset data = synth_dataset(cfg, rng);
    CHECK(data.test_views.size() == 2);  // views 0 and 8 of 12
    CHECK(data.train_pool.size() == 10);
    CHECK(data.test_views[0].id == 0);
    CHECK(data.test_views[1].id == 8);
    const Mat2 ident = Mat2::identity();
    CHECK(data.test_views[0].linear == ident);
    CHECK(data.test_views[0].translation == Vec2{0.0, 0.0});
    for (const AffineView& v : data.train_pool) {
        CHECK(v.target.height == cfg.data_canvas);
        CHECK(v.target.width == cfg.data_canvas);
        for (double p : v.target.pixels) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
        CHECK(v.linear != ident);  // jittered
    }
    // deterministic with the same rng seed
    Rng rng2(cfg.seed);
    const Dataset again = synth_dataset(cfg, rng2);
    CHECK(again.train_pool[0].target.pixels == data.train_pool[0].target.pixels);
}

TEST_CASE("image-mode dataset warps a source pixmap") {
    TempDir dir;
    // checkerboard source
    Image src(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            for (int c = 0; c < 3; ++c) src.at(y, x, c) = ((x / 4 + y / 4) % 2) ? 1.0 : 0.0;
    const fs::path p = dir.path / "src.ppm";
    write_ppm(src, p.string());

    RunConfig cfg = tiny_cfg();
    cfg.data_mode = "image";
    cfg.data_image_path = p.string();
    Rng rng(cfg.seed);
    const Dataset data = synth_dataset(cfg, rng);
    // identity view target equals the resized source (here bilinear shrink)
    const Image& t0 = data.test_views[0].target;
    CHECK(t0.height == cfg.data_canvas);
    double lo = 1.0, hi = 0.0;
    for (double v : t0.pixels) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo < 0.25);  // both board colors survive the warp
    CHECK(hi > 0.75);
}

TEST_CASE("init_scene lays a jittered grid with the configured appearance") {
    const RunConfig cfg = tiny_cfg();
    Rng rng(3);
    const SplatScene scene = init_scene(cfg, rng);
    CHECK(scene.count() == cfg.init_grid * cfg.init_grid);
    CHECK(scene.budget == cfg.train_budget);
    for (const Splat2D& s : scene.splats) {
        CHECK(s.position.x >= 0.0);
        CHECK(s.position.x <= cfg.data_canvas);
        CHECK(s.log_scale.x == std::log(cfg.init_scale));
        CHECK(s.color[0] == cfg.init_color);
        CHECK(logistic(s.opacity_logit) == doctest::Approx(cfg.init_opacity).epsilon(1e-12));
    }
}

TEST_CASE("run_fit emits the full output bundle") {
    TempDir dir;
    const RunConfig cfg = tiny_cfg();
    const FitResult r = run_fit(cfg, dir.str());
    CHECK(r.total_steps == cfg.train_total_iters);
    CHECK(fs::exists(dir.path / "metrics.csv"));
    CHECK(fs::exists(dir.path / "config.resolved.json"));
    CHECK(fs::exists(dir.path / "scene.splat2d.txt"));
    CHECK(fs::exists(dir.path / "test_000.ppm"));
    CHECK(fs::exists(dir.path / "test_001.ppm"));

    std::ifstream in(dir.path / "metrics.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("iteration,train_loss,test_psnr,test_ssim,splat_count", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line != "\r") ++rows;
    CHECK(rows == cfg.train_total_iters / cfg.train_log_interval + 1);

    const SplatScene dumped = load_scene_file((dir.path / "scene.splat2d.txt").string());
    CHECK(dumped.count() == r.splat_count);
}

TEST_CASE("run_tune_rlgs also writes the phase log") {
    TempDir dir;
    const RunConfig cfg = tiny_cfg();
    const FitResult r = run_tune_rlgs(cfg, dir.str());
    CHECK(fs::exists(dir.path / "phases.csv"));
    CHECK(r.total_steps > cfg.train_total_iters);
    std::ifstream in(dir.path / "phases.csv");
    int rows = -1;  // skip header
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line != "\r") ++rows;
    CHECK(rows == cfg.train_total_iters / cfg.rlgs_K);
}

TEST_CASE("run_search writes one trial row per trial") {
    TempDir dir;
    const RunConfig cfg = tiny_cfg();
    const SearchResult res = run_search(cfg, /*use_tpe=*/false, dir.str());
    CHECK(res.trials.size() == 3);
    std::ifstream in(dir.path / "trials.csv");
    int rows = -1;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line != "\r") ++rows;
    CHECK(rows == 3);
}

TEST_CASE("report summarizes runs and fails cleanly on empty directories") {
    TempDir dir;
    const RunConfig cfg = tiny_cfg();
    run_fit(cfg, (dir.path / "runA").string());
    std::string table;
    CHECK(run_report(dir.str(), &table) == 0);
    CHECK(table.find("runA") != std::string::npos);
    CHECK(table.find("final_test_psnr") != std::string::npos);
    CHECK(fs::exists(dir.path / "summary.csv"));

    TempDir empty;
    CHECK(run_report(empty.str(), &table) == 2);
    CHECK(run_report((empty.path / "nope").string(), &table) == 2);
}

TEST_CASE("cli_main dispatches and reports config errors with exit 1") {
    TempDir dir;
    const std::string out = (dir.path / "cli_fit").string();
    const char* ok[] = {"gs2d", "fit", "--out", out.c_str(),
                       "--set", "data.canvas=24", "--set", "data.views=12",
                       "--set", "data.gt_splats=15", "--set", "init.grid=6",
                       "--set", "train.total_iters=40", "--set", "train.densify_start=20",
                       "--set", "train.densify_end=40", "--set", "train.budget=60",
                       "--set", "train.log_interval=20"};
    CHECK(cli_main(static_cast<int>(std::size(ok)), ok) == 0);
    CHECK(fs::exists(dir.path / "cli_fit" / "metrics.csv"));

    const char* bad[] = {"gs2d", "fit", "--set", "bogus.key=1"};
    CHECK(cli_main(4, bad) == 1);
    const char* noargs[] = {"gs2d"};
    CHECK(cli_main(1, noargs) == 1);

    const char* rep[] = {"gs2d", "report", "--dir", out.c_str()};
    CHECK(cli_main(4, rep) == 0);
}
