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

#include "gs2d/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "gs2d/rasterize.hpp"

namespace fs = std::filesystem;

namespace gs2d {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

using KeyRef = std::variant<int*, double*, bool*, std::string*, std::uint64_t*>;

std::vector<std::pair<std::string, KeyRef>> config_keys(RunConfig& c) {
    return {
        {"seed", &c.seed},
        {"out_dir", &c.out_dir},
        {"data.mode", &c.data_mode},
        {"data.image_path", &c.data_image_path},
        {"data.views", &c.data_views},
        {"data.canvas", &c.data_canvas},
        {"data.gt_splats", &c.data_gt_splats},
        {"data.jitter_rotation_deg", &c.data_jitter_rotation_deg},
        {"data.jitter_scale", &c.data_jitter_scale},
        {"data.jitter_translation", &c.data_jitter_translation},
        {"init.grid", &c.init_grid},
        {"init.scale", &c.init_scale},
        {"init.opacity", &c.init_opacity},
        {"init.color", &c.init_color},
        {"train.total_iters", &c.train_total_iters},
        {"train.densify_interval", &c.train_densify_interval},
        {"train.densify_start", &c.train_densify_start},
        {"train.densify_end", &c.train_densify_end},
        {"train.prune_opacity", &c.train_prune_opacity},
        {"train.budget", &c.train_budget},
        {"train.lr_position_final", &c.train_lr_position_final},
        {"train.size_threshold", &c.train_size_threshold},
        {"train.log_interval", &c.train_log_interval},
        {"hp.lr_position", &c.hp.lr_position},
        {"hp.lr_scale", &c.hp.lr_scale},
        {"hp.lr_rotation", &c.hp.lr_rotation},
        {"hp.lr_opacity", &c.hp.lr_opacity},
        {"hp.lr_color", &c.hp.lr_color},
        {"hp.density_threshold", &c.hp.density_threshold},
        {"hp.split_factor", &c.hp.split_factor},
        {"rlgs.K", &c.rlgs_K},
        {"rlgs.n_lr", &c.rlgs_n_lr},
        {"rlgs.n_ds", &c.rlgs_n_ds},
        {"rlgs.i_shuffle", &c.rlgs_i_shuffle},
        {"rlgs.reward_set_len", &c.rlgs_reward_set_len},
        {"rlgs.beta", &c.rlgs_beta},
        {"rlgs.hidden", &c.rlgs_hidden},
        {"rlgs.policy_lr", &c.rlgs_policy_lr},
        {"rlgs.grad_clip", &c.rlgs_grad_clip},
        {"rlgs.logsigma_base_init", &c.rlgs_logsigma_base_init},
        {"rlgs.ablate_no_rllr", &c.rlgs_ablate_no_rllr},
        {"rlgs.ablate_no_rlds", &c.rlgs_ablate_no_rlds},
        {"rlgs.ablate_no_gru", &c.rlgs_ablate_no_gru},
        {"rlgs.ablate_no_entropy", &c.rlgs_ablate_no_entropy},
        {"rlgs.ablate_no_loss_input", &c.rlgs_ablate_no_loss_input},
        {"rlgs.ablate_no_reward_sampling", &c.rlgs_ablate_no_reward_sampling},
        {"rlgs.force_zero_action", &c.rlgs_force_zero_action},
        {"rlgs.pin_default", &c.rlgs_pin_default},
        {"rlgs.reward_error_metric", &c.rlgs_reward_error_metric},
        {"rlgs.verify_rollback", &c.rlgs_verify_rollback},
        {"rlgs.verify_default_reward", &c.rlgs_verify_default_reward},
        {"search.n_trials", &c.search_n_trials},
        {"search.range_factor", &c.search_range_factor},
    };
}

void assign_key(const std::string& key, KeyRef ref, const nlohmann::json& v) {
    try {
        std::visit(
            [&](auto* p) {
                using T = std::remove_pointer_t<decltype(p)>;
                *p = v.get<T>();
            },
            ref);
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad value type for config key '" + key + "'");
    }
}

void validate(const RunConfig& c) {
    if (c.data_mode != "procedural" && c.data_mode != "image")
        throw ConfigError("data.mode must be 'procedural' or 'image'");
    if (c.data_views < 10) throw ConfigError("data.views must be >= 10");
    if (c.rlgs_K <= 0 || c.train_total_iters % c.rlgs_K != 0)
        throw ConfigError("rlgs.K must divide train.total_iters");
    if (c.train_densify_start <= 0 || c.train_densify_end < c.train_densify_start ||
        c.train_densify_end > c.train_total_iters)
        throw ConfigError("densify bounds must satisfy 0 < start <= end <= total_iters");
    if (c.train_prune_opacity <= 0.0 || c.train_prune_opacity >= 1.0)
        throw ConfigError("train.prune_opacity must lie in (0,1)");
    const int pool = c.data_views - (c.data_views + 7) / 8;
    if (c.rlgs_reward_set_len >= pool)
        throw ConfigError("rlgs.reward_set_len must be smaller than the training pool");
    for (double v : hp_to_vector(c.hp))
        if (v <= 0.0) throw ConfigError("hyperparameters must be strictly positive");
    if (c.hp.split_factor <= 1.0) throw ConfigError("hp.split_factor must exceed 1");
}

double bilinear(const Image& img, double x, double y, int ch) {
    x = std::clamp(x - 0.5, 0.0, static_cast<double>(img.width - 1));
    y = std::clamp(y - 0.5, 0.0, static_cast<double>(img.height - 1));
    const int x0 = std::min(static_cast<int>(x), img.width - 2 >= 0 ? img.width - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), img.height - 2 >= 0 ? img.height - 2 : 0);
    const double fx = x - x0, fy = y - y0;
    return (1 - fy) * ((1 - fx) * img.at(y0, x0, ch) + fx * img.at(y0, x0 + 1, ch)) +
           fy * ((1 - fx) * img.at(y0 + 1, x0, ch) + fx * img.at(y0 + 1, x0 + 1, ch));
}

Image resize_bilinear(const Image& src, int h, int w) {
    Image out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sx = (x + 0.5) * src.width / w;
            const double sy = (y + 0.5) * src.height / h;
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = bilinear(src, sx, sy, c);
        }
    }
    return out;
}

}  // namespace

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.total_iters = train_total_iters;
    t.densify_interval = train_densify_interval;
    t.densify_start = train_densify_start;
    t.densify_end = train_densify_end;
    t.prune_opacity = train_prune_opacity;
    t.budget = train_budget;
    t.lr_position_final = train_lr_position_final;
    t.size_threshold = train_size_threshold;
    t.log_interval = train_log_interval;
    t.height = data_canvas;
    t.width = data_canvas;
    t.seed = seed;
    return t;
}

RlgsConfig RunConfig::rlgs_config() const {
    RlgsConfig r;
    r.K = rlgs_K;
    r.n_lr = rlgs_n_lr;
    r.n_ds = rlgs_n_ds;
    r.i_shuffle = rlgs_i_shuffle;
    r.reward_set_len = rlgs_reward_set_len;
    r.beta = rlgs_beta;
    r.hidden = rlgs_hidden;
    r.policy_lr = rlgs_policy_lr;
    r.grad_clip = rlgs_grad_clip;
    r.logsigma_base_init = rlgs_logsigma_base_init;
    r.ablate_no_rllr = rlgs_ablate_no_rllr;
    r.ablate_no_rlds = rlgs_ablate_no_rlds;
    r.ablate_no_gru = rlgs_ablate_no_gru;
    r.ablate_no_entropy = rlgs_ablate_no_entropy;
    r.ablate_no_loss_input = rlgs_ablate_no_loss_input;
    r.ablate_no_reward_sampling = rlgs_ablate_no_reward_sampling;
    r.force_zero_action = rlgs_force_zero_action;
    r.pin_default = rlgs_pin_default;
    r.reward_error_metric = rlgs_reward_error_metric;
    r.verify_rollback = rlgs_verify_rollback;
    r.verify_default_reward = rlgs_verify_default_reward;
    return r;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    RunConfig cfg;
    auto keys = config_keys(cfg);
    for (const auto& [k, v] : j.items()) {
        if (!k.empty() && k[0] == '_') continue;  // comment keys
        auto it = std::find_if(keys.begin(), keys.end(),
                               [&](const auto& e) { return e.first == k; });
        if (it == keys.end()) throw ConfigError("unknown config key '" + k + "'");
        assign_key(k, it->second, v);
    }
    validate(cfg);
    return cfg;
}

void apply_config_overrides(RunConfig& cfg,
                            const std::vector<std::pair<std::string, std::string>>& kv) {
    auto keys = config_keys(cfg);
    for (const auto& [k, raw] : kv) {
        auto it = std::find_if(keys.begin(), keys.end(),
                               [&](const auto& e) { return e.first == k; });
        if (it == keys.end()) throw ConfigError("unknown config key '" + k + "'");
        nlohmann::json v;
        if (std::holds_alternative<std::string*>(it->second)) {
            v = raw;
        } else {
            try {
                v = nlohmann::json::parse(raw);
            } catch (const nlohmann::json::exception&) {
                throw ConfigError("cannot parse override value for '" + k + "': " + raw);
            }
        }
        assign_key(k, it->second, v);
    }
    validate(cfg);
}

std::string resolved_config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    auto keys = config_keys(const_cast<RunConfig&>(cfg));
    for (const auto& [k, ref] : keys)
        std::visit([&](auto* p) { j[k] = *p; }, ref);
    return j.dump(2) + "\n";
}

void write_resolved_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << resolved_config_json(cfg);
}

Dataset synth_dataset(const RunConfig& cfg, Rng& rng) {
    const int canvas = cfg.data_canvas;
    const Vec2 center{canvas / 2.0, canvas / 2.0};

    SplatScene gt;
    Image source;
    if (cfg.data_mode == "procedural") {
        gt.budget = cfg.data_gt_splats;
        for (int i = 0; i < cfg.data_gt_splats; ++i) {
            Splat2D s;
            s.position = {(0.1 + 0.8 * draw_uniform(rng)) * canvas,
                          (0.1 + 0.8 * draw_uniform(rng)) * canvas};
            const double sx = (2.0 + 6.0 * draw_uniform(rng)) * canvas / 64.0;
            const double sy = (2.0 + 6.0 * draw_uniform(rng)) * canvas / 64.0;
            s.log_scale = {std::log(sx), std::log(sy)};
            s.rotation = draw_uniform(rng) * 2.0 * M_PI;
            s.color = {draw_uniform(rng), draw_uniform(rng), draw_uniform(rng)};
            const double op = 0.4 + 0.55 * draw_uniform(rng);
            s.opacity_logit = std::log(op / (1.0 - op));
            s.depth = draw_uniform(rng);
            gt.splats.push_back(s);
        }
    } else {
        source = resize_bilinear(read_ppm(cfg.data_image_path), canvas, canvas);
    }

    Dataset data;
    for (int i = 0; i < cfg.data_views; ++i) {
        AffineView v;
        v.id = i;
        if (i > 0) {
            const double theta = (draw_uniform(rng) * 2.0 - 1.0) *
                                 cfg.data_jitter_rotation_deg * kDegToRad;
            const double scale = 1.0 + (draw_uniform(rng) * 2.0 - 1.0) * cfg.data_jitter_scale;
            const Vec2 t{(draw_uniform(rng) * 2.0 - 1.0) * cfg.data_jitter_translation * canvas,
                         (draw_uniform(rng) * 2.0 - 1.0) * cfg.data_jitter_translation * canvas};
            v.linear = Mat2::rotation(theta) * scale;
            // jitter about the canvas center
            v.translation = center - v.linear * center + t;
        }
        if (cfg.data_mode == "procedural") {
            v.target = rasterize(gt, v, canvas, canvas);
        } else {
            const Mat2 inv = v.linear.inverse();
            Image target(canvas, canvas);
            for (int y = 0; y < canvas; ++y) {
                for (int x = 0; x < canvas; ++x) {
                    const Vec2 p = inv * (Vec2{x + 0.5, y + 0.5} - v.translation);
                    for (int c = 0; c < 3; ++c) target.at(y, x, c) = bilinear(source, p.x, p.y, c);
                }
            }
            v.target = std::move(target);
        }
        if (i % 8 == 0)
            data.test_views.push_back(std::move(v));
        else
            data.train_pool.push_back(std::move(v));
    }
    return data;
}

SplatScene init_scene(const RunConfig& cfg, Rng& rng) {
    const int canvas = cfg.data_canvas;
    const int g = cfg.init_grid;
    const double cell = static_cast<double>(canvas) / g;
    SplatScene scene;
    scene.budget = cfg.train_budget;
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            Splat2D s;
            s.position = {(j + 0.5) * cell + (draw_uniform(rng) - 0.5) * 0.6 * cell,
                          (i + 0.5) * cell + (draw_uniform(rng) - 0.5) * 0.6 * cell};
            s.log_scale = {std::log(cfg.init_scale), std::log(cfg.init_scale)};
            s.rotation = 0.0;
            s.color = {cfg.init_color, cfg.init_color, cfg.init_color};
            s.opacity_logit = std::log(cfg.init_opacity / (1.0 - cfg.init_opacity));
            s.depth = draw_uniform(rng);
            scene.splats.push_back(s);
        }
    }
    return scene;
}

Trainer make_trainer(const RunConfig& cfg, const Dataset& data, std::uint64_t seed) {
    Rng scene_rng(seed * 0x9e3779b97f4a7c15ULL + 11);
    SplatScene scene = init_scene(cfg, scene_rng);
    TrainConfig tc = cfg.train_config();
    tc.seed = seed;
    return Trainer(std::move(scene), data.train_pool, data.test_views, cfg.hp, tc);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

void join_csv(std::ostream& out, const std::vector<double>& v) {
    out << "\"";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ";" : "") << v[i];
    out << "\"";
}

}  // namespace

void write_metrics_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    auto out = open_out(path);
    out << "iteration,train_loss,test_psnr,test_ssim,splat_count\r\n";
    for (const TraceRow& r : trace)
        out << r.iter << "," << r.train_loss << "," << r.test_psnr << "," << r.test_ssim
            << "," << r.splat_count << "\r\n";
}

void write_phases_csv(const std::vector<PhaseLog>& phases, const std::string& path) {
    auto out = open_out(path);
    out << "phase,t,prev_phase_loss,progress,mu_lr,sigma_lr,multipliers_lr,rewards_lr,"
           "mu_ds,sigma_ds,multipliers_ds,rewards_ds,"
           "chosen_lr_position,chosen_lr_scale,chosen_lr_rotation,chosen_lr_opacity,"
           "chosen_lr_color,chosen_density_threshold,chosen_split_factor,post_test_psnr\r\n";
    for (const PhaseLog& p : phases) {
        out << p.phase << "," << p.t << "," << p.state.prev_phase_loss << ","
            << p.state.progress << ",";
        join_csv(out, p.mu_lr); out << ",";
        join_csv(out, p.sigma_lr); out << ",";
        join_csv(out, p.multipliers_lr); out << ",";
        join_csv(out, p.rewards_lr); out << ",";
        join_csv(out, p.mu_ds); out << ",";
        join_csv(out, p.sigma_ds); out << ",";
        join_csv(out, p.multipliers_ds); out << ",";
        join_csv(out, p.rewards_ds); out << ",";
        out << p.chosen.lr_position << "," << p.chosen.lr_scale << ","
            << p.chosen.lr_rotation << "," << p.chosen.lr_opacity << ","
            << p.chosen.lr_color << "," << p.chosen.density_threshold << ","
            << p.chosen.split_factor << "," << p.post_test_psnr << "\r\n";
    }
}

void write_trials_csv(const std::vector<Trial>& trials, const std::string& path) {
    auto out = open_out(path);
    out << "trial,lr_position,lr_scale,lr_rotation,lr_opacity,lr_color,"
           "density_threshold,split_factor,objective,test_psnr,test_ssim,wallclock_s\r\n";
    for (const Trial& t : trials) {
        out << t.index;
        for (double v : t.point) out << "," << v;
        out << "," << t.objective << "," << t.test_psnr << "," << t.test_ssim << ","
            << t.wallclock_s << "\r\n";
    }
}

void emit_run_outputs(const RunConfig& cfg, Trainer& trainer,
                      const std::vector<TraceRow>& trace, const std::string& dir) {
    fs::create_directories(dir);
    write_metrics_csv(trace, dir + "/metrics.csv");
    for (std::size_t i = 0; i < trainer.test_views().size(); ++i) {
        std::ostringstream name;
        name << dir << "/test_" << std::setw(3) << std::setfill('0') << i << ".ppm";
        write_ppm(trainer.render_view(trainer.test_views()[i]), name.str());
    }
    save_scene_file(trainer.scene(), dir + "/scene.splat2d.txt");
    write_resolved_config(cfg, dir + "/config.resolved.json");
}

FitResult run_fit(const RunConfig& cfg, const std::string& out_dir) {
    Rng data_rng(cfg.seed);
    const Dataset data = synth_dataset(cfg, data_rng);
    Trainer trainer = make_trainer(cfg, data, cfg.seed);
    const auto trace = trainer.run();
    if (!out_dir.empty()) emit_run_outputs(cfg, trainer, trace, out_dir);
    const auto tm = trainer.test_metrics();
    return FitResult{trace, tm[0], tm[1], trainer.scene().count(), trainer.total_steps()};
}

FitResult run_tune_rlgs(const RunConfig& cfg, const std::string& out_dir) {
    Rng data_rng(cfg.seed);
    const Dataset data = synth_dataset(cfg, data_rng);
    Trainer trainer = make_trainer(cfg, data, cfg.seed);
    RlgsRunner runner(trainer, cfg.rlgs_config(), cfg.seed);
    const RlgsResult res = runner.run();
    if (!out_dir.empty()) {
        emit_run_outputs(cfg, trainer, res.trace, out_dir);
        write_phases_csv(res.phases, out_dir + "/phases.csv");
    }
    const auto tm = trainer.test_metrics();
    return FitResult{res.trace, tm[0], tm[1], trainer.scene().count(), res.total_steps};
}

SearchResult run_search(const RunConfig& cfg, bool use_tpe, const std::string& out_dir) {
    Rng data_rng(cfg.seed);
    const Dataset data = synth_dataset(cfg, data_rng);
    std::vector<int> all_train(data.train_pool.size());
    std::iota(all_train.begin(), all_train.end(), 0);

    const TrialFn fn = [&](const std::vector<double>& point) {
        RunConfig trial_cfg = cfg;
        trial_cfg.hp = vector_to_hp(point);
        Trainer trainer = make_trainer(trial_cfg, data, cfg.seed);
        trainer.run(trial_cfg.hp);
        TrialOutcome out;
        out.objective = trainer.mean_psnr_over(all_train);
        const auto tm = trainer.test_metrics();
        out.test_psnr = tm[0];
        out.test_ssim = tm[1];
        return out;
    };

    const SearchSpace space = SearchSpace::around(cfg.hp, cfg.search_range_factor);
    SearchResult res;
    if (use_tpe) {
        TpeOptions opt;
        opt.prior = hp_to_vector(cfg.hp);
        res = bo_search(space, cfg.search_n_trials, fn, cfg.seed, opt);
    } else {
        res = random_search(space, cfg.search_n_trials, fn, cfg.seed);
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_trials_csv(res.trials, out_dir + "/trials.csv");
        write_resolved_config(cfg, out_dir + "/config.resolved.json");
    }
    return res;
}

int run_ablate(const RunConfig& cfg, const std::string& out_dir) {
    struct Variant {
        const char* name;
        void (*apply)(RunConfig&);
    };
    const std::vector<Variant> variants = {
        {"full", [](RunConfig&) {}},
        {"no_rllr", [](RunConfig& c) { c.rlgs_ablate_no_rllr = true; }},
        {"no_rlds", [](RunConfig& c) { c.rlgs_ablate_no_rlds = true; }},
        {"no_gru", [](RunConfig& c) { c.rlgs_ablate_no_gru = true; }},
        {"no_entropy", [](RunConfig& c) { c.rlgs_ablate_no_entropy = true; }},
        {"no_loss_input", [](RunConfig& c) { c.rlgs_ablate_no_loss_input = true; }},
        {"no_reward_sampling", [](RunConfig& c) { c.rlgs_ablate_no_reward_sampling = true; }},
    };
    fs::create_directories(out_dir);
    auto out = open_out(out_dir + "/ablate.csv");
    out << "variant,no_rllr,no_rlds,no_gru,no_entropy,no_loss_input,no_reward_sampling,"
           "test_psnr,test_ssim,splat_count,total_steps\r\n";
    for (const Variant& v : variants) {
        RunConfig vcfg = cfg;
        v.apply(vcfg);
        const FitResult r = run_tune_rlgs(vcfg, out_dir + "/" + v.name);
        out << v.name << "," << vcfg.rlgs_ablate_no_rllr << "," << vcfg.rlgs_ablate_no_rlds
            << "," << vcfg.rlgs_ablate_no_gru << "," << vcfg.rlgs_ablate_no_entropy << ","
            << vcfg.rlgs_ablate_no_loss_input << "," << vcfg.rlgs_ablate_no_reward_sampling
            << "," << r.final_test_psnr << "," << r.final_test_ssim << "," << r.splat_count
            << "," << r.total_steps << "\r\n";
    }
    write_resolved_config(cfg, out_dir + "/config.resolved.json");
    return 0;
}

int run_report(const std::string& dir, std::string* out_table) {
    if (!fs::exists(dir)) {
        if (out_table) *out_table = "report: directory does not exist: " + dir;
        return 2;
    }
    std::ostringstream table;
    table << "source,kind,metric,value\n";
    int found = 0;
    auto last_csv_row = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line, last;
        std::getline(in, line);  // header
        while (std::getline(in, line))
            if (!line.empty() && line != "\r") last = line;
        return last;
    };
    std::vector<fs::path> paths;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        const std::string name = p.filename().string();
        if (name == "metrics.csv") {
            const std::string row = last_csv_row(p);
            if (row.empty()) continue;
            std::stringstream ss(row);
            std::string iter, loss, psnr, ssim;
            std::getline(ss, iter, ',');
            std::getline(ss, loss, ',');
            std::getline(ss, psnr, ',');
            std::getline(ss, ssim, ',');
            table << p.parent_path().filename().string() << ",run,final_test_psnr," << psnr << "\n";
            table << p.parent_path().filename().string() << ",run,final_test_ssim," << ssim << "\n";
            ++found;
        } else if (name == "trials.csv") {
            std::ifstream in(p);
            std::string line;
            std::getline(in, line);
            double best = -1e300;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::stringstream ss(line);
                std::string f;
                for (int i = 0; i < 9 && std::getline(ss, f, ','); ++i) {}
                if (!f.empty()) best = std::max(best, std::stod(f));
            }
            table << p.parent_path().filename().string() << ",search,best_objective," << best << "\n";
            ++found;
        } else if (name == "ablate.csv") {
            std::ifstream in(p);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty() || line == "\r") continue;
                std::stringstream ss(line);
                std::string variant, f;
                std::getline(ss, variant, ',');
                for (int i = 0; i < 7 && std::getline(ss, f, ','); ++i) {}
                table << p.parent_path().filename().string() << "/" << variant
                      << ",ablation,test_psnr," << f << "\n";
            }
            ++found;
        }
    }
    if (out_table) *out_table = table.str();
    if (found == 0) {
        if (out_table) *out_table = "report: no metrics.csv, trials.csv or ablate.csv under " + dir;
        return 2;
    }
    std::ofstream out(fs::path(dir) / "summary.csv");
    out << table.str();
    return 0;
}

}  // namespace gs2d
