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

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gs2d/baselines.hpp"
#include "gs2d/rlgs.hpp"
#include "gs2d/trainer.hpp"

namespace gs2d {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat configuration for a whole run; maps one-to-one onto the dotted-key
/// JSON config format (keys beginning with "_" are ignored as comments).
struct RunConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    std::string data_mode = "procedural";  // procedural | image
    std::string data_image_path;
    int data_views = 16;
    int data_canvas = 64;
    int data_gt_splats = 250;
    double data_jitter_rotation_deg = 15.0;
    double data_jitter_scale = 0.15;
    double data_jitter_translation = 0.10;  // fraction of canvas extent

    int init_grid = 8;
    double init_scale = 2.0;
    double init_opacity = 0.1;
    double init_color = 0.5;

    int train_total_iters = 2000;
    int train_densify_interval = 50;
    int train_densify_start = 200;
    int train_densify_end = 1200;
    double train_prune_opacity = 0.005;
    int train_budget = 2000;
    double train_lr_position_final = 0.002;
    double train_size_threshold = 0.64;
    int train_log_interval = 50;

    HyperParams hp;

    int rlgs_K = 20;
    int rlgs_n_lr = 4;
    int rlgs_n_ds = 2;
    int rlgs_i_shuffle = 1000;
    int rlgs_reward_set_len = 2;
    double rlgs_beta = 0.01;
    int rlgs_hidden = 32;
    double rlgs_policy_lr = 1e-4;
    double rlgs_grad_clip = 2.4;
    double rlgs_logsigma_base_init = 0.0;
    bool rlgs_ablate_no_rllr = false;
    bool rlgs_ablate_no_rlds = false;
    bool rlgs_ablate_no_gru = false;
    bool rlgs_ablate_no_entropy = false;
    bool rlgs_ablate_no_loss_input = false;
    bool rlgs_ablate_no_reward_sampling = false;
    bool rlgs_force_zero_action = false;
    bool rlgs_pin_default = false;
    bool rlgs_reward_error_metric = false;
    bool rlgs_verify_rollback = false;
    bool rlgs_verify_default_reward = false;

    int search_n_trials = 16;
    double search_range_factor = 5.0;

    TrainConfig train_config() const;
    RlgsConfig rlgs_config() const;
};

// Dotted-key JSON config I/O. parse errors throw ConfigError.
RunConfig load_config_file(const std::string& path);
void apply_config_overrides(RunConfig& cfg,
                            const std::vector<std::pair<std::string, std::string>>& kv);
void write_resolved_config(const RunConfig& cfg, const std::string& path);
std::string resolved_config_json(const RunConfig& cfg);

struct Dataset {
    std::vector<AffineView> train_pool;
    std::vector<AffineView> test_views;
};

/// V affine views of either a random ground-truth splat scene or a warped
/// raster image; every 8th view (0, 8, ...) is test.
Dataset synth_dataset(const RunConfig& cfg, Rng& rng);

/// Jittered-grid initialization: small isotropic scales, mid-gray color,
/// low opacity, random depth keys.
SplatScene init_scene(const RunConfig& cfg, Rng& rng);

Trainer make_trainer(const RunConfig& cfg, const Dataset& data, std::uint64_t seed);

// Output files for one run directory.
void write_metrics_csv(const std::vector<TraceRow>& trace, const std::string& path);
void write_phases_csv(const std::vector<PhaseLog>& phases, const std::string& path);
void write_trials_csv(const std::vector<Trial>& trials, const std::string& path);
void emit_run_outputs(const RunConfig& cfg, Trainer& trainer,
                      const std::vector<TraceRow>& trace, const std::string& dir);

struct FitResult {
    std::vector<TraceRow> trace;
    double final_test_psnr = 0.0;
    double final_test_ssim = 0.0;
    int splat_count = 0;
    long total_steps = 0;
};

FitResult run_fit(const RunConfig& cfg, const std::string& out_dir);
FitResult run_tune_rlgs(const RunConfig& cfg, const std::string& out_dir);
SearchResult run_search(const RunConfig& cfg, bool use_tpe, const std::string& out_dir);
int run_ablate(const RunConfig& cfg, const std::string& out_dir);
int run_report(const std::string& dir, std::string* out_table = nullptr);

int cli_main(int argc, const char* const* argv);

}  // namespace gs2d
