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

#include <array>
#include <vector>

#include "gs2d/metrics.hpp"
#include "gs2d/splat.hpp"

namespace gs2d {

/// The seven tunable hyperparameters: five per-group learning rates plus the
/// two densification knobs.
struct HyperParams {
    double lr_position = 0.3;
    double lr_scale = 0.1;
    double lr_rotation = 0.02;
    double lr_opacity = 0.025;
    double lr_color = 0.2;
    double density_threshold = 1e-3;
    double split_factor = 1.6;

    bool operator==(const HyperParams&) const = default;
};

struct TrainConfig {
    int total_iters = 2000;
    int densify_interval = 50;
    int densify_start = 200;
    int densify_end = 1200;
    double prune_opacity = 0.005;
    int budget = 2000;
    double lr_position_final = 0.002;
    double size_threshold = 0.64;  // clone-vs-split cutoff, canvas units
    int log_interval = 50;
    int height = 64;
    int width = 64;
    std::uint64_t seed = 1;
};

struct AdamMoments {
    Vec2 m_pos, v_pos, m_ls, v_ls;
    double m_rot = 0.0, v_rot = 0.0;
    Vec3 m_col{0, 0, 0}, v_col{0, 0, 0};
    double m_op = 0.0, v_op = 0.0;

    bool operator==(const AdamMoments&) const = default;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-15;

struct OptimizerState {
    std::vector<AdamMoments> moments;          // mirrors scene splat order
    std::array<long, 5> steps{0, 0, 0, 0, 0};  // position, scale, rotation, opacity, color

    bool operator==(const OptimizerState&) const = default;
};

struct ViewSampler {
    std::vector<int> pool;   // indices into the training-view list
    std::vector<int> order;  // current epoch permutation
    std::size_t cursor = 0;

    bool operator==(const ViewSampler&) const = default;
};

/// Bit-exact capture of everything a rollout can disturb.
struct Snapshot {
    SplatScene scene;
    OptimizerState opt;
    SceneGradients stats;
    long iter = 0;
    Rng rng;
    ViewSampler sampler;

    bool operator==(const Snapshot&) const = default;
};

struct TraceRow {
    long iter = 0;
    double train_loss = 0.0;
    double test_psnr = 0.0;
    double test_ssim = 0.0;
    int splat_count = 0;

    bool operator==(const TraceRow&) const = default;
};

class Trainer {
public:
    Trainer(SplatScene scene, std::vector<AffineView> train_views,
            std::vector<AffineView> test_views, HyperParams hp_orig, TrainConfig cfg);

    /// One optimization step against `train_views[view_idx]`: render, L1
    /// loss, analytic backward, per-group Adam update (position lr decayed
    /// log-linearly toward lr_position_final), color clamp, densification
    /// statistics. Returns the loss.
    double train_step(int view_idx, const HyperParams& hp);

    /// Clone/split splats whose mean accumulated positional-gradient norm
    /// exceeds the threshold, capped at the budget; resets the statistics.
    int densify(const HyperParams& hp, Rng& rng);

    /// Drop splats with opacity below eps, with their moments and stats.
    int prune(double eps);

    Snapshot snapshot() const;
    void restore(const Snapshot& s);
    bool state_equals(const Snapshot& s) const;

    /// Plain training loop: total_iters steps with epoch-shuffled view
    /// sampling, densify+prune on schedule, rows every log_interval.
    std::vector<TraceRow> run(const HyperParams& hp);
    std::vector<TraceRow> run() { return run(hp_orig_); }

    int next_view();
    void set_pool(std::vector<int> pool);
    const std::vector<int>& pool() const { return sampler_.pool; }

    Image render_view(const AffineView& v) const;
    double mean_psnr_over(const std::vector<int>& view_ids) const;
    double mean_train_loss() const;  // over the current pool
    std::array<double, 2> test_metrics() const;  // {psnr, ssim} mean over test views
    TraceRow make_row(long t, double window_loss) const;

    double effective_lr_position(const HyperParams& hp, long t) const;

    bool densify_due(long t) const;

    long iter() const { return t_; }
    Rng& rng() { return rng_; }
    long total_steps() const { return total_steps_; }
    const SplatScene& scene() const { return scene_; }
    const TrainConfig& config() const { return cfg_; }
    const HyperParams& defaults() const { return hp_orig_; }
    const std::vector<AffineView>& train_views() const { return train_views_; }
    const std::vector<AffineView>& test_views() const { return test_views_; }
    const SceneGradients& stats() const { return stats_; }
    const OptimizerState& optimizer() const { return opt_; }

private:
    SplatScene scene_;
    std::vector<AffineView> train_views_;
    std::vector<AffineView> test_views_;
    HyperParams hp_orig_;
    TrainConfig cfg_;
    OptimizerState opt_;
    SceneGradients stats_;
    long t_ = 0;
    Rng rng_;
    ViewSampler sampler_;
    long total_steps_ = 0;  // lifetime step counter, survives restore
};

}  // namespace gs2d
