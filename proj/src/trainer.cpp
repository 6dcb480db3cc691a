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

#include "gs2d/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gs2d/rasterize.hpp"

namespace gs2d {
namespace {

double adam_step(double lr, double g, double& m, double& v, double bc1, double bc2) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * g * g;
    return lr * (m / bc1) / (std::sqrt(v / bc2) + kAdamEps);
}

}  // namespace

Trainer::Trainer(SplatScene scene, std::vector<AffineView> train_views,
                 std::vector<AffineView> test_views, HyperParams hp_orig, TrainConfig cfg)
    : scene_(std::move(scene)),
      train_views_(std::move(train_views)),
      test_views_(std::move(test_views)),
      hp_orig_(hp_orig),
      cfg_(cfg),
      rng_(cfg.seed) {
    opt_.moments.assign(scene_.splats.size(), AdamMoments{});
    stats_.resize_zero(scene_.splats.size());
    sampler_.pool.resize(train_views_.size());
    std::iota(sampler_.pool.begin(), sampler_.pool.end(), 0);
}

double Trainer::effective_lr_position(const HyperParams& hp, long t) const {
    const double ratio = cfg_.lr_position_final / hp.lr_position;
    const double frac = static_cast<double>(t) / static_cast<double>(cfg_.total_iters);
    return hp.lr_position * std::exp(std::log(ratio) * frac);
}

double Trainer::train_step(int view_idx, const HyperParams& hp) {
    const AffineView& view = train_views_.at(view_idx);
    const Image rendered = rasterize(scene_, view, cfg_.height, cfg_.width);
    const double loss = l1(rendered, view.target);

    Image upstream(cfg_.height, cfg_.width);
    const double inv_n = 1.0 / static_cast<double>(rendered.pixels.size());
    for (std::size_t i = 0; i < rendered.pixels.size(); ++i) {
        const double d = rendered.pixels[i] - view.target.pixels[i];
        upstream.pixels[i] = d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
    }
    const SceneGradients g = rasterize_backward(scene_, view, upstream);

    for (std::size_t i = 0; i < scene_.splats.size(); ++i) {
        stats_.pos_grad_accum[i] += g.d_position[i].norm();
        stats_.accum_count[i] += 1;
    }

    const double lr_pos = effective_lr_position(hp, t_);
    for (int gi = 0; gi < 5; ++gi) opt_.steps[gi] += 1;
    const double bc_pos1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(opt_.steps[0]));
    const double bc_pos2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(opt_.steps[0]));
    // all groups share the step count cadence (one step per iteration)
    for (std::size_t i = 0; i < scene_.splats.size(); ++i) {
        Splat2D& s = scene_.splats[i];
        AdamMoments& mo = opt_.moments[i];
        s.position.x -= adam_step(lr_pos, g.d_position[i].x, mo.m_pos.x, mo.v_pos.x, bc_pos1, bc_pos2);
        s.position.y -= adam_step(lr_pos, g.d_position[i].y, mo.m_pos.y, mo.v_pos.y, bc_pos1, bc_pos2);
        s.log_scale.x -= adam_step(hp.lr_scale, g.d_log_scale[i].x, mo.m_ls.x, mo.v_ls.x, bc_pos1, bc_pos2);
        s.log_scale.y -= adam_step(hp.lr_scale, g.d_log_scale[i].y, mo.m_ls.y, mo.v_ls.y, bc_pos1, bc_pos2);
        s.rotation -= adam_step(hp.lr_rotation, g.d_rotation[i], mo.m_rot, mo.v_rot, bc_pos1, bc_pos2);
        s.opacity_logit -= adam_step(hp.lr_opacity, g.d_opacity_logit[i], mo.m_op, mo.v_op, bc_pos1, bc_pos2);
        for (int c = 0; c < 3; ++c) {
            s.color[c] -= adam_step(hp.lr_color, g.d_color[i][c], mo.m_col[c], mo.v_col[c], bc_pos1, bc_pos2);
            s.color[c] = std::clamp(s.color[c], 0.0, 1.0);
        }
    }

    ++t_;
    ++total_steps_;
    return loss;
}

int Trainer::densify(const HyperParams& hp, Rng& rng) {
    const std::size_t n0 = scene_.splats.size();
    int added = 0;
    const double ln_split = std::log(std::max(hp.split_factor, 1.01));
    for (std::size_t i = 0; i < n0; ++i) {
        const int cnt = stats_.accum_count[i];
        if (cnt == 0) continue;
        const double mean_grad = stats_.pos_grad_accum[i] / static_cast<double>(cnt);
        if (mean_grad <= hp.density_threshold) continue;
        if (scene_.count() >= scene_.budget) break;

        Splat2D& s = scene_.splats[i];
        const double max_scale = std::exp(std::max(s.log_scale.x, s.log_scale.y));
        if (max_scale < cfg_.size_threshold) {
            Splat2D clone = s;
            clone.position = sample_from_splat(s, rng);
            scene_.splats.push_back(clone);
            opt_.moments.push_back(AdamMoments{});
            ++added;
        } else {
            const Splat2D parent = s;
            Splat2D child = parent;
            child.log_scale.x -= ln_split;
            child.log_scale.y -= ln_split;
            Splat2D child2 = child;
            child.position = sample_from_splat(parent, rng);
            child2.position = sample_from_splat(parent, rng);
            s = child;
            opt_.moments[i] = AdamMoments{};
            scene_.splats.push_back(child2);
            opt_.moments.push_back(AdamMoments{});
            ++added;
        }
    }
    stats_.resize_zero(scene_.splats.size());
    return added;
}

int Trainer::prune(double eps) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < scene_.splats.size(); ++i) {
        if (logistic(scene_.splats[i].opacity_logit) < eps) continue;
        if (out != i) {
            scene_.splats[out] = scene_.splats[i];
            opt_.moments[out] = opt_.moments[i];
            stats_.pos_grad_accum[out] = stats_.pos_grad_accum[i];
            stats_.accum_count[out] = stats_.accum_count[i];
        }
        ++out;
    }
    const int removed = static_cast<int>(scene_.splats.size() - out);
    scene_.splats.resize(out);
    opt_.moments.resize(out);
    stats_.pos_grad_accum.resize(out);
    stats_.accum_count.resize(out);
    stats_.d_position.resize(out);
    stats_.d_log_scale.resize(out);
    stats_.d_rotation.resize(out);
    stats_.d_color.resize(out);
    stats_.d_opacity_logit.resize(out);
    return removed;
}

Snapshot Trainer::snapshot() const {
    return Snapshot{scene_, opt_, stats_, t_, rng_, sampler_};
}

void Trainer::restore(const Snapshot& s) {
    scene_ = s.scene;
    opt_ = s.opt;
    stats_ = s.stats;
    t_ = s.iter;
    rng_ = s.rng;
    sampler_ = s.sampler;
}

bool Trainer::state_equals(const Snapshot& s) const {
    return scene_ == s.scene && opt_ == s.opt && stats_ == s.stats && t_ == s.iter &&
           rng_ == s.rng && sampler_ == s.sampler;
}

int Trainer::next_view() {
    if (sampler_.cursor >= sampler_.order.size()) {
        sampler_.order = sampler_.pool;
        shuffle_vec(sampler_.order, rng_);
        sampler_.cursor = 0;
    }
    return sampler_.order[sampler_.cursor++];
}

void Trainer::set_pool(std::vector<int> pool) {
    sampler_.pool = std::move(pool);
    sampler_.order.clear();
    sampler_.cursor = 0;
}

Image Trainer::render_view(const AffineView& v) const {
    return rasterize(scene_, v, cfg_.height, cfg_.width);
}

double Trainer::mean_psnr_over(const std::vector<int>& view_ids) const {
    double acc = 0.0;
    for (int id : view_ids) {
        const AffineView& v = train_views_.at(id);
        acc += psnr(render_view(v), v.target);
    }
    return acc / static_cast<double>(view_ids.size());
}

double Trainer::mean_train_loss() const {
    double acc = 0.0;
    for (int id : sampler_.pool) {
        const AffineView& v = train_views_.at(id);
        acc += l1(render_view(v), v.target);
    }
    return acc / static_cast<double>(sampler_.pool.size());
}

std::array<double, 2> Trainer::test_metrics() const {
    double p = 0.0, s = 0.0;
    for (const AffineView& v : test_views_) {
        const Image r = render_view(v);
        p += psnr(r, v.target);
        s += ssim(r, v.target);
    }
    const double n = static_cast<double>(test_views_.size());
    return {p / n, s / n};
}

TraceRow Trainer::make_row(long t, double window_loss) const {
    const auto tm = test_metrics();
    return TraceRow{t, window_loss, tm[0], tm[1], scene_.count()};
}

bool Trainer::densify_due(long t) const {
    return t % cfg_.densify_interval == 0 && t >= cfg_.densify_start && t <= cfg_.densify_end;
}

std::vector<TraceRow> Trainer::run(const HyperParams& hp) {
    std::vector<TraceRow> trace;
    trace.push_back(make_row(0, mean_train_loss()));
    double window = 0.0;
    int window_n = 0;
    for (long t = 1; t <= cfg_.total_iters; ++t) {
        const double loss = train_step(next_view(), hp);
        window += loss;
        ++window_n;
        if (densify_due(t)) {
            densify(hp, rng_);
            prune(cfg_.prune_opacity);
        }
        if (t % cfg_.log_interval == 0) {
            trace.push_back(make_row(t, window / window_n));
            window = 0.0;
            window_n = 0;
        }
    }
    return trace;
}

}  // namespace gs2d
