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

#include "gs2d/rlgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gs2d {

HyperParams apply_action(const HyperParams& h_orig, const std::vector<double>& m,
                         ActionGroup which, bool* warned) {
    HyperParams h = h_orig;
    if (warned) *warned = false;
    if (which == ActionGroup::lr) {
        if (m.size() != 5) throw std::invalid_argument("lr action needs 5 multipliers");
        h.lr_position *= m[0];
        h.lr_scale *= m[1];
        h.lr_rotation *= m[2];
        h.lr_opacity *= m[3];
        h.lr_color *= m[4];
    } else {
        if (m.size() != 2) throw std::invalid_argument("ds action needs 2 multipliers");
        h.density_threshold *= m[0];
        h.split_factor *= m[1];
        if (h.split_factor <= 1.0) {
            h.split_factor = 1.01;
            if (warned) *warned = true;
        }
    }
    return h;
}

ViewSplit draw_view_split(int pool_size, int reward_set_len, long t, Rng& rng,
                          bool no_withholding) {
    std::vector<int> all(pool_size);
    std::iota(all.begin(), all.end(), 0);
    shuffle_vec(all, rng);
    ViewSplit s;
    s.last_shuffle = t;
    s.reward_views.assign(all.begin(), all.begin() + reward_set_len);
    if (no_withholding) {
        s.training_views.resize(pool_size);
        std::iota(s.training_views.begin(), s.training_views.end(), 0);
    } else {
        s.training_views.assign(all.begin() + reward_set_len, all.end());
    }
    return s;
}

ViewSplit maybe_reshuffle_views(const ViewSplit& split, long t, int pool_size,
                                int reward_set_len, int i_shuffle, Rng& rng,
                                bool no_withholding) {
    if (t - split.last_shuffle < i_shuffle) return split;
    return draw_view_split(pool_size, reward_set_len, t, rng, no_withholding);
}

RlgsRunner::RlgsRunner(Trainer& trainer, RlgsConfig cfg, std::uint64_t seed)
    : trainer_(trainer),
      cfg_(cfg),
      pi_lr_(5, cfg.hidden, !cfg.ablate_no_gru, seed * 0x9e3779b97f4a7c15ULL + 1,
             cfg.logsigma_base_init),
      pi_ds_(2, cfg.hidden, !cfg.ablate_no_gru, seed * 0x9e3779b97f4a7c15ULL + 2,
             cfg.logsigma_base_init),
      policy_rng_(seed * 0x9e3779b97f4a7c15ULL + 3),
      split_rng_(seed * 0x9e3779b97f4a7c15ULL + 4) {
    split_ = draw_view_split(static_cast<int>(trainer_.train_views().size()),
                             cfg_.reward_set_len, 0, split_rng_,
                             cfg_.ablate_no_reward_sampling);
}

double RlgsRunner::reward_from(double metric, double metric_orig) const {
    const double r = metric - metric_orig;
    return cfg_.reward_error_metric ? -r : r;
}

double RlgsRunner::rollout_eval(const HyperParams& h, const std::vector<int>& views,
                                bool do_densify, std::uint64_t densify_seed) {
    const Snapshot snap = trainer_.snapshot();
    if (do_densify) {
        Rng sub(densify_seed);
        trainer_.densify(h, sub);
        trainer_.prune(trainer_.config().prune_opacity);
    }
    bool finite = true;
    for (int vi : views) {
        const double loss = trainer_.train_step(vi, h);
        if (!std::isfinite(loss)) {
            finite = false;
            break;
        }
    }
    double metric = std::numeric_limits<double>::quiet_NaN();
    if (finite) metric = trainer_.mean_psnr_over(split_.reward_views);
    trainer_.restore(snap);
    return metric;
}

RlgsResult RlgsRunner::run() {
    RlgsResult res;
    const TrainConfig& tc = trainer_.config();
    const HyperParams h_orig = trainer_.defaults();
    const long T = tc.total_iters;
    const int K = cfg_.K;

    // Controller fully disabled: degenerate to the plain training loop so
    // the trace matches the vanilla trainer bit for bit.
    if (cfg_.n_lr == 0 && cfg_.n_ds == 0) {
        res.trace = trainer_.run(h_orig);
        res.total_steps = trainer_.total_steps();
        return res;
    }

    const int pool_size = static_cast<int>(trainer_.train_views().size());
    trainer_.set_pool(split_.training_views);  // split drawn at construction

    res.trace.push_back(trainer_.make_row(0, trainer_.mean_train_loss()));

    const long phases = T / K;
    double prev_loss = 0.0;
    double window = 0.0;
    int window_n = 0;
    const bool run_lr = cfg_.n_lr > 0 && !cfg_.ablate_no_rllr;
    const bool run_ds = cfg_.n_ds > 0 && !cfg_.ablate_no_rlds;

    for (long j = 0; j < phases; ++j) {
        const long t0 = j * K;

        const ViewSplit next = maybe_reshuffle_views(split_, t0, pool_size,
                                                     cfg_.reward_set_len, cfg_.i_shuffle,
                                                     split_rng_, cfg_.ablate_no_reward_sampling);
        if (next.last_shuffle != split_.last_shuffle) {
            split_ = next;
            trainer_.set_pool(split_.training_views);
        }

        // Matched substreams: the phase's view sequence and densify noise are
        // drawn once and reused by the baseline, every candidate rollout, and
        // the real steps.
        std::vector<int> views(K);
        for (int k = 0; k < K; ++k) views[k] = trainer_.next_view();
        bool has_densify = false;
        for (int k = 1; k <= K; ++k)
            if (trainer_.densify_due(t0 + k)) has_densify = true;
        const std::uint64_t densify_seed = has_densify ? trainer_.rng()() : 0;

        const Snapshot snap = trainer_.snapshot();
        const PhaseState state = build_state(prev_loss, t0, T, cfg_.ablate_no_loss_input);
        const double beta_eff = cfg_.ablate_no_entropy ? 0.0 : cfg_.beta;

        PhaseLog plog;
        plog.phase = static_cast<int>(j);
        plog.t = t0;
        plog.state = state;

        const double m_orig = rollout_eval(h_orig, views, false, 0);
        if (cfg_.verify_default_reward) {
            const double again = rollout_eval(h_orig, views, false, 0);
            if (reward_from(again, m_orig) != 0.0) ++res.default_reward_violations;
        }

        HyperParams chosen = h_orig;
        if (run_lr) {
            std::vector<PolicyRecord> recs;
            std::vector<HyperParams> cands;
            double best_r = -std::numeric_limits<double>::infinity();
            int best_i = -1;
            for (int i = 0; i < cfg_.n_lr; ++i) {
                const auto fwd = pi_lr_.forward(state);
                const ActionSample a = PolicyNet::sample_action(fwd.mu, fwd.logsigma,
                                                                policy_rng_,
                                                                cfg_.force_zero_action);
                if (i == 0) {
                    plog.mu_lr = fwd.mu;
                    plog.sigma_lr.clear();
                    for (double ls : fwd.logsigma) plog.sigma_lr.push_back(std::exp(ls));
                    plog.multipliers_lr = a.multipliers;
                }
                bool warned = false;
                const HyperParams cand = apply_action(h_orig, a.multipliers, ActionGroup::lr,
                                                      &warned);
                if (warned) ++res.split_warnings;
                const double metric = rollout_eval(cand, views, false, 0);
                if (std::isfinite(metric)) {
                    const double r = reward_from(metric, m_orig);
                    recs.push_back({fwd.tape_index, a.z, r});
                    cands.push_back(cand);
                    plog.rewards_lr.push_back(r);
                    if (r > best_r) {
                        best_r = r;
                        best_i = static_cast<int>(cands.size()) - 1;
                    }
                } else {
                    plog.rewards_lr.push_back(-std::numeric_limits<double>::infinity());
                }
            }
            pi_lr_.update(recs, beta_eff, cfg_.grad_clip, cfg_.policy_lr);
            if (!cfg_.pin_default && best_i >= 0 && best_r >= 0.0) {
                chosen.lr_position = cands[best_i].lr_position;
                chosen.lr_scale = cands[best_i].lr_scale;
                chosen.lr_rotation = cands[best_i].lr_rotation;
                chosen.lr_opacity = cands[best_i].lr_opacity;
                chosen.lr_color = cands[best_i].lr_color;
            }
        }

        if (has_densify && run_ds) {
            std::vector<PolicyRecord> recs;
            std::vector<HyperParams> cands;
            double best_r = -std::numeric_limits<double>::infinity();
            int best_i = -1;
            for (int i = 0; i < cfg_.n_ds; ++i) {
                const auto fwd = pi_ds_.forward(state);
                const ActionSample a = PolicyNet::sample_action(fwd.mu, fwd.logsigma,
                                                                policy_rng_,
                                                                cfg_.force_zero_action);
                if (i == 0) {
                    plog.mu_ds = fwd.mu;
                    plog.sigma_ds.clear();
                    for (double ls : fwd.logsigma) plog.sigma_ds.push_back(std::exp(ls));
                    plog.multipliers_ds = a.multipliers;
                }
                bool warned = false;
                const HyperParams cand = apply_action(chosen, a.multipliers, ActionGroup::ds,
                                                      &warned);
                if (warned) ++res.split_warnings;
                const double metric = rollout_eval(cand, views, true, densify_seed);
                if (std::isfinite(metric)) {
                    const double r = reward_from(metric, m_orig);
                    recs.push_back({fwd.tape_index, a.z, r});
                    cands.push_back(cand);
                    plog.rewards_ds.push_back(r);
                    if (r > best_r) {
                        best_r = r;
                        best_i = static_cast<int>(cands.size()) - 1;
                    }
                } else {
                    plog.rewards_ds.push_back(-std::numeric_limits<double>::infinity());
                }
            }
            pi_ds_.update(recs, beta_eff, cfg_.grad_clip, cfg_.policy_lr);
            if (!cfg_.pin_default && best_i >= 0 && best_r >= 0.0) {
                chosen.density_threshold = cands[best_i].density_threshold;
                chosen.split_factor = cands[best_i].split_factor;
            }
        }

        if (cfg_.verify_rollback && !trainer_.state_equals(snap)) ++res.rollback_violations;

        // Real K steps of the phase with the selected configuration.
        if (has_densify) {
            Rng sub(densify_seed);
            trainer_.densify(chosen, sub);
            trainer_.prune(tc.prune_opacity);
        }
        double phase_loss = 0.0;
        for (int k = 0; k < K; ++k) {
            const double loss = trainer_.train_step(views[k], chosen);
            phase_loss += loss;
            window += loss;
            ++window_n;
            const long t = t0 + k + 1;
            if (t % tc.log_interval == 0) {
                res.trace.push_back(trainer_.make_row(t, window / window_n));
                window = 0.0;
                window_n = 0;
            }
        }
        prev_loss = phase_loss / K;

        plog.chosen = chosen;
        plog.post_test_psnr = trainer_.test_metrics()[0];
        res.phases.push_back(std::move(plog));
    }

    res.total_steps = trainer_.total_steps();
    return res;
}

}  // namespace gs2d
