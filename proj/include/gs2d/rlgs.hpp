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

#include <vector>

#include "gs2d/policy.hpp"
#include "gs2d/trainer.hpp"

namespace gs2d {

struct RlgsConfig {
    int K = 20;                 // policy-phase length in training steps
    int n_lr = 4;               // RLLR inner iterations per phase
    int n_ds = 2;               // RLDS inner iterations per densify phase
    int i_shuffle = 1000;       // reward-view reshuffle interval
    int reward_set_len = 2;
    double beta = 0.01;         // entropy bonus weight
    int hidden = 32;
    double policy_lr = 1e-4;
    double grad_clip = 2.4;
    double logsigma_base_init = 0.0;  // ln 1.0

    bool ablate_no_rllr = false;
    bool ablate_no_rlds = false;
    bool ablate_no_gru = false;
    bool ablate_no_entropy = false;
    bool ablate_no_loss_input = false;
    bool ablate_no_reward_sampling = false;

    bool force_zero_action = false;  // sample z = 0 (identity multipliers)
    bool pin_default = false;        // selection pinned to the defaults
    bool reward_error_metric = false;  // flip reward sign for error-style metrics
    bool verify_rollback = false;    // compare state to the phase snapshot
    bool verify_default_reward = false;  // re-roll the defaults, expect reward 0
};

struct ViewSplit {
    std::vector<int> reward_views;
    std::vector<int> training_views;
    long last_shuffle = 0;
};

enum class ActionGroup { lr, ds };

/// Componentwise multiplicative action on the designated group; other
/// fields copy through. A resulting split_factor <= 1 clamps to 1.01 and
/// reports `warned`.
HyperParams apply_action(const HyperParams& h_orig, const std::vector<double>& m,
                         ActionGroup which, bool* warned = nullptr);

/// Fresh uniform split: exactly reward_set_len reward views, remainder
/// trains. Under the no-withholding ablation the training pool keeps all
/// views and reward views are drawn from it (overlap allowed).
ViewSplit draw_view_split(int pool_size, int reward_set_len, long t, Rng& rng,
                          bool no_withholding);

/// Reshuffle when t - last_shuffle >= i_shuffle; otherwise unchanged.
ViewSplit maybe_reshuffle_views(const ViewSplit& split, long t, int pool_size,
                                int reward_set_len, int i_shuffle, Rng& rng,
                                bool no_withholding);

struct PhaseLog {
    int phase = 0;
    long t = 0;
    PhaseState state;
    std::vector<double> mu_lr, sigma_lr, mu_ds, sigma_ds;
    std::vector<double> multipliers_lr, multipliers_ds;  // of the first trial each
    std::vector<double> rewards_lr, rewards_ds;
    HyperParams chosen;
    double post_test_psnr = 0.0;
};

struct RlgsResult {
    std::vector<TraceRow> trace;
    std::vector<PhaseLog> phases;
    int rollback_violations = 0;
    int default_reward_violations = 0;
    int split_warnings = 0;
    long total_steps = 0;  // lifetime trainer step count (rollouts included)
};

/// Phase-looped controller: snapshot, score sampled hyperparameter
/// configurations by K-step simulated rollouts on the reward views, update
/// both policies by entropy-regularized policy gradient, apply the best
/// configuration for the phase's real steps.
class RlgsRunner {
public:
    RlgsRunner(Trainer& trainer, RlgsConfig cfg, std::uint64_t seed);

    RlgsResult run();

    /// Simulate: (optional densify with h's ds fields) + K train steps over
    /// `views`, mean PSNR over the current reward views, rollback. Returns
    /// NaN if the rollout loss goes non-finite.
    double rollout_eval(const HyperParams& h, const std::vector<int>& views,
                        bool do_densify, std::uint64_t densify_seed);

    const ViewSplit& split() const { return split_; }
    PolicyNet& policy_lr() { return pi_lr_; }
    PolicyNet& policy_ds() { return pi_ds_; }

private:
    double reward_from(double metric, double metric_orig) const;

    Trainer& trainer_;
    RlgsConfig cfg_;
    PolicyNet pi_lr_, pi_ds_;
    Rng policy_rng_;
    Rng split_rng_;
    ViewSplit split_;
};

}  // namespace gs2d
