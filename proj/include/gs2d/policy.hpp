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

#include "gs2d/common.hpp"

namespace gs2d {

/// Two-component policy state: previous-phase mean training loss and
/// normalized training progress t/T.
struct PhaseState {
    double prev_phase_loss = 0.0;
    double progress = 0.0;
};

PhaseState build_state(double prev_phase_loss, long t, long T, bool ablation_no_loss_input);

struct ActionSample {
    std::vector<double> z;            // raw Gaussian sample
    std::vector<double> multipliers;  // exp(z), componentwise
    double log_prob = 0.0;
    double entropy = 0.0;
};

/// A recorded policy decision used for one REINFORCE update.
struct PolicyRecord {
    int tape_index = -1;
    std::vector<double> z;
    double reward = 0.0;  // raw reward; standardized inside the update
};

inline constexpr double kLogSigmaMin = -5.0;
inline constexpr double kLogSigmaMax = 1.0;

/// Gaussian policy head over d hyperparameter multipliers: a GRU-cell (or,
/// under the linear-encoder ablation, tanh-linear) encoder of the 2-vector
/// state, linear residual heads, and learned base mean / log-std vectors.
/// Carries its own Adam state and the forward tape for BPTT updates.
class PolicyNet {
public:
    PolicyNet(int dim, int hidden, bool use_gru, std::uint64_t seed,
              double logsigma_base_init);

    /// Advance the persistent hidden state and return (mu, logsigma) with
    /// logsigma clamped to [kLogSigmaMin, kLogSigmaMax]. Records a tape
    /// entry; its index goes into the matching PolicyRecord.
    struct Forward {
        std::vector<double> mu;
        std::vector<double> logsigma;
        int tape_index;
    };
    Forward forward(const PhaseState& s);

    static ActionSample sample_action(const std::vector<double>& mu,
                                      const std::vector<double>& logsigma, Rng& rng,
                                      bool force_zero = false);

    /// One entropy-regularized policy-gradient step over the recorded batch:
    /// minimize sum_i(-Rtilde_i log p_i) - beta sum_i entropy_i, rewards
    /// standardized when the batch has more than one record, global gradient
    /// norm clipped to `grad_clip`, Adam at `lr`. Clears the tape.
    void update(const std::vector<PolicyRecord>& records, double beta, double grad_clip,
                double lr);

    void clear_tape();

    /// Objective recomputed from arbitrary parameters; the finite-difference
    /// oracle in the tests drives this directly.
    double objective(const std::vector<double>& params, const std::vector<double>& h0,
                     const std::vector<PhaseState>& states,
                     const std::vector<PolicyRecord>& records, double beta) const;

    /// Analytic gradient of `objective` at the current parameters, before
    /// clipping. States are taken from the tape entries named by the records.
    std::vector<double> objective_grad(const std::vector<PolicyRecord>& records,
                                       double beta) const;

    int dim() const { return d_; }
    int hidden_size() const { return h_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& hidden() const { return hidden_; }
    void reset_hidden() { hidden_.assign(h_, 0.0); }

    double mean_logsigma_base() const;

    // parameter layout offsets
    int off_mu_base() const;
    int off_logsigma_base() const;

private:
    struct Tape {
        PhaseState state;
        std::vector<double> h_prev, z, r, hc, h_new;
        std::vector<double> raw_logsigma;  // pre-clamp
        std::vector<double> mu, logsigma;
    };

    void forward_one(const std::vector<double>& params, const PhaseState& s,
                     const std::vector<double>& h_prev, Tape& t) const;

    int d_, h_;
    bool use_gru_;
    std::vector<double> params_;
    std::vector<double> hidden_;
    std::vector<double> adam_m_, adam_v_;
    long adam_steps_ = 0;
    std::vector<Tape> tape_;

    friend struct PolicyLayout;
};

}  // namespace gs2d
