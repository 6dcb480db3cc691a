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

#include "gs2d/policy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace gs2d {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln(2*pi)/2
}

PhaseState build_state(double prev_phase_loss, long t, long T, bool ablation_no_loss_input) {
    PhaseState s;
    s.prev_phase_loss = ablation_no_loss_input ? 0.0 : prev_phase_loss;
    s.progress = static_cast<double>(t) / static_cast<double>(T);
    return s;
}

// Flat parameter layout. U/W matrices are row-major; the linear-encoder
// ablation reuses the Wh/bh slots as its single input map.
struct PolicyLayout {
    int H, D;
    int wz, uz, bz, wr, ur, br, wh, uh, bh;
    int wmu, bmu, wls, bls, mub, lsb, total;

    explicit PolicyLayout(int hidden, int dim) : H(hidden), D(dim) {
        int o = 0;
        wz = o; o += H * 2; uz = o; o += H * H; bz = o; o += H;
        wr = o; o += H * 2; ur = o; o += H * H; br = o; o += H;
        wh = o; o += H * 2; uh = o; o += H * H; bh = o; o += H;
        wmu = o; o += D * H; bmu = o; o += D;
        wls = o; o += D * H; bls = o; o += D;
        mub = o; o += D; lsb = o; o += D;
        total = o;
    }
};

PolicyNet::PolicyNet(int dim, int hidden, bool use_gru, std::uint64_t seed,
                     double logsigma_base_init)
    : d_(dim), h_(hidden), use_gru_(use_gru) {
    const PolicyLayout L(h_, d_);
    params_.assign(L.total, 0.0);
    Rng rng(seed);
    auto init_block = [&](int off, int n) {
        for (int i = 0; i < n; ++i) params_[off + i] = (draw_uniform(rng) * 2.0 - 1.0) * 0.1;
    };
    init_block(L.wz, h_ * 2);
    init_block(L.uz, h_ * h_);
    init_block(L.wr, h_ * 2);
    init_block(L.ur, h_ * h_);
    init_block(L.wh, h_ * 2);
    init_block(L.uh, h_ * h_);
    init_block(L.wmu, d_ * h_);
    init_block(L.wls, d_ * h_);
    for (int k = 0; k < d_; ++k) params_[L.lsb + k] = logsigma_base_init;
    hidden_.assign(h_, 0.0);
    adam_m_.assign(L.total, 0.0);
    adam_v_.assign(L.total, 0.0);
}

int PolicyNet::off_mu_base() const { return PolicyLayout(h_, d_).mub; }
int PolicyNet::off_logsigma_base() const { return PolicyLayout(h_, d_).lsb; }

double PolicyNet::mean_logsigma_base() const {
    const PolicyLayout L(h_, d_);
    double acc = 0.0;
    for (int k = 0; k < d_; ++k) acc += params_[L.lsb + k];
    return acc / d_;
}

void PolicyNet::forward_one(const std::vector<double>& p, const PhaseState& s,
                            const std::vector<double>& h_prev, Tape& t) const {
    const PolicyLayout L(h_, d_);
    const double x0 = s.prev_phase_loss, x1 = s.progress;
    t.state = s;
    t.h_prev = h_prev;
    t.z.assign(h_, 0.0);
    t.r.assign(h_, 0.0);
    t.hc.assign(h_, 0.0);
    t.h_new.assign(h_, 0.0);
    if (use_gru_) {
        for (int i = 0; i < h_; ++i) {
            double az = p[L.wz + i * 2] * x0 + p[L.wz + i * 2 + 1] * x1 + p[L.bz + i];
            double ar = p[L.wr + i * 2] * x0 + p[L.wr + i * 2 + 1] * x1 + p[L.br + i];
            for (int j = 0; j < h_; ++j) {
                az += p[L.uz + i * h_ + j] * h_prev[j];
                ar += p[L.ur + i * h_ + j] * h_prev[j];
            }
            t.z[i] = logistic(az);
            t.r[i] = logistic(ar);
        }
        for (int i = 0; i < h_; ++i) {
            double ah = p[L.wh + i * 2] * x0 + p[L.wh + i * 2 + 1] * x1 + p[L.bh + i];
            for (int j = 0; j < h_; ++j) ah += p[L.uh + i * h_ + j] * (t.r[j] * h_prev[j]);
            t.hc[i] = std::tanh(ah);
            t.h_new[i] = (1.0 - t.z[i]) * h_prev[i] + t.z[i] * t.hc[i];
        }
    } else {
        for (int i = 0; i < h_; ++i) {
            const double ah = p[L.wh + i * 2] * x0 + p[L.wh + i * 2 + 1] * x1 + p[L.bh + i];
            t.h_new[i] = std::tanh(ah);
        }
    }
    t.mu.assign(d_, 0.0);
    t.raw_logsigma.assign(d_, 0.0);
    t.logsigma.assign(d_, 0.0);
    for (int k = 0; k < d_; ++k) {
        double dmu = p[L.bmu + k], dls = p[L.bls + k];
        for (int j = 0; j < h_; ++j) {
            dmu += p[L.wmu + k * h_ + j] * t.h_new[j];
            dls += p[L.wls + k * h_ + j] * t.h_new[j];
        }
        t.mu[k] = p[L.mub + k] + dmu;
        t.raw_logsigma[k] = p[L.lsb + k] + dls;
        t.logsigma[k] = std::clamp(t.raw_logsigma[k], kLogSigmaMin, kLogSigmaMax);
    }
}

PolicyNet::Forward PolicyNet::forward(const PhaseState& s) {
    Tape t;
    forward_one(params_, s, hidden_, t);
    hidden_ = t.h_new;
    tape_.push_back(std::move(t));
    const Tape& back = tape_.back();
    return Forward{back.mu, back.logsigma, static_cast<int>(tape_.size()) - 1};
}

ActionSample PolicyNet::sample_action(const std::vector<double>& mu,
                                      const std::vector<double>& logsigma, Rng& rng,
                                      bool force_zero) {
    const int d = static_cast<int>(mu.size());
    ActionSample a;
    a.z.resize(d);
    a.multipliers.resize(d);
    for (int k = 0; k < d; ++k) {
        const double sigma = std::exp(logsigma[k]);
        a.z[k] = force_zero ? 0.0 : mu[k] + sigma * draw_normal(rng);
        a.multipliers[k] = std::exp(a.z[k]);
        const double u = (a.z[k] - mu[k]) / sigma;
        a.log_prob += -logsigma[k] - kHalfLog2Pi - 0.5 * u * u;
        a.entropy += 0.5 + kHalfLog2Pi + logsigma[k];
    }
    return a;
}

double PolicyNet::objective(const std::vector<double>& p, const std::vector<double>& h0,
                            const std::vector<PhaseState>& states,
                            const std::vector<PolicyRecord>& records, double beta) const {
    std::vector<double> h = h0;
    double total = 0.0;
    Tape t;
    for (std::size_t i = 0; i < records.size(); ++i) {
        forward_one(p, states[i], h, t);
        h = t.h_new;
        double logp = 0.0, ent = 0.0;
        for (int k = 0; k < d_; ++k) {
            const double sigma = std::exp(t.logsigma[k]);
            const double u = (records[i].z[k] - t.mu[k]) / sigma;
            logp += -t.logsigma[k] - kHalfLog2Pi - 0.5 * u * u;
            ent += 0.5 + kHalfLog2Pi + t.logsigma[k];
        }
        total += -records[i].reward * logp - beta * ent;
    }
    return total;
}

std::vector<double> PolicyNet::objective_grad(const std::vector<PolicyRecord>& records,
                                              double beta) const {
    const PolicyLayout L(h_, d_);
    std::vector<double> g(L.total, 0.0);
    std::vector<double> dh(h_, 0.0);  // dL/dh_new carried from later entries
    for (int i = static_cast<int>(records.size()) - 1; i >= 0; --i) {
        const PolicyRecord& rec = records[i];
        const Tape& t = tape_.at(rec.tape_index);
        if (i + 1 < static_cast<int>(records.size()))
            assert(records[i + 1].tape_index == rec.tape_index + 1);

        std::vector<double> dh_new = dh;
        for (int k = 0; k < d_; ++k) {
            const double sigma = std::exp(t.logsigma[k]);
            const double u = (rec.z[k] - t.mu[k]) / sigma;
            const double dmu = -rec.reward * (u / sigma);
            double dls = -rec.reward * (u * u - 1.0) - beta;
            const bool clamped = t.raw_logsigma[k] <= kLogSigmaMin || t.raw_logsigma[k] >= kLogSigmaMax;
            if (clamped) dls = 0.0;

            g[L.mub + k] += dmu;
            g[L.bmu + k] += dmu;
            g[L.lsb + k] += dls;
            g[L.bls + k] += dls;
            for (int j = 0; j < h_; ++j) {
                g[L.wmu + k * h_ + j] += dmu * t.h_new[j];
                g[L.wls + k * h_ + j] += dls * t.h_new[j];
                dh_new[j] += dmu * params_[L.wmu + k * h_ + j] + dls * params_[L.wls + k * h_ + j];
            }
        }

        const double x0 = t.state.prev_phase_loss, x1 = t.state.progress;
        std::vector<double> dh_prev(h_, 0.0);
        if (use_gru_) {
            std::vector<double> dah(h_, 0.0), drh(h_, 0.0);
            for (int j = 0; j < h_; ++j) {
                const double dhc = dh_new[j] * t.z[j];
                dah[j] = dhc * (1.0 - t.hc[j] * t.hc[j]);
                dh_prev[j] += dh_new[j] * (1.0 - t.z[j]);
            }
            for (int j = 0; j < h_; ++j) {
                g[L.wh + j * 2] += dah[j] * x0;
                g[L.wh + j * 2 + 1] += dah[j] * x1;
                g[L.bh + j] += dah[j];
                for (int m = 0; m < h_; ++m) {
                    g[L.uh + j * h_ + m] += dah[j] * (t.r[m] * t.h_prev[m]);
                    drh[m] += params_[L.uh + j * h_ + m] * dah[j];
                }
            }
            for (int j = 0; j < h_; ++j) {
                const double dz = dh_new[j] * (t.hc[j] - t.h_prev[j]);
                const double daz = dz * t.z[j] * (1.0 - t.z[j]);
                const double dr = drh[j] * t.h_prev[j];
                const double dar = dr * t.r[j] * (1.0 - t.r[j]);
                dh_prev[j] += drh[j] * t.r[j];
                g[L.wz + j * 2] += daz * x0;
                g[L.wz + j * 2 + 1] += daz * x1;
                g[L.bz + j] += daz;
                g[L.wr + j * 2] += dar * x0;
                g[L.wr + j * 2 + 1] += dar * x1;
                g[L.br + j] += dar;
                for (int m = 0; m < h_; ++m) {
                    g[L.uz + j * h_ + m] += daz * t.h_prev[m];
                    g[L.ur + j * h_ + m] += dar * t.h_prev[m];
                    dh_prev[m] += params_[L.uz + j * h_ + m] * daz +
                                  params_[L.ur + j * h_ + m] * dar;
                }
            }
        } else {
            for (int j = 0; j < h_; ++j) {
                const double dah = dh_new[j] * (1.0 - t.h_new[j] * t.h_new[j]);
                g[L.wh + j * 2] += dah * x0;
                g[L.wh + j * 2 + 1] += dah * x1;
                g[L.bh + j] += dah;
            }
        }
        dh = std::move(dh_prev);
    }
    return g;
}

void PolicyNet::update(const std::vector<PolicyRecord>& records, double beta,
                       double grad_clip, double lr) {
    if (records.empty()) {
        clear_tape();
        return;
    }
    std::vector<PolicyRecord> batch = records;
    if (batch.size() > 1) {
        double mean = 0.0;
        for (const auto& r : batch) mean += r.reward;
        mean /= batch.size();
        double var = 0.0;
        for (const auto& r : batch) var += (r.reward - mean) * (r.reward - mean);
        const double sd = std::sqrt(var / batch.size());
        for (auto& r : batch) r.reward = (r.reward - mean) / (sd + 1e-8);
    }

    std::vector<double> g = objective_grad(batch, beta);
    double norm2 = 0.0;
    for (double v : g) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (norm > grad_clip) {
        const double s = grad_clip / norm;
        for (double& v : g) v *= s;
    }

    ++adam_steps_;
    const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(adam_steps_));
    const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(adam_steps_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        adam_m_[i] = 0.9 * adam_m_[i] + 0.1 * g[i];
        adam_v_[i] = 0.999 * adam_v_[i] + 0.001 * g[i] * g[i];
        params_[i] -= lr * (adam_m_[i] / bc1) / (std::sqrt(adam_v_[i] / bc2) + 1e-8);
    }
    clear_tape();
}

void PolicyNet::clear_tape() { tape_.clear(); }

}  // namespace gs2d
