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

#include "gs2d/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gs2d {
namespace {

double to_model(const SearchDim& d, double x) { return d.log_space ? std::log(x) : x; }
double from_model(const SearchDim& d, double x) { return d.log_space ? std::exp(x) : x; }

double gauss_pdf(double x, double mean, double bw) {
    const double u = (x - mean) / bw;
    return std::exp(-0.5 * u * u) / (bw * std::sqrt(2.0 * M_PI));
}

}  // namespace

SearchSpace SearchSpace::around(const HyperParams& defaults, double factor) {
    SearchSpace s;
    for (double v : hp_to_vector(defaults)) s.dims.push_back({v / factor, v * factor, true});
    return s;
}

std::vector<double> hp_to_vector(const HyperParams& hp) {
    return {hp.lr_position, hp.lr_scale, hp.lr_rotation, hp.lr_opacity,
            hp.lr_color, hp.density_threshold, hp.split_factor};
}

HyperParams vector_to_hp(const std::vector<double>& v) {
    if (v.size() != 7) throw std::invalid_argument("expected 7 hyperparameter values");
    HyperParams hp;
    hp.lr_position = v[0];
    hp.lr_scale = v[1];
    hp.lr_rotation = v[2];
    hp.lr_opacity = v[3];
    hp.lr_color = v[4];
    hp.density_threshold = v[5];
    hp.split_factor = v[6];
    return hp;
}

std::vector<double> sample_space(const SearchSpace& space, Rng& rng) {
    std::vector<double> p;
    p.reserve(space.dims.size());
    for (const SearchDim& d : space.dims) {
        const double lo = to_model(d, d.lo), hi = to_model(d, d.hi);
        p.push_back(from_model(d, lo + (hi - lo) * draw_uniform(rng)));
    }
    return p;
}

static Trial run_trial(int index, const std::vector<double>& point, const TrialFn& fn,
                       std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const TrialOutcome out = fn(point);
    const auto stop = std::chrono::steady_clock::now();
    Trial t;
    t.index = index;
    t.point = point;
    t.objective = out.objective;
    t.test_psnr = out.test_psnr;
    t.test_ssim = out.test_ssim;
    t.seed = seed;
    t.wallclock_s = std::chrono::duration<double>(stop - start).count();
    return t;
}

SearchResult random_search(const SearchSpace& space, int n_trials, const TrialFn& fn,
                           std::uint64_t seed) {
    Rng rng(seed);
    SearchResult res;
    for (int i = 0; i < n_trials; ++i) {
        res.trials.push_back(run_trial(i, sample_space(space, rng), fn, seed));
        if (res.best < 0 || res.trials[i].objective > res.trials[res.best].objective)
            res.best = i;
    }
    return res;
}

std::vector<double> tpe_suggest(const std::vector<Trial>& history, const SearchSpace& space,
                                Rng& rng, const TpeOptions& opt) {
    if (history.empty() && !opt.prior.empty()) return opt.prior;
    if (static_cast<int>(history.size()) < opt.n_startup) return sample_space(space, rng);

    // Split at the gamma objective quantile (maximization: best first).
    std::vector<int> order(history.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return history[a].objective > history[b].objective;
    });
    const int n_good = std::max<int>(
        1, static_cast<int>(std::ceil(opt.gamma * static_cast<double>(history.size()))));
    if (n_good >= static_cast<int>(history.size())) return sample_space(space, rng);

    const int n_dims = static_cast<int>(space.dims.size());
    std::vector<std::vector<double>> good(n_dims), bad(n_dims);
    for (int oi = 0; oi < static_cast<int>(order.size()); ++oi) {
        const Trial& t = history[order[oi]];
        for (int k = 0; k < n_dims; ++k) {
            const double x = to_model(space.dims[k], t.point[k]);
            (oi < n_good ? good[k] : bad[k]).push_back(x);
        }
    }

    std::vector<double> bw_good(n_dims), bw_bad(n_dims);
    for (int k = 0; k < n_dims; ++k) {
        const SearchDim& d = space.dims[k];
        const double range = to_model(d, d.hi) - to_model(d, d.lo);
        const double floor_bw = 0.01 * range;
        bw_good[k] = std::max(range / std::sqrt(static_cast<double>(good[k].size())), floor_bw);
        bw_bad[k] = std::max(range / std::sqrt(static_cast<double>(bad[k].size())), floor_bw);
    }

    auto log_density = [](const std::vector<double>& pts, double bw, double x) {
        double acc = 0.0;
        for (double c : pts) acc += gauss_pdf(x, c, bw);
        return std::log(acc / static_cast<double>(pts.size()) + 1e-300);
    };

    std::vector<double> best_cand;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < opt.n_candidates; ++c) {
        std::vector<double> cand(n_dims);
        double score = 0.0;
        for (int k = 0; k < n_dims; ++k) {
            const SearchDim& d = space.dims[k];
            const double lo = to_model(d, d.lo), hi = to_model(d, d.hi);
            const std::size_t ci = static_cast<std::size_t>(draw_below(rng, good[k].size()));
            double x = good[k][ci] + bw_good[k] * draw_normal(rng);
            x = std::clamp(x, lo, hi);
            score += log_density(good[k], bw_good[k], x) - log_density(bad[k], bw_bad[k], x);
            cand[k] = from_model(d, x);
        }
        if (score > best_score) {
            best_score = score;
            best_cand = cand;
        }
    }
    return best_cand;
}

SearchResult bo_search(const SearchSpace& space, int n_trials, const TrialFn& fn,
                       std::uint64_t seed, const TpeOptions& opt) {
    Rng rng(seed);
    SearchResult res;
    for (int i = 0; i < n_trials; ++i) {
        const std::vector<double> point = tpe_suggest(res.trials, space, rng, opt);
        res.trials.push_back(run_trial(i, point, fn, seed));
        if (res.best < 0 || res.trials[i].objective > res.trials[res.best].objective)
            res.best = i;
    }
    return res;
}

}  // namespace gs2d
