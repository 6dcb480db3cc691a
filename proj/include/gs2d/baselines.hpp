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
#include <vector>

#include "gs2d/common.hpp"
#include "gs2d/trainer.hpp"

namespace gs2d {

/// One search dimension. Log-space dims sample and model log(x).
struct SearchDim {
    double lo = 0.0;
    double hi = 1.0;
    bool log_space = true;
};

struct SearchSpace {
    std::vector<SearchDim> dims;

    /// Log-uniform [default/factor, default*factor] per HyperParams field,
    /// in the order position, scale, rotation, opacity, color lrs, then
    /// density_threshold, split_factor.
    static SearchSpace around(const HyperParams& defaults, double factor = 10.0);
};

std::vector<double> hp_to_vector(const HyperParams& hp);
HyperParams vector_to_hp(const std::vector<double>& v);

struct Trial {
    int index = 0;
    std::vector<double> point;
    double objective = 0.0;  // final training-view PSNR (maximized)
    double test_psnr = 0.0;
    double test_ssim = 0.0;
    std::uint64_t seed = 0;
    double wallclock_s = 0.0;
};

struct TrialOutcome {
    double objective = 0.0;
    double test_psnr = 0.0;
    double test_ssim = 0.0;
};

/// Runs one full training at the given point; objective is the training-view
/// PSNR, never computed on test views.
using TrialFn = std::function<TrialOutcome(const std::vector<double>& point)>;

std::vector<double> sample_space(const SearchSpace& space, Rng& rng);

struct SearchResult {
    std::vector<Trial> trials;
    int best = -1;
};

SearchResult random_search(const SearchSpace& space, int n_trials, const TrialFn& fn,
                           std::uint64_t seed);

struct TpeOptions {
    double gamma = 0.25;       // good/bad split quantile
    int n_candidates = 24;
    int n_startup = 8;
    std::vector<double> prior;  // forced first suggestion (the defaults)
};

/// Independent per-dimension Parzen-ratio suggestion. Startup calls fall
/// back to uniform sampling, with the very first suggestion pinned to the
/// prior point.
std::vector<double> tpe_suggest(const std::vector<Trial>& history, const SearchSpace& space,
                                Rng& rng, const TpeOptions& opt);

SearchResult bo_search(const SearchSpace& space, int n_trials, const TrialFn& fn,
                       std::uint64_t seed, const TpeOptions& opt);

}  // namespace gs2d
