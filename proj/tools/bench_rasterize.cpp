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

// Times the serial reference rasterizer against the OpenMP one, forward and
// backward, and checks that the forward images agree bit-exactly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>

#include "gs2d/rasterize.hpp"

using namespace gs2d;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int n_splats = 1000, canvas = 128, reps = 5;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--splats")) n_splats = std::atoi(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--canvas")) canvas = std::atoi(argv[i + 1]);
        else if (!std::strcmp(argv[i], "--reps")) reps = std::atoi(argv[i + 1]);
    }

    Rng rng(42);
    SplatScene scene;
    scene.budget = n_splats;
    for (int i = 0; i < n_splats; ++i) {
        Splat2D s;
        s.position = {draw_uniform(rng) * canvas, draw_uniform(rng) * canvas};
        s.log_scale = {std::log(1.0 + 5.0 * draw_uniform(rng)),
                       std::log(1.0 + 5.0 * draw_uniform(rng))};
        s.rotation = draw_uniform(rng) * 2.0 * M_PI;
        s.color = {draw_uniform(rng), draw_uniform(rng), draw_uniform(rng)};
        s.opacity_logit = draw_normal(rng);
        s.depth = draw_uniform(rng);
        scene.splats.push_back(s);
    }
    AffineView view;
    Image upstream(canvas, canvas);
    for (double& p : upstream.pixels) p = draw_uniform(rng) - 0.5;

    Image img_ref, img_par;
    const double fwd_ref = time_ms(reps, [&] { img_ref = rasterize_ref(scene, view, canvas, canvas); });
    const double fwd_par = time_ms(reps, [&] { img_par = rasterize(scene, view, canvas, canvas); });
    const bool exact = img_ref.pixels == img_par.pixels;

    SceneGradients g;
    const double bwd_ref = time_ms(reps, [&] { g = rasterize_backward_ref(scene, view, upstream); });
    const double bwd_par = time_ms(reps, [&] { g = rasterize_backward(scene, view, upstream); });

    std::printf("splats=%d canvas=%d reps=%d\n", n_splats, canvas, reps);
    std::printf("forward   ref %8.3f ms   omp %8.3f ms   speedup %.2fx\n",
                fwd_ref, fwd_par, fwd_ref / fwd_par);
    std::printf("backward  ref %8.3f ms   omp %8.3f ms   speedup %.2fx\n",
                bwd_ref, bwd_par, bwd_ref / bwd_par);
    std::printf("forward bit-exact: %s\n", exact ? "yes" : "NO");
    return exact ? 0 : 1;
}
