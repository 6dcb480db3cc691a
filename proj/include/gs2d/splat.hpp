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

#include <iosfwd>
#include <vector>

#include "gs2d/common.hpp"
#include "gs2d/image.hpp"

namespace gs2d {

/// One anisotropic 2D Gaussian primitive.
///
/// Opacity is logistic(opacity_logit); covariance is R S S^T R^T with R the
/// rotation by `rotation` and S = diag(exp(log_scale)). `depth` is the fixed
/// compositing sort key assigned at creation; ties break by splat index.
struct Splat2D {
    Vec2 position;
    Vec2 log_scale;
    double rotation = 0.0;
    Vec3 color{0.0, 0.0, 0.0};
    double opacity_logit = 0.0;
    double depth = 0.0;

    bool operator==(const Splat2D&) const = default;
};

struct SplatScene {
    std::vector<Splat2D> splats;  // stable order, new splats appended
    int budget = 0;               // hard cap on splat count

    int count() const { return static_cast<int>(splats.size()); }
    bool operator==(const SplatScene&) const = default;
};

/// A 2D "camera": invertible affine map from scene space to view space,
/// together with the target image it should reproduce.
struct AffineView {
    Mat2 linear = Mat2::identity();
    Vec2 translation;
    Image target;
    int id = 0;
};

/// Per-splat parameter gradients plus the densification statistics they feed.
struct SceneGradients {
    std::vector<Vec2> d_position;
    std::vector<Vec2> d_log_scale;
    std::vector<double> d_rotation;
    std::vector<Vec3> d_color;
    std::vector<double> d_opacity_logit;
    std::vector<double> pos_grad_accum;  // accumulated ||dL/dposition||
    std::vector<int> accum_count;

    void resize_zero(std::size_t n);
    void add_scaled(const SceneGradients& o, double s);
    bool operator==(const SceneGradients&) const = default;
};

inline constexpr double kAlphaMax = 0.99;

Mat2 covariance(const Splat2D& s);

/// Opacity contribution of `s` at `point` (in the splat's own frame),
/// clamped at kAlphaMax.
double alpha_at(const Splat2D& s, const Vec2& point);

/// Draw a sample from N(s.position, covariance(s)).
Vec2 sample_from_splat(const Splat2D& s, Rng& rng);

// "splat2d v1" plain-text scene format: header line, then one line per splat.
void save_scene(const SplatScene& scene, std::ostream& out);
SplatScene load_scene(std::istream& in);
void save_scene_file(const SplatScene& scene, const std::string& path);
SplatScene load_scene_file(const std::string& path);

}  // namespace gs2d
