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

#include "gs2d/splat.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace gs2d {

void SceneGradients::resize_zero(std::size_t n) {
    d_position.assign(n, Vec2{});
    d_log_scale.assign(n, Vec2{});
    d_rotation.assign(n, 0.0);
    d_color.assign(n, Vec3{0.0, 0.0, 0.0});
    d_opacity_logit.assign(n, 0.0);
    pos_grad_accum.assign(n, 0.0);
    accum_count.assign(n, 0);
}

void SceneGradients::add_scaled(const SceneGradients& o, double s) {
    for (std::size_t i = 0; i < d_position.size(); ++i) {
        d_position[i] += o.d_position[i] * s;
        d_log_scale[i] += o.d_log_scale[i] * s;
        d_rotation[i] += o.d_rotation[i] * s;
        for (int c = 0; c < 3; ++c) d_color[i][c] += o.d_color[i][c] * s;
        d_opacity_logit[i] += o.d_opacity_logit[i] * s;
    }
}

Mat2 covariance(const Splat2D& s) {
    const Mat2 r = Mat2::rotation(s.rotation);
    const double e1 = std::exp(2.0 * s.log_scale.x);
    const double e2 = std::exp(2.0 * s.log_scale.y);
    const Mat2 m = r * Mat2::diag(e1, e2) * r.transpose();
    // symmetrize against rounding in the triple product
    const double off = 0.5 * (m.b + m.c);
    return {m.a, off, off, m.d};
}

double alpha_at(const Splat2D& s, const Vec2& point) {
    const Vec2 d = point - s.position;
    const Mat2 inv = covariance(s).inverse();
    const double q = d.dot(inv * d);
    const double a = logistic(s.opacity_logit) * std::exp(-0.5 * q);
    return std::min(a, kAlphaMax);
}

Vec2 sample_from_splat(const Splat2D& s, Rng& rng) {
    const double n1 = draw_normal(rng);
    const double n2 = draw_normal(rng);
    const Vec2 scaled{std::exp(s.log_scale.x) * n1, std::exp(s.log_scale.y) * n2};
    return s.position + Mat2::rotation(s.rotation) * scaled;
}

void save_scene(const SplatScene& scene, std::ostream& out) {
    out << "splat2d v1 " << scene.count() << "\n";
    out << std::setprecision(17);
    for (const Splat2D& s : scene.splats) {
        out << s.position.x << " " << s.position.y << " "
            << s.log_scale.x << " " << s.log_scale.y << " "
            << s.rotation << " "
            << s.color[0] << " " << s.color[1] << " " << s.color[2] << " "
            << s.opacity_logit << " " << s.depth << "\n";
    }
}

SplatScene load_scene(std::istream& in) {
    std::string tag, version;
    int count = 0;
    in >> tag >> version >> count;
    if (tag != "splat2d" || version != "v1" || count < 0)
        throw std::runtime_error("bad splat2d scene header");
    SplatScene scene;
    scene.budget = count;
    scene.splats.resize(count);
    for (Splat2D& s : scene.splats) {
        in >> s.position.x >> s.position.y >> s.log_scale.x >> s.log_scale.y
           >> s.rotation >> s.color[0] >> s.color[1] >> s.color[2]
           >> s.opacity_logit >> s.depth;
    }
    if (!in) throw std::runtime_error("truncated splat2d scene");
    return scene;
}

void save_scene_file(const SplatScene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_scene(scene, out);
}

SplatScene load_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return load_scene(in);
}

}  // namespace gs2d
