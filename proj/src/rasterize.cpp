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

#include "gs2d/rasterize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gs2d {
namespace {

struct ViewSplat {
    Vec2 mean;        // A*mu + b
    Mat2 cov_inv;     // (A Sigma A^T)^-1
    double opacity;   // logistic(opacity_logit)
    Vec3 color;
    Vec2 bbox_min, bbox_max;  // 3-sigma axis-aligned box in view space
    int orig;                  // index into scene.splats
};

std::vector<ViewSplat> prepare(const SplatScene& scene, const AffineView& view) {
    if (view.linear.det() == 0.0)
        throw std::invalid_argument("non-invertible view transform");
    std::vector<int> order(scene.splats.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return scene.splats[i].depth < scene.splats[j].depth;
    });
    std::vector<ViewSplat> out;
    out.reserve(order.size());
    for (int idx : order) {
        const Splat2D& s = scene.splats[idx];
        ViewSplat vs;
        vs.mean = view.linear * s.position + view.translation;
        const Mat2 cov = view.linear * covariance(s) * view.linear.transpose();
        vs.cov_inv = cov.inverse();
        vs.opacity = logistic(s.opacity_logit);
        vs.color = s.color;
        const double rx = 3.0 * std::sqrt(std::max(cov.a, 0.0));
        const double ry = 3.0 * std::sqrt(std::max(cov.d, 0.0));
        vs.bbox_min = {vs.mean.x - rx, vs.mean.y - ry};
        vs.bbox_max = {vs.mean.x + rx, vs.mean.y + ry};
        vs.orig = idx;
        out.push_back(vs);
    }
    return out;
}

inline void render_row(const std::vector<ViewSplat>& vs, int y, int width, Image& img) {
    const double py = y + 0.5;
    for (int x = 0; x < width; ++x) {
        const Vec2 p{x + 0.5, py};
        double tr = 1.0;
        double c0 = 0.0, c1 = 0.0, c2 = 0.0;
        for (const ViewSplat& s : vs) {
            if (p.x < s.bbox_min.x || p.x > s.bbox_max.x ||
                p.y < s.bbox_min.y || p.y > s.bbox_max.y)
                continue;
            const Vec2 d = p - s.mean;
            const double q = d.dot(s.cov_inv * d);
            const double a = std::min(s.opacity * std::exp(-0.5 * q), kAlphaMax);
            const double w = a * tr;
            c0 += s.color[0] * w;
            c1 += s.color[1] * w;
            c2 += s.color[2] * w;
            tr *= 1.0 - a;
        }
        img.at(y, x, 0) = c0;
        img.at(y, x, 1) = c1;
        img.at(y, x, 2) = c2;
    }
}

struct Hit {
    int vi;        // index into the sorted view-splat list
    double alpha;  // post-clamp
    double tr;     // transmittance before this splat
    bool clamped;
};

// Backward pass for one row, accumulating into `g` (gradients indexed by
// original splat order, in view-splat sorted traversal per pixel).
void backward_row(const SplatScene& scene, const AffineView& view,
                  const std::vector<ViewSplat>& vs, const Image& upstream, int y,
                  SceneGradients& g, std::vector<Hit>& hits) {
    const Mat2 at = view.linear.transpose();
    const double py = y + 0.5;
    for (int x = 0; x < upstream.width; ++x) {
        const Vec2 p{x + 0.5, py};
        const Vec3 u{upstream.at(y, x, 0), upstream.at(y, x, 1), upstream.at(y, x, 2)};
        if (u[0] == 0.0 && u[1] == 0.0 && u[2] == 0.0) continue;

        hits.clear();
        double tr = 1.0;
        for (int vi = 0; vi < static_cast<int>(vs.size()); ++vi) {
            const ViewSplat& s = vs[vi];
            if (p.x < s.bbox_min.x || p.x > s.bbox_max.x ||
                p.y < s.bbox_min.y || p.y > s.bbox_max.y)
                continue;
            const Vec2 d = p - s.mean;
            const double q = d.dot(s.cov_inv * d);
            const double raw = s.opacity * std::exp(-0.5 * q);
            const bool clamped = raw > kAlphaMax;
            const double a = clamped ? kAlphaMax : raw;
            hits.push_back({vi, a, tr, clamped});
            tr *= 1.0 - a;
        }

        // Reverse sweep: suffix[c] = sum over later splats of c_k a_k T_k.
        Vec3 suffix{0.0, 0.0, 0.0};
        for (int hi = static_cast<int>(hits.size()) - 1; hi >= 0; --hi) {
            const Hit& h = hits[hi];
            const ViewSplat& s = vs[h.vi];
            const int oi = s.orig;
            const double w = h.alpha * h.tr;

            double da = 0.0;
            for (int c = 0; c < 3; ++c) {
                g.d_color[oi][c] += u[c] * w;
                da += u[c] * (h.tr * s.color[c] - suffix[c] / (1.0 - h.alpha));
                suffix[c] += s.color[c] * w;
            }
            if (h.clamped) continue;  // alpha pinned, only color flows

            const Vec2 d = p - s.mean;
            const Vec2 md = s.cov_inv * d;
            const double q = d.dot(md);

            // alpha = opacity * exp(-q/2)
            g.d_opacity_logit[oi] += da * h.alpha * (1.0 - s.opacity);
            const double dq = da * (-0.5 * h.alpha);

            // q = d^T M d with d = p - mean', mean' = A mu + b,
            // so dq/dmean' = -2 M d
            const Vec2 dmean_view = md * (-2.0 * dq);
            g.d_position[oi] += at * dmean_view;

            // dL/dSigma' = -dq * (M d)(M d)^T ; chain Sigma' = A Sigma A^T
            const Mat2 dsig_view{-dq * md.x * md.x, -dq * md.x * md.y,
                                 -dq * md.y * md.x, -dq * md.y * md.y};
            const Mat2 dsig = at * dsig_view * view.linear;

            const Splat2D& sp = scene.splats[oi];
            const Mat2 r = Mat2::rotation(sp.rotation);
            const Mat2 rg = r.transpose() * dsig * r;
            const double e1 = std::exp(2.0 * sp.log_scale.x);
            const double e2 = std::exp(2.0 * sp.log_scale.y);
            g.d_log_scale[oi].x += 2.0 * e1 * rg.a;
            g.d_log_scale[oi].y += 2.0 * e2 * rg.d;

            // dSigma/dtheta = R' D R^T + R D R'^T, with R' = dR/dtheta
            const double ct = std::cos(sp.rotation), st = std::sin(sp.rotation);
            const Mat2 rp{-st, -ct, ct, -st};
            const Mat2 ds_dth = rp * Mat2::diag(e1, e2) * r.transpose() +
                                r * Mat2::diag(e1, e2) * rp.transpose();
            g.d_rotation[oi] += dsig.a * ds_dth.a + dsig.b * ds_dth.b +
                                dsig.c * ds_dth.c + dsig.d * ds_dth.d;
        }
    }
}

}  // namespace

Image rasterize_ref(const SplatScene& scene, const AffineView& view, int height, int width) {
    const auto vs = prepare(scene, view);
    Image img(height, width);
    for (int y = 0; y < height; ++y) render_row(vs, y, width, img);
    return img;
}

Image rasterize(const SplatScene& scene, const AffineView& view, int height, int width) {
    const auto vs = prepare(scene, view);
    Image img(height, width);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) render_row(vs, y, width, img);
    return img;
}

SceneGradients rasterize_backward_ref(const SplatScene& scene, const AffineView& view,
                                      const Image& upstream) {
    const auto vs = prepare(scene, view);
    SceneGradients g;
    g.resize_zero(scene.splats.size());
    std::vector<Hit> hits;
    for (int y = 0; y < upstream.height; ++y)
        backward_row(scene, view, vs, upstream, y, g, hits);
    return g;
}

SceneGradients rasterize_backward(const SplatScene& scene, const AffineView& view,
                                  const Image& upstream) {
    const auto vs = prepare(scene, view);
    SceneGradients g;
    g.resize_zero(scene.splats.size());
#ifdef _OPENMP
    const int nt = omp_get_max_threads();
    std::vector<SceneGradients> partial(nt);
    for (auto& p : partial) p.resize_zero(scene.splats.size());
#pragma omp parallel
    {
        const int tid = omp_get_thread_num();
        std::vector<Hit> hits;
#pragma omp for schedule(static)
        for (int y = 0; y < upstream.height; ++y)
            backward_row(scene, view, vs, upstream, y, partial[tid], hits);
    }
    // fixed thread-order reduction keeps runs repeatable for a given
    // thread count
    for (const auto& p : partial) g.add_scaled(p, 1.0);
#else
    std::vector<Hit> hits;
    for (int y = 0; y < upstream.height; ++y)
        backward_row(scene, view, vs, upstream, y, g, hits);
#endif
    return g;
}

}  // namespace gs2d
