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

#include "gs2d/image.hpp"
#include "gs2d/splat.hpp"

namespace gs2d {

// Front-to-back compositing of the scene under the view's affine map.
// Pixel centers at (col+0.5, row+0.5); per-pixel culling outside each
// splat's 3-sigma bounding box. The `_ref` variants are the serial
// reference implementations; the plain names run the OpenMP kernels
// (identical per-pixel traversal order, rows in parallel).
Image rasterize(const SplatScene& scene, const AffineView& view, int height, int width);
Image rasterize_ref(const SplatScene& scene, const AffineView& view, int height, int width);

// Exact gradients of <upstream, rendered> w.r.t. every splat parameter,
// including through the affine map, the kAlphaMax clamp (zero gradient in
// the clamped regime) and the culling boundary (hard zero).
SceneGradients rasterize_backward(const SplatScene& scene, const AffineView& view,
                                  const Image& upstream);
SceneGradients rasterize_backward_ref(const SplatScene& scene, const AffineView& view,
                                      const Image& upstream);

}  // namespace gs2d
