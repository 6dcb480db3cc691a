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

#include <string>
#include <vector>

namespace gs2d {

/// H x W x 3 raster with channel values in [0,1].
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> pixels;  // row-major, interleaved RGB

    Image() = default;
    Image(int h, int w) : height(h), width(w), pixels(static_cast<std::size_t>(h) * w * 3, 0.0) {}

    double& at(int y, int x, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int y, int x, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    bool same_shape(const Image& o) const { return height == o.height && width == o.width; }
    bool operator==(const Image&) const = default;
};

// Binary portable pixmap (P6, maxval 255, round-half-up quantization).
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

}  // namespace gs2d
