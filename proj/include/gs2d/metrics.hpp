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

namespace gs2d {

struct MetricReport {
    double l1 = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
};

inline constexpr double kPsnrCap = 120.0;  // avoids infinities in CSV output

/// Mean absolute error over all pixels and channels.
double l1(const Image& a, const Image& b);

/// -10 log10(mse) on unit range, capped at kPsnrCap when mse < 1e-12.
double psnr(const Image& a, const Image& b);

/// Single-scale SSIM, 11x11 Gaussian window (std 1.5), C1=0.01^2, C2=0.03^2,
/// averaged over channels and valid window positions. Both dimensions must
/// be >= 11.
double ssim(const Image& a, const Image& b);

MetricReport metric_report(const Image& a, const Image& b);

}  // namespace gs2d
