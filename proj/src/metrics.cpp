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

#include "gs2d/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gs2d {
namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void check_shape(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("image shape mismatch");
}

const std::vector<double>& gaussian_window() {
    static const std::vector<double> w = [] {
        std::vector<double> g(kWin * kWin);
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            for (int j = 0; j < kWin; ++j) {
                const double dy = i - kWin / 2, dx = j - kWin / 2;
                g[i * kWin + j] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
                sum += g[i * kWin + j];
            }
        }
        for (double& v : g) v /= sum;
        return g;
    }();
    return w;
}

}  // namespace

double l1(const Image& a, const Image& b) {
    check_shape(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) acc += std::abs(a.pixels[i] - b.pixels[i]);
    return acc / static_cast<double>(a.pixels.size());
}

double psnr(const Image& a, const Image& b) {
    check_shape(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.pixels.size());
    if (mse < 1e-12) return kPsnrCap;
    return -10.0 * std::log10(mse);
}

double ssim(const Image& a, const Image& b) {
    check_shape(a, b);
    if (a.height < kWin || a.width < kWin)
        throw std::invalid_argument("image smaller than SSIM window");
    const auto& win = gaussian_window();
    double total = 0.0;
    long count = 0;
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y + kWin <= a.height; ++y) {
            for (int x = 0; x + kWin <= a.width; ++x) {
                double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
                for (int i = 0; i < kWin; ++i) {
                    for (int j = 0; j < kWin; ++j) {
                        const double w = win[i * kWin + j];
                        const double va = a.at(y + i, x + j, c);
                        const double vb = b.at(y + i, x + j, c);
                        mx += w * va;
                        my += w * vb;
                        mxx += w * va * va;
                        myy += w * vb * vb;
                        mxy += w * va * vb;
                    }
                }
                const double vx = mxx - mx * mx;
                const double vy = myy - my * my;
                const double cov = mxy - mx * my;
                const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
                const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
                total += num / den;
                ++count;
            }
        }
    }
    return total / static_cast<double>(count);
}

MetricReport metric_report(const Image& a, const Image& b) {
    return {l1(a, b), psnr(a, b), ssim(a, b)};
}

}  // namespace gs2d
