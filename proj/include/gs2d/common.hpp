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

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gs2d {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    bool operator==(const Vec2&) const = default;
};

// 2x2 matrix, row-major: [[a b], [c d]].
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 rotation(double theta) {
        const double ct = std::cos(theta), st = std::sin(theta);
        return {ct, -st, st, ct};
    }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 inverse() const {
        const double det_inv = 1.0 / det();
        return {d * det_inv, -b * det_inv, -c * det_inv, a * det_inv};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    bool operator==(const Mat2&) const = default;
};

using Vec3 = std::array<double, 3>;

using Rng = std::mt19937_64;

// Hand-rolled draws so snapshot/restore captures the full generator state
// (std distributions carry hidden caches) and streams are stdlib-independent.
inline double draw_uniform(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double draw_normal(Rng& rng) {
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline std::uint64_t draw_below(Rng& rng, std::uint64_t n) {
    return rng() % n;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(draw_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace gs2d
