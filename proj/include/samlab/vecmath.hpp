#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "samlab/common.hpp"

namespace samlab {

using Vec = std::vector<double>;

// All reductions below run in fixed index order so results are
// independent of evaluation scheduling.

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm_squared(std::span<const double> v) { return dot(v, v); }

inline double norm(std::span<const double> v) { return std::sqrt(norm_squared(v)); }

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec scaled(std::span<const double> v, double a) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = a * v[i];
    return out;
}

inline Vec add_scaled(std::span<const double> base, double a, std::span<const double> dir) {
    Vec out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + a * dir[i];
    return out;
}

inline Vec subtract(std::span<const double> a, std::span<const double> b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

/// v / max(norm(v), floor); returns the zero vector unchanged if norm(v) <= floor.
inline Vec normalized_or_zero(std::span<const double> v, double floor) {
    const double n = norm(v);
    if (n <= floor) return Vec(v.size(), 0.0);
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

/// Cosine similarity, clamped into [-1, 1] to absorb float overshoot.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    const double c = dot(a, b) / (norm(a) * norm(b));
    if (c > 1.0) return 1.0;
    if (c < -1.0) return -1.0;
    return c;
}

/// Dense row-major matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    Vec data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    std::span<const double> row(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<double> row(int r) {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

} // namespace samlab
