#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/objective.hpp"
#include "samlab/prng.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

struct EigenEstimate {
    double value = 0.0;
    Vec vector;
    int iterations = 0;
    double residual = 0.0;  // |H v - lambda v| at the final iterate
    bool converged = false;
};

struct SpectrumReport {
    std::vector<EigenEstimate> eigenvalues;  // sorted by |value| descending
};

namespace detail {

inline void project_out(const std::vector<Vec>& basis, Vec& v) {
    for (const auto& q : basis) axpy(-dot(q, v), q, v);
}

} // namespace detail

/// Top-k Hessian eigenvalues by power iteration on finite-difference
/// Hessian-vector products. Later eigenpairs are obtained by projecting
/// previously found eigenvectors out of every iterate (deflation).
///
/// An estimate whose residual exceeds 1e-2 * |lambda| is reported anyway
/// but flagged as non-converged.
inline SpectrumReport hessian_spectrum(const Objective& obj, const ParamVector& w, int top_k, int iterations = 100,
                                       std::uint64_t seed = 1) {
    if (top_k < 1) throw ConfigError("spectrum needs top_k >= 1");
    if (iterations < 1) throw ConfigError("spectrum needs iterations >= 1");
    const std::size_t p = w.size();
    if (static_cast<std::size_t>(top_k) > p) throw ConfigError("top_k exceeds the parameter count");

    SpectrumReport report;
    Xoshiro256pp rng(seed);
    std::vector<Vec> found;

    for (int k = 0; k < top_k; ++k) {
        Vec v(p);
        for (auto& x : v) x = rng.normal();
        detail::project_out(found, v);
        double vn = norm(v);
        if (vn <= 1e-300) throw NumericError("spectrum: degenerate start vector");
        for (auto& x : v) x /= vn;

        EigenEstimate est;
        Vec hv;
        for (int it = 0; it < iterations; ++it) {
            hv = hessian_vector_product(obj, w, v);
            detail::project_out(found, hv);
            est.value = dot(v, hv);  // Rayleigh quotient, |v| = 1
            est.iterations = it + 1;
            Vec resid = hv;
            axpy(-est.value, v, resid);
            est.residual = norm(resid);
            const double hn = norm(hv);
            if (hn <= 1e-300) break;  // keep last estimate; direction exhausted
            for (std::size_t i = 0; i < p; ++i) v[i] = hv[i] / hn;
            if (est.residual <= 1e-10 * std::max(1.0, std::abs(est.value))) break;
        }
        est.converged = est.residual <= 1e-2 * std::abs(est.value);
        est.vector = v;
        found.push_back(v);
        report.eigenvalues.push_back(std::move(est));
    }

    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
              [](const EigenEstimate& a, const EigenEstimate& b) { return std::abs(a.value) > std::abs(b.value); });
    return report;
}

inline SpectrumReport hessian_spectrum(const ModelSpec& model, const ParamVector& params, const Batch& batch,
                                       int top_k, int iterations = 100, std::uint64_t seed = 1) {
    ModelObjective obj(model, batch);
    return hessian_spectrum(obj, params, top_k, iterations, seed);
}

} // namespace samlab
