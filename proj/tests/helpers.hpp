#pragma once

#include <cmath>

#include "pcps/linalg.hpp"
#include "pcps/rng.hpp"
#include "pcps/sketch.hpp"

namespace pcps::testing {

// Test-only dense materialization of the sampling-and-rescaling matrix.
// Kept independent of apply_sketch so it can serve as its oracle.
inline Matrix dense_w(const SamplingPlan& plan, Index n) {
    Matrix w = Matrix::Zero(plan.s, n);
    for (Index t = 0; t < plan.s; ++t)
        w(t, plan.indices[static_cast<std::size_t>(t)]) =
            plan.scales[static_cast<std::size_t>(t)];
    return w;
}

// Identity sketch: every row sampled exactly once with unit scale, so
// W^T W = I holds exactly.
inline SamplingPlan identity_plan(Index n) {
    SamplingPlan plan;
    plan.s = n;
    plan.seed = 0;
    plan.indices.resize(static_cast<std::size_t>(n));
    plan.scales.assign(static_cast<std::size_t>(n), 1.0);
    for (Index i = 0; i < n; ++i) plan.indices[static_cast<std::size_t>(i)] = i;
    plan.source_probs = uniform_probs(n);
    // Unit scales correspond to s = n draws at p = 1/n.
    return plan;
}

inline Matrix random_gaussian(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
    return a;
}

// Spectral norm by power iteration on A^T A; independent of the SVD path.
inline double power_iteration_norm(const Matrix& a, int iters = 300) {
    Vector x = Vector::Ones(a.cols());
    x /= x.norm();
    double value = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector y = a.transpose() * (a * x);
        const double norm = y.norm();
        if (norm == 0.0) return 0.0;
        x = y / norm;
        value = norm;
    }
    return std::sqrt(value);
}

}  // namespace pcps::testing
