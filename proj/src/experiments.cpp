#include "pcps/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "pcps/errors.hpp"
#include "pcps/parallel.hpp"
#include "pcps/rng.hpp"

namespace pcps {

TrialStats aggregate_trials(const std::vector<double>& values, double threshold) {
    TrialStats stats;
    stats.trials = static_cast<Index>(values.size());
    stats.threshold = threshold;
    if (values.empty()) return stats;

    double sum = 0.0;
    for (double v : values) {
        sum += v;
        stats.max = std::max(stats.max, v);
        if (v > threshold) ++stats.failures;
    }
    stats.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
    stats.variance = sq / static_cast<double>(values.size());
    return stats;
}

ClusterAssignment make_assignment(std::vector<int> labels, int k) {
    if (k < 1)
        throw ParameterError("make_assignment: k must be >= 1");
    ClusterAssignment assign;
    assign.sizes.assign(static_cast<std::size_t>(k), 0);
    for (int label : labels) {
        if (label < 0 || label >= k)
            throw ParameterError("make_assignment: label out of range");
        ++assign.sizes[static_cast<std::size_t>(label)];
    }
    for (Index size : assign.sizes)
        if (size == 0)
            throw ParameterError("make_assignment: empty cluster");
    assign.labels = std::move(labels);
    return assign;
}

namespace {

void check_sampling_dims(const Matrix& a, const Matrix& b, const ProbabilityVector& p,
                         const char* what) {
    if (a.cols() != b.rows())
        throw DimensionError(std::string(what) + ": inner dimensions do not match");
    if (p.size() != a.cols())
        throw DimensionError(std::string(what) + ": probability length does not match");
    for (Index i = 0; i < p.size(); ++i) {
        if (p.p(i) == 0.0 && a.col(i).norm() * b.row(i).norm() > 0.0) {
            std::cerr << what << ": warning: p_" << i
                      << " = 0 on a contributing column, the expectation bound is infinite\n";
            break;
        }
    }
}

std::vector<double> run_trials(Index trials, std::uint64_t seed, int threads,
                               const std::function<double(std::uint64_t)>& one_trial) {
    if (trials < 1)
        throw ParameterError("trial count must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](std::int64_t i) {
        values[static_cast<std::size_t>(i)] =
            one_trial(derive_seed(seed, static_cast<std::uint64_t>(i)));
    });
    return values;
}

}  // namespace

TrialStats matmul_error_trials(const Matrix& a, const Matrix& b, const ProbabilityVector& p,
                               Index s, Index trials, std::uint64_t seed, int threads) {
    check_sampling_dims(a, b, p, "matmul_error_trials");
    const Matrix at = a.transpose();
    const Matrix ab = a * b;
    const auto values = run_trials(trials, seed, threads, [&](std::uint64_t trial_seed) {
        const SamplingPlan plan = build_sampling_plan(p, s, trial_seed);
        const Matrix aw = apply_sketch(plan, at);  // s x m
        const Matrix wb = apply_sketch(plan, b);   // s x p
        return (aw.transpose() * wb - ab).squaredNorm();
    });
    return aggregate_trials(values, std::numeric_limits<double>::infinity());
}

TrialStats trace_error_trials(const Matrix& a, const Matrix& b, const ProbabilityVector& p,
                              Index s, Index trials, std::uint64_t seed, int threads) {
    check_sampling_dims(a, b, p, "trace_error_trials");
    if (a.rows() != b.cols())
        throw DimensionError("trace_error_trials: AB is not square");
    const Matrix at = a.transpose();
    const double tr_ab = (a * b).trace();
    const auto values = run_trials(trials, seed, threads, [&](std::uint64_t trial_seed) {
        const SamplingPlan plan = build_sampling_plan(p, s, trial_seed);
        const Matrix aw = apply_sketch(plan, at);
        const Matrix wb = apply_sketch(plan, b);
        const double diff = (aw.transpose() * wb).trace() - tr_ab;
        return diff * diff;
    });
    return aggregate_trials(values, std::numeric_limits<double>::infinity());
}

namespace {

// Walks every index sequence in {0..n-1}^s, accumulating the probability-
// weighted value of fn(sequence). Sequences containing a zero-probability
// index have zero weight and are skipped.
template <typename Fn>
double enumerate_sequences(Index n, Index s, const ProbabilityVector& p, Fn&& fn) {
    double total_sequences = std::pow(static_cast<double>(n), static_cast<double>(s));
    if (total_sequences > 64.0)
        throw ParameterError("exhaustive mode limited to n^s <= 64 sequences");

    std::vector<Index> seq(static_cast<std::size_t>(s), 0);
    double acc = 0.0;
    while (true) {
        double weight = 1.0;
        for (Index t = 0; t < s; ++t) weight *= p.p(seq[static_cast<std::size_t>(t)]);
        if (weight > 0.0) acc += weight * fn(seq);

        Index pos = 0;
        while (pos < s) {
            if (++seq[static_cast<std::size_t>(pos)] < n) break;
            seq[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == s) break;
    }
    return acc;
}

}  // namespace

ExactExpectation matmul_error_exhaustive(const Matrix& a, const Matrix& b,
                                         const ProbabilityVector& p, Index s) {
    check_sampling_dims(a, b, p, "matmul_error_exhaustive");
    const Index n = a.cols();
    const Matrix ab = a * b;

    ExactExpectation out;
    out.mean = enumerate_sequences(n, s, p, [&](const std::vector<Index>& seq) {
        Matrix approx = Matrix::Zero(a.rows(), b.cols());
        for (Index j : seq)
            approx += (a.col(j) * b.row(j)) / (static_cast<double>(s) * p.p(j));
        return (approx - ab).squaredNorm();
    });
    for (Index i = 0; i < n; ++i)
        if (p.p(i) > 0.0)
            out.bound += a.col(i).squaredNorm() * b.row(i).squaredNorm() /
                         (static_cast<double>(s) * p.p(i));
    return out;
}

ExactExpectation trace_error_exhaustive(const Matrix& a, const Matrix& b,
                                        const ProbabilityVector& p, Index s) {
    check_sampling_dims(a, b, p, "trace_error_exhaustive");
    if (a.rows() != b.cols())
        throw DimensionError("trace_error_exhaustive: AB is not square");
    const Index n = a.cols();
    const double tr_ab = (a * b).trace();

    ExactExpectation out;
    out.mean = enumerate_sequences(n, s, p, [&](const std::vector<Index>& seq) {
        double tr = 0.0;
        for (Index j : seq)
            tr += b.row(j).dot(a.col(j)) / (static_cast<double>(s) * p.p(j));
        return (tr - tr_ab) * (tr - tr_ab);
    });
    for (Index i = 0; i < n; ++i) {
        if (p.p(i) > 0.0) {
            const double ba_ii = b.row(i).dot(a.col(i));
            out.bound += ba_ii * ba_ii / (static_cast<double>(s) * p.p(i));
        }
    }
    return out;
}

TrialStats spectral_concentration_trials(const Matrix& a, const ProbabilityVector& p, Index s,
                                         double eps, Index trials, std::uint64_t seed,
                                         int threads) {
    if (p.size() != a.cols())
        throw DimensionError("spectral_concentration_trials: probability length mismatch");
    if (spectral_norm(a) > 1.0 + 1e-10)
        throw ParameterError("spectral_concentration_trials: ||a||_2 must be <= 1");

    const Matrix at = a.transpose();
    const Matrix gram = a * at;
    const auto values = run_trials(trials, seed, threads, [&](std::uint64_t trial_seed) {
        const SamplingPlan plan = build_sampling_plan(p, s, trial_seed);
        const Matrix sk = apply_sketch(plan, at);  // s x m
        return spectral_norm_symmetric(sk.transpose() * sk - gram);
    });
    return aggregate_trials(values, eps);
}

TrialStats scheme_failure_rate(const Matrix& a, Index k, Scheme scheme, double eps,
                               double delta, Index trials, std::uint64_t seed, int threads,
                               const PlanFactory* plan_factory) {
    if (scheme != Scheme::leverage_mixed && scheme != Scheme::ridge)
        throw ParameterError("scheme_failure_rate: scheme must be leverage_mixed or ridge");

    const ThinSvd svd = thin_svd(a);
    ProbabilityVector probs;
    SigmaTilde st;
    Index s = 0;
    if (scheme == Scheme::leverage_mixed) {
        probs = leverage_mixed_probs(svd, k);
        st = sigma_tilde_leverage(svd, k);
        s = sample_size_leverage(k, eps, delta);
    } else {
        auto [p, ctx] = ridge_leverage_probs(svd, k);
        probs = std::move(p);
        st = sigma_tilde_ridge(ctx);
        s = sample_size_ridge(k, eps, delta);
    }
    const ConditionContext ctx = make_condition_context(svd, st, k);

    const auto values = run_trials(trials, seed, threads, [&](std::uint64_t trial_seed) {
        const SamplingPlan plan =
            plan_factory ? (*plan_factory)(trial_seed) : build_sampling_plan(probs, s, trial_seed);
        return evaluate_conditions(ctx, plan).eps_effective;
    });
    return aggregate_trials(values, eps);
}

OrthonormalBasis kmeans_membership(const ClusterAssignment& assign) {
    const Index d = assign.points();
    const Index k = assign.clusters();
    for (Index size : assign.sizes)
        if (size == 0)
            throw ParameterError("kmeans_membership: empty cluster");

    Matrix x = Matrix::Zero(d, k);
    for (Index i = 0; i < d; ++i) {
        const int j = assign.labels[static_cast<std::size_t>(i)];
        x(i, j) = 1.0 / std::sqrt(static_cast<double>(assign.sizes[static_cast<std::size_t>(j)]));
    }
    return OrthonormalBasis{x, k};
}

double clustering_cost(const Matrix& a, const ClusterAssignment& assign) {
    if (a.cols() != assign.points())
        throw DimensionError("clustering_cost: column count does not match assignment");
    const OrthonormalBasis x = kmeans_membership(assign);
    return (a - (a * x.matrix) * x.matrix.transpose()).squaredNorm();
}

double sketched_clustering_gap(const Matrix& a, const Matrix& wa,
                               const ClusterAssignment& assign) {
    const double base = clustering_cost(a, assign);
    if (base == 0.0)
        throw DegenerateError("sketched_clustering_gap: zero-cost assignment");
    const double sketched = clustering_cost(wa, assign);
    return std::abs(sketched - base) / base;
}

ClusterAssignment random_assignment(Index points, int k, std::uint64_t seed) {
    if (points < k)
        throw ParameterError("random_assignment: fewer points than clusters");
    Rng rng(seed);
    std::vector<int> labels(static_cast<std::size_t>(points));
    for (auto& label : labels)
        label = static_cast<int>(rng.uniform() * k);

    // Repair empty clusters by stealing from the largest one.
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (int label : labels) ++sizes[static_cast<std::size_t>(label)];
    for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) continue;
        const int donor = static_cast<int>(
            std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        for (auto& label : labels) {
            if (label == donor) {
                label = c;
                --sizes[static_cast<std::size_t>(donor)];
                ++sizes[static_cast<std::size_t>(c)];
                break;
            }
        }
    }
    return make_assignment(std::move(labels), k);
}

ClusterAssignment lloyd_step(const Matrix& a, const ClusterAssignment& assign) {
    const Index d = a.cols();
    const Index k = assign.clusters();
    if (d != assign.points())
        throw DimensionError("lloyd_step: column count does not match assignment");

    Matrix centroids = Matrix::Zero(a.rows(), k);
    for (Index i = 0; i < d; ++i)
        centroids.col(assign.labels[static_cast<std::size_t>(i)]) += a.col(i);
    for (Index j = 0; j < k; ++j)
        centroids.col(j) /= static_cast<double>(assign.sizes[static_cast<std::size_t>(j)]);

    std::vector<int> labels(static_cast<std::size_t>(d));
    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < d; ++i) {
        Index best = 0;
        double best_dist = (a.col(i) - centroids.col(0)).squaredNorm();
        for (Index j = 1; j < k; ++j) {
            const double dist = (a.col(i) - centroids.col(j)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        ++sizes[static_cast<std::size_t>(best)];
    }

    // Repair empties: move the point farthest from its centroid.
    for (Index c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) continue;
        Index worst = -1;
        double worst_dist = -1.0;
        for (Index i = 0; i < d; ++i) {
            const int j = labels[static_cast<std::size_t>(i)];
            if (sizes[static_cast<std::size_t>(j)] < 2) continue;
            const double dist = (a.col(i) - centroids.col(j)).squaredNorm();
            if (dist > worst_dist) {
                worst_dist = dist;
                worst = i;
            }
        }
        if (worst < 0)
            throw DegenerateError("lloyd_step: cannot repair empty cluster");
        --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(worst)])];
        labels[static_cast<std::size_t>(worst)] = static_cast<int>(c);
        ++sizes[static_cast<std::size_t>(c)];
    }
    return make_assignment(std::move(labels), static_cast<int>(k));
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    if (rows < 1 || cols < 1)
        throw ParameterError("gaussian_matrix: dimensions must be positive");
    Rng rng(seed);
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
    return a;
}

Matrix powerlaw_matrix(Index rows, Index cols, double alpha, std::uint64_t seed) {
    if (rows < 1 || cols < 1)
        throw ParameterError("powerlaw_matrix: dimensions must be positive");
    const Index r = std::min(rows, cols);
    const OrthonormalBasis u = haar_orthonormal(rows, r, derive_seed(seed, 0));
    const OrthonormalBasis v = haar_orthonormal(cols, r, derive_seed(seed, 1));
    Vector sigma(r);
    for (Index i = 0; i < r; ++i)
        sigma(i) = std::pow(static_cast<double>(i + 1), -alpha);
    return u.matrix * sigma.asDiagonal() * v.matrix.transpose();
}

Matrix lowrank_noise_matrix(Index rows, Index cols, Index r, double noise, std::uint64_t seed) {
    if (r < 1 || r > std::min(rows, cols))
        throw ParameterError("lowrank_noise_matrix: rank out of range");
    const OrthonormalBasis u = haar_orthonormal(rows, r, derive_seed(seed, 0));
    const OrthonormalBasis v = haar_orthonormal(cols, r, derive_seed(seed, 1));
    Matrix a = u.matrix * v.matrix.transpose();
    if (noise > 0.0) a += noise * gaussian_matrix(rows, cols, derive_seed(seed, 2));
    return a;
}

Matrix gaussian_mixture(Index ambient, Index points, int clusters, double separation,
                        std::uint64_t seed, ClusterAssignment* truth) {
    if (clusters < 1 || points < clusters)
        throw ParameterError("gaussian_mixture: need at least one point per cluster");
    Rng rng(derive_seed(seed, 0));
    Matrix centers(ambient, clusters);
    for (Index i = 0; i < ambient; ++i)
        for (int j = 0; j < clusters; ++j) centers(i, j) = separation * rng.normal();

    Rng point_rng(derive_seed(seed, 1));
    Matrix a(ambient, points);
    std::vector<int> labels(static_cast<std::size_t>(points));
    for (Index i = 0; i < points; ++i) {
        // Round-robin base guarantees non-empty clusters.
        const int label = static_cast<int>(i % clusters);
        labels[static_cast<std::size_t>(i)] = label;
        for (Index row = 0; row < ambient; ++row)
            a(row, i) = centers(row, label) + point_rng.normal();
    }
    if (truth) *truth = make_assignment(labels, clusters);
    return a;
}

}  // namespace pcps
