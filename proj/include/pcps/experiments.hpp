#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pcps/linalg.hpp"
#include "pcps/sketch.hpp"
#include "pcps/verify.hpp"

namespace pcps {

// Aggregate over a batch of trial values. failures counts values strictly
// above threshold (threshold = +inf when no acceptance level applies).
struct TrialStats {
    Index trials = 0;
    double mean = 0.0;
    double variance = 0.0;
    double max = 0.0;
    Index failures = 0;
    double threshold = 0.0;
};

TrialStats aggregate_trials(const std::vector<double>& values, double threshold);

// Cluster labels for the d columns of a data matrix; labels are 0-based,
// every cluster non-empty.
struct ClusterAssignment {
    std::vector<int> labels;
    std::vector<Index> sizes;

    Index points() const { return static_cast<Index>(labels.size()); }
    Index clusters() const { return static_cast<Index>(sizes.size()); }
};

ClusterAssignment make_assignment(std::vector<int> labels, int k);

// --- randomized matrix multiplication harnesses -----------------------------

// Per trial: ||A W^T W B - A B||_F^2 for a fresh plan from p with s draws.
TrialStats matmul_error_trials(const Matrix& a, const Matrix& b, const ProbabilityVector& p,
                               Index s, Index trials, std::uint64_t seed, int threads = 1);

// Per trial: (tr(A W^T W B - A B))^2. Requires AB square.
TrialStats trace_error_trials(const Matrix& a, const Matrix& b, const ProbabilityVector& p,
                              Index s, Index trials, std::uint64_t seed, int threads = 1);

// Probability-weighted enumeration of every index sequence (noise-free
// expectation). Restricted to n^s <= 64 sequences. bound is the per-column
// expectation bound sum_i ||A_i||^2 ||B_i||^2 / (s p_i) for the Frobenius
// variant and sum_i [(BA)_ii]^2 / (s p_i) for the trace variant.
struct ExactExpectation {
    double mean = 0.0;
    double bound = 0.0;
};
ExactExpectation matmul_error_exhaustive(const Matrix& a, const Matrix& b,
                                         const ProbabilityVector& p, Index s);
ExactExpectation trace_error_exhaustive(const Matrix& a, const Matrix& b,
                                        const ProbabilityVector& p, Index s);

// Per trial: ||A W^T W A^T - A A^T||_2 where W samples the columns of a.
// Requires ||a||_2 <= 1; failures count exceedances of eps.
TrialStats spectral_concentration_trials(const Matrix& a, const ProbabilityVector& p, Index s,
                                         double eps, Index trials, std::uint64_t seed,
                                         int threads = 1);

// Per trial: build the scheme's probabilities, plan at the scheme's sample
// size, SigmaTilde, and count eps_effective > eps. The optional plan_factory
// (test hook) replaces plan construction.
using PlanFactory = std::function<SamplingPlan(std::uint64_t)>;
TrialStats scheme_failure_rate(const Matrix& a, Index k, Scheme scheme, double eps,
                               double delta, Index trials, std::uint64_t seed, int threads = 1,
                               const PlanFactory* plan_factory = nullptr);

// --- k-means cost preservation ----------------------------------------------

// d x k rescaled membership matrix: X_{ij} = 1/sqrt(s_j) when column i of the
// data matrix belongs to cluster j. Columns are orthonormal.
OrthonormalBasis kmeans_membership(const ClusterAssignment& assign);

// ||A - A X X^T||_F^2: the k-means sum of squared distances to centroids.
double clustering_cost(const Matrix& a, const ClusterAssignment& assign);

// |cost(WA) - cost(A)| / cost(A).
double sketched_clustering_gap(const Matrix& a, const Matrix& wa,
                               const ClusterAssignment& assign);

ClusterAssignment random_assignment(Index points, int k, std::uint64_t seed);

// Nearest-centroid reassignment (one Lloyd step); empty clusters are repaired
// by stealing the most expensive point from a larger cluster.
ClusterAssignment lloyd_step(const Matrix& a, const ClusterAssignment& assign);

// --- synthetic matrix families ----------------------------------------------

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);
// Haar factors with singular values sigma_i = i^(-alpha).
Matrix powerlaw_matrix(Index rows, Index cols, double alpha, std::uint64_t seed);
// Rank-r Haar product plus iid N(0, noise^2) entries.
Matrix lowrank_noise_matrix(Index rows, Index cols, Index r, double noise, std::uint64_t seed);
// Columns are points drawn from `clusters` Gaussian blobs with centers of
// scale `separation`. Ground-truth labels are returned when requested.
Matrix gaussian_mixture(Index ambient, Index points, int clusters, double separation,
                        std::uint64_t seed, ClusterAssignment* truth = nullptr);

}  // namespace pcps
