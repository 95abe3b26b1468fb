#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pcps/linalg.hpp"

namespace pcps {

enum class Scheme { uniform, leverage_mixed, ridge };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

// Row-sampling distribution over the n rows of a matrix. beta records the
// guaranteed floor constant relative to the scheme's canonical scores
// (1/2 for the mixed leverage scheme, 1 for ridge and plain uniform), so
// downstream expectation bounds can use the matching constant.
struct ProbabilityVector {
    Vector p;
    double beta = 1.0;
    Scheme scheme = Scheme::uniform;

    Index size() const { return p.size(); }
};

// s i.i.d. row draws from source_probs with importance rescaling
//   scales[t] = (s * p[indices[t]])^(-1/2).
// The dense s x n sampling matrix is never materialized; apply_sketch
// consumes the plan directly. Plans loaded from JSON carry empty
// source_probs (only indices and scales are needed to apply them).
struct SamplingPlan {
    Index s = 0;
    std::vector<Index> indices;
    std::vector<double> scales;
    std::uint64_t seed = 0;
    ProbabilityVector source_probs;
};

// Ridge leverage state for lambda = ||A_{k,perp}||_F^2 / k:
//   tau: per-row ridge leverage scores, d_lambda their sum,
//   sigma_lambda: diagonal damping sigma_i / sqrt(sigma_i^2 + lambda),
//   m: largest split index with sigma_m^2 >= lambda (>= lambda >= sigma_{m+1}^2,
//      with sigma_{r+1} = 0).
struct RidgeContext {
    double lambda = 0.0;
    Vector tau;
    double d_lambda = 0.0;
    Index m = 0;
    Vector sigma_lambda;
};

ProbabilityVector uniform_probs(Index n);
// Uniform probabilities with beta measured against the mixed leverage
// scores of (a, k), for use in the sampling lemmas' beta-dependent bounds.
ProbabilityVector uniform_probs(const Matrix& a, Index k);

// p_i = (1/2) ||(U_k)_i||^2 / k + (1/2) ||(A_{k,perp})_i||^2 / ||A_{k,perp}||_F^2.
// When the rank-k residual vanishes (k = rank) the second term is dropped and
// the pure leverage distribution is returned with beta = 1.
ProbabilityVector leverage_mixed_probs(const Matrix& a, Index k);
ProbabilityVector leverage_mixed_probs(const ThinSvd& svd, Index k);

// p_i = tau_i / d_lambda with lambda = ||A_{k,perp}||_F^2 / k. Requires
// 1 <= k < rank; throws DegenerateError when no valid split index m exists
// (lambda above sigma_1^2, e.g. flat spectra).
std::pair<ProbabilityVector, RidgeContext> ridge_leverage_probs(const Matrix& a, Index k);
std::pair<ProbabilityVector, RidgeContext> ridge_leverage_probs(const ThinSvd& svd, Index k);

SamplingPlan build_sampling_plan(const ProbabilityVector& p, Index s, std::uint64_t seed);

// Returns the s x d matrix whose t-th row is scales[t] * a.row(indices[t]);
// equal to the dense product W * a without forming W. Cost O(s * d).
Matrix apply_sketch(const SamplingPlan& plan, const Matrix& a);

// Row counts sufficient for all four structural conditions at accuracy eps
// and failure probability delta, per sampling scheme.
Index sample_size_leverage(Index k, double eps, double delta);
Index sample_size_ridge(Index k, double eps, double delta);
// Spectral-norm concentration bound for a matrix with ||A||_2 <= 1,
// squared Frobenius mass frob_sq, and probability floor beta.
Index sample_size_spectral(double frob_sq, double beta, double eps, double delta);

// JSON schema: {s, seed, scheme, indices[], scales[]}. indices are 0-based.
nlohmann::ordered_json plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const nlohmann::ordered_json& j);

// One probability per line, shortest round-trip form.
void write_probabilities_csv(std::ostream& out, const ProbabilityVector& p);
Vector read_probabilities_csv(std::istream& in);

}  // namespace pcps
