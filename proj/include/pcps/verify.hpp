#pragma once

#include <cstdint>
#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "pcps/linalg.hpp"
#include "pcps/sketch.hpp"

namespace pcps {

// User-chosen diagonal that parameterizes the structural conditions:
// d holds q positive non-increasing entries followed by r - q zeros,
// m is the split index (1 <= m <= q), d_m the m-th entry.
struct SigmaTilde {
    Vector d;
    Index q = 0;
    Index m = 0;
    double d_m = 0.0;
};

// Measured left-hand sides of the four structural conditions plus the
// implied certificate:
//   lhs1  spectral deviation of the damped top-block Gram,
//   lhs2  cross-term Frobenius deviation,
//   lhs3  residual-Gram Frobenius deviation,
//   lhs4  residual squared-norm deviation,
//   eps_effective = max{lhs1, lhs2/rho, sqrt(k)*lhs3/rho^2, lhs4/rho^2}
//     with rho = ||A_{k,perp}||_F, the minimum of ||AX||_F over admissible X,
//   certified_error = (d_m^-2 + 2 d_m^-1 + 2) * eps_effective.
struct ConditionReport {
    double lhs1 = 0.0;
    double lhs2 = 0.0;
    double lhs3 = 0.0;
    double lhs4 = 0.0;
    double eps_effective = 0.0;
    double bound_constant = 0.0;
    double certified_error = 0.0;
    Index m = 0;
    Index k = 0;
};

// Binary construction: d = (1,...,1,0,...,0) with q = m = k, d_m = 1.
// The certificate constant is exactly 5.
SigmaTilde sigma_tilde_leverage(const ThinSvd& svd, Index k);

// Ridge construction: d_i = sigma_i / sqrt(sigma_i^2 + lambda), q = r,
// m from the context. d_m >= 1/sqrt(2), so the constant is at most
// 4 + 2*sqrt(2).
SigmaTilde sigma_tilde_ridge(const RidgeContext& ctx);

// Precomputed per-(matrix, SigmaTilde, k) state for evaluating many plans
// against the same fixture.
struct ConditionContext {
    Matrix u;              // n x r
    Matrix a_m_perp;       // n x d
    Matrix st_ut_amp;      // r x d, diag(d) U^T A_{m,perp}
    Matrix amp_gram;       // d x d
    double amp_fro_sq = 0.0;
    Vector st_d;
    double rho = 0.0;      // ||A_{k,perp}||_F
    Index m = 0;
    Index k = 0;
    double d_m = 0.0;
};

ConditionContext make_condition_context(const ThinSvd& svd, const SigmaTilde& st, Index k);

ConditionReport evaluate_conditions(const ConditionContext& ctx, const SamplingPlan& plan);
ConditionReport evaluate_conditions(const Matrix& a, const SamplingPlan& plan,
                                    const SigmaTilde& st, Index k);

// Relative projection-cost deviation | ||WAX||_F^2 - ||AX||_F^2 | / ||AX||_F^2
// for one test subspace complement X.
double pcp_error(const Matrix& a, const Matrix& wa, const OrthonormalBasis& x);

// || U^T (W^T W - I) U ||_2: the exact supremum of the relative projection
// cost deviation over all directions, and an upper bound on pcp_error for
// every k and X.
double worst_case_error(const Matrix& a, const SamplingPlan& plan);

struct VerifyResult {
    ConditionReport report;
    double max_observed = 0.0;
    bool holds = false;
};

// Evaluates the conditions, then measures pcp_error over x_samples random
// orthonormal X plus the adversarial X spanned by the trailing right
// singular directions. holds means
//   max_observed <= certified_error + 1e-9,
// which is checkable for every plan because eps_effective is measured.
VerifyResult verify_theorem(const Matrix& a, const SamplingPlan& plan, const SigmaTilde& st,
                            Index k, Index x_samples, std::uint64_t seed, int threads = 1);

nlohmann::ordered_json report_to_json(const ConditionReport& report);
nlohmann::ordered_json verify_result_to_json(const VerifyResult& result);

// Table with one row per condition: value, normalized value, target eps.
// rho is the residual norm ||A_{k,perp}||_F used for normalization.
void print_report_table(std::ostream& out, const ConditionReport& report, double rho,
                        double target_eps);

}  // namespace pcps
