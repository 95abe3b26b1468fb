#include "pcps/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcps/errors.hpp"
#include "pcps/parallel.hpp"
#include "pcps/rng.hpp"

namespace pcps {

SigmaTilde sigma_tilde_leverage(const ThinSvd& svd, Index k) {
    if (k < 1 || k > svd.rank)
        throw ParameterError("sigma_tilde_leverage: k must lie in [1, rank]");
    SigmaTilde st;
    st.d = Vector::Zero(svd.rank);
    st.d.head(k).setOnes();
    st.q = k;
    st.m = k;
    st.d_m = 1.0;
    return st;
}

SigmaTilde sigma_tilde_ridge(const RidgeContext& ctx) {
    if (ctx.m < 1 || ctx.m > ctx.sigma_lambda.size())
        throw ParameterError("sigma_tilde_ridge: invalid ridge context");
    SigmaTilde st;
    st.d = ctx.sigma_lambda;
    st.q = ctx.sigma_lambda.size();
    st.m = ctx.m;
    st.d_m = ctx.sigma_lambda(ctx.m - 1);
    return st;
}

ConditionContext make_condition_context(const ThinSvd& svd, const SigmaTilde& st, Index k) {
    const Index r = svd.rank;
    if (st.d.size() != r)
        throw DimensionError("make_condition_context: SigmaTilde size does not match rank");
    if (st.m < 1 || st.m > st.q || st.q > r)
        throw ParameterError("make_condition_context: need 1 <= m <= q <= rank");
    if (k < 1 || k > r)
        throw ParameterError("make_condition_context: k must lie in [1, rank]");

    ConditionContext ctx;
    ctx.u = svd.u;
    ctx.st_d = st.d;
    ctx.m = st.m;
    ctx.k = k;
    ctx.d_m = st.d_m;

    const RankSplit split = rank_split(svd, st.m);
    ctx.a_m_perp = split.a_m_perp;
    ctx.st_ut_amp = st.d.asDiagonal() * (svd.u.transpose() * ctx.a_m_perp);
    ctx.amp_gram = ctx.a_m_perp.transpose() * ctx.a_m_perp;
    ctx.amp_fro_sq = ctx.a_m_perp.squaredNorm();

    double tail = 0.0;
    for (Index i = k; i < r; ++i) tail += svd.sigma(i) * svd.sigma(i);
    ctx.rho = std::sqrt(tail);
    return ctx;
}

ConditionReport evaluate_conditions(const ConditionContext& ctx, const SamplingPlan& plan) {
    ConditionReport rep;
    rep.m = ctx.m;
    rep.k = ctx.k;

    // All W^T W products go through the sketched factors.
    const Matrix wu_st = apply_sketch(plan, ctx.u) * ctx.st_d.asDiagonal();  // s x r
    Matrix gram1 = wu_st.transpose() * wu_st;
    gram1.diagonal() -= ctx.st_d.cwiseProduct(ctx.st_d);
    rep.lhs1 = spectral_norm_symmetric(gram1);

    const Matrix w_amp = apply_sketch(plan, ctx.a_m_perp);  // s x d
    rep.lhs2 = (wu_st.transpose() * w_amp - ctx.st_ut_amp).norm();
    rep.lhs3 = (w_amp.transpose() * w_amp - ctx.amp_gram).norm();
    rep.lhs4 = std::abs(w_amp.squaredNorm() - ctx.amp_fro_sq);

    if (ctx.rho > 0.0) {
        const double rho2 = ctx.rho * ctx.rho;
        rep.eps_effective = std::max({rep.lhs1, rep.lhs2 / ctx.rho,
                                      std::sqrt(static_cast<double>(ctx.k)) * rep.lhs3 / rho2,
                                      rep.lhs4 / rho2});
    } else {
        // Vanishing rank-k residual: the residual conditions hold trivially.
        rep.eps_effective = rep.lhs1;
    }
    rep.bound_constant = 1.0 / (ctx.d_m * ctx.d_m) + 2.0 / ctx.d_m + 2.0;
    rep.certified_error = rep.bound_constant * rep.eps_effective;
    return rep;
}

ConditionReport evaluate_conditions(const Matrix& a, const SamplingPlan& plan,
                                    const SigmaTilde& st, Index k) {
    const ThinSvd svd = thin_svd(a);
    return evaluate_conditions(make_condition_context(svd, st, k), plan);
}

double pcp_error(const Matrix& a, const Matrix& wa, const OrthonormalBasis& x) {
    if (x.matrix.rows() != a.cols() || wa.cols() != a.cols())
        throw DimensionError("pcp_error: column/basis dimensions do not match");
    const double base = (a * x.matrix).squaredNorm();
    const double sketched = (wa * x.matrix).squaredNorm();
    if (base == 0.0) {
        if (sketched == 0.0) return 0.0;
        throw DegenerateError("pcp_error: ||AX|| vanishes but ||WAX|| does not");
    }
    return std::abs(sketched - base) / base;
}

double worst_case_error(const Matrix& a, const SamplingPlan& plan) {
    const ThinSvd svd = thin_svd(a);
    const Matrix wu = apply_sketch(plan, svd.u);
    Matrix gram = wu.transpose() * wu;
    gram.diagonal().array() -= 1.0;
    return spectral_norm_symmetric(gram);
}

namespace {

// Orthonormal basis minimizing ||AX||_F: the null space of A padded with the
// trailing right singular directions beyond k.
Matrix adversarial_x(const ThinSvd& svd, Index d, Index k) {
    const Index r = svd.rank;
    Matrix x(d, d - k);
    Index col = 0;
    if (r < d) {
        const OrthonormalBasis null_space =
            complement_basis(OrthonormalBasis{svd.v, r});
        x.leftCols(d - r) = null_space.matrix;
        col = d - r;
    }
    for (Index i = k; i < r; ++i) x.col(col++) = svd.v.col(i);
    return x;
}

}  // namespace

VerifyResult verify_theorem(const Matrix& a, const SamplingPlan& plan, const SigmaTilde& st,
                            Index k, Index x_samples, std::uint64_t seed, int threads) {
    const ThinSvd svd = thin_svd(a);
    const ConditionContext ctx = make_condition_context(svd, st, k);

    VerifyResult result;
    result.report = evaluate_conditions(ctx, plan);

    const Matrix wa = apply_sketch(plan, a);
    const Index d = a.cols();
    if (k >= d)
        throw ParameterError("verify_theorem: k must be smaller than the column count");

    // An X with ||AX|| below the rounding floor is an exact zero of the cost,
    // so its deviation is zero as well.
    const double zero_floor = std::pow(1e-14 * a.norm(), 2);

    std::vector<double> observed(static_cast<std::size_t>(x_samples) + 1, 0.0);
    parallel_for(x_samples + 1, threads, [&](std::int64_t i) {
        Matrix x_mat;
        if (i < x_samples) {
            x_mat = haar_orthonormal(d, d - k, derive_seed(seed, static_cast<std::uint64_t>(i)))
                        .matrix;
        } else {
            x_mat = adversarial_x(svd, d, k);
        }
        const double base = (a * x_mat).squaredNorm();
        if (base <= zero_floor) {
            observed[static_cast<std::size_t>(i)] = 0.0;
            return;
        }
        const double sketched = (wa * x_mat).squaredNorm();
        observed[static_cast<std::size_t>(i)] = std::abs(sketched - base) / base;
    });

    result.max_observed = 0.0;
    for (double v : observed) result.max_observed = std::max(result.max_observed, v);
    result.holds = result.max_observed <= result.report.certified_error + 1e-9;
    return result;
}

nlohmann::ordered_json report_to_json(const ConditionReport& report) {
    nlohmann::ordered_json j;
    j["lhs1"] = report.lhs1;
    j["lhs2"] = report.lhs2;
    j["lhs3"] = report.lhs3;
    j["lhs4"] = report.lhs4;
    j["eps_effective"] = report.eps_effective;
    j["bound_constant"] = report.bound_constant;
    j["certified_error"] = report.certified_error;
    j["m"] = report.m;
    j["k"] = report.k;
    return j;
}

nlohmann::ordered_json verify_result_to_json(const VerifyResult& result) {
    nlohmann::ordered_json j;
    j["report"] = report_to_json(result.report);
    j["max_observed"] = result.max_observed;
    j["holds"] = result.holds;
    return j;
}

void print_report_table(std::ostream& out, const ConditionReport& report, double rho,
                        double target_eps) {
    const double rho2 = rho * rho;
    const double sqrt_k = std::sqrt(static_cast<double>(report.k));
    const auto normalized = [&](double value, double divisor) {
        return rho > 0.0 ? value / divisor : 0.0;
    };

    out << std::left << std::setprecision(6);
    out << std::setw(30) << "condition" << std::setw(16) << "value" << std::setw(16)
        << "normalized" << "target eps" << '\n';
    const auto row = [&](const char* name, double value, double norm_value) {
        out << std::setw(30) << name << std::setw(16) << value << std::setw(16) << norm_value
            << target_eps << '\n';
    };
    row("spectral top-block (lhs1)", report.lhs1, report.lhs1);
    row("cross term (lhs2)", report.lhs2, normalized(report.lhs2, rho));
    row("residual gram (lhs3)", report.lhs3, normalized(sqrt_k * report.lhs3, rho2));
    row("residual norm (lhs4)", report.lhs4, normalized(report.lhs4, rho2));
    out << std::setw(30) << "eps_effective" << report.eps_effective << '\n';
    out << std::setw(30) << "bound_constant" << report.bound_constant << '\n';
    out << std::setw(30) << "certified_error" << report.certified_error << '\n';
}

}  // namespace pcps
