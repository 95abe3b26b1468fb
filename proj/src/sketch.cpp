#include "pcps/sketch.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pcps/errors.hpp"
#include "pcps/io.hpp"
#include "pcps/rng.hpp"

namespace pcps {

namespace {

// One renormalization pass. The factor must already be within 1e-12 of one;
// a larger drift means the construction itself is wrong.
void finalize_probs(Vector& p) {
    const double total = p.sum();
    if (std::abs(total - 1.0) > 1e-12)
        throw DegenerateError("probability vector drifted from unit mass: sum = " +
                              format_double(total));
    p /= total;
}

Vector mixed_scores(const ThinSvd& svd, Index k, double* beta_out) {
    const Index n = svd.u.rows();
    const Index r = svd.rank;
    if (k < 1)
        throw ParameterError("leverage_mixed_probs: k must be >= 1");
    if (k > r)
        throw ParameterError("leverage_mixed_probs: k exceeds rank " + std::to_string(r));

    Vector lev(n);
    for (Index i = 0; i < n; ++i)
        lev(i) = svd.u.row(i).head(k).squaredNorm();

    if (k == r) {
        // Rank-k residual vanishes; pure leverage distribution.
        Vector p = lev / static_cast<double>(k);
        *beta_out = 1.0;
        return p;
    }

    const RankSplit split = rank_split(svd, k);
    Vector res(n);
    for (Index i = 0; i < n; ++i)
        res(i) = split.a_m_perp.row(i).squaredNorm();
    const double res_total = res.sum();

    Vector p = 0.5 * lev / static_cast<double>(k) + 0.5 * res / res_total;
    *beta_out = 0.5;
    return p;
}

}  // namespace

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::uniform: return "uniform";
        case Scheme::leverage_mixed: return "leverage_mixed";
        case Scheme::ridge: return "ridge";
    }
    throw ParameterError("unknown scheme tag");
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "uniform") return Scheme::uniform;
    if (name == "leverage_mixed" || name == "leverage") return Scheme::leverage_mixed;
    if (name == "ridge") return Scheme::ridge;
    throw ParameterError("unknown scheme: " + name);
}

ProbabilityVector uniform_probs(Index n) {
    if (n < 1)
        throw ParameterError("uniform_probs: n must be >= 1");
    ProbabilityVector out;
    out.p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    out.beta = 1.0;
    out.scheme = Scheme::uniform;
    finalize_probs(out.p);
    return out;
}

ProbabilityVector uniform_probs(const Matrix& a, Index k) {
    ProbabilityVector out = uniform_probs(a.rows());
    const ProbabilityVector canonical = leverage_mixed_probs(a, k);
    double beta = 1.0;
    for (Index i = 0; i < canonical.size(); ++i)
        if (canonical.p(i) > 0.0)
            beta = std::min(beta, out.p(i) / canonical.p(i));
    out.beta = beta;
    return out;
}

ProbabilityVector leverage_mixed_probs(const ThinSvd& svd, Index k) {
    ProbabilityVector out;
    out.scheme = Scheme::leverage_mixed;
    out.p = mixed_scores(svd, k, &out.beta);
    finalize_probs(out.p);
    return out;
}

ProbabilityVector leverage_mixed_probs(const Matrix& a, Index k) {
    return leverage_mixed_probs(thin_svd(a), k);
}

std::pair<ProbabilityVector, RidgeContext> ridge_leverage_probs(const ThinSvd& svd, Index k) {
    const Index r = svd.rank;
    if (k < 1)
        throw ParameterError("ridge_leverage_probs: k must be >= 1");
    if (k >= r)
        throw DegenerateError(
            "ridge_leverage_probs: rank-k residual vanishes, lambda would be zero");

    RidgeContext ctx;
    double tail = 0.0;
    for (Index i = k; i < r; ++i) tail += svd.sigma(i) * svd.sigma(i);
    ctx.lambda = tail / static_cast<double>(k);

    ctx.sigma_lambda = Vector(r);
    for (Index i = 0; i < r; ++i) {
        const double s2 = svd.sigma(i) * svd.sigma(i);
        ctx.sigma_lambda(i) = svd.sigma(i) / std::sqrt(s2 + ctx.lambda);
    }

    // Largest m with sigma_m^2 >= lambda; sigma_{m+1}^2 <= lambda follows.
    Index m = 0;
    for (Index i = 0; i < r; ++i)
        if (svd.sigma(i) * svd.sigma(i) >= ctx.lambda) m = i + 1;
    if (m == 0)
        throw DegenerateError(
            "ridge_leverage_probs: no split index m satisfies sigma_m^2 >= lambda "
            "(lambda = " + format_double(ctx.lambda) +
            " exceeds sigma_1^2 = " + format_double(svd.sigma(0) * svd.sigma(0)) +
            "); the spectrum is too flat for this k");
    ctx.m = m;

    const Index n = svd.u.rows();
    ctx.tau = Vector(n);
    for (Index i = 0; i < n; ++i)
        ctx.tau(i) = (svd.u.row(i).transpose().cwiseProduct(ctx.sigma_lambda)).squaredNorm();
    ctx.d_lambda = ctx.tau.sum();

    ProbabilityVector out;
    out.scheme = Scheme::ridge;
    out.beta = 1.0;
    out.p = ctx.tau / ctx.d_lambda;
    finalize_probs(out.p);
    return {out, ctx};
}

std::pair<ProbabilityVector, RidgeContext> ridge_leverage_probs(const Matrix& a, Index k) {
    return ridge_leverage_probs(thin_svd(a), k);
}

SamplingPlan build_sampling_plan(const ProbabilityVector& p, Index s, std::uint64_t seed) {
    if (s < 1)
        throw ParameterError("build_sampling_plan: s must be >= 1");
    if (p.size() < 1)
        throw ParameterError("build_sampling_plan: empty probability vector");

    std::vector<double> cdf(static_cast<std::size_t>(p.size()));
    double acc = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        acc += p.p(i);
        cdf[static_cast<std::size_t>(i)] = acc;
    }

    SamplingPlan plan;
    plan.s = s;
    plan.seed = seed;
    plan.source_probs = p;
    plan.indices.resize(static_cast<std::size_t>(s));
    plan.scales.resize(static_cast<std::size_t>(s));

    Rng rng(seed);
    for (Index t = 0; t < s; ++t) {
        const auto j = static_cast<Index>(rng.categorical(cdf));
        plan.indices[static_cast<std::size_t>(t)] = j;
        plan.scales[static_cast<std::size_t>(t)] =
            1.0 / std::sqrt(static_cast<double>(s) * p.p(j));
    }
    return plan;
}

Matrix apply_sketch(const SamplingPlan& plan, const Matrix& a) {
    if (plan.source_probs.size() > 0 && plan.source_probs.size() != a.rows())
        throw DimensionError("apply_sketch: row count does not match the plan's distribution");
    Matrix out(plan.s, a.cols());
    for (Index t = 0; t < plan.s; ++t) {
        const Index j = plan.indices[static_cast<std::size_t>(t)];
        if (j < 0 || j >= a.rows())
            throw DimensionError("apply_sketch: plan index out of range");
        out.row(t) = plan.scales[static_cast<std::size_t>(t)] * a.row(j);
    }
    return out;
}

namespace {

void check_eps_delta(double eps, double delta, const char* what) {
    if (!(eps > 0.0) || eps > 1.0)
        throw ParameterError(std::string(what) + ": eps must lie in (0, 1]");
    if (!(delta > 0.0) || delta >= 1.0)
        throw ParameterError(std::string(what) + ": delta must lie in (0, 1)");
}

}  // namespace

Index sample_size_leverage(Index k, double eps, double delta) {
    if (k < 1) throw ParameterError("sample_size_leverage: k must be >= 1");
    check_eps_delta(eps, delta, "sample_size_leverage");
    const double kd = static_cast<double>(k);
    const double log_term = (1.0 + eps / 3.0) * 4.0 * kd *
                            std::log(16.0 * (1.0 + kd) / delta) / (eps * eps);
    const double tail_term = 8.0 * kd / (delta * eps * eps);
    return static_cast<Index>(std::ceil(std::max(log_term, tail_term)));
}

Index sample_size_ridge(Index k, double eps, double delta) {
    if (k < 1) throw ParameterError("sample_size_ridge: k must be >= 1");
    check_eps_delta(eps, delta, "sample_size_ridge");
    const double kd = static_cast<double>(k);
    const double log_term = (1.0 + eps / 3.0) * 4.0 * kd *
                            std::log(16.0 * (1.0 + 2.0 * kd) / delta) / (eps * eps);
    const double tail_term = 32.0 * kd / (delta * eps * eps);
    return static_cast<Index>(std::ceil(std::max(log_term, tail_term)));
}

Index sample_size_spectral(double frob_sq, double beta, double eps, double delta) {
    if (frob_sq <= 0.0)
        throw ParameterError("sample_size_spectral: frob_sq must be positive");
    if (!(beta > 0.0) || beta > 1.0)
        throw ParameterError("sample_size_spectral: beta must lie in (0, 1]");
    if (!(eps > 0.0))
        throw ParameterError("sample_size_spectral: eps must be positive");
    if (!(delta > 0.0) || delta >= 1.0)
        throw ParameterError("sample_size_spectral: delta must lie in (0, 1)");
    const double s = 2.0 * (1.0 + eps / 3.0) * frob_sq / (beta * eps * eps) *
                     std::log(4.0 * (1.0 + frob_sq) / delta);
    return static_cast<Index>(std::ceil(s));
}

nlohmann::ordered_json plan_to_json(const SamplingPlan& plan) {
    nlohmann::ordered_json j;
    j["s"] = plan.s;
    j["seed"] = plan.seed;
    j["scheme"] = to_string(plan.source_probs.scheme);
    j["indices"] = plan.indices;
    j["scales"] = plan.scales;
    return j;
}

SamplingPlan plan_from_json(const nlohmann::ordered_json& j) {
    SamplingPlan plan;
    plan.s = j.at("s").get<Index>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.source_probs.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    plan.indices = j.at("indices").get<std::vector<Index>>();
    plan.scales = j.at("scales").get<std::vector<double>>();
    if (static_cast<Index>(plan.indices.size()) != plan.s ||
        static_cast<Index>(plan.scales.size()) != plan.s)
        throw DimensionError("plan_from_json: index/scale count does not match s");
    return plan;
}

void write_probabilities_csv(std::ostream& out, const ProbabilityVector& p) {
    for (Index i = 0; i < p.size(); ++i)
        out << format_double(p.p(i)) << '\n';
}

Vector read_probabilities_csv(std::istream& in) {
    const Matrix column = read_csv(in);
    if (column.cols() != 1)
        throw DimensionError("read_probabilities_csv: expected a single column");
    return column.col(0);
}

}  // namespace pcps
