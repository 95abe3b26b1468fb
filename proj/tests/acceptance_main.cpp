// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcps/cli.hpp"
#include "pcps/experiments.hpp"
#include "pcps/io.hpp"
#include "pcps/linalg.hpp"
#include "pcps/parallel.hpp"
#include "pcps/rng.hpp"
#include "pcps/sketch.hpp"
#include "pcps/verify.hpp"

using namespace pcps;

namespace {

constexpr int kThreads = 4;

struct Fixture {
    std::string name;
    Matrix a;
    Index k = 0;
    Scheme scheme = Scheme::leverage_mixed;
};

std::vector<Fixture> soundness_fixtures() {
    std::vector<Fixture> out;
    const Matrix gauss = gaussian_matrix(80, 30, 101);
    const Matrix pl05 = powerlaw_matrix(100, 25, 0.5, 102);
    const Matrix pl10 = powerlaw_matrix(120, 30, 1.0, 103);
    const Matrix pl20 = powerlaw_matrix(90, 20, 2.0, 104);
    const Matrix pl10b = powerlaw_matrix(140, 35, 1.0, 105);
    const Matrix lr2 = lowrank_noise_matrix(100, 30, 2, 0.01, 106);
    const Matrix lr5 = lowrank_noise_matrix(100, 30, 5, 0.01, 107);
    const Matrix lr10 = lowrank_noise_matrix(100, 30, 10, 0.01, 108);

    const auto lev = [&](const char* name, const Matrix& a, Index k) {
        out.push_back({std::string(name) + "/lev/k" + std::to_string(k), a, k,
                       Scheme::leverage_mixed});
    };
    const auto rdg = [&](const char* name, const Matrix& a, Index k) {
        out.push_back({std::string(name) + "/ridge/k" + std::to_string(k), a, k, Scheme::ridge});
    };

    lev("gaussian80x30", gauss, 2);
    lev("gaussian80x30", gauss, 5);
    lev("gaussian80x30", gauss, 10);
    lev("powerlaw05", pl05, 2);
    lev("powerlaw05", pl05, 5);
    lev("powerlaw10", pl10, 5);
    lev("powerlaw10", pl10, 10);
    lev("powerlaw20", pl20, 2);
    lev("lowrank5", lr5, 5);
    lev("lowrank10", lr10, 10);

    rdg("powerlaw05", pl05, 5);
    rdg("powerlaw10", pl10, 2);
    rdg("powerlaw10", pl10, 5);
    rdg("powerlaw10", pl10, 10);
    rdg("powerlaw20", pl20, 2);
    rdg("powerlaw20", pl20, 5);
    rdg("lowrank2", lr2, 2);
    rdg("lowrank5", lr5, 5);
    rdg("lowrank10", lr10, 10);
    rdg("powerlaw10b", pl10b, 5);
    return out;
}

// --- criterion 1: theorem soundness sweep ------------------------------------

bool criterion_soundness(std::string& detail) {
    const auto fixtures = soundness_fixtures();
    if (fixtures.size() != 20) {
        detail = "fixture count is not 20";
        return false;
    }
    int plans_checked = 0;
    std::vector<std::string> failures;
    std::uint64_t fixture_id = 0;
    for (const auto& fix : fixtures) {
        ++fixture_id;
        const ThinSvd svd = thin_svd(fix.a);
        ProbabilityVector probs;
        SigmaTilde st;
        Index s_formula = 0;
        if (fix.scheme == Scheme::leverage_mixed) {
            probs = leverage_mixed_probs(svd, fix.k);
            st = sigma_tilde_leverage(svd, fix.k);
            s_formula = sample_size_leverage(fix.k, 0.5, 0.1);
        } else {
            auto [p, ctx] = ridge_leverage_probs(svd, fix.k);
            probs = std::move(p);
            st = sigma_tilde_ridge(ctx);
            s_formula = sample_size_ridge(fix.k, 0.5, 0.1);
        }

        const Index k = fix.k;
        const std::vector<Index> plan_sizes = {
            1, 1, 2 * k, 4 * k, 8 * k, 64, 16 * k, 300,
            std::min<Index>(s_formula, 1200), std::min<Index>(s_formula, 1200)};
        std::uint64_t plan_id = 0;
        for (const Index s : plan_sizes) {
            ++plan_id;
            const std::uint64_t seed = derive_seed(fixture_id * 1000, plan_id);
            const SamplingPlan plan = build_sampling_plan(probs, s, seed);
            const VerifyResult res =
                verify_theorem(fix.a, plan, st, k, 50, derive_seed(seed, 77), kThreads);
            ++plans_checked;
            if (!res.holds)
                failures.push_back(fix.name + " s=" + std::to_string(s));
        }
    }
    detail = std::to_string(plans_checked - static_cast<int>(failures.size())) + "/" +
             std::to_string(plans_checked) + " plans hold";
    for (const auto& f : failures) detail += "; FAILED " + f;
    return failures.empty();
}

// --- criterion 2: scheme constants -------------------------------------------

bool criterion_constants(std::string& detail) {
    const double ridge_cap = 4.0 + 2.0 * std::sqrt(2.0) + 1e-12;
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
        const Index rows = 60 + 2 * i;
        const Index cols = 15 + i % 10;
        Matrix a;
        Index k = 5;
        switch (i % 4) {
            case 0: a = powerlaw_matrix(rows, cols, 0.5, 7000 + i); break;
            case 1: a = powerlaw_matrix(rows, cols, 1.0, 7000 + i); break;
            case 2: a = powerlaw_matrix(rows, cols, 2.0, 7000 + i); break;
            default:
                a = lowrank_noise_matrix(rows, cols, 4, 0.01, 7000 + i);
                k = 4;
        }
        const ThinSvd svd = thin_svd(a);
        const auto [probs, ctx] = ridge_leverage_probs(svd, k);
        const SigmaTilde ridge_st = sigma_tilde_ridge(ctx);
        const SigmaTilde lev_st = sigma_tilde_leverage(svd, k);

        const SamplingPlan plan = build_sampling_plan(probs, 4 * k, 9000 + i);
        const ConditionReport lev_rep = evaluate_conditions(a, plan, lev_st, k);
        const ConditionReport ridge_rep = evaluate_conditions(a, plan, ridge_st, k);

        double k_tail = 0.0, m_tail = 0.0;
        for (Index j = k; j < svd.rank; ++j) k_tail += svd.sigma(j) * svd.sigma(j);
        for (Index j = ctx.m; j < svd.rank; ++j) m_tail += svd.sigma(j) * svd.sigma(j);

        if (lev_rep.bound_constant != 5.0) ++violations;
        if (ridge_rep.bound_constant > ridge_cap) ++violations;
        if (ctx.d_lambda > 2.0 * static_cast<double>(k) + 1e-12) ++violations;
        if (m_tail > 2.0 * k_tail + 1e-12) ++violations;
    }
    detail = "violations: " + std::to_string(violations) + " over 50 matrices";
    return violations == 0;
}

// --- criteria 3 & 4: sampling-scheme guarantees on the 300x40 fixture --------

Matrix guarantee_fixture() { return powerlaw_matrix(300, 40, 1.0, 4242); }

bool criterion_scheme_failure(std::string& detail) {
    const Matrix a = guarantee_fixture();
    const Index k = 5;
    const double eps = 0.5, delta = 0.2;
    const Index trials = 100;
    const double band =
        delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));

    std::ostringstream msg;
    bool ok = true;
    for (Scheme scheme : {Scheme::leverage_mixed, Scheme::ridge}) {
        const TrialStats stats =
            scheme_failure_rate(a, k, scheme, eps, delta, trials, 1717, kThreads);
        const double rate = static_cast<double>(stats.failures) / static_cast<double>(trials);
        msg << to_string(scheme) << " rate " << rate << " (allowed " << band << ") ";
        ok = ok && rate <= band;
    }
    detail = msg.str();
    return ok;
}

bool criterion_pcp_end_to_end(std::string& detail) {
    const Matrix a = guarantee_fixture();
    const ThinSvd svd = thin_svd(a);
    const Index k = 5;
    const double eps = 0.5, delta = 0.2;
    const Index trials = 100, x_per_trial = 50;
    const Index d = a.cols();
    const double band =
        delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));

    std::ostringstream msg;
    bool ok = true;
    for (Scheme scheme : {Scheme::leverage_mixed, Scheme::ridge}) {
        ProbabilityVector probs;
        Index s = 0;
        double constant = 0.0;
        if (scheme == Scheme::leverage_mixed) {
            probs = leverage_mixed_probs(svd, k);
            s = sample_size_leverage(k, eps, delta);
            constant = 5.0;
        } else {
            auto [p, ctx] = ridge_leverage_probs(svd, k);
            probs = std::move(p);
            s = sample_size_ridge(k, eps, delta);
            constant = 4.0 + 2.0 * std::sqrt(2.0);
        }
        const double threshold = constant * eps;

        std::vector<double> max_pcp(static_cast<std::size_t>(trials));
        const std::uint64_t master = scheme == Scheme::ridge ? 333444ULL : 555666ULL;
        parallel_for(trials, kThreads, [&](std::int64_t t) {
            const std::uint64_t trial_seed = derive_seed(master, static_cast<std::uint64_t>(t));
            const SamplingPlan plan = build_sampling_plan(probs, s, trial_seed);
            const Matrix wa = apply_sketch(plan, a);
            double worst = 0.0;
            for (Index x = 0; x < x_per_trial; ++x) {
                const OrthonormalBasis basis = haar_orthonormal(
                    d, d - k, derive_seed(trial_seed, 10 + static_cast<std::uint64_t>(x)));
                worst = std::max(worst, pcp_error(a, wa, basis));
            }
            max_pcp[static_cast<std::size_t>(t)] = worst;
        });

        const TrialStats stats = aggregate_trials(max_pcp, threshold);
        const double rate = static_cast<double>(stats.failures) / static_cast<double>(trials);
        msg << to_string(scheme) << " rate " << rate << " max " << stats.max << " (threshold "
            << threshold << ") ";
        ok = ok && rate <= band;
    }
    detail = msg.str();
    return ok;
}

// --- criterion 5: randomized matmul oracles ----------------------------------

double matmul_expectation(const Matrix& a, const Matrix& b, const Vector& p, Index s) {
    double second = 0.0;
    for (Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0)
            second += a.col(i).squaredNorm() * b.row(i).squaredNorm() / p(i);
    return second / static_cast<double>(s) - (a * b).squaredNorm() / static_cast<double>(s);
}

double trace_expectation(const Matrix& a, const Matrix& b, const Vector& p, Index s) {
    double second = 0.0;
    for (Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) {
            const double ba_ii = b.row(i).dot(a.col(i));
            second += ba_ii * ba_ii / p(i);
        }
    const double tr = (a * b).trace();
    return second / static_cast<double>(s) - tr * tr / static_cast<double>(s);
}

bool criterion_matmul_oracles(std::string& detail) {
    std::ostringstream msg;
    bool ok = true;

    // Exhaustive enumeration vs the closed form on n <= 3, s <= 2 fixtures.
    struct Pair {
        Matrix a, b;
    };
    std::vector<Pair> pairs;
    {
        Matrix a(1, 2), b(2, 1);
        a << 1, 2;
        b << 1, 2;
        pairs.push_back({a, b});
    }
    pairs.push_back({gaussian_matrix(2, 3, 11), gaussian_matrix(3, 2, 12)});
    pairs.push_back({gaussian_matrix(3, 3, 13), gaussian_matrix(3, 3, 14)});
    pairs.push_back({gaussian_matrix(1, 3, 15), gaussian_matrix(3, 1, 16)});

    double worst_gap = 0.0;
    for (const auto& [a, b] : pairs) {
        const Index n = a.cols();
        for (int variant = 0; variant < 2; ++variant) {
            ProbabilityVector p;
            if (variant == 0) {
                p = uniform_probs(n);
            } else {
                Vector w(n);
                for (Index i = 0; i < n; ++i) w(i) = a.col(i).norm() * b.row(i).norm() + 1e-3;
                p.p = w / w.sum();
            }
            for (Index s : {Index(1), Index(2)}) {
                const ExactExpectation ex = matmul_error_exhaustive(a, b, p, s);
                const double gap = std::abs(ex.mean - matmul_expectation(a, b, p.p, s));
                worst_gap = std::max(worst_gap, gap);
                ok = ok && gap <= 1e-10 && ex.mean <= ex.bound + 1e-12;
                if (a.rows() == b.cols()) {
                    const ExactExpectation tr = trace_error_exhaustive(a, b, p, s);
                    const double tr_gap = std::abs(tr.mean - trace_expectation(a, b, p.p, s));
                    worst_gap = std::max(worst_gap, tr_gap);
                    ok = ok && tr_gap <= 1e-10 && tr.mean <= tr.bound + 1e-12;
                }
            }
        }
    }
    msg << "enum-vs-closed gap " << worst_gap << " ";

    // Monte-Carlo 1/s scaling: quadrupling s divides the mean error by ~4.
    const Matrix a = gaussian_matrix(2, 3, 21);
    const Matrix b = gaussian_matrix(3, 2, 22);
    ProbabilityVector p;
    Vector w(3);
    for (Index i = 0; i < 3; ++i) w(i) = a.col(i).norm() * b.row(i).norm();
    p.p = w / w.sum();
    const Index trials = 20000;
    const TrialStats at10 = matmul_error_trials(a, b, p, 10, trials, 4321, kThreads);
    const TrialStats at40 = matmul_error_trials(a, b, p, 40, trials, 8765, kThreads);
    const double ratio = at10.mean / at40.mean;
    msg << "scaling ratio " << ratio;
    ok = ok && ratio >= 3.4 && ratio <= 4.6;

    detail = msg.str();
    return ok;
}

// --- criterion 6: spectral concentration -------------------------------------

bool criterion_spectral(std::string& detail) {
    const Index n = 200, r = 5;
    const OrthonormalBasis u = haar_orthonormal(n, r, 31415);
    const Matrix a = u.matrix.transpose();  // r x n, spectral norm 1

    ProbabilityVector p;
    p.p = Vector(n);
    for (Index i = 0; i < n; ++i)
        p.p(i) = u.matrix.row(i).squaredNorm() / static_cast<double>(r);
    p.beta = 1.0;

    const double eps = 0.5, delta = 0.1;
    const Index s = sample_size_spectral(static_cast<double>(r), 1.0, eps, delta);
    const Index trials = 200;
    const TrialStats stats = spectral_concentration_trials(a, p, s, eps, trials, 2718, kThreads);
    const double rate = static_cast<double>(stats.failures) / static_cast<double>(trials);
    const double band = delta + 3.0 * std::sqrt(0.09 / static_cast<double>(trials));

    std::ostringstream msg;
    msg << "s=" << s << " failure rate " << rate << " (allowed " << band << ", max err "
        << stats.max << ")";
    detail = msg.str();
    return rate <= band;
}

// --- criterion 7: core-linalg properties -------------------------------------

bool criterion_core_properties(std::string& detail) {
    std::ostringstream msg;
    bool ok = true;

    // Matrix Pythagorean identity on 100 random (A, X, m) triples.
    double worst_rel = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Matrix a = t % 2 == 0 ? gaussian_matrix(25, 12, 6000 + t)
                                    : powerlaw_matrix(30, 14, 1.0, 6000 + t);
        const ThinSvd svd = thin_svd(a);
        const Index m = 1 + t % svd.rank;
        const RankSplit split = rank_split(svd, m);
        const Index d = a.cols();
        const OrthonormalBasis x = haar_orthonormal(d, 1 + t % (d - 1), 6100 + t);
        const double whole = (a * x.matrix).squaredNorm();
        const double parts =
            (split.a_m * x.matrix).squaredNorm() + (split.a_m_perp * x.matrix).squaredNorm();
        worst_rel = std::max(worst_rel, std::abs(whole - parts) / whole);
    }
    msg << "pythagorean worst rel " << worst_rel << " ";
    ok = ok && worst_rel <= 1e-9;

    // rho = ||A_{k,perp}||_F lower-bounds ||AX||_F, with equality at the
    // adversarial X.
    const Matrix a = gaussian_matrix(50, 16, 654);
    const ThinSvd svd = thin_svd(a);
    const Index k = 4;
    double tail = 0.0;
    for (Index i = k; i < svd.rank; ++i) tail += svd.sigma(i) * svd.sigma(i);
    const double rho = std::sqrt(tail);
    for (int t = 0; t < 100 && ok; ++t) {
        const OrthonormalBasis x = haar_orthonormal(16, 12, 6500 + t);
        ok = rho <= (a * x.matrix).norm() + 1e-12;
    }
    const double at_adversary = (a * svd.v.rightCols(svd.rank - k)).norm();
    ok = ok && std::abs(at_adversary - rho) <= 1e-9 * rho;
    msg << "min-cost equality gap " << std::abs(at_adversary - rho) / rho << " ";

    // apply_sketch equals dense materialization on 20 fixtures.
    double worst_apply = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Matrix m = gaussian_matrix(20 + t, 6 + t % 5, 6800 + t);
        const ProbabilityVector probs = leverage_mixed_probs(m, 2);
        const SamplingPlan plan = build_sampling_plan(probs, 15, 6900 + t);
        Matrix w = Matrix::Zero(plan.s, m.rows());
        for (Index row = 0; row < plan.s; ++row)
            w(row, plan.indices[static_cast<std::size_t>(row)]) =
                plan.scales[static_cast<std::size_t>(row)];
        const Matrix dense = w * m;
        const double diff =
            (apply_sketch(plan, m) - dense).norm() / std::max(1.0, dense.norm());
        worst_apply = std::max(worst_apply, diff);
    }
    msg << "apply-vs-dense worst " << worst_apply;
    ok = ok && worst_apply <= 1e-14;

    detail = msg.str();
    return ok;
}

// --- criterion 8: k-means cost preservation ----------------------------------

bool criterion_kmeans(std::string& detail) {
    const Index ambient = 50, points = 400;
    const int clusters = 3;
    const double eps = 0.5;
    const double gap_bound = 5.0 * eps;

    const Matrix a = gaussian_mixture(ambient, points, clusters, 5.0, 13579);
    const ProbabilityVector probs = leverage_mixed_probs(a, clusters);
    const Index s = sample_size_leverage(clusters, eps, 0.1);

    double worst_gap = 0.0;
    int bad_trials = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t trial_seed = derive_seed(24680, static_cast<std::uint64_t>(trial));
        const SamplingPlan plan = build_sampling_plan(probs, s, trial_seed);
        const Matrix wa = apply_sketch(plan, a);

        bool trial_ok = true;
        for (int i = 0; i < 50; ++i) {
            const ClusterAssignment assign = random_assignment(
                points, clusters, derive_seed(trial_seed, static_cast<std::uint64_t>(i)));
            const double gap = sketched_clustering_gap(a, wa, assign);
            worst_gap = std::max(worst_gap, gap);
            trial_ok = trial_ok && gap <= gap_bound;
        }
        for (int i = 0; i < 5; ++i) {
            ClusterAssignment assign = random_assignment(
                points, clusters, derive_seed(trial_seed, 500 + static_cast<std::uint64_t>(i)));
            for (int step = 0; step < 3; ++step) assign = lloyd_step(a, assign);
            const double gap = sketched_clustering_gap(a, wa, assign);
            worst_gap = std::max(worst_gap, gap);
            trial_ok = trial_ok && gap <= gap_bound;
        }
        if (!trial_ok) ++bad_trials;
    }
    std::ostringstream msg;
    msg << "worst gap " << worst_gap << " (bound " << gap_bound << "), failing trials "
        << bad_trials << "/20";
    detail = msg.str();
    return bad_trials == 0;
}

// --- criterion 9: byte-identical reports -------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pcps_acceptance";
    fs::create_directories(dir);

    bool ok = true;
    std::ostringstream msg;
    std::ostringstream sink_out, sink_err;

    cli::RunConfig verify;
    verify.command = cli::Command::verify;
    verify.generate = "powerlaw:100x20:alpha=1.0";
    verify.k = 4;
    verify.seed = 7;
    verify.output = (dir / "v1.json").string();
    ok = ok && cli::run(verify, sink_out, sink_err) == 0;
    verify.output = (dir / "v2.json").string();
    verify.threads = 4;
    ok = ok && cli::run(verify, sink_out, sink_err) == 0;
    const bool verify_same =
        slurp((dir / "v1.json").string()) == slurp((dir / "v2.json").string());
    msg << "verify identical: " << (verify_same ? "yes" : "NO") << " ";

    cli::RunConfig exp;
    exp.command = cli::Command::experiment;
    exp.generate = "powerlaw:60x15:alpha=1.0";
    exp.k = 3;
    exp.trials = 4;
    exp.x_samples = 5;
    exp.seed = 99;
    exp.output = (dir / "e1.jsonl").string();
    ok = ok && cli::run(exp, sink_out, sink_err) == 0;
    exp.output = (dir / "e2.jsonl").string();
    exp.threads = 3;
    ok = ok && cli::run(exp, sink_out, sink_err) == 0;
    const bool exp_same =
        slurp((dir / "e1.jsonl").string()) == slurp((dir / "e2.jsonl").string());
    msg << "experiment identical: " << (exp_same ? "yes" : "NO") << " ";

    cli::RunConfig km;
    km.command = cli::Command::kmeans_demo;
    km.k = 3;
    km.seed = 5;
    km.generate = "mog:30x120:clusters=3:sep=4.0";
    km.output = (dir / "k1.json").string();
    ok = ok && cli::run(km, sink_out, sink_err) == 0;
    km.output = (dir / "k2.json").string();
    km.threads = 2;
    ok = ok && cli::run(km, sink_out, sink_err) == 0;
    const bool km_same = slurp((dir / "k1.json").string()) == slurp((dir / "k2.json").string());
    msg << "kmeans identical: " << (km_same ? "yes" : "NO");

    fs::remove_all(dir);
    detail = msg.str();
    return ok && verify_same && exp_same && km_same;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "theorem soundness sweep (20 fixtures x 10 plans)", criterion_soundness},
        {2, "scheme constants (5, 4+2*sqrt(2), d_lambda, residual growth)",
         criterion_constants},
        {3, "sampling-scheme failure rate at the formula sample size",
         criterion_scheme_failure},
        {4, "end-to-end projection-cost preservation rate", criterion_pcp_end_to_end},
        {5, "randomized matmul oracles (enumeration, bounds, 1/s scaling)",
         criterion_matmul_oracles},
        {6, "spectral-norm concentration at the lemma sample size", criterion_spectral},
        {7, "core linear-algebra properties", criterion_core_properties},
        {8, "k-means clustering cost preservation", criterion_kmeans},
        {9, "byte-identical reports across reruns and thread counts", criterion_determinism},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criterion.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "criterion " << criterion.id << " [" << (pass ? "PASS" : "FAIL") << "] ("
                  << elapsed << "s) " << criterion.title << ": " << detail << std::endl;
        if (!pass) ++failed;
    }
    std::cout << (failed == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " ("
              << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size()
              << ")" << std::endl;
    return failed;
}
