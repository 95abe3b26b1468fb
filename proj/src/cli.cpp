#include "pcps/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcps/errors.hpp"
#include "pcps/experiments.hpp"
#include "pcps/io.hpp"
#include "pcps/parallel.hpp"
#include "pcps/rng.hpp"
#include "pcps/verify.hpp"

namespace pcps::cli {

namespace {

using nlohmann::ordered_json;

// Seed streams split off the master seed. Everything random in a pipeline
// derives from exactly one of these, so a run is a pure function of --seed.
constexpr std::uint64_t kStreamGenerate = 0;
constexpr std::uint64_t kStreamPlan = 1;
constexpr std::uint64_t kStreamX = 2;
constexpr std::uint64_t kStreamAssign = 3;

struct GeneratorSpec {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    std::vector<std::pair<std::string, std::string>> params;

    std::string param(const std::string& key, const std::string& fallback) const {
        for (const auto& [k, v] : params)
            if (k == key) return v;
        return fallback;
    }
};

Index parse_index(const std::string& text, const char* what) {
    Index value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1)
        throw ParameterError(std::string(what) + ": bad integer '" + text + "'");
    return value;
}

double parse_real(const std::string& text, const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParameterError(std::string(what) + ": bad number '" + text + "'");
    return value;
}

GeneratorSpec parse_generator(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() < 2)
        throw ParameterError("generator spec needs at least name:RxC, got '" + spec + "'");

    GeneratorSpec out;
    out.name = parts[0];
    const auto x = parts[1].find('x');
    if (x == std::string::npos)
        throw ParameterError("generator size must look like 300x40, got '" + parts[1] + "'");
    out.rows = parse_index(parts[1].substr(0, x), "generator rows");
    out.cols = parse_index(parts[1].substr(x + 1), "generator cols");
    for (std::size_t i = 2; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos)
            throw ParameterError("generator parameter must be key=value, got '" + parts[i] + "'");
        out.params.emplace_back(parts[i].substr(0, eq), parts[i].substr(eq + 1));
    }
    return out;
}

void write_text(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(config.output, std::ios::binary);
    if (!f)
        throw ParameterError("cannot open output file: " + config.output);
    f << text;
}

void validate(const RunConfig& config) {
    if (!(config.eps > 0.0) || config.eps > 1.0)
        throw ParameterError("--eps must lie in (0, 1]");
    if (!(config.delta > 0.0) || config.delta >= 1.0)
        throw ParameterError("--delta must lie in (0, 1)");
    if (config.k < 1)
        throw ParameterError("--k must be >= 1");
    if (config.trials < 1)
        throw ParameterError("--trials must be >= 1");
    if (config.x_samples < 0)
        throw ParameterError("--x-samples must be >= 0");
    if (config.s < 0)
        throw ParameterError("--s must be >= 0");
    if (config.threads < 1)
        throw ParameterError("--threads must be >= 1");
    // kmeans-demo falls back to a built-in mixture generator.
    if (config.input.empty() && config.generate.empty() &&
        config.command != Command::kmeans_demo)
        throw ParameterError("either --input or --generate is required");
    if (!config.input.empty() && !config.generate.empty())
        throw ParameterError("--input and --generate are mutually exclusive");
}

Matrix obtain_matrix(const RunConfig& config) {
    if (!config.input.empty())
        return load_matrix(config.input);
    return generate_matrix(config.generate, derive_seed(config.seed, kStreamGenerate));
}

// Probabilities, SigmaTilde, and sample size for one scheme. The uniform
// scheme borrows the leverage SigmaTilde and sample-size formula.
struct SchemeState {
    ProbabilityVector probs;
    SigmaTilde st;
    Index s = 0;
    double rho = 0.0;
};

SchemeState prepare_scheme(const Matrix& a, const ThinSvd& svd, const RunConfig& config) {
    SchemeState state;
    switch (config.scheme) {
        case Scheme::uniform:
            state.probs = uniform_probs(a, config.k);
            state.st = sigma_tilde_leverage(svd, config.k);
            state.s = sample_size_leverage(config.k, config.eps, config.delta);
            break;
        case Scheme::leverage_mixed:
            state.probs = leverage_mixed_probs(svd, config.k);
            state.st = sigma_tilde_leverage(svd, config.k);
            state.s = sample_size_leverage(config.k, config.eps, config.delta);
            break;
        case Scheme::ridge: {
            auto [p, ctx] = ridge_leverage_probs(svd, config.k);
            state.probs = std::move(p);
            state.st = sigma_tilde_ridge(ctx);
            state.s = sample_size_ridge(config.k, config.eps, config.delta);
            break;
        }
    }
    if (config.s > 0) state.s = config.s;
    double tail = 0.0;
    for (Index i = config.k; i < svd.rank; ++i) tail += svd.sigma(i) * svd.sigma(i);
    state.rho = std::sqrt(tail);
    return state;
}

ordered_json config_header(const RunConfig& config, const Matrix& a, const char* command) {
    ordered_json j;
    j["command"] = command;
    j["scheme"] = to_string(config.scheme);
    j["n"] = a.rows();
    j["d"] = a.cols();
    j["k"] = config.k;
    j["eps"] = config.eps;
    j["delta"] = config.delta;
    j["seed"] = config.seed;
    return j;
}

int run_sketch(const RunConfig& config, std::ostream& out) {
    const Matrix a = obtain_matrix(config);
    const ThinSvd svd = thin_svd(a);
    const SchemeState state = prepare_scheme(a, svd, config);

    if (config.format == OutputFormat::csv) {
        std::ostringstream text;
        write_probabilities_csv(text, state.probs);
        write_text(config, text.str(), out);
        return 0;
    }
    const SamplingPlan plan =
        build_sampling_plan(state.probs, state.s, derive_seed(config.seed, kStreamPlan));
    write_text(config, plan_to_json(plan).dump(2) + "\n", out);
    return 0;
}

int run_verify(const RunConfig& config, std::ostream& out) {
    const Matrix a = obtain_matrix(config);
    const ThinSvd svd = thin_svd(a);
    const SchemeState state = prepare_scheme(a, svd, config);

    const SamplingPlan plan =
        build_sampling_plan(state.probs, state.s, derive_seed(config.seed, kStreamPlan));
    const VerifyResult result =
        verify_theorem(a, plan, state.st, config.k, config.x_samples,
                       derive_seed(config.seed, kStreamX), config.threads);

    ordered_json j = config_header(config, a, "verify");
    j["s"] = state.s;
    j["x_samples"] = config.x_samples;
    j["report"] = report_to_json(result.report);
    j["max_observed"] = result.max_observed;
    j["holds"] = result.holds;

    if (!config.output.empty())
        print_report_table(out, result.report, state.rho, config.eps);
    write_text(config, j.dump(2) + "\n", out);
    return result.holds ? 0 : 1;
}

int run_experiment(const RunConfig& config, std::ostream& out) {
    const Matrix a = obtain_matrix(config);
    const ThinSvd svd = thin_svd(a);
    const SchemeState state = prepare_scheme(a, svd, config);
    const ConditionContext ctx = make_condition_context(svd, state.st, config.k);
    const Index d = a.cols();
    if (config.k >= d)
        throw ParameterError("experiment: k must be smaller than the column count");

    // Sample-size ladder for error-vs-s curves; --s pins a single point.
    std::vector<Index> ladder;
    if (config.s > 0) {
        ladder.push_back(config.s);
    } else {
        const Index full = state.s;
        for (const Index candidate :
             {std::max<Index>(2 * config.k, full / 16), full / 8, full / 4, full / 2, full}) {
            const Index s = std::max<Index>(candidate, 1);
            if (ladder.empty() || s > ladder.back()) ladder.push_back(s);
        }
    }

    struct Row {
        Index s = 0;
        std::uint64_t plan_seed = 0;
        ConditionReport report;
        double max_pcp = 0.0;
    };

    std::vector<Row> rows(ladder.size() * static_cast<std::size_t>(config.trials));
    const std::uint64_t plan_master = derive_seed(config.seed, kStreamPlan);
    const std::uint64_t x_master = derive_seed(config.seed, kStreamX);

    parallel_for(static_cast<std::int64_t>(rows.size()), config.threads, [&](std::int64_t i) {
        const std::size_t ladder_idx = static_cast<std::size_t>(i) /
                                       static_cast<std::size_t>(config.trials);
        Row& row = rows[static_cast<std::size_t>(i)];
        row.s = ladder[ladder_idx];
        row.plan_seed = derive_seed(plan_master, static_cast<std::uint64_t>(i));
        const SamplingPlan plan = build_sampling_plan(state.probs, row.s, row.plan_seed);
        row.report = evaluate_conditions(ctx, plan);

        const Matrix wa = apply_sketch(plan, a);
        double max_pcp = 0.0;
        for (Index x = 0; x < config.x_samples; ++x) {
            const OrthonormalBasis basis = haar_orthonormal(
                d, d - config.k,
                derive_seed(x_master, static_cast<std::uint64_t>(i) * 1000003ULL +
                                          static_cast<std::uint64_t>(x)));
            max_pcp = std::max(max_pcp, pcp_error(a, wa, basis));
        }
        row.max_pcp = max_pcp;
    });

    std::ostringstream text;
    if (config.format == OutputFormat::json) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& row = rows[i];
            ordered_json j;
            j["trial"] = i % static_cast<std::size_t>(config.trials);
            j["seed"] = row.plan_seed;
            j["s"] = row.s;
            j["lhs1"] = row.report.lhs1;
            j["lhs2"] = row.report.lhs2;
            j["lhs3"] = row.report.lhs3;
            j["lhs4"] = row.report.lhs4;
            j["eps_effective"] = row.report.eps_effective;
            j["certified_error"] = row.report.certified_error;
            j["max_pcp"] = row.max_pcp;
            text << j.dump() << '\n';
        }
    } else {
        text << "s,trials,mean_eps_effective,max_eps_effective,rate_eps_gt_target,"
                "mean_max_pcp,max_max_pcp,rate_pcp_gt_bound\n";
        for (std::size_t l = 0; l < ladder.size(); ++l) {
            std::vector<double> eps_vals, pcp_vals;
            double bound = 0.0;
            for (Index t = 0; t < config.trials; ++t) {
                const Row& row = rows[l * static_cast<std::size_t>(config.trials) +
                                      static_cast<std::size_t>(t)];
                eps_vals.push_back(row.report.eps_effective);
                pcp_vals.push_back(row.max_pcp);
                bound = row.report.bound_constant;
            }
            const TrialStats eps_stats = aggregate_trials(eps_vals, config.eps);
            const TrialStats pcp_stats = aggregate_trials(pcp_vals, bound * config.eps);
            text << ladder[l] << ',' << config.trials << ','
                 << format_double(eps_stats.mean) << ',' << format_double(eps_stats.max) << ','
                 << format_double(static_cast<double>(eps_stats.failures) /
                                  static_cast<double>(config.trials))
                 << ',' << format_double(pcp_stats.mean) << ',' << format_double(pcp_stats.max)
                 << ','
                 << format_double(static_cast<double>(pcp_stats.failures) /
                                  static_cast<double>(config.trials))
                 << '\n';
        }
    }
    write_text(config, text.str(), out);
    return 0;
}

int run_kmeans_demo(const RunConfig& config, std::ostream& out) {
    RunConfig local = config;
    if (local.input.empty() && local.generate.empty())
        local.generate = "mog:50x400:clusters=" + std::to_string(config.k) + ":sep=5.0";
    const Matrix a = obtain_matrix(local);
    const ThinSvd svd = thin_svd(a);
    const SchemeState state = prepare_scheme(a, svd, local);

    const SamplingPlan plan =
        build_sampling_plan(state.probs, state.s, derive_seed(config.seed, kStreamPlan));
    const Matrix wa = apply_sketch(plan, a);
    const ConditionReport report =
        evaluate_conditions(make_condition_context(svd, state.st, config.k), plan);

    const std::uint64_t assign_master = derive_seed(config.seed, kStreamAssign);
    const int k = static_cast<int>(config.k);

    double max_gap_random = 0.0;
    for (Index i = 0; i < 50; ++i) {
        const ClusterAssignment assign =
            random_assignment(a.cols(), k, derive_seed(assign_master, static_cast<std::uint64_t>(i)));
        max_gap_random = std::max(max_gap_random, sketched_clustering_gap(a, wa, assign));
    }
    double max_gap_lloyd = 0.0;
    for (Index i = 0; i < 5; ++i) {
        ClusterAssignment assign = random_assignment(
            a.cols(), k, derive_seed(assign_master, 1000 + static_cast<std::uint64_t>(i)));
        for (int step = 0; step < 3; ++step) assign = lloyd_step(a, assign);
        max_gap_lloyd = std::max(max_gap_lloyd, sketched_clustering_gap(a, wa, assign));
    }

    const double max_gap = std::max(max_gap_random, max_gap_lloyd);
    const bool holds = max_gap <= report.certified_error + 1e-9;

    ordered_json j = config_header(local, a, "kmeans-demo");
    j["s"] = state.s;
    j["certified_error"] = report.certified_error;
    j["max_gap_random"] = max_gap_random;
    j["max_gap_lloyd"] = max_gap_lloyd;
    j["gap_bound"] = report.bound_constant * config.eps;
    j["within_bound"] = max_gap <= report.bound_constant * config.eps;
    j["holds"] = holds;
    write_text(local, j.dump(2) + "\n", out);
    return holds ? 0 : 1;
}

}  // namespace

Matrix generate_matrix(const std::string& spec, std::uint64_t seed) {
    const GeneratorSpec g = parse_generator(spec);
    if (g.name == "gaussian")
        return gaussian_matrix(g.rows, g.cols, seed);
    if (g.name == "powerlaw")
        return powerlaw_matrix(g.rows, g.cols, parse_real(g.param("alpha", "1.0"), "alpha"),
                               seed);
    if (g.name == "lowrank")
        return lowrank_noise_matrix(g.rows, g.cols, parse_index(g.param("r", "5"), "r"),
                                    parse_real(g.param("noise", "0.01"), "noise"), seed);
    if (g.name == "mog")
        return gaussian_mixture(g.rows, g.cols, static_cast<int>(parse_index(
                                                    g.param("clusters", "3"), "clusters")),
                                parse_real(g.param("sep", "5.0"), "sep"), seed);
    throw ParameterError("unknown generator '" + g.name + "'");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        switch (config.command) {
            case Command::sketch: return run_sketch(config, out);
            case Command::verify: return run_verify(config, out);
            case Command::experiment: return run_experiment(config, out);
            case Command::kmeans_demo: return run_kmeans_demo(config, out);
        }
        throw ParameterError("unknown command");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int run(const RunConfig& config) { return run(config, std::cout, std::cerr); }

}  // namespace pcps::cli
