#pragma once

// Command-line front end. `run_cli` is separate from main so tests can drive it.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fuzzykm.hpp"

namespace fuzzykm::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInfeasible = 2 };

struct Options {
    std::string input;
    std::string weight_col;
    std::string out;
    bool compact = false;
    std::size_t threads = 1;
    std::uint64_t seed = 0;

    std::size_t k = 2;
    int m = 2;
    double epsilon = 0.5;
    double alpha = 0.5;
    std::uint64_t cap = kDefaultEnumerationCap;

    std::string init = "random";
    double tol = 1e-10;
    std::size_t max_iter = 10'000;

    std::optional<std::uint64_t> repetitions;
    std::optional<std::uint64_t> multiset_size;
    std::optional<std::uint64_t> subset_size;

    std::string search = "auto";
    std::size_t trials = 500;
    double a = 8.0;
    std::size_t resolution = 801;
};

namespace detail {

inline nlohmann::json point_json(std::span<const double> p) { return std::vector<double>(p.begin(), p.end()); }

inline nlohmann::json means_json(const MeanSet& c) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& mu : c) j.push_back(point_json(mu));
    return j;
}

inline WeightColumn weight_column(const std::string& text) {
    if (text.empty()) return {};
    if (text.find_first_not_of("0123456789") == std::string::npos) {
        return static_cast<std::size_t>(std::stoull(text));
    }
    return text;
}

inline WeightedPointSet load(const Options& o) {
    fuzzykm::detail::require(!o.input.empty(), ErrorKind::invalid_input, "--input is required");
    return ingest_csv(o.input, weight_column(o.weight_col));
}

inline FmInit parse_init(const std::string& text, std::uint64_t seed) {
    if (text == "random") return RandomPoints{seed};
    FromPointIndices init;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string cell = text.substr(start, comma - start);
        fuzzykm::detail::require(
            !cell.empty() && cell.find_first_not_of("0123456789") == std::string::npos,
            ErrorKind::invalid_input, "--init expects 'random' or comma-separated point indices");
        init.indices.push_back(std::stoull(cell));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return init;
}

inline void fill_solution(RunReport& r, const WeightedPointSet& x, const FuzzySolution& s) {
    r.means = s.means().means();
    r.cost = s.cost();
    r.cluster_weights = cluster_weights(x, s.memberships()).values;
}

inline void fill_parameters(RunReport& r, const Options& o, bool with_epsilon, bool with_alpha) {
    r.parameters.k = o.k;
    r.parameters.m = o.m;
    r.parameters.seed = o.seed;
    if (with_epsilon) r.parameters.epsilon = o.epsilon;
    if (with_alpha) r.parameters.alpha = o.alpha;
}

inline void fill_thresholds(RunReport& r, const WeightedPointSet& x, const Options& o) {
    r.constants.pruning_rmin = pruning_threshold(x, o.k, o.m, o.epsilon);
    r.constants.rounding_rmin = rounding_weight_threshold(x, o.k, o.epsilon);
}

inline RunReport run_fm_command(const Options& o) {
    const WeightedPointSet x = load(o);
    FmConfig config;
    config.max_iterations = o.max_iter;
    config.rel_cost_tolerance = o.tol;
    config.init = parse_init(o.init, o.seed);
    const FmResult res = run_fm(x, config, o.m, o.k);

    RunReport r;
    r.solver = "fm";
    fill_parameters(r, o, false, false);
    r.parameters.overrides = {{"init", o.init}, {"tol", o.tol}, {"max_iter", o.max_iter}};
    fill_solution(r, x, res.solution);
    r.trace = TraceSummary{res.trace.steps(), std::string(to_string(res.trace.termination)),
                           res.trace.records.front().cost};
    return r;
}

inline RunReport run_randomized_command(const Options& o) {
    const WeightedPointSet x = load(o);
    SamplingOverrides ov{o.repetitions, o.multiset_size, o.subset_size};
    const ApproxResult res =
        randomized_approx(x, o.k, o.m, o.epsilon, o.alpha, o.seed, ov, {o.cap, o.threads});

    RunReport r;
    r.solver = "randomized";
    fill_parameters(r, o, true, true);
    if (o.repetitions) r.parameters.overrides["repetitions"] = *o.repetitions;
    if (o.multiset_size) r.parameters.overrides["multiset_size"] = *o.multiset_size;
    if (o.subset_size) r.parameters.overrides["subset_size"] = *o.subset_size;
    fill_solution(r, x, res.solution);
    fill_thresholds(r, x, o);
    r.constants.duplication_factor = res.duplication_factor;
    r.details = {{"sampling_epsilon", res.params.epsilon},
                 {"sampling_alpha", res.params.alpha},
                 {"repetitions", res.params.repetitions(o.k)},
                 {"multiset_size", res.params.multiset_size()},
                 {"subset_size", res.params.subset_size()},
                 {"candidate_means", res.candidate_means},
                 {"tuples_evaluated", res.tuples_evaluated}};
    return r;
}

inline RunReport run_ptas_command(const Options& o) {
    const WeightedPointSet x = load(o);
    const PtasResult res =
        deterministic_ptas(x, o.k, o.m, o.epsilon, o.multiset_size, {o.cap, o.threads});

    RunReport r;
    r.solver = "ptas";
    fill_parameters(r, o, true, false);
    if (o.multiset_size) r.parameters.overrides["multiset_size"] = *o.multiset_size;
    fill_solution(r, x, res.solution);
    fill_thresholds(r, x, o);
    r.constants.duplication_factor = res.duplication_factor;
    r.details = {{"multiset_size", res.multiset_size},
                 {"multisets_enumerated", res.multisets_enumerated},
                 {"tuples_evaluated", res.tuples_evaluated}};
    return r;
}

inline GridSearchMode parse_search(const std::string& s) {
    if (s == "exhaustive") return GridSearchMode::exhaustive;
    if (s == "descent") return GridSearchMode::descent;
    if (s == "auto") return GridSearchMode::automatic;
    fuzzykm::detail::fail(ErrorKind::invalid_input,
                          "--search must be exhaustive, descent or auto, got '" + s + "'");
}

inline RunReport run_grid_command(const Options& o) {
    const WeightedPointSet x = load(o);
    fuzzykm::detail::require(x.unit_weights(), ErrorKind::invalid_input,
                             "the grid solver accepts unweighted input only");
    const CandidateGrid grid = build_grid(x, o.k, o.m, o.epsilon, o.cap);
    GridSearchOptions opts;
    opts.mode = parse_search(o.search);
    opts.cap = o.cap;
    opts.threads = o.threads;
    opts.seed = o.seed;
    const GridSearchResult res = search_grid(x, grid, o.k, o.m, opts);

    RunReport r;
    r.solver = "grid";
    fill_parameters(r, o, true, false);
    r.parameters.overrides = {{"search", o.search}};
    fill_solution(r, x, res.solution);
    fill_thresholds(r, x, o);
    const GridParams& p = grid.params();
    r.details = {{"anchors", means_json(grid.anchors())},
                 {"anchor_cost", p.anchor_cost},
                 {"anchors_certified", grid.anchors_certified()},
                 {"r_scale", p.r_scale},
                 {"phi", p.phi},
                 {"kappa", p.kappa},
                 {"b", p.b},
                 {"grid_size", grid.size()},
                 {"size_bound", nlohmann::json(fuzzykm::detail::number_to_json(grid.size_bound()))},
                 {"search_mode", std::string(to_string(res.mode_used))},
                 {"tuples_evaluated", res.evaluated}};
    return r;
}

inline RunReport run_round_command(const Options& o) {
    const WeightedPointSet x = load(o);
    FmConfig config;
    config.init = RandomPoints{o.seed};
    const FmResult fm = run_fm(x, config, o.m, o.k);
    const MembershipMatrix& mem = fm.solution.memberships();
    const double success =
        estimate_success_probability(x, mem, o.epsilon, o.trials, o.seed, o.threads);
    const SimilarityReport first =
        verify_similarity(x, mem, sample_hard_clusters(x, mem, o.seed, 0), o.epsilon);

    RunReport r;
    r.solver = "round";
    fill_parameters(r, o, true, false);
    r.parameters.overrides = {{"trials", o.trials}};
    fill_solution(r, x, fm.solution);
    fill_thresholds(r, x, o);
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : first.clusters) {
        clusters.push_back(nlohmann::json{{"fuzzy_weight", c.fuzzy_weight},
                            {"hard_weight", c.hard_weight},
                            {"eta", c.eta},
                            {"tau", c.tau},
                            {"weight_pass", c.weight_pass},
                            {"mean_pass", c.mean_pass ? nlohmann::json(*c.mean_pass) : nlohmann::json(nullptr)},
                            {"cost_pass", c.cost_pass ? nlohmann::json(*c.cost_pass) : nlohmann::json(nullptr)}});
    }
    r.details = {{"trials", o.trials},
                 {"success_fraction", success},
                 {"precondition_met", first.precondition_met},
                 {"first_trial", clusters}};
    return r;
}

inline RunReport run_radicals_command(const Options& o) {
    const WeightedPointSet x = instances::radicals();
    const FuzzySolution s = grid_refine_1d(x, 2, 2, Bracket{-4.0, 4.0}, o.resolution);
    const double mu_star = std::max(s.means()[0][0], s.means()[1][0]);
    const double other = std::min(s.means()[0][0], s.means()[1][0]);

    RunReport r;
    r.solver = "repro_radicals";
    r.parameters.k = 2;
    r.parameters.m = 2;
    r.parameters.seed = o.seed;
    r.parameters.overrides = {{"resolution", o.resolution}};
    fill_solution(r, x, s);
    r.details = {{"mu_star", mu_star},
                 {"reference_root", instances::kRadicalsRoot},
                 {"abs_error", std::abs(mu_star - instances::kRadicalsRoot)},
                 {"symmetry_gap", std::abs(mu_star + other)},
                 {"g_value", instances::radicals_polynomial(mu_star)}};
    return r;
}

inline RunReport run_poorlocal_command(const Options& o) {
    const WeightedPointSet x = instances::poor_local(o.a);
    FmConfig bad_cfg;
    bad_cfg.init = ExplicitMeans{instances::poor_local_bad_init(o.a)};
    FmConfig good_cfg;
    good_cfg.init = ExplicitMeans{instances::poor_local_good_init(o.a)};
    const FmResult bad = run_fm(x, bad_cfg, 2, 2);
    const FmResult good = run_fm(x, good_cfg, 2, 2);

    RunReport r;
    r.solver = "repro_poorlocal";
    r.parameters.k = 2;
    r.parameters.m = 2;
    r.parameters.seed = o.seed;
    r.parameters.overrides = {{"a", o.a}};
    fill_solution(r, x, good.solution);
    r.trace = TraceSummary{good.trace.steps(), std::string(to_string(good.trace.termination)),
                           good.trace.records.front().cost};
    r.details = {{"bad_cost", bad.solution.cost()},
                 {"good_cost", good.solution.cost()},
                 {"ratio", bad.solution.cost() / good.solution.cost()},
                 {"bad_means", means_json(bad.solution.means())},
                 {"good_means", means_json(good.solution.means())},
                 {"bad_iterations", bad.trace.steps()},
                 {"good_iterations", good.trace.steps()}};
    return r;
}

inline void write_error(std::ostream& err, std::string_view kind, const std::string& message) {
    err << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace detail

/// Parses `args` (without the program name), runs the chosen subcommand and
/// writes its report. Returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Fuzzy K-means solvers and reproduction harnesses", "fuzzykm"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--input", o.input, "CSV file of points");
    app.add_option("--weight-col", o.weight_col, "Weight column: header name or zero-based index");
    app.add_option("--out", o.out, "Write the report here instead of stdout");
    app.add_flag("--compact", o.compact, "Single-line JSON");
    app.add_option("--threads", o.threads, "Worker threads for candidate search (0 = all cores)");
    app.add_option("--seed", o.seed, "Seed for every random choice");

    auto common = [&](CLI::App* sub) {
        sub->add_option("--k", o.k, "Number of clusters")->check(CLI::PositiveNumber);
        sub->add_option("--m", o.m, "Fuzzifier (integer >= 2)");
    };
    auto with_epsilon = [&](CLI::App* sub) {
        sub->add_option("--epsilon", o.epsilon, "Approximation parameter in (0, 1]");
        sub->add_option("--cap", o.cap, "Enumeration cap");
    };

    CLI::App* fm = app.add_subcommand("fm", "Alternating optimization");
    common(fm);
    fm->add_option("--init", o.init, "'random' or comma-separated point indices");
    fm->add_option("--tol", o.tol, "Relative cost decrease at which to stop");
    fm->add_option("--max-iter", o.max_iter, "Iteration limit");

    CLI::App* randomized = app.add_subcommand("randomized", "Sampling-based approximation");
    common(randomized);
    with_epsilon(randomized);
    randomized->add_option("--alpha", o.alpha, "Balance parameter in (0, 1]");
    randomized->add_option("--repetitions", o.repetitions, "Override the number of samples");
    randomized->add_option("--multiset-size", o.multiset_size, "Override the sample size");
    randomized->add_option("--subset-size", o.subset_size, "Override the subset size");

    CLI::App* ptas = app.add_subcommand("ptas", "Exhaustive multiset-mean search");
    common(ptas);
    with_epsilon(ptas);
    ptas->add_option("--multiset-size", o.multiset_size, "Override the multiset size");

    CLI::App* grid = app.add_subcommand("grid", "Exponential-grid candidate search");
    common(grid);
    with_epsilon(grid);
    grid->add_option("--search", o.search, "exhaustive, descent or auto");

    CLI::App* round = app.add_subcommand("round", "Random rounding of an FM solution");
    common(round);
    round->add_option("--epsilon", o.epsilon, "Approximation parameter in (0, 1]");
    round->add_option("--trials", o.trials, "Number of roundings")->check(CLI::PositiveNumber);

    CLI::App* repro = app.add_subcommand("repro", "Built-in reproduction instances");
    repro->require_subcommand(1);
    CLI::App* radicals = repro->add_subcommand("radicals", "Symmetric six-point 2-means instance");
    radicals->add_option("--resolution", o.resolution, "Coarse grid points");
    CLI::App* poorlocal = repro->add_subcommand("poorlocal", "FM stuck in a poor stationary point");
    poorlocal->add_option("--a", o.a, "Half-width of the rectangle (> 1)");

    std::vector<std::string> argv_store{"fuzzykm"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        detail::write_error(err, "usage", e.what());
        return kInputError;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        RunReport report;
        if (fm->parsed()) {
            report = detail::run_fm_command(o);
        } else if (randomized->parsed()) {
            report = detail::run_randomized_command(o);
        } else if (ptas->parsed()) {
            report = detail::run_ptas_command(o);
        } else if (grid->parsed()) {
            report = detail::run_grid_command(o);
        } else if (round->parsed()) {
            report = detail::run_round_command(o);
        } else if (radicals->parsed()) {
            report = detail::run_radicals_command(o);
        } else {
            report = detail::run_poorlocal_command(o);
        }
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const std::string text = dump_report(report, o.compact);
        if (o.out.empty()) {
            out << text << '\n';
        } else {
            std::ofstream file(o.out);
            fuzzykm::detail::require(file.good(), ErrorKind::invalid_input,
                                     "cannot write '" + o.out + "'");
            file << text << '\n';
        }
        return kOk;
    } catch (const Error& e) {
        detail::write_error(err, to_string(e.kind()), e.what());
        return e.kind() == ErrorKind::infeasible ? kInfeasible : kInputError;
    } catch (const std::exception& e) {
        detail::write_error(err, "internal", e.what());
        return kInputError;
    }
}

}  // namespace fuzzykm::cli
