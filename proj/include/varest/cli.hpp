#pragma once

// Command-line front end. run_command() takes argv without the program name
// and writes to the given streams, so tests drive it in-process.
//
// Exit codes: 0 success, 1 usage error, 2 data/parse error,
// 3 breakdown present with --strict.

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "error.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "montecarlo.hpp"
#include "mse.hpp"
#include "population.hpp"
#include "report.hpp"
#include "spec_text.hpp"
#include "tuning.hpp"

namespace varest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitBreakdown = 3;

/// Value commonly quoted for the optimal regression row on the apple data.
inline constexpr double kQuotedRegressionRow = 3927.178;

namespace detail {

inline std::vector<SpecRequest> join_specs(const std::vector<std::string>& lists) {
    std::vector<SpecRequest> out;
    for (const auto& l : lists) {
        auto part = parse_spec_list(l);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

inline std::size_t design_n(const std::optional<std::size_t>& flag, const PopulationParams& p) {
    if (flag) return *flag;
    if (p.n) return *p.n;
    throw Error(ErrorKind::InvalidDesign, "sample size missing: pass --n or put \"n\" in the parameter file");
}

}  // namespace detail

inline int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-population variance estimators: first-order MSE theory, enumeration and simulation",
                 "varest"};
    app.require_subcommand(1);

    std::string out_format;
    bool full_precision = false;
    bool strict = false;
    std::string variant_text = "printed";

    // params
    auto* params_cmd = app.add_subcommand("params", "Derive or validate population parameters");
    std::string data_path, params_path;
    std::optional<std::size_t> n_flag;
    auto* p_data = params_cmd->add_option("--data", data_path, "CSV population with header y,x");
    auto* p_params = params_cmd->add_option("--params", params_path, "JSON parameter file");
    p_data->excludes(p_params);
    params_cmd->add_option("--n", n_flag, "Sample size to record in the output");
    params_cmd->add_option("--out", out_format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    params_cmd->add_flag("--full-precision", full_precision, "Shortest round-trip decimals (csv)");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "First-order MSE comparison table");
    std::vector<std::string> spec_lists;
    std::vector<std::string> t_rows;
    bool kc_unstarred = false;
    compare_cmd->add_option("--params", params_path, "JSON parameter file")->required();
    compare_cmd->add_option("--n", n_flag, "Sample size (defaults to the file's n)");
    compare_cmd->add_option("--variant", variant_text, "printed|rederived")
        ->check(CLI::IsMember({"printed", "rederived"}));
    compare_cmd->add_option("--specs", spec_lists, "Estimator list, ';'-separated (default: reference roster)");
    compare_cmd->add_option("--t", t_rows, "Add an optimal proposed-T row: m,w,c,d");
    compare_cmd->add_option("--out", out_format, "md|csv|json")->check(CLI::IsMember({"md", "csv", "json"}));
    compare_cmd->add_flag("--full-precision", full_precision, "Shortest round-trip decimals");
    compare_cmd->add_flag("--strict", strict, "Exit 3 when any row reports breakdown");
    compare_cmd->add_flag("--kc-unstarred", kc_unstarred, "Debug: KC MSE with unstarred beta2_x as typeset");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo MSE joined with first-order theory");
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    bool allow_partial = false;
    unsigned threads = 0;
    simulate_cmd->add_option("--data", data_path, "CSV population with header y,x")->required();
    simulate_cmd->add_option("--n", n_flag, "Sample size")->required();
    simulate_cmd->add_option("--reps", reps, "Replicates")->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", seed, "RNG seed")->required();
    simulate_cmd->add_option("--specs", spec_lists, "Estimator list, ';'-separated")->required();
    simulate_cmd->add_option("--variant", variant_text, "printed|rederived")
        ->check(CLI::IsMember({"printed", "rederived"}));
    simulate_cmd->add_flag("--allow-partial", allow_partial, "Skip and count samples an estimator rejects");
    simulate_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    simulate_cmd->add_option("--out", out_format, "md|csv|json")->check(CLI::IsMember({"md", "csv", "json"}));
    simulate_cmd->add_flag("--full-precision", full_precision, "Shortest round-trip decimals");

    // enumerate
    auto* enumerate_cmd = app.add_subcommand("enumerate", "Exact MSE over all C(N, n) samples");
    enumerate_cmd->add_option("--data", data_path, "CSV population with header y,x")->required();
    enumerate_cmd->add_option("--n", n_flag, "Sample size")->required();
    enumerate_cmd->add_option("--specs", spec_lists, "Estimator list, ';'-separated")->required();
    enumerate_cmd->add_flag("--allow-partial", allow_partial, "Skip and count samples an estimator rejects");
    enumerate_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    enumerate_cmd->add_option("--out", out_format, "md|csv|json")->check(CLI::IsMember({"md", "csv", "json"}));
    enumerate_cmd->add_flag("--full-precision", full_precision, "Shortest round-trip decimals");

    // search
    auto* search_cmd = app.add_subcommand("search", "Grid search over the proposed-T constants (m, w, c, d)");
    std::optional<double> target;
    std::string m_range, w_range, cd_pairs, grid_path;
    bool constrained = false;
    std::size_t top = 20;
    double tolerance = 1e-3;
    search_cmd->add_option("--params", params_path, "JSON parameter file")->required();
    search_cmd->add_option("--n", n_flag, "Sample size (defaults to the file's n)");
    search_cmd->add_option("--target", target, "Report grid points whose MSE matches this value");
    search_cmd->add_option("--tolerance", tolerance, "Relative tolerance for --target");
    search_cmd->add_option("--m", m_range, "m values: a:b:step or comma list");
    search_cmd->add_option("--w", w_range, "w values: a:b:step or comma list");
    search_cmd->add_option("--cd", cd_pairs, "(c,d) pairs: 'c,d;c,d'");
    search_cmd->add_option("--grid", grid_path, "JSON grid file {m, w, cd}");
    search_cmd->add_option("--variant", variant_text, "printed|rederived")
        ->check(CLI::IsMember({"printed", "rederived"}));
    search_cmd->add_flag("--constrained", constrained, "Also evaluate the w1 + w2 = 1 optimum");
    search_cmd->add_option("--top", top, "Rows to print (0 = all)");
    search_cmd->add_option("--out", out_format, "md|csv|json")->check(CLI::IsMember({"md", "csv", "json"}));
    search_cmd->add_flag("--full-precision", full_precision, "Shortest round-trip decimals");
    search_cmd->add_flag("--strict", strict, "Exit 3 when a printed row reports breakdown");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    const NumberFormat fmt{full_precision};
    try {
        const auto variant = parse_variant(variant_text);

        if (params_cmd->parsed()) {
            if (data_path.empty() == params_path.empty()) {
                err << "error: give exactly one of --data or --params\n\n" << params_cmd->help();
                return kExitUsage;
            }
            PopulationParams p = data_path.empty() ? load_params(params_path) : derive_params(load_csv(data_path));
            if (n_flag) {
                check_design(*n_flag, p.N);
                p.n = n_flag;
            }
            if (out_format == "csv") write_params_csv(out, p, fmt);
            else out << params_to_json(p).dump(2) << '\n';
            return kExitOk;
        }

        if (compare_cmd->parsed()) {
            const auto p = load_params(params_path);
            const double th = theta(detail::design_n(n_flag, p), p.N);
            const bool default_roster_used = spec_lists.empty();
            auto requests = default_roster_used ? default_roster() : detail::join_specs(spec_lists);
            for (const auto& row : t_rows) requests.push_back(parse_spec("t:" + [&] {
                const auto v = parse_range(row);
                if (v.size() != 4) throw Error(ErrorKind::InvalidSpec, "--t expects m,w,c,d");
                return "m=" + shortest(v[0]) + ",w=" + shortest(v[1]) + ",c=" + shortest(v[2]) + ",d=" +
                       shortest(v[3]) + ",opt";
            }()));
            auto rows = compare_table(p, th, requests, variant);
            std::vector<std::pair<std::size_t, std::string>> notes;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& req = requests[i];
                if (kc_unstarred && std::holds_alternative<KadilarCingi>(req.spec) && !rows[i].error) {
                    rows[i].mse = mse_kc(p, th, std::get<KadilarCingi>(req.spec).index(), true);
                    rows[i].relative_efficiency = var_usual(p, th) / rows[i].mse;
                }
                if (default_roster_used && req.optimal && std::holds_alternative<Regression>(req.spec))
                    notes.emplace_back(i, "Commonly quoted as " + significant(kQuotedRegressionRow, 7) +
                                              ", the same value as the KC rows; the closed-form "
                                              "regression minimum var(s_y^2)(1 - rho*^2) is shown instead.");
            }
            const auto format = out_format.empty() ? OutputFormat::Markdown : parse_format(out_format);
            if (format == OutputFormat::Csv) write_csv(out, rows, fmt);
            else if (format == OutputFormat::Json) write_json(out, rows);
            else write_markdown(out, rows, fmt, notes);
            const bool breakdown = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.breakdown; });
            return strict && breakdown ? kExitBreakdown : kExitOk;
        }

        if (simulate_cmd->parsed()) {
            const auto pop = load_csv(data_path);
            const auto p = derive_params(pop);
            const double th = theta(*n_flag, pop.size());
            SimulationConfig cfg;
            cfg.replicates = reps;
            cfg.n = *n_flag;
            cfg.seed = seed;
            cfg.allow_partial = allow_partial;
            cfg.threads = threads;
            for (const auto& req : detail::join_specs(spec_lists)) cfg.specs.push_back(resolve(req, p, th, variant));
            const auto rows = validate_theory(pop, p, cfg, variant);
            const auto format = out_format.empty() ? OutputFormat::Markdown : parse_format(out_format);
            if (format == OutputFormat::Csv) write_csv(out, rows, fmt);
            else if (format == OutputFormat::Json) write_json(out, rows);
            else write_markdown(out, rows, fmt);
            return kExitOk;
        }

        if (enumerate_cmd->parsed()) {
            const auto pop = load_csv(data_path);
            const auto p = derive_params(pop);
            const double th = theta(*n_flag, pop.size());
            ExactOptions opts;
            opts.cap = enumeration_cap_from_env();
            opts.allow_partial = allow_partial;
            opts.threads = threads;
            std::vector<ExactRow> rows;
            bool failed = false;
            for (const auto& req : detail::join_specs(spec_lists)) {
                const auto spec = resolve(req, p, th, variant);
                ExactRow row;
                row.estimator = to_string(spec);
                try {
                    row.result = exact_mse(pop, *n_flag, spec, opts);
                } catch (const Error& e) {
                    if (e.kind() == ErrorKind::TooManyCombinations || e.kind() == ErrorKind::InvalidDesign) throw;
                    row.error = e.what();
                    failed = true;
                }
                rows.push_back(std::move(row));
            }
            const auto format = out_format.empty() ? OutputFormat::Markdown : parse_format(out_format);
            if (format == OutputFormat::Csv) write_csv(out, rows, fmt);
            else if (format == OutputFormat::Json) write_json(out, rows);
            else write_markdown(out, rows, fmt);
            return failed ? kExitData : kExitOk;
        }

        if (search_cmd->parsed()) {
            const auto p = load_params(params_path);
            const double th = theta(detail::design_n(n_flag, p), p.N);
            TuningGrid grid = grid_path.empty() ? default_grid(p) : load_grid(grid_path);
            if (!m_range.empty()) grid.m = parse_range(m_range);
            if (!w_range.empty()) grid.w = parse_range(w_range);
            if (!cd_pairs.empty()) grid.cd = parse_cd_pairs(cd_pairs);
            auto rows = target ? recover(p, th, *target, grid, variant, tolerance, constrained)
                               : minimize_t(p, th, grid, variant, constrained);
            if (top > 0 && rows.size() > top) rows.resize(top);
            const auto format = out_format.empty() ? OutputFormat::Markdown : parse_format(out_format);
            if (format == OutputFormat::Csv) write_csv(out, rows, fmt);
            else if (format == OutputFormat::Json) write_json(out, rows);
            else {
                write_markdown(out, rows, fmt);
                if (target && rows.empty())
                    out << "\nNo grid point reproduces MSE " << significant(*target, 7) << " within relative tolerance "
                        << significant(tolerance) << ".\n";
            }
            const bool breakdown =
                std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.report.breakdown; });
            return strict && breakdown ? kExitBreakdown : kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace varest::cli
