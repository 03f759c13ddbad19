// muqmc: point sets with tracked star-discrepancy for arbitrary normalized
// measures on the unit cube, plus evaluation and quadrature tooling.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "muqmc/bench.hpp"
#include "muqmc/coloring.hpp"
#include "muqmc/discrepancy.hpp"
#include "muqmc/io.hpp"
#include "muqmc/measure.hpp"
#include "muqmc/quadrature.hpp"
#include "muqmc/rng.hpp"
#include "muqmc/transference.hpp"

namespace {

using namespace muqmc;
using nlohmann::json;

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

// Inline JSON or @path indirection for small config arguments.
std::string inline_or_file(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') return read_file(arg.substr(1));
    return arg;
}

// Replaces the seeds embedded in a strategy (including a local-search init)
// so that --seed alone re-seeds stochastic engines.
ColoringStrategy reseed_strategy(const ColoringStrategy& s, std::uint64_t seed) {
    return std::visit(
        [&](const auto& strat) -> ColoringStrategy {
            using T = std::decay_t<decltype(strat)>;
            if constexpr (std::is_same_v<T, BalancedRandom>) {
                return ColoringStrategy{BalancedRandom{seed}};
            } else if constexpr (std::is_same_v<T, LocalSearch>) {
                LocalSearch ls = strat;
                ls.seed = seed;
                ls.init = std::make_shared<const ColoringStrategy>(
                    reseed_strategy(*strat.init, seed));
                return ColoringStrategy{ls};
            } else {
                return ColoringStrategy{strat};
            }
        },
        s.variant());
}

struct HellEntry {
    std::string id;
    MeasureSpec spec;
};

// Default roster for the cross-measure comparison experiment.
std::vector<HellEntry> hell_roster(int d) {
    std::vector<HellEntry> out;
    out.push_back({"uniform", MeasureSpec{Uniform{d}}});
    std::vector<double> alphas;
    for (int j = 0; j < d; ++j) alphas.push_back(j % 2 == 0 ? 2.0 : 0.5);
    out.push_back({"product_power", MeasureSpec{ProductPower{alphas}}});
    if (d == 2) {
        out.push_back({"clayton2d", MeasureSpec{Clayton2D{2.0, {1.0, 1.0}}}});
        out.push_back(
            {"piecewise", MeasureSpec{PiecewiseConstantDyadic{2, 1, {0.4, 0.1, 0.1, 0.4}}}});
    }
    std::vector<std::vector<double>> atoms;
    std::vector<double> w;
    for (int i = 0; i < 4; ++i) {
        std::vector<double> a(d, (i + 0.5) / 4.0);
        atoms.push_back(a);
        w.push_back(0.25);
    }
    out.push_back({"discrete", MeasureSpec{Discrete{d, atoms, w}}});
    out.push_back({"mixture",
                   MeasureSpec{Mixture{{0.5, 0.5},
                                       {MeasureSpec{Uniform{d}},
                                        MeasureSpec{Discrete{d, atoms, w}}}}}});
    return out;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"low-discrepancy point sets for arbitrary measures on [0,1]^d"};
    app.require_subcommand(1);

    std::string measure_path, points_path, out_path, trace_path, strategy_str, function_arg,
        config_path, padding_str = "random";
    std::uint64_t seed = 0;
    std::size_t N = 64;
    int k = 4, best_of = 1, hell_d = 2;
    std::size_t trials = 0;
    bool audit = false, header = false;

    auto* c_sample = app.add_subcommand("sample", "draw i.i.d. points from a measure");
    c_sample->add_option("--measure", measure_path, "measure JSON file")->required();
    c_sample->add_option("--N", N, "number of points")->required();
    c_sample->add_option("--seed", seed, "RNG seed");
    c_sample->add_option("--out", out_path, "output points CSV (default stdout)");

    auto* c_disc = app.add_subcommand("disc", "exact star-discrepancy of a point set");
    c_disc->add_option("--measure", measure_path, "measure JSON file")->required();
    c_disc->add_option("--points", points_path, "points CSV file")->required();
    c_disc->add_flag("--header", header, "points CSV has a header row");
    c_disc->add_option("--lower-bound-trials", trials,
                       "also report the randomized lower bound with this many trials");
    c_disc->add_option("--seed", seed, "seed for the lower-bound oracle");
    c_disc->add_option("--out", out_path, "output report JSON (default stdout)");

    auto* c_color = app.add_subcommand("color", "red-blue coloring of a point set");
    c_color->add_option("--points", points_path, "points CSV file")->required();
    c_color->add_option("--strategy", strategy_str, "coloring strategy id")
        ->default_val("alternating(order=axis0)");
    auto* color_seed = c_color->add_option("--seed", seed, "override strategy seeds");
    c_color->add_flag("--header", header, "points CSV has a header row");
    c_color->add_option("--out", out_path, "output coloring CSV (default stdout)");

    auto* c_generate = app.add_subcommand("generate", "transference pipeline point-set generator");
    c_generate->add_option("--measure", measure_path, "measure JSON file")->required();
    c_generate->add_option("--N", N, "target point count")->required();
    c_generate->add_option("--k", k, "number of halving steps");
    c_generate->add_option("--strategy", strategy_str, "coloring strategy id")
        ->default_val("dyadic(L=4,lambda=auto,order=axis0)");
    c_generate->add_option("--seed", seed, "RNG seed");
    c_generate->add_option("--best-of", best_of, "initializer retries");
    c_generate->add_option("--padding", padding_str, "padding rule: random|greedy");
    c_generate->add_flag("--audit", audit, "measure D_i at every step and enforce the ledger");
    c_generate->add_option("--out", out_path, "output points CSV (default stdout)");
    c_generate->add_option("--trace", trace_path, "output trace JSON");

    auto* c_integrate = app.add_subcommand("integrate", "QMC quadrature with Koksma-Hlawka bound");
    c_integrate->add_option("--measure", measure_path, "measure JSON file")->required();
    c_integrate->add_option("--points", points_path, "points CSV file")->required();
    c_integrate
        ->add_option("--function", function_arg, "test function JSON (inline or @file)")
        ->required();
    c_integrate->add_flag("--header", header, "points CSV has a header row");
    c_integrate->add_option("--seed", seed, "seed for the MC reference fallback");
    c_integrate->add_option("--out", out_path, "output JSON (default stdout)");

    auto* c_bench = app.add_subcommand("bench", "benchmark sweep over measures/N/strategies");
    c_bench->add_option("--config", config_path, "sweep config JSON file")->required();
    c_bench->add_option("--out", out_path, "output rows CSV (default stdout)");
    c_bench->add_option("--summary", trace_path, "output summary JSON");

    auto* c_hell = app.add_subcommand("hell",
                                      "cross-measure comparison: which measure is hardest?");
    c_hell->add_option("--d", hell_d, "dimension");
    c_hell->add_option("--N", N, "target point count");
    c_hell->add_option("--k", k, "halving steps");
    c_hell->add_option("--strategy", strategy_str, "coloring strategy id")
        ->default_val("dyadic(L=4,lambda=auto,order=axis0)");
    c_hell->add_option("--seed", seed, "RNG seed");
    c_hell->add_option("--out", out_path, "output JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    if (c_sample->parsed()) {
        MeasureSpec m = load_measure(measure_path);
        emit(out_path, points_to_csv(sample(m, N, seed)));
    } else if (c_disc->parsed()) {
        MeasureSpec m = load_measure(measure_path);
        PointSet p = load_points(points_path, header);
        DiscrepancyReport rep = star_discrepancy(p, m);
        std::string out = report_to_json(rep, p.size(), p.d);
        if (trials > 0) {
            json j = json::parse(out);
            j["lower_bound"] = star_discrepancy_lower_bound(p, m, trials, seed);
            out = j.dump(2) + "\n";
        }
        emit(out_path, out);
    } else if (c_color->parsed()) {
        PointSet p = load_points(points_path, header);
        ColoringStrategy s = parse_strategy(strategy_str);
        if (color_seed->count() > 0) s = reseed_strategy(s, seed);
        emit(out_path, coloring_to_csv(color(p, s)));
    } else if (c_generate->parsed()) {
        MeasureSpec m = load_measure(measure_path);
        GenerationConfig cfg;
        cfg.N = N;
        cfg.k = k;
        cfg.strategy = parse_strategy(strategy_str);
        cfg.seed = seed;
        cfg.best_of = best_of;
        cfg.audit = audit;
        cfg.padding = parse_padding_rule(padding_str);
        auto [points, trace] = generate(m, cfg);
        emit(out_path, points_to_csv(points));
        if (!trace_path.empty()) write_file(trace_path, trace_to_json(trace, cfg, m));
    } else if (c_integrate->parsed()) {
        MeasureSpec m = load_measure(measure_path);
        PointSet p = load_points(points_path, header);
        TestFunction f = function_from_json(inline_or_file(function_arg));
        if (true_integral_supported(m, f)) {
            emit(out_path, kh_to_json(kh_check(p, m, f)));
        } else {
            // No closed form (e.g. Clayton2D): high-precision MC reference
            // with a reported confidence band instead of a hard bound check.
            const std::size_t ref_n = 1000000;
            PointSet ref_sample = sample(m, ref_n, seed_mix(seed, 0x5EEDu));
            double mean = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < ref_sample.size(); ++i) {
                double v = f(ref_sample.point(i));
                double delta = v - mean;
                mean += delta / static_cast<double>(i + 1);
                m2 += delta * (v - mean);
            }
            double se = std::sqrt(m2 / static_cast<double>(ref_n - 1) /
                                  static_cast<double>(ref_n));
            double est = qmc_estimate(p, f);
            double dstar = star_discrepancy(p, m).value;
            double var = hk_variation(f);
            json doc = {{"estimate", est},
                        {"true_value", mean},
                        {"error", std::abs(est - mean)},
                        {"dstar", dstar},
                        {"variation", var},
                        {"bound", dstar * var},
                        {"satisfied", nullptr},
                        {"analytic", false},
                        {"reference_std_error", se}};
            emit(out_path, doc.dump(2) + "\n");
        }
    } else if (c_bench->parsed()) {
        BenchConfig cfg = bench_config_from_json(read_file(config_path));
        auto rows = run_bench(cfg);
        emit(out_path, bench_csv(rows));
        std::string summary = bench_summary_json(rows);
        if (!trace_path.empty()) {
            write_file(trace_path, summary);
        } else if (!out_path.empty()) {
            std::cout << summary;
        }
    } else if (c_hell->parsed()) {
        json results = json::array();
        for (const auto& entry : hell_roster(hell_d)) {
            GenerationConfig cfg;
            cfg.N = N;
            cfg.k = k;
            cfg.strategy = parse_strategy(strategy_str);
            cfg.seed = seed;
            auto [points, trace] = generate(entry.spec, cfg);
            results.push_back({{"measure_id", entry.id},
                               {"N", N},
                               {"dstar", *trace.Dk / static_cast<double>(N)},
                               {"n_times_dstar", *trace.Dk},
                               {"ledger_bound_normalized",
                                ledger_bound(trace) / static_cast<double>(N)}});
        }
        std::sort(results.begin(), results.end(), [](const json& a, const json& b) {
            double va = a.at("n_times_dstar").get<double>();
            double vb = b.at("n_times_dstar").get<double>();
            if (va != vb) return va > vb;
            return a.at("measure_id").get<std::string>() < b.at("measure_id").get<std::string>();
        });
        json doc = {{"d", hell_d},
                    {"N", N},
                    {"k", k},
                    {"strategy", strategy_str},
                    {"seed", seed},
                    {"hardest_first", results},
                    {"note", "empirical comparison only; says nothing about worst-case measures"}};
        emit(out_path, doc.dump(2) + "\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const muqmc::InvariantViolation& e) {
        std::cerr << "muqmc: invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const muqmc::BudgetError& e) {
        std::cerr << "muqmc: budget: " << e.what() << "\n";
        return 3;
    } catch (const muqmc::Error& e) {
        std::cerr << "muqmc: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "muqmc: error: " << e.what() << "\n";
        return 2;
    }
}
