#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "muqmc/measure.hpp"
#include "muqmc/transference.hpp"

namespace muqmc {

// Reference envelope 63 * sqrt(d) * (2 + log2 N)^((3d+1)/2) / N.
double eq2_bound(std::size_t N, int d);

struct BenchRow {
    std::string measure_id;
    int d = 0;
    std::size_t N = 0;
    int k = 0;
    std::string strategy_id;
    std::uint64_t seed = 0;
    double dstar = 0.0;
    double n_times_dstar = 0.0;
    long long delta_max = 0;
    double ledger_bound_normalized = 0.0;
    double eq2_bound = 0.0;
    double runtime_ms = 0.0;
};

struct BenchMeasure {
    std::string id;
    MeasureSpec spec;
};

struct BenchConfig {
    std::vector<BenchMeasure> measures;
    std::vector<std::size_t> Ns; // powers of two
    int k = 4;
    std::vector<std::string> strategies; // parse_strategy ids
    std::vector<std::uint64_t> seeds;
    int best_of = 1;
    PaddingRule padding = PaddingRule::random;
    bool audit = false;
    bool deterministic_timing = false; // write runtime_ms as 0 for byte-stable output
};

// One row per (measure, N, strategy, seed) in that nested order. Jobs run on
// a worker pool capped by MUQMC_THREADS; row order is the sweep order
// regardless of completion order.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

std::string bench_csv(const std::vector<BenchRow>& rows);

// Per (measure, strategy): least-squares fit ln(N*D*) = ln c + beta*ln(log2 N),
// plus a cross-measure ranking by achieved N*D* at the largest N.
std::string bench_summary_json(const std::vector<BenchRow>& rows);

BenchConfig bench_config_from_json(const std::string& text);

} // namespace muqmc
