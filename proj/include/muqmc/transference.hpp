#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "muqmc/coloring.hpp"
#include "muqmc/measure.hpp"
#include "muqmc/point_set.hpp"

namespace muqmc {

enum class PaddingRule { random, greedy };

// One halving: the minority color class is kept whole and padded back to
// half the input size from the majority class.
struct HalvingStep {
    int index = 0;
    std::size_t size_before = 0;
    long long delta = 0; // exact combinatorial disc of the step's coloring
    std::size_t minority_size = 0;
    std::size_t padding_count = 0;
    std::vector<std::size_t> kept_indices; // into the step's input, ascending
};

struct TransferenceTrace {
    int k = 0;
    std::vector<HalvingStep> steps;
    std::optional<double> D0; // unnormalized discrepancy of P_0
    std::vector<double> Di;   // audit mode: D_0 .. D_k
    std::optional<double> Dk; // unnormalized discrepancy of the final set
    bool audited = false;
};

struct GenerationConfig {
    std::size_t N = 64;
    int k = 0;
    ColoringStrategy strategy;
    std::uint64_t seed = 0;
    int best_of = 1;
    bool audit = false;
    PaddingRule padding = PaddingRule::random;
};

// Best of `best_of` independent i.i.d. draws of `size` points, scored by
// exact star-discrepancy when the corner grid fits the budget and by the
// randomized lower bound (1e5 trials) otherwise. best_of=1 returns
// sample(m, size, seed) unchanged.
PointSet initial_approximation(const MeasureSpec& m, std::size_t size, std::uint64_t seed,
                               int best_of);

// Halves an even point set under coloring y. Keeps the minority sign class
// (ties keep +1) and pads with majority points: rule=random draws uniformly
// without replacement, rule=greedy repeatedly adds the majority point
// minimizing the exact star-discrepancy of the partial result (requires the
// measure). Kept points preserve input order.
std::pair<PointSet, HalvingStep> halving_step(const PointSet& p, const Coloring& y,
                                              PaddingRule rule, std::uint64_t seed,
                                              const MeasureSpec* measure_for_greedy = nullptr);

// The full pipeline: P_0 of 2^k * N points, then k color-and-halve steps.
// Always measures D0 and Dk; audit mode measures every D_i and enforces the
// per-step ledger inequality D_{i+1} <= D_i/2 + delta_i.
std::pair<PointSet, TransferenceTrace> generate(const MeasureSpec& m,
                                                const GenerationConfig& cfg);

// D0 / 2^k + sum_i delta_i / 2^(k-1-i); divided by N this certifies the
// final star-discrepancy.
double ledger_bound(const TransferenceTrace& t);

std::string padding_rule_id(PaddingRule rule);
PaddingRule parse_padding_rule(const std::string& s);

} // namespace muqmc
