#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "muqmc/point_set.hpp"

namespace muqmc {

struct OrderSpec {
    enum class Kind { axis, lex, hilbert };
    Kind kind = Kind::axis;
    int axis = 0; // for Kind::axis
};

struct AlternatingOrder {
    OrderSpec order;
};

// Hyperbolic-cosine greedy over the canonical dyadic box system.
struct DyadicPotential {
    int max_level = 4;
    double rate = 0.0; // 0 = auto: 1/sqrt((L+1)^d)
    OrderSpec process_order;
};

struct BalancedRandom {
    std::uint64_t seed = 0;
};

class ColoringStrategy;

struct LocalSearch {
    std::shared_ptr<const ColoringStrategy> init; // must not be LocalSearch itself
    std::uint64_t budget = 1000;                  // flip-pair evaluations
    std::uint64_t seed = 0;
};

using StrategyVariant = std::variant<AlternatingOrder, DyadicPotential, LocalSearch, BalancedRandom>;

class ColoringStrategy {
public:
    ColoringStrategy() : v_(AlternatingOrder{}) {}
    ColoringStrategy(StrategyVariant v);

    const StrategyVariant& variant() const { return v_; }

private:
    StrategyVariant v_;
};

// Axis-parallel dyadic box with per-axis level and cell index:
// interval [cell * 2^-level, (cell+1) * 2^-level) on each axis.
struct DyadicBox {
    std::vector<int> levels;
    std::vector<std::uint64_t> cells;
};

// Canonical dyadic boxes of per-axis level <= max_level, pruned to boxes
// containing at least one point, plus one global constraint over all points.
struct DyadicConstraintSystem {
    int d = 0;
    int max_level = 0;
    std::size_t n_points = 0;
    std::vector<DyadicBox> boxes;
    std::vector<std::vector<std::size_t>> incidence; // per point: box indices
};

// Deterministic permutation of 0..n-1. axis(j) sorts by coordinate j,
// lex sorts lexicographically, hilbert follows a fixed-depth (16-level)
// Hilbert curve and requires d <= 3. Original index breaks ties.
std::vector<std::size_t> order_points(const PointSet& p, const OrderSpec& order);

// Signs +1, -1, +1, ... along the given order. In d=1 with axis order this
// keeps every anchored-interval imbalance at most 1.
Coloring color_alternating(const PointSet& p, const OrderSpec& order);

DyadicConstraintSystem build_dyadic_system(const PointSet& p, int max_level);

// Decomposes [0, corner) with level-L dyadic-rational corner coordinates into
// disjoint canonical boxes (at most L per axis, so at most L^d total).
std::vector<DyadicBox> decompose_anchored_dyadic(std::span<const double> corner, int level);

// Greedy sign choice minimizing sum of cosh(rate * box count) over the boxes
// containing each point plus the global constraint; ties choose +1. Points
// are processed in `process_order` (identity if empty).
Coloring greedy_potential_color(const DyadicConstraintSystem& sys, double rate,
                                const std::vector<std::size_t>& process_order = {});

// Seeded pair-swap descent on exact combinatorial discrepancy. Swaps preserve
// the coloring balance; output discrepancy never exceeds the input's.
Coloring local_search(const PointSet& p, const Coloring& init, std::uint64_t budget,
                      std::uint64_t seed);

// Exact combinatorial disc after flipping each point of sign `flip_sign`,
// computed for all candidates in one streamed pass (d <= 2). Entries for
// points of the other sign are LLONG_MAX.
std::vector<long long> disc_after_flip_all(const PointSet& p, const Coloring& y, int flip_sign);

// Strategy dispatcher; every output satisfies |sum of signs| <= 1.
Coloring color(const PointSet& p, const ColoringStrategy& s);

// Canonical strategy identifier, parseable by parse_strategy.
std::string strategy_id(const ColoringStrategy& s);
ColoringStrategy parse_strategy(const std::string& id);

std::string order_id(const OrderSpec& o);

} // namespace muqmc
