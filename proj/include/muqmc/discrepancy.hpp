#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "muqmc/measure.hpp"
#include "muqmc/point_set.hpp"

namespace muqmc {

// Per-axis sorted candidate corner coordinates realizing the supremum of the
// star-discrepancy over a finite set: point coordinates, marginal atoms of
// mu, and 1.
struct CriticalGrid {
    std::vector<std::vector<double>> axes;
};

enum class WitnessSide { over, under }; // over: empirical exceeds measure

struct DiscrepancyReport {
    double value = 0.0;
    std::vector<double> witness_corner;
    WitnessSide witness_side = WitnessSide::over;
    std::size_t closed_count = 0; // points in the closed box at the witness
    std::size_t open_count = 0;   // points strictly inside on every axis
    double mu_closed = 0.0;
    double mu_open = 0.0;
};

CriticalGrid critical_grid(const PointSet& p, const MeasureSpec& m);

// (closed_count, open_count) of the anchored box at `corner`.
std::pair<std::size_t, std::size_t> box_counts(const PointSet& p, std::span<const double> corner);
std::pair<std::size_t, std::size_t> box_counts(const PointSet& p,
                                               std::initializer_list<double> corner);

// Exact star-discrepancy sup_A |#(P in A)/N - mu(A)| over the closure of the
// class of anchored boxes (closed, open and half-open variants). Witness ties
// break to the lexicographically smallest corner, then to the over side.
// Refuses with BudgetError when the corner-grid product exceeds 1e8.
DiscrepancyReport star_discrepancy(const PointSet& p, const MeasureSpec& m);

// Randomized lower bound: best |empirical - mu| over `trials` corners (the
// all-ones corner first, then seeded-uniform draws), each evaluated for the
// closed and open box. Never exceeds the exact value.
double star_discrepancy_lower_bound(const PointSet& p, const MeasureSpec& m, std::size_t trials,
                                    std::uint64_t seed);

// Unnormalized discrepancy D(P, A, mu) = N * D_N^*.
double geometric_disc(const PointSet& p, const MeasureSpec& m);

struct CombinatorialDisc {
    long long value = 0;
    std::vector<double> witness_corner;
};

// Max absolute signed count of a coloring over anchored boxes restricted to
// the point set (grid of point coordinates plus 1; closed and open sums). The
// full cube is always among the test sets.
CombinatorialDisc combinatorial_disc(const PointSet& p, const Coloring& y);

std::string to_string(WitnessSide side);

} // namespace muqmc
