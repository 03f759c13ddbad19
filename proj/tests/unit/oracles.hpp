#pragma once

// Test-only oracles. These deliberately avoid the production sweep kernels:
// counts are taken with a naive per-corner loop so they can contradict the
// fast implementation if it is wrong.

#include <algorithm>
#include <cmath>
#include <vector>

#include "muqmc/discrepancy.hpp"
#include "muqmc/measure.hpp"
#include "muqmc/point_set.hpp"
#include "muqmc/rng.hpp"

namespace muqmc::test {

// |empirical - mu| at one corner over the two consistent box variants
// (closed/closed and open/open). Both are actual boxes of the class closure,
// so the result never exceeds the exact star-discrepancy.
inline double disc_at_corner(const PointSet& p, const MeasureSpec& m,
                             std::span<const double> corner) {
    const double n = static_cast<double>(p.size());
    std::size_t closed = 0, open = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        bool in_c = true, in_o = true;
        for (int j = 0; j < p.d; ++j) {
            in_c = in_c && p.at(i, j) <= corner[j];
            in_o = in_o && p.at(i, j) < corner[j];
        }
        closed += in_c;
        open += in_o;
    }
    double mu_c = box_measure(m, corner, Closure::all_closed(p.d));
    double mu_o = box_measure(m, corner, Closure::all_open(p.d));
    return std::max(std::abs(closed / n - mu_c), std::abs(open / n - mu_o));
}

// Max of disc_at_corner over the uniform lattice (i_1/cells, ..., i_d/cells),
// i_j in 1..cells.
inline double lattice_sweep(const PointSet& p, const MeasureSpec& m, int cells) {
    std::vector<int> idx(p.d, 1);
    std::vector<double> corner(p.d);
    double best = 0.0;
    while (true) {
        for (int j = 0; j < p.d; ++j) corner[j] = static_cast<double>(idx[j]) / cells;
        best = std::max(best, disc_at_corner(p, m, corner));
        int j = p.d - 1;
        for (; j >= 0; --j) {
            if (++idx[j] <= cells) break;
            idx[j] = 1;
        }
        if (j < 0) break;
    }
    return best;
}

inline double random_corner_oracle(const PointSet& p, const MeasureSpec& m, std::size_t trials,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> corner(p.d);
    double best = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (int j = 0; j < p.d; ++j) corner[j] = uniform01(rng);
        best = std::max(best, disc_at_corner(p, m, corner));
    }
    return best;
}

// Order-statistics closed form for atomless mu in d=1:
// max_i max(i/N - F(x_(i)), F(x_(i)) - (i-1)/N).
inline double order_statistics_disc_1d(const PointSet& p, const MeasureSpec& m) {
    std::vector<double> xs(p.coords);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double best = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = box_measure(m, {&xs[i], 1}, Closure::all_closed(1));
        best = std::max({best, (i + 1) / n - f, f - i / n});
    }
    return best;
}

} // namespace muqmc::test
