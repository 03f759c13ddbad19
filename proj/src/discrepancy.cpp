#include "muqmc/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "muqmc/rng.hpp"

namespace muqmc {

namespace detail {
double clayton_copula(double u, double v, double theta) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    double s = std::pow(u, -theta) + std::pow(v, -theta) - 1.0;
    return std::pow(s, -1.0 / theta);
}
} // namespace detail

namespace {

constexpr double kGridBudget = 1e8;

// Continuous part of mu evaluated at a grid corner, with per-axis tables for
// the product-form variants and a box_measure fallback otherwise.
class ContEval {
public:
    ContEval(const MeasureDecomposition& decomp,
             const std::vector<std::vector<double>>& corner_values)
        : corner_values_(corner_values) {
        for (const auto& [weight, spec] : decomp.continuous) {
            if (const auto* u = spec->get_if<Uniform>()) {
                (void)u;
                ProductTerm t;
                t.weight = weight;
                t.factors = corner_values;
                products_.push_back(std::move(t));
            } else if (const auto* pp = spec->get_if<ProductPower>()) {
                ProductTerm t;
                t.weight = weight;
                t.factors.resize(corner_values.size());
                for (std::size_t j = 0; j < corner_values.size(); ++j) {
                    t.factors[j].reserve(corner_values[j].size());
                    for (double v : corner_values[j])
                        t.factors[j].push_back(std::pow(v, pp->alphas[j]));
                }
                products_.push_back(std::move(t));
            } else if (const auto* cl = spec->get_if<Clayton2D>()) {
                ClaytonTerm t;
                t.weight = weight;
                t.theta = cl->theta;
                for (double v : corner_values[0]) t.f1.push_back(std::pow(v, cl->alphas[0]));
                for (double v : corner_values[1]) t.f2.push_back(std::pow(v, cl->alphas[1]));
                claytons_.push_back(std::move(t));
            } else {
                fallbacks_.push_back({weight, spec});
            }
        }
        scratch_.resize(corner_values.size());
    }

    double eval(const int* idx) {
        double s = 0.0;
        for (const auto& t : products_) {
            double f = t.weight;
            for (std::size_t j = 0; j < t.factors.size(); ++j) f *= t.factors[j][idx[j]];
            s += f;
        }
        for (const auto& t : claytons_)
            s += t.weight * detail::clayton_copula(t.f1[idx[0]], t.f2[idx[1]], t.theta);
        if (!fallbacks_.empty()) {
            for (std::size_t j = 0; j < scratch_.size(); ++j)
                scratch_[j] = corner_values_[j][idx[j]];
            Closure closed = Closure::all_closed(static_cast<int>(scratch_.size()));
            for (const auto& [weight, spec] : fallbacks_)
                s += weight * box_measure(*spec, scratch_, closed);
        }
        return s;
    }

    bool trivial() const { return products_.empty() && claytons_.empty() && fallbacks_.empty(); }

private:
    struct ProductTerm {
        double weight;
        std::vector<std::vector<double>> factors;
    };
    struct ClaytonTerm {
        double weight, theta;
        std::vector<double> f1, f2;
    };

    const std::vector<std::vector<double>>& corner_values_;
    std::vector<ProductTerm> products_;
    std::vector<ClaytonTerm> claytons_;
    std::vector<std::pair<double, const MeasureSpec*>> fallbacks_;
    std::vector<double> scratch_;
};

struct SweepOut {
    double max_val = -std::numeric_limits<double>::infinity();
    std::vector<int> max_idx;
    double min_val = std::numeric_limits<double>::infinity();
    std::vector<int> min_idx;
};

// Scans every corner of the index grid in lexicographic order tracking
// extrema of f(t) = sum of included item weights - cont(t). An item is
// included at corner idx iff idx[j] >= entry[j][item] on every axis, which
// covers closed and strict box semantics through the precomputed entry
// indices. First achiever wins ties, so reported corners are lexicographically
// smallest.
SweepOut corner_sweep(const std::vector<int>& axis_len,
                      const std::vector<std::vector<int>>& entry,
                      const std::vector<double>& weights, ContEval& cont, bool track_max,
                      bool track_min) {
    const int d = static_cast<int>(axis_len.size());
    const std::size_t n_items = weights.size();
    SweepOut out;
    std::vector<int> idx(d, 0);

    auto consider = [&](double v) {
        if (track_max && v > out.max_val) {
            out.max_val = v;
            out.max_idx = idx;
        }
        if (track_min && v < out.min_val) {
            out.min_val = v;
            out.min_idx = idx;
        }
    };

    const bool no_measure = cont.trivial();

    if (d == 1) {
        std::vector<double> buckets(axis_len[0], 0.0);
        for (std::size_t i = 0; i < n_items; ++i)
            if (entry[0][i] < axis_len[0]) buckets[entry[0][i]] += weights[i];
        double run = 0.0;
        for (idx[0] = 0; idx[0] < axis_len[0]; ++idx[0]) {
            run += buckets[idx[0]];
            consider(no_measure ? run : run - cont.eval(idx.data()));
        }
        return out;
    }

    const int axis_a = d - 2, axis_b = d - 1;
    // Items ordered by their entry index on the second-to-last axis; the
    // inner loops then include items incrementally.
    std::vector<std::size_t> by_entry_a(n_items);
    std::iota(by_entry_a.begin(), by_entry_a.end(), std::size_t{0});
    std::stable_sort(by_entry_a.begin(), by_entry_a.end(),
                     [&](std::size_t a, std::size_t b) {
                         return entry[axis_a][a] < entry[axis_a][b];
                     });

    std::vector<std::size_t> active;
    active.reserve(n_items);
    std::vector<double> buckets(axis_len[axis_b], 0.0);

    while (true) {
        // Filter to items inside the current prefix corner (axes 0..d-3).
        active.clear();
        for (std::size_t i : by_entry_a) {
            bool in = true;
            for (int j = 0; j < d - 2 && in; ++j) in = idx[j] >= entry[j][i];
            if (in && entry[axis_a][i] < axis_len[axis_a] && entry[axis_b][i] < axis_len[axis_b])
                active.push_back(i);
        }

        std::fill(buckets.begin(), buckets.end(), 0.0);
        std::size_t ptr = 0;
        for (idx[axis_a] = 0; idx[axis_a] < axis_len[axis_a]; ++idx[axis_a]) {
            while (ptr < active.size() && entry[axis_a][active[ptr]] <= idx[axis_a]) {
                std::size_t it = active[ptr++];
                buckets[entry[axis_b][it]] += weights[it];
            }
            double run = 0.0;
            if (no_measure) {
                for (idx[axis_b] = 0; idx[axis_b] < axis_len[axis_b]; ++idx[axis_b]) {
                    run += buckets[idx[axis_b]];
                    consider(run);
                }
            } else {
                for (idx[axis_b] = 0; idx[axis_b] < axis_len[axis_b]; ++idx[axis_b]) {
                    run += buckets[idx[axis_b]];
                    consider(run - cont.eval(idx.data()));
                }
            }
        }
        idx[axis_a] = 0;
        idx[axis_b] = 0;

        // Advance the prefix odometer.
        int j = d - 3;
        for (; j >= 0; --j) {
            if (++idx[j] < axis_len[j]) break;
            idx[j] = 0;
        }
        if (j < 0) break;
    }
    return out;
}

std::vector<std::vector<int>> compute_entries(const PointSet& pts,
                                              const std::vector<std::vector<double>>& positions,
                                              const std::vector<std::vector<double>>& grids,
                                              bool strict) {
    const int d = static_cast<int>(grids.size());
    const std::size_t n = pts.size() + positions.size();
    std::vector<std::vector<int>> entry(d, std::vector<int>(n));
    for (int j = 0; j < d; ++j) {
        const auto& g = grids[j];
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double x = pts.at(i, j);
            auto it = strict ? std::upper_bound(g.begin(), g.end(), x)
                             : std::lower_bound(g.begin(), g.end(), x);
            entry[j][i] = static_cast<int>(it - g.begin());
        }
        for (std::size_t i = 0; i < positions.size(); ++i) {
            double x = positions[i][j];
            auto it = strict ? std::upper_bound(g.begin(), g.end(), x)
                             : std::lower_bound(g.begin(), g.end(), x);
            entry[j][pts.size() + i] = static_cast<int>(it - g.begin());
        }
    }
    return entry;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

CriticalGrid critical_grid(const PointSet& p, const MeasureSpec& m) {
    if (p.d != m.dimension())
        throw DimensionError("critical_grid: point set and measure dimension mismatch");
    CriticalGrid g;
    g.axes.resize(p.d);
    for (int j = 0; j < p.d; ++j) {
        std::set<double> s;
        for (std::size_t i = 0; i < p.size(); ++i) s.insert(p.at(i, j));
        for (double a : atoms(m, j)) s.insert(a);
        s.insert(1.0);
        g.axes[j].assign(s.begin(), s.end());
    }
    return g;
}

std::pair<std::size_t, std::size_t> box_counts(const PointSet& p,
                                               std::span<const double> corner) {
    if (static_cast<int>(corner.size()) != p.d)
        throw DimensionError("box_counts: corner dimension mismatch");
    for (double t : corner)
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("box_counts: corner outside [0,1]^d");
    std::size_t closed = 0, open = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        bool in_closed = true, in_open = true;
        for (int j = 0; j < p.d; ++j) {
            double x = p.at(i, j);
            in_closed = in_closed && x <= corner[j];
            in_open = in_open && x < corner[j];
        }
        closed += in_closed;
        open += in_open;
    }
    return {closed, open};
}

std::pair<std::size_t, std::size_t> box_counts(const PointSet& p,
                                               std::initializer_list<double> corner) {
    return box_counts(p, std::span<const double>(corner.begin(), corner.size()));
}

DiscrepancyReport star_discrepancy(const PointSet& p, const MeasureSpec& m) {
    if (p.empty()) throw EmptyInputError("star_discrepancy: empty point set");
    CriticalGrid grid = critical_grid(p, m);

    long double product = 1.0L;
    for (const auto& axis : grid.axes) product *= static_cast<long double>(axis.size());
    if (product > kGridBudget)
        throw BudgetError("star_discrepancy: corner grid of " + std::to_string((double)product) +
                          " exceeds budget 1e8");

    const int d = p.d;
    const double n = static_cast<double>(p.size());
    MeasureDecomposition decomp = decompose(m);

    // Items: points carry +1/N, atoms carry -mass, so the swept value is the
    // signed gap (empirical - mu) with the continuous part subtracted per
    // corner.
    std::vector<double> weights(p.size() + decomp.atom_masses.size());
    std::fill(weights.begin(), weights.begin() + p.size(), 1.0 / n);
    for (std::size_t i = 0; i < decomp.atom_masses.size(); ++i)
        weights[p.size() + i] = -decomp.atom_masses[i];

    // Over side: all-closed boxes at grid corners realize the supremum of
    // (empirical - mu).
    std::vector<int> axis_len(d);
    for (int j = 0; j < d; ++j) axis_len[j] = static_cast<int>(grid.axes[j].size());
    auto closed_entry = compute_entries(p, decomp.atom_positions, grid.axes, /*strict=*/false);
    ContEval closed_cont(decomp, grid.axes);
    SweepOut over = corner_sweep(axis_len, closed_entry, weights, closed_cont, true, false);

    // Under side: boxes open at every corner coordinate plus the closed
    // full-extent [0,1] candidate per axis realize the supremum of
    // (mu - empirical), including half-open boxes touching coordinate 1.
    std::vector<std::vector<double>> under_values = grid.axes;
    for (auto& axis : under_values) axis.push_back(1.0);
    std::vector<int> under_len(d);
    for (int j = 0; j < d; ++j) under_len[j] = static_cast<int>(under_values[j].size());
    auto strict_entry = compute_entries(p, decomp.atom_positions, grid.axes, /*strict=*/true);
    ContEval strict_cont(decomp, under_values);
    SweepOut under = corner_sweep(under_len, strict_entry, weights, strict_cont, false, true);

    double over_val = over.max_val;
    std::vector<double> over_corner(d);
    for (int j = 0; j < d; ++j) over_corner[j] = grid.axes[j][over.max_idx[j]];

    double under_val = -under.min_val;
    std::vector<double> under_corner(d);
    for (int j = 0; j < d; ++j) under_corner[j] = under_values[j][under.min_idx[j]];

    DiscrepancyReport rep;
    bool pick_over;
    if (over_val != under_val) {
        pick_over = over_val > under_val;
    } else {
        // Equal values: lexicographically smallest witness corner, then over.
        pick_over = !lex_less(under_corner, over_corner);
    }
    rep.value = std::max({over_val, under_val, 0.0});
    rep.witness_side = pick_over ? WitnessSide::over : WitnessSide::under;
    rep.witness_corner = pick_over ? over_corner : under_corner;

    auto [cc, oc] = box_counts(p, rep.witness_corner);
    rep.closed_count = cc;
    rep.open_count = oc;
    rep.mu_closed = box_measure(m, rep.witness_corner, Closure::all_closed(d));
    rep.mu_open = box_measure(m, rep.witness_corner, Closure::all_open(d));
    return rep;
}

double star_discrepancy_lower_bound(const PointSet& p, const MeasureSpec& m, std::size_t trials,
                                    std::uint64_t seed) {
    if (trials < 1) throw DomainError("star_discrepancy_lower_bound: trials must be >= 1");
    if (p.empty()) throw EmptyInputError("star_discrepancy_lower_bound: empty point set");
    if (p.d != m.dimension())
        throw DimensionError("star_discrepancy_lower_bound: dimension mismatch");

    const int d = p.d;
    const double n = static_cast<double>(p.size());
    Closure closed = Closure::all_closed(d), open = Closure::all_open(d);
    Rng rng(seed);
    std::vector<double> corner(d, 1.0);

    double best = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        if (t > 0)
            for (int j = 0; j < d; ++j) corner[j] = uniform01(rng);
        auto [cc, oc] = box_counts(p, corner);
        double mu_c = box_measure(m, corner, closed);
        double mu_o = box_measure(m, corner, open);
        // Consistent closed/open pairs: each is |empirical - mu| of an actual
        // box, so the result is a valid lower bound even at atoms.
        best = std::max({best, std::abs(cc / n - mu_c), std::abs(oc / n - mu_o)});
    }
    return best;
}

double geometric_disc(const PointSet& p, const MeasureSpec& m) {
    return static_cast<double>(p.size()) * star_discrepancy(p, m).value;
}

CombinatorialDisc combinatorial_disc(const PointSet& p, const Coloring& y) {
    check_alignment(p, y);
    if (p.empty()) throw EmptyInputError("combinatorial_disc: empty point set");

    const int d = p.d;
    std::vector<std::vector<double>> grid(d);
    for (int j = 0; j < d; ++j) {
        std::set<double> s;
        for (std::size_t i = 0; i < p.size(); ++i) s.insert(p.at(i, j));
        s.insert(1.0);
        grid[j].assign(s.begin(), s.end());
    }
    long double product = 1.0L;
    for (const auto& axis : grid) product *= static_cast<long double>(axis.size());
    if (product > kGridBudget)
        throw BudgetError("combinatorial_disc: corner grid exceeds budget 1e8");

    std::vector<double> weights(y.signs.begin(), y.signs.end());
    std::vector<int> axis_len(d);
    for (int j = 0; j < d; ++j) axis_len[j] = static_cast<int>(grid[j].size());

    MeasureDecomposition none; // no measure term
    std::vector<std::vector<double>> no_positions;

    ContEval zero_closed(none, grid);
    auto closed_entry = compute_entries(p, no_positions, grid, false);
    SweepOut closed = corner_sweep(axis_len, closed_entry, weights, zero_closed, true, true);

    ContEval zero_strict(none, grid);
    auto strict_entry = compute_entries(p, no_positions, grid, true);
    SweepOut strict = corner_sweep(axis_len, strict_entry, weights, zero_strict, true, true);

    struct Candidate {
        double mag;
        const std::vector<int>* idx;
    };
    Candidate cands[] = {{closed.max_val, &closed.max_idx},
                         {-closed.min_val, &closed.min_idx},
                         {strict.max_val, &strict.max_idx},
                         {-strict.min_val, &strict.min_idx}};

    double best_mag = -1.0;
    std::vector<double> best_corner;
    for (const auto& c : cands) {
        if (c.idx->empty()) continue;
        std::vector<double> corner(d);
        for (int j = 0; j < d; ++j) corner[j] = grid[j][(*c.idx)[j]];
        if (c.mag > best_mag || (c.mag == best_mag && lex_less(corner, best_corner))) {
            best_mag = c.mag;
            best_corner = std::move(corner);
        }
    }

    CombinatorialDisc out;
    out.value = std::llround(std::max(best_mag, 0.0));
    out.witness_corner = std::move(best_corner);
    return out;
}

std::string to_string(WitnessSide side) { return side == WitnessSide::over ? "over" : "under"; }

} // namespace muqmc
