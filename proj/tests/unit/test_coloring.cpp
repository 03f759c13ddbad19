#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "muqmc/coloring.hpp"
#include "muqmc/discrepancy.hpp"
#include "muqmc/rng.hpp"

using namespace muqmc;

namespace {

PointSet random_points(int d, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointSet p(d);
    for (std::size_t i = 0; i < n * static_cast<std::size_t>(d); ++i)
        p.coords.push_back(uniform01(rng));
    return p;
}

// Max absolute canonical-box imbalance of the system under a coloring.
long long max_box_imbalance(const DyadicConstraintSystem& sys, const Coloring& y) {
    std::vector<long long> count(sys.boxes.size(), 0);
    for (std::size_t i = 0; i < sys.n_points; ++i)
        for (std::size_t b : sys.incidence[i]) count[b] += y.signs[i];
    long long best = 0;
    for (long long c : count) best = std::max(best, std::llabs(c));
    return best;
}

bool point_in_dyadic_box(std::span<const double> x, const DyadicBox& box) {
    for (std::size_t j = 0; j < box.levels.size(); ++j) {
        double lo = static_cast<double>(box.cells[j]) / std::pow(2.0, box.levels[j]);
        double hi = static_cast<double>(box.cells[j] + 1) / std::pow(2.0, box.levels[j]);
        if (!(x[j] >= lo && x[j] < hi)) return false;
    }
    return true;
}

} // namespace

TEST_CASE("order_points") {
    auto p = make_point_set(1, {{0.9}, {0.1}, {0.5}});
    CHECK(order_points(p, {OrderSpec::Kind::axis, 0}) == std::vector<std::size_t>{1, 2, 0});

    auto dup = make_point_set(1, {{0.5}, {0.5}, {0.2}});
    CHECK(order_points(dup, {OrderSpec::Kind::axis, 0}) == std::vector<std::size_t>{2, 0, 1});

    auto p2 = make_point_set(2, {{0.2, 0.9}, {0.2, 0.1}});
    CHECK(order_points(p2, {OrderSpec::Kind::lex, 0}) == std::vector<std::size_t>{1, 0});

    CHECK_THROWS_AS(order_points(p2, {OrderSpec::Kind::axis, 2}), DimensionError);
    auto p4 = random_points(4, 4, 1);
    CHECK_THROWS_AS(order_points(p4, {OrderSpec::Kind::hilbert, 0}), UnsupportedError);

    // Hilbert order is a deterministic permutation for d <= 3.
    for (int d : {1, 2, 3}) {
        auto pts = random_points(d, 50, 33 + d);
        auto perm = order_points(pts, {OrderSpec::Kind::hilbert, 0});
        auto perm2 = order_points(pts, {OrderSpec::Kind::hilbert, 0});
        CHECK(perm == perm2);
        std::set<std::size_t> seen(perm.begin(), perm.end());
        CHECK(seen.size() == pts.size());
    }
}

TEST_CASE("alternating coloring keeps every 1D interval imbalance at most 1") {
    OrderSpec axis0{OrderSpec::Kind::axis, 0};
    Rng rng(4711);
    for (int rep = 0; rep < 30; ++rep) {
        std::size_t n = 1 + rng() % 200;
        auto p = random_points(1, n, rng());
        auto y = color_alternating(p, axis0);
        CHECK(combinatorial_disc(p, y).value <= 1);
        CHECK(std::llabs(y.total()) <= 1);
    }
    // Adversarial: many coincident points.
    PointSet coincident(1);
    for (int i = 0; i < 64; ++i) coincident.push_back({0.5});
    CHECK(combinatorial_disc(coincident, color_alternating(coincident, axis0)).value <= 1);

    auto pair = make_point_set(1, {{0.3}, {0.3}});
    auto y = color_alternating(pair, axis0);
    CHECK(y.signs == std::vector<int>{1, -1});
    CHECK(combinatorial_disc(pair, y).value == 0);
}

TEST_CASE("dyadic constraint system") {
    auto p = make_point_set(1, {{0.25}, {0.75}});
    auto sys = build_dyadic_system(p, 1);
    // Level 0 box [0,1) and the two level-1 cells.
    REQUIRE(sys.boxes.size() == 3);
    CHECK(sys.incidence[0].size() == 2); // (L+1)^d canonical boxes per point
    CHECK(sys.incidence[1].size() == 2);

    // A point at exactly 1.0 clamps into the last cell.
    auto edge = make_point_set(1, {{1.0}});
    auto sys_edge = build_dyadic_system(edge, 1);
    bool found = false;
    for (const auto& box : sys_edge.boxes)
        if (box.levels[0] == 1 && box.cells[0] == 1) found = true;
    CHECK(found);

    CHECK_THROWS_AS(build_dyadic_system(p, 21), BudgetError);
    CHECK_THROWS_AS(build_dyadic_system(p, 0), DomainError);
}

TEST_CASE("anchored dyadic decomposition") {
    // [0, 0.75) = [0, 0.5) + [0.5, 0.75).
    double corner1[] = {0.75};
    auto boxes = decompose_anchored_dyadic({corner1, 1}, 2);
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0].levels[0] == 1);
    CHECK(boxes[0].cells[0] == 0);
    CHECK(boxes[1].levels[0] == 2);
    CHECK(boxes[1].cells[0] == 2);

    // Disjoint cover with at most L per axis, checked by membership sampling.
    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        int L = 1 + static_cast<int>(rng() % 4);
        int d = 1 + static_cast<int>(rng() % 2);
        std::vector<double> corner(d);
        for (int j = 0; j < d; ++j)
            corner[j] = static_cast<double>(rng() % ((1u << L) + 1)) / (1 << L);
        auto parts = decompose_anchored_dyadic(corner, L);
        CHECK(parts.size() <= static_cast<std::size_t>(std::pow(L, d)) + 1e-9);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> x(d);
            for (int j = 0; j < d; ++j) x[j] = uniform01(rng);
            bool in_box = true;
            for (int j = 0; j < d; ++j) in_box = in_box && x[j] < corner[j];
            int members = 0;
            for (const auto& b : parts) members += point_in_dyadic_box(x, b);
            CHECK(members == (in_box ? 1 : 0));
        }
    }
}

TEST_CASE("greedy potential coloring") {
    // Two points in the same cells at every level: the second choice cancels.
    auto p = make_point_set(1, {{0.1}, {0.12}});
    auto sys = build_dyadic_system(p, 2);
    auto y = greedy_potential_color(sys, 0.5);
    CHECK(y.signs[0] == 1); // tie at the start resolves to +1
    CHECK(y.signs[1] == -1);
    CHECK(max_box_imbalance(sys, y) == 0);

    auto lone = make_point_set(1, {{0.4}});
    CHECK(greedy_potential_color(build_dyadic_system(lone, 1), 0.5).signs[0] == 1);

    CHECK_THROWS_AS(greedy_potential_color(sys, 0.0), DomainError);

    // Large rate drives the cosh arguments past the overflow guard.
    PointSet many(1);
    for (int i = 0; i < 400; ++i) many.push_back({0.3});
    auto big = build_dyadic_system(many, 1);
    auto yy = greedy_potential_color(big, 5.0);
    CHECK(std::llabs(yy.total()) <= 1);
    auto yy2 = greedy_potential_color(big, 5.0);
    CHECK(yy.signs == yy2.signs);
}

TEST_CASE("local search refines without breaking balance") {
    auto p = random_points(2, 32, 271828);
    ColoringStrategy balanced{BalancedRandom{5}};
    Coloring init = color(p, balanced);
    long long init_disc = combinatorial_disc(p, init).value;

    Coloring out = local_search(p, init, 5000, 31337);
    long long out_disc = combinatorial_disc(p, out).value;
    CHECK(out_disc <= init_disc);
    CHECK(out.total() == init.total());

    // budget 0 returns the input unchanged
    CHECK(local_search(p, init, 0, 1).signs == init.signs);

    // an already-optimal 1D alternating coloring survives
    auto line = random_points(1, 16, 5);
    Coloring alt = color_alternating(line, {OrderSpec::Kind::axis, 0});
    CHECK(local_search(line, alt, 2000, 9).signs == alt.signs);
}

TEST_CASE("color() keeps every strategy balanced") {
    std::vector<ColoringStrategy> strategies;
    strategies.push_back(ColoringStrategy{AlternatingOrder{{OrderSpec::Kind::axis, 0}}});
    strategies.push_back(ColoringStrategy{AlternatingOrder{{OrderSpec::Kind::hilbert, 0}}});
    strategies.push_back(ColoringStrategy{BalancedRandom{3}});
    strategies.push_back(ColoringStrategy{DyadicPotential{3, 0.0, {OrderSpec::Kind::axis, 0}}});
    strategies.push_back(ColoringStrategy{LocalSearch{
        std::make_shared<const ColoringStrategy>(ColoringStrategy{BalancedRandom{3}}), 200, 17}});

    std::uint64_t seed = 8;
    for (const auto& s : strategies) {
        CAPTURE(strategy_id(s));
        for (std::size_t n : {1, 2, 3, 17, 64}) {
            auto p = random_points(2, n, seed++);
            Coloring y = color(p, s);
            REQUIRE(y.size() == n);
            CHECK(std::llabs(y.total()) <= 1);
            if (n % 2 == 0) {
                if (std::holds_alternative<AlternatingOrder>(s.variant()) ||
                    std::holds_alternative<BalancedRandom>(s.variant()))
                    CHECK(y.total() == 0);
            }
        }
    }

    // BalancedRandom splits 2k points exactly k/k.
    auto p = random_points(1, 40, 123);
    Coloring y = color(p, ColoringStrategy{BalancedRandom{77}});
    CHECK(std::count(y.signs.begin(), y.signs.end(), 1) == 20);

    PointSet empty(1);
    CHECK_THROWS_AS(color(empty, strategies[0]), EmptyInputError);
}

TEST_CASE("anchored disc at dyadic corners is bounded by L^d x box imbalance") {
    Rng rng(616);
    for (int rep = 0; rep < 6; ++rep) {
        int L = 2 + static_cast<int>(rng() % 3);
        auto p = random_points(2, 24, rng());
        auto sys = build_dyadic_system(p, L);
        Coloring y;
        for (std::size_t i = 0; i < p.size(); ++i) y.signs.push_back(rng() % 2 ? 1 : -1);
        long long beta = max_box_imbalance(sys, y);

        // Direct enumeration over all level-L dyadic corners of [0, t).
        const int side = 1 << L;
        long long worst = 0;
        for (int a = 0; a <= side; ++a) {
            for (int b = 0; b <= side; ++b) {
                double t0 = static_cast<double>(a) / side, t1 = static_cast<double>(b) / side;
                long long sum = 0;
                for (std::size_t i = 0; i < p.size(); ++i)
                    if (p.at(i, 0) < t0 && p.at(i, 1) < t1) sum += y.signs[i];
                worst = std::max(worst, std::llabs(sum));
            }
        }
        CHECK(worst <= static_cast<long long>(L) * L * beta);
    }
}

TEST_CASE("seeded golden colorings") {
    // Hilbert-ordered alternating never loses to balanced random on this
    // fixed instance (values pinned from the seeded run).
    PointSet p = random_points(2, 64, 2025);
    auto yh = color(p, ColoringStrategy{AlternatingOrder{{OrderSpec::Kind::hilbert, 0}}});
    auto yb = color(p, ColoringStrategy{BalancedRandom{2025}});
    long long dh = combinatorial_disc(p, yh).value;
    long long db = combinatorial_disc(p, yb).value;
    CHECK(dh <= db);
    CHECK(dh == 6);
    CHECK(db == 6);

    // Greedy potential on 8 equispaced points recovers the alternating
    // pattern: disc 1, well under the dyadic budget of 3.
    PointSet eq(1);
    for (int i = 0; i < 8; ++i) eq.push_back({(2.0 * i + 1.0) / 16.0});
    auto y = greedy_potential_color(build_dyadic_system(eq, 3), 0.5);
    long long dg = combinatorial_disc(eq, y).value;
    CHECK(dg <= 3);
    CHECK(dg == 1);

    // Local search strictly improves this seeded instance.
    PointSet q = random_points(2, 32, 32);
    Coloring init = color(q, ColoringStrategy{BalancedRandom{5}});
    Coloring out = local_search(q, init, 5000, 31337);
    long long d0 = combinatorial_disc(q, init).value;
    long long d1 = combinatorial_disc(q, out).value;
    CHECK(d0 == 6);
    CHECK(d1 == 4);
    CHECK(d1 < d0);
}

TEST_CASE("streamed flip evaluation matches per-candidate recomputation") {
    Rng rng(909);
    for (int d : {1, 2}) {
        for (int rep = 0; rep < 8; ++rep) {
            std::size_t n = 4 + rng() % 24;
            auto p = random_points(d, n, rng());
            Coloring y;
            for (std::size_t i = 0; i < n; ++i) y.signs.push_back(rng() % 3 ? 1 : -1);
            for (int flip : {1, -1}) {
                auto fast = disc_after_flip_all(p, y, flip);
                for (std::size_t i = 0; i < n; ++i) {
                    if (y.signs[i] != flip) {
                        CHECK(fast[i] == std::numeric_limits<long long>::max());
                        continue;
                    }
                    Coloring mut = y;
                    mut.signs[i] = -flip;
                    CAPTURE(d);
                    CAPTURE(i);
                    CHECK(fast[i] == combinatorial_disc(p, mut).value);
                }
            }
        }
    }
}

TEST_CASE("dyadic rebalance restores balance with least exact-disc damage") {
    // Force a heavily unbalanced start through the dispatcher path by using a
    // point set where the greedy ends unbalanced.
    MeasureSpec u2{Uniform{2}};
    PointSet p = sample(u2, 1024, 11);
    Coloring y = color(p, ColoringStrategy{DyadicPotential{4, 0.0, {OrderSpec::Kind::axis, 0}}});
    CHECK(std::llabs(y.total()) <= 1);
}

TEST_CASE("strategy ids parse back to themselves") {
    std::vector<std::string> ids = {
        "alternating(order=axis0)",
        "alternating(order=hilbert)",
        "balanced(seed=42)",
        "dyadic(L=4,lambda=auto,order=axis0)",
        "dyadic(L=3,lambda=0.5,order=lex)",
        "local(init=dyadic(L=4,lambda=auto,order=axis0),budget=500,seed=7)",
    };
    for (const auto& id : ids) {
        CAPTURE(id);
        CHECK(strategy_id(parse_strategy(id)) == id);
    }
    // Shorthand defaults.
    CHECK(strategy_id(parse_strategy("alternating")) == "alternating(order=axis0)");
    CHECK(strategy_id(parse_strategy("balanced")) == "balanced(seed=0)");
    CHECK(strategy_id(parse_strategy("local")) ==
          "local(init=balanced(seed=0),budget=1000,seed=0)");

    CHECK_THROWS_AS(parse_strategy("frobnicate"), ParseError);
    CHECK_THROWS_AS(parse_strategy("alternating(order=spiral)"), ParseError);
    CHECK_THROWS_AS(parse_strategy("local(init=local(init=balanced))"), DomainError);
    CHECK_THROWS_AS(parse_strategy("dyadic(L=99)"), BudgetError);
}
