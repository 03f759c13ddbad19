#include <doctest.h>

#include <filesystem>

#include "muqmc/io.hpp"
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

} // namespace

TEST_CASE("points CSV round-trips bit-identically") {
    auto p = random_points(3, 100, 8675309);
    PointSet back = points_from_csv(points_to_csv(p));
    CHECK(back.d == p.d);
    REQUIRE(back.coords.size() == p.coords.size());
    CHECK(back.coords == p.coords); // exact doubles via 17 significant digits

    // Round-trip through the string again stays identical.
    CHECK(points_to_csv(back) == points_to_csv(p));
}

TEST_CASE("points CSV errors carry row positions") {
    CHECK_THROWS_WITH_AS(points_from_csv("0.5,0.5\n0.1,0.2,0.3\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH_AS(points_from_csv("0.5,oops\n"), doctest::Contains("column 2"),
                         ParseError);
    CHECK_THROWS_AS(points_from_csv("1.5\n"), ParseError);
    CHECK_THROWS_AS(points_from_csv(""), ParseError);
    // header flag skips the first row
    PointSet h = points_from_csv("x,y\n0.5,0.5\n", /*header=*/true);
    CHECK(h.size() == 1);
}

TEST_CASE("coloring CSV") {
    Coloring y{{1, -1, 1}};
    CHECK(coloring_from_csv(coloring_to_csv(y)).signs == y.signs);
    CHECK_THROWS_AS(coloring_from_csv("1\n0\n"), ParseError);
}

TEST_CASE("measure JSON round-trips and validates") {
    std::vector<MeasureSpec> roster{
        MeasureSpec{Uniform{2}},
        MeasureSpec{ProductPower{{2.0, 0.5}}},
        MeasureSpec{PiecewiseConstantDyadic{1, 2, {0.1, 0.2, 0.3, 0.4}}},
        MeasureSpec{Discrete{2, {{0.25, 0.5}, {0.75, 0.25}}, {0.5, 0.5}}},
        MeasureSpec{Clayton2D{2.0, {1.0, 2.0}}},
        MeasureSpec{Mixture{{0.5, 0.5},
                            {MeasureSpec{Uniform{1}}, MeasureSpec{Discrete{1, {{0.7}}, {1.0}}}}}},
    };
    for (const auto& m : roster) {
        MeasureSpec back = measure_from_json(measure_to_json(m));
        CHECK(variant_name(back) == variant_name(m));
        CHECK(back.dimension() == m.dimension());
        CHECK(measure_to_json(back) == measure_to_json(m));
    }

    CHECK_THROWS_WITH_AS(measure_from_json(R"({"type":"nope","d":1})"),
                         doctest::Contains("unknown type 'nope'"), ParseError);
    CHECK_THROWS_AS(measure_from_json("{"), ParseError);
    CHECK_THROWS_AS(measure_from_json(R"({"d":1})"), ParseError);
    CHECK_THROWS_AS(measure_from_json(R"({"type":"uniform"})"), ParseError);
}

TEST_CASE("function JSON") {
    TestFunction f{{PowerFactor{2.0}, AffineFactor{1.0, -0.5}, ExpFactor{0.3}}};
    TestFunction back = function_from_json(function_to_json(f));
    CHECK(back.dimension() == 3);
    double x[] = {0.3, 0.7, 0.9};
    CHECK(back({x, 3}) == doctest::Approx(f({x, 3})).epsilon(1e-15));
    CHECK_THROWS_AS(function_from_json(R"({"factors":[{"type":"sin","c":1}]})"), ParseError);
    CHECK_THROWS_AS(function_from_json(R"({"factors":[]})"), ParseError);
}

TEST_CASE("file save/load round-trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "muqmc_io_test";
    fs::create_directories(dir);

    auto p = random_points(2, 25, 42);
    save_points(dir / "p.csv", p);
    CHECK(load_points(dir / "p.csv").coords == p.coords);

    MeasureSpec m{ProductPower{{2.0, 3.0}}};
    save_measure(dir / "m.json", m);
    CHECK(measure_to_json(load_measure(dir / "m.json")) == measure_to_json(m));

    CHECK_THROWS_AS(load_points(dir / "missing.csv"), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("trace JSON carries the ledger") {
    MeasureSpec u1{Uniform{1}};
    GenerationConfig cfg;
    cfg.N = 8;
    cfg.k = 2;
    cfg.strategy = parse_strategy("alternating(order=axis0)");
    cfg.seed = 13;
    cfg.audit = true;
    auto [p, trace] = generate(u1, cfg);
    std::string json_text = trace_to_json(trace, cfg, u1);
    for (const char* key : {"\"config\"", "\"strategy\"", "\"seed\"", "\"D0\"", "\"Di\"",
                            "\"Dk\"", "\"ledger_bound\"", "\"steps\"", "\"delta\"",
                            "\"kept_indices\"", "\"measure\""}) {
        CAPTURE(key);
        CHECK(json_text.find(key) != std::string::npos);
    }
}
