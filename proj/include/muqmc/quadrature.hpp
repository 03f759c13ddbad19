#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "muqmc/measure.hpp"
#include "muqmc/point_set.hpp"

namespace muqmc {

// Monotone univariate factors of a product-form test integrand.
struct PowerFactor {
    double p = 1.0; // g(x) = x^p, p >= 0
};
struct AffineFactor {
    double a = 0.0, b = 1.0; // g(x) = a + b x
};
struct ExpFactor {
    double c = 1.0; // g(x) = exp(c x)
};

using FactorVariant = std::variant<PowerFactor, AffineFactor, ExpFactor>;

// f(x) = prod_j g_j(x_j), every factor monotone on [0,1].
struct TestFunction {
    std::vector<FactorVariant> factors;

    int dimension() const { return static_cast<int>(factors.size()); }
    double operator()(std::span<const double> x) const;
};

// Arithmetic mean of f over the points.
double qmc_estimate(const PointSet& p, const TestFunction& f);

// Hardy-Krause variation anchored at 1 (exact for products of monotone
// factors): sum over nonempty axis subsets u of
// prod_{j in u} |g_j(1)-g_j(0)| * prod_{j not in u} |g_j(1)|.
double hk_variation(const TestFunction& f);

// Exact integral of f against mu for the analytic pair table; pairs outside
// the table (e.g. Clayton2D) throw UnsupportedError.
double true_integral(const MeasureSpec& m, const TestFunction& f);
bool true_integral_supported(const MeasureSpec& m, const TestFunction& f);

struct KhCheck {
    double estimate = 0.0;
    double true_value = 0.0;
    double error = 0.0;
    double dstar = 0.0;
    double variation = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

// |integral - qmc_estimate| against the bound D* x Var f.
KhCheck kh_check(const PointSet& p, const MeasureSpec& m, const TestFunction& f);

struct McBaseline {
    double rmse = 0.0;
    double mean_abs_error = 0.0;
    double reference = 0.0;
};

// Monte Carlo error over `reps` independent seeded n-point samples, measured
// against true_integral (or an explicit reference when the pair has none).
McBaseline mc_baseline(const MeasureSpec& m, const TestFunction& f, std::size_t n,
                       std::size_t reps, std::uint64_t seed);
McBaseline mc_baseline(const MeasureSpec& m, const TestFunction& f, std::size_t n,
                       std::size_t reps, std::uint64_t seed, double reference);

std::string function_id(const TestFunction& f);

} // namespace muqmc
