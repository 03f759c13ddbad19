#include "muqmc/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "muqmc/discrepancy.hpp"
#include "muqmc/rng.hpp"

namespace muqmc {

namespace {

double factor_eval(const FactorVariant& g, double x) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PowerFactor>) return std::pow(x, f.p);
            if constexpr (std::is_same_v<T, AffineFactor>) return f.a + f.b * x;
            if constexpr (std::is_same_v<T, ExpFactor>) return std::exp(f.c * x);
        },
        g);
}

void validate_function(const TestFunction& f) {
    if (f.factors.empty()) throw UnsupportedError("test function needs >= 1 factor");
    for (const auto& g : f.factors) {
        std::visit(
            [](const auto& fac) {
                using T = std::decay_t<decltype(fac)>;
                if constexpr (std::is_same_v<T, PowerFactor>) {
                    if (!(fac.p >= 0.0) || !std::isfinite(fac.p))
                        throw UnsupportedError("power factor needs exponent >= 0");
                } else if constexpr (std::is_same_v<T, AffineFactor>) {
                    if (!std::isfinite(fac.a) || !std::isfinite(fac.b))
                        throw UnsupportedError("affine factor needs finite coefficients");
                } else if constexpr (std::is_same_v<T, ExpFactor>) {
                    if (!std::isfinite(fac.c))
                        throw UnsupportedError("exponential factor needs a finite rate");
                }
            },
            g);
    }
}

// Closed-form 1D integrals against the Lebesgue measure.
double factor_lebesgue_integral(const FactorVariant& g, double lo, double hi) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PowerFactor>) {
                return (std::pow(hi, f.p + 1.0) - std::pow(lo, f.p + 1.0)) / (f.p + 1.0);
            } else if constexpr (std::is_same_v<T, AffineFactor>) {
                return f.a * (hi - lo) + f.b * (hi * hi - lo * lo) / 2.0;
            } else { // ExpFactor
                if (f.c == 0.0) return hi - lo;
                return (std::exp(f.c * hi) - std::exp(f.c * lo)) / f.c;
            }
        },
        g);
}

std::optional<double> try_integral(const MeasureSpec& m, const TestFunction& f) {
    return std::visit(
        [&](const auto& spec) -> std::optional<double> {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                double v = 1.0;
                for (const auto& g : f.factors) v *= factor_lebesgue_integral(g, 0.0, 1.0);
                return v;
            } else if constexpr (std::is_same_v<T, ProductPower>) {
                double v = 1.0;
                for (std::size_t j = 0; j < f.factors.size(); ++j) {
                    const auto* pf = std::get_if<PowerFactor>(&f.factors[j]);
                    if (!pf) return std::nullopt;
                    v *= spec.alphas[j] / (spec.alphas[j] + pf->p);
                }
                return v;
            } else if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) {
                for (const auto& g : f.factors)
                    if (std::holds_alternative<ExpFactor>(g)) return std::nullopt;
                const int side = 1 << spec.level;
                double total = 0.0;
                for (std::size_t cell = 0; cell < spec.weights.size(); ++cell) {
                    if (spec.weights[cell] == 0.0) continue;
                    double v = spec.weights[cell];
                    for (int j = 0; j < spec.d; ++j) {
                        auto cj = (cell >> (spec.level * j)) & static_cast<std::size_t>(side - 1);
                        double lo = static_cast<double>(cj) / side;
                        double hi = static_cast<double>(cj + 1) / side;
                        v *= side * factor_lebesgue_integral(f.factors[j], lo, hi);
                    }
                    total += v;
                }
                return total;
            } else if constexpr (std::is_same_v<T, Discrete>) {
                double total = 0.0;
                for (std::size_t i = 0; i < spec.atoms.size(); ++i)
                    total += spec.weights[i] * f(spec.atoms[i]);
                return total;
            } else if constexpr (std::is_same_v<T, Clayton2D>) {
                return std::nullopt;
            } else { // Mixture
                double total = 0.0;
                for (std::size_t i = 0; i < spec.components.size(); ++i) {
                    auto v = try_integral(spec.components[i], f);
                    if (!v) return std::nullopt;
                    total += spec.weights[i] * *v;
                }
                return total;
            }
        },
        m.variant());
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

double TestFunction::operator()(std::span<const double> x) const {
    double v = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j) v *= factor_eval(factors[j], x[j]);
    return v;
}

double qmc_estimate(const PointSet& p, const TestFunction& f) {
    if (p.empty()) throw EmptyInputError("qmc_estimate: empty point set");
    if (p.d != f.dimension()) throw DimensionError("qmc_estimate: dimension mismatch");
    validate_function(f);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += f(p.point(i));
    return sum / static_cast<double>(p.size());
}

double hk_variation(const TestFunction& f) {
    validate_function(f);
    // Sum over nonempty subsets factorizes: prod(tv_j + |g_j(1)|) - prod|g_j(1)|.
    double with = 1.0, without = 1.0;
    for (const auto& g : f.factors) {
        double g0 = factor_eval(g, 0.0), g1 = factor_eval(g, 1.0);
        with *= std::abs(g1 - g0) + std::abs(g1);
        without *= std::abs(g1);
    }
    return with - without;
}

bool true_integral_supported(const MeasureSpec& m, const TestFunction& f) {
    if (m.dimension() != f.dimension()) return false;
    validate_function(f);
    return try_integral(m, f).has_value();
}

double true_integral(const MeasureSpec& m, const TestFunction& f) {
    if (m.dimension() != f.dimension()) throw DimensionError("true_integral: dimension mismatch");
    validate_function(f);
    auto v = try_integral(m, f);
    if (!v)
        throw UnsupportedError("true_integral: no closed form for (" + variant_name(m) + ", " +
                               function_id(f) + ")");
    return *v;
}

KhCheck kh_check(const PointSet& p, const MeasureSpec& m, const TestFunction& f) {
    KhCheck out;
    out.true_value = true_integral(m, f);
    out.estimate = qmc_estimate(p, f);
    out.error = std::abs(out.true_value - out.estimate);
    out.dstar = star_discrepancy(p, m).value;
    out.variation = hk_variation(f);
    out.bound = out.dstar * out.variation;
    out.satisfied = out.error <= out.bound + 1e-12;
    return out;
}

McBaseline mc_baseline(const MeasureSpec& m, const TestFunction& f, std::size_t n,
                       std::size_t reps, std::uint64_t seed, double reference) {
    if (reps < 1) throw DomainError("mc_baseline: reps must be >= 1");
    if (n < 1) throw DomainError("mc_baseline: n must be >= 1");
    validate_function(f);
    double sq = 0.0, abs_sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        PointSet s = sample(m, n, seed_mix(seed, r));
        double err = qmc_estimate(s, f) - reference;
        sq += err * err;
        abs_sum += std::abs(err);
    }
    McBaseline out;
    out.reference = reference;
    out.rmse = std::sqrt(sq / static_cast<double>(reps));
    out.mean_abs_error = abs_sum / static_cast<double>(reps);
    return out;
}

McBaseline mc_baseline(const MeasureSpec& m, const TestFunction& f, std::size_t n,
                       std::size_t reps, std::uint64_t seed) {
    return mc_baseline(m, f, n, reps, seed, true_integral(m, f));
}

std::string function_id(const TestFunction& f) {
    std::string out;
    for (std::size_t j = 0; j < f.factors.size(); ++j) {
        if (j > 0) out += "*";
        std::string xj = "x" + std::to_string(j);
        out += std::visit(
            [&](const auto& fac) -> std::string {
                using T = std::decay_t<decltype(fac)>;
                if constexpr (std::is_same_v<T, PowerFactor>) return xj + "^" + format_g(fac.p);
                if constexpr (std::is_same_v<T, AffineFactor>)
                    return "(" + format_g(fac.a) + "+" + format_g(fac.b) + "*" + xj + ")";
                if constexpr (std::is_same_v<T, ExpFactor>)
                    return "exp(" + format_g(fac.c) + "*" + xj + ")";
            },
            f.factors[j]);
    }
    return out;
}

} // namespace muqmc
