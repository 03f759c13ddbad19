#include "muqmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "muqmc/rng.hpp"

namespace muqmc {

namespace {

constexpr double kRenormWarnTol = 1e-9;

int variant_dimension(const MeasureVariant& v) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Uniform>) return m.d;
            if constexpr (std::is_same_v<T, ProductPower>) return static_cast<int>(m.alphas.size());
            if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) return m.d;
            if constexpr (std::is_same_v<T, Discrete>) return m.d;
            if constexpr (std::is_same_v<T, Clayton2D>) return 2;
            if constexpr (std::is_same_v<T, Mixture>)
                return m.components.empty() ? 0 : m.components.front().dimension();
            return 0;
        },
        v);
}

// Renormalizes raw masses to sum 1; warns when the input was not already
// normalized to within kRenormWarnTol.
void renormalize(std::vector<double>& w, const char* what) {
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DomainError(std::string(what) + ": weights must be finite and nonnegative");
        sum += x;
    }
    if (!(sum > 0.0)) throw DomainError(std::string(what) + ": weights must have positive sum");
    if (std::abs(sum - 1.0) > kRenormWarnTol) {
        std::cerr << "muqmc: warning: " << what << " masses sum to " << sum
                  << "; renormalizing to 1\n";
    }
    for (double& x : w) x /= sum;
}

void validate(MeasureVariant& v) {
    std::visit(
        [](auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                if (m.d < 1) throw DimensionError("uniform: d must be >= 1");
            } else if constexpr (std::is_same_v<T, ProductPower>) {
                if (m.alphas.empty()) throw DimensionError("product_power: needs >= 1 exponent");
                for (double a : m.alphas)
                    if (!(a > 0.0) || !std::isfinite(a))
                        throw DomainError("product_power: exponents must be > 0");
            } else if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) {
                if (m.d < 1) throw DimensionError("piecewise_dyadic: d must be >= 1");
                if (m.level < 0) throw DomainError("piecewise_dyadic: level must be >= 0");
                if (static_cast<long long>(m.d) * m.level > 20)
                    throw BudgetError("piecewise_dyadic: d*level > 20 exceeds the cell budget");
                std::size_t cells = std::size_t{1} << (m.d * m.level);
                if (m.weights.size() != cells)
                    throw DomainError("piecewise_dyadic: expected 2^(d*level) cell masses, got " +
                                      std::to_string(m.weights.size()));
                renormalize(m.weights, "piecewise_dyadic");
            } else if constexpr (std::is_same_v<T, Discrete>) {
                if (m.d < 1) throw DimensionError("discrete: d must be >= 1");
                if (m.atoms.empty()) throw DomainError("discrete: needs >= 1 atom");
                if (m.weights.size() != m.atoms.size())
                    throw DomainError("discrete: one mass per atom required");
                for (const auto& a : m.atoms) {
                    if (static_cast<int>(a.size()) != m.d)
                        throw DimensionError("discrete: atom dimension mismatch");
                    for (double c : a)
                        if (!(c >= 0.0 && c <= 1.0))
                            throw DomainError("discrete: atoms must lie in [0,1]^d");
                }
                renormalize(m.weights, "discrete");
            } else if constexpr (std::is_same_v<T, Clayton2D>) {
                if (!(m.theta > 0.0) || !std::isfinite(m.theta))
                    throw DomainError("clayton2d: theta must be > 0");
                for (double a : m.alphas)
                    if (!(a > 0.0) || !std::isfinite(a))
                        throw DomainError("clayton2d: exponents must be > 0");
            } else if constexpr (std::is_same_v<T, Mixture>) {
                if (m.components.empty()) throw DomainError("mixture: needs >= 1 component");
                if (m.weights.size() != m.components.size())
                    throw DomainError("mixture: one weight per component required");
                int d = m.components.front().dimension();
                for (const auto& c : m.components)
                    if (c.dimension() != d)
                        throw DimensionError("mixture: components must share dimension");
                renormalize(m.weights, "mixture");
            }
        },
        v);
}

void check_corner(int d, std::span<const double> corner, const Closure& c) {
    if (static_cast<int>(corner.size()) != d)
        throw DimensionError("box_measure: corner dimension mismatch");
    if (static_cast<int>(c.open.size()) != d)
        throw DimensionError("box_measure: closure length mismatch");
    for (double t : corner)
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("box_measure: corner outside [0,1]^d");
}

double clayton_copula(double u, double v, double theta) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    double s = std::pow(u, -theta) + std::pow(v, -theta) - 1.0;
    return std::pow(s, -1.0 / theta);
}

// Multilinear interpolation of the cell-mass prefix grid; exact because the
// cumulative of a piecewise-constant density is multilinear within each cell.
double piecewise_cdf(const PiecewiseConstantDyadic& pw, const std::vector<double>& prefix,
                     std::span<const double> corner) {
    const int d = pw.d;
    const int side = 1 << pw.level;
    const std::size_t stride = static_cast<std::size_t>(side) + 1;

    double result = 0.0;
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int j = 0; j < d; ++j) {
        double pos = corner[j] * side;
        int b = std::min(static_cast<int>(pos), side - 1);
        base[j] = b;
        frac[j] = pos - b;
    }
    const int corners = 1 << d;
    for (int mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::size_t idx = 0;
        std::size_t mul = 1;
        for (int j = 0; j < d; ++j) {
            int off = (mask >> j) & 1;
            w *= off ? frac[j] : 1.0 - frac[j];
            idx += static_cast<std::size_t>(base[j] + off) * mul;
            mul *= stride;
        }
        result += w * prefix[idx];
    }
    return result;
}

std::vector<double> build_piecewise_prefix(const PiecewiseConstantDyadic& pw) {
    const int d = pw.d;
    const int side = 1 << pw.level;
    const std::size_t stride = static_cast<std::size_t>(side) + 1;
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= stride;

    std::vector<double> prefix(total, 0.0);
    // Scatter cell masses at offset +1 per axis, then prefix-sum each axis.
    for (std::size_t cell = 0; cell < pw.weights.size(); ++cell) {
        std::size_t idx = 0, mul = 1;
        std::size_t rest = cell;
        for (int j = 0; j < d; ++j) {
            std::size_t cj = rest & static_cast<std::size_t>(side - 1);
            rest >>= pw.level;
            idx += (cj + 1) * mul;
            mul *= stride;
        }
        prefix[idx] = pw.weights[cell];
    }
    for (int j = 0; j < d; ++j) {
        std::size_t mul = 1;
        for (int jj = 0; jj < j; ++jj) mul *= stride;
        for (std::size_t i = 0; i < total; ++i) {
            std::size_t coord = (i / mul) % stride;
            if (coord > 0) prefix[i] += prefix[i - mul];
        }
    }
    return prefix;
}

std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> cum(w.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += w[i];
        cum[i] = s;
    }
    return cum;
}

std::size_t pick_categorical(const std::vector<double>& cum, double u) {
    double target = u * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    if (it == cum.end()) --it;
    return static_cast<std::size_t>(it - cum.begin());
}

} // namespace

struct MeasureCache {
    std::vector<double> cum;    // categorical sampling (piecewise cells / atoms / components)
    std::vector<double> prefix; // piecewise d-dim prefix grid
};

namespace {

const MeasureCache& cache_of(const MeasureSpec& m);

double box_measure_impl(const MeasureSpec& spec, std::span<const double> corner,
                        const Closure& c) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                double v = 1.0;
                for (double t : corner) v *= t;
                return v;
            } else if constexpr (std::is_same_v<T, ProductPower>) {
                double v = 1.0;
                for (std::size_t j = 0; j < m.alphas.size(); ++j)
                    v *= std::pow(corner[j], m.alphas[j]);
                return v;
            } else if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) {
                return piecewise_cdf(m, cache_of(spec).prefix, corner);
            } else if constexpr (std::is_same_v<T, Discrete>) {
                double v = 0.0;
                for (std::size_t i = 0; i < m.atoms.size(); ++i) {
                    bool inside = true;
                    for (int j = 0; j < m.d && inside; ++j) {
                        double a = m.atoms[i][j], t = corner[j];
                        inside = c.open[j] ? (a < t) : (a <= t);
                    }
                    if (inside) v += m.weights[i];
                }
                return v;
            } else if constexpr (std::is_same_v<T, Clayton2D>) {
                double u = std::pow(corner[0], m.alphas[0]);
                double v = std::pow(corner[1], m.alphas[1]);
                return clayton_copula(u, v, m.theta);
            } else { // Mixture
                double v = 0.0;
                for (std::size_t i = 0; i < m.components.size(); ++i)
                    v += m.weights[i] * box_measure_impl(m.components[i], corner, c);
                return v;
            }
        },
        spec.variant());
}

void sample_one(const MeasureSpec& spec, Rng& rng, double* out) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                for (int j = 0; j < m.d; ++j) out[j] = uniform01(rng);
            } else if constexpr (std::is_same_v<T, ProductPower>) {
                for (std::size_t j = 0; j < m.alphas.size(); ++j)
                    out[j] = std::pow(uniform01(rng), 1.0 / m.alphas[j]);
            } else if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) {
                std::size_t cell = pick_categorical(cache_of(spec).cum, uniform01(rng));
                const int side = 1 << m.level;
                for (int j = 0; j < m.d; ++j) {
                    std::size_t cj = (cell >> (m.level * j)) & static_cast<std::size_t>(side - 1);
                    out[j] = (static_cast<double>(cj) + uniform01(rng)) / side;
                }
            } else if constexpr (std::is_same_v<T, Discrete>) {
                std::size_t i = pick_categorical(cache_of(spec).cum, uniform01(rng));
                for (int j = 0; j < m.d; ++j) out[j] = m.atoms[i][j];
            } else if constexpr (std::is_same_v<T, Clayton2D>) {
                // Rosenblatt: first copula coordinate is uniform, second by
                // conditional inverse, then power-marginal inverses.
                double w1 = uniform01(rng);
                double w2 = uniform01(rng);
                double th = m.theta;
                double v = std::pow(
                    (std::pow(w2, -th / (1.0 + th)) - 1.0) * std::pow(w1, -th) + 1.0, -1.0 / th);
                out[0] = std::pow(w1, 1.0 / m.alphas[0]);
                out[1] = std::pow(v, 1.0 / m.alphas[1]);
            } else { // Mixture
                std::size_t i = pick_categorical(cache_of(spec).cum, uniform01(rng));
                sample_one(m.components[i], rng, out);
            }
        },
        spec.variant());
}

void collect_atoms(const MeasureSpec& spec, int axis, std::set<double>& out) {
    if (const auto* d = spec.get_if<Discrete>()) {
        for (const auto& a : d->atoms) out.insert(a[axis]);
    } else if (const auto* mix = spec.get_if<Mixture>()) {
        for (const auto& c : mix->components) collect_atoms(c, axis, out);
    }
}

void decompose_into(const MeasureSpec& spec, double weight, MeasureDecomposition& out) {
    if (const auto* d = spec.get_if<Discrete>()) {
        for (std::size_t i = 0; i < d->atoms.size(); ++i) {
            out.atom_positions.push_back(d->atoms[i]);
            out.atom_masses.push_back(weight * d->weights[i]);
        }
    } else if (const auto* mix = spec.get_if<Mixture>()) {
        for (std::size_t i = 0; i < mix->components.size(); ++i)
            decompose_into(mix->components[i], weight * mix->weights[i], out);
    } else {
        out.continuous.emplace_back(weight, &spec);
    }
}

} // namespace

MeasureSpec::MeasureSpec(MeasureVariant v) : v_(std::move(v)) {
    validate(v_);
    d_ = variant_dimension(v_);
    auto cache = std::make_shared<MeasureCache>();
    if (const auto* pw = std::get_if<PiecewiseConstantDyadic>(&v_)) {
        cache->prefix = build_piecewise_prefix(*pw);
        cache->cum = cumulative(pw->weights);
    } else if (const auto* d = std::get_if<Discrete>(&v_)) {
        cache->cum = cumulative(d->weights);
    } else if (const auto* mix = std::get_if<Mixture>(&v_)) {
        cache->cum = cumulative(mix->weights);
    }
    cache_ = std::move(cache);
}

const MeasureCache& MeasureSpec::cache() const { return *cache_; }

namespace {
const MeasureCache& cache_of(const MeasureSpec& m) { return m.cache(); }
} // namespace

double box_measure(const MeasureSpec& m, std::span<const double> corner, const Closure& c) {
    check_corner(m.dimension(), corner, c);
    return box_measure_impl(m, corner, c);
}

double box_measure(const MeasureSpec& m, std::initializer_list<double> corner, const Closure& c) {
    return box_measure(m, std::span<const double>(corner.begin(), corner.size()), c);
}

PointSet sample(const MeasureSpec& m, std::size_t n, std::uint64_t seed) {
    PointSet p(m.dimension());
    p.coords.resize(n * static_cast<std::size_t>(m.dimension()));
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
        sample_one(m, rng, p.coords.data() + i * static_cast<std::size_t>(m.dimension()));
    return p;
}

std::vector<double> atoms(const MeasureSpec& m, int axis) {
    if (axis < 0 || axis >= m.dimension())
        throw DimensionError("atoms: axis out of range");
    std::set<double> s;
    collect_atoms(m, axis, s);
    return {s.begin(), s.end()};
}

bool is_atomless(const MeasureSpec& m) {
    if (m.get_if<Discrete>()) return false;
    if (const auto* mix = m.get_if<Mixture>()) {
        for (const auto& c : mix->components)
            if (!is_atomless(c)) return false;
    }
    return true;
}

MeasureDecomposition decompose(const MeasureSpec& m) {
    MeasureDecomposition out;
    decompose_into(m, 1.0, out);
    return out;
}

std::string variant_name(const MeasureSpec& m) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) return "uniform";
            if constexpr (std::is_same_v<T, ProductPower>) return "product_power";
            if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) return "piecewise_dyadic";
            if constexpr (std::is_same_v<T, Discrete>) return "discrete";
            if constexpr (std::is_same_v<T, Clayton2D>) return "clayton2d";
            if constexpr (std::is_same_v<T, Mixture>) return "mixture";
            return "?";
        },
        m.variant());
}

} // namespace muqmc
