#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "muqmc/errors.hpp"
#include "muqmc/point_set.hpp"

namespace muqmc {

class MeasureSpec;

// Per-axis interval closure for anchored boxes: closed -> [0, t], open -> [0, t).
struct Closure {
    std::vector<bool> open; // true = open on that axis

    static Closure all_closed(int d) { return Closure{std::vector<bool>(d, false)}; }
    static Closure all_open(int d) { return Closure{std::vector<bool>(d, true)}; }
};

struct Uniform {
    int d = 1;
};

// Independent marginals with CDF F_j(x) = x^alpha_j.
struct ProductPower {
    std::vector<double> alphas;
};

// Piecewise-constant density on the level-L dyadic grid. weights holds one
// raw mass per cell, linearized with axis 0 fastest:
//   index = c_0 + c_1 * 2^L + c_2 * 2^(2L) + ...
// Masses are renormalized to sum 1 at validation.
struct PiecewiseConstantDyadic {
    int d = 1;
    int level = 0;
    std::vector<double> weights;
};

struct Discrete {
    int d = 1;
    std::vector<std::vector<double>> atoms;
    std::vector<double> weights;
};

// Bivariate Clayton copula with power marginals:
//   H(t) = C(t1^a1, t2^a2),  C(u,v) = (u^-theta + v^-theta - 1)^(-1/theta).
struct Clayton2D {
    double theta = 1.0;
    std::array<double, 2> alphas{1.0, 1.0};
};

struct Mixture {
    std::vector<double> weights;
    std::vector<MeasureSpec> components;
};

using MeasureVariant =
    std::variant<Uniform, ProductPower, PiecewiseConstantDyadic, Discrete, Clayton2D, Mixture>;

struct MeasureCache;

// A normalized Borel measure on [0,1]^d from the closed family above.
// Immutable after construction; box_measure/atoms are pure.
class MeasureSpec {
public:
    MeasureSpec() : MeasureSpec(MeasureVariant{Uniform{1}}) {}
    MeasureSpec(MeasureVariant v); // validates, renormalizes raw masses

    const MeasureVariant& variant() const { return v_; }
    int dimension() const { return d_; }

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&v_);
    }

    const MeasureCache& cache() const; // internal derived tables

private:
    MeasureVariant v_;
    int d_ = 0;
    std::shared_ptr<const MeasureCache> cache_;
};

// mu of the anchored box with the given corner and per-axis closure.
double box_measure(const MeasureSpec& m, std::span<const double> corner, const Closure& c);
double box_measure(const MeasureSpec& m, std::initializer_list<double> corner, const Closure& c);

// n i.i.d. points from mu; deterministic given seed.
PointSet sample(const MeasureSpec& m, std::size_t n, std::uint64_t seed);

// Sorted, deduplicated marginal atom coordinates on one axis; empty for
// atomless variants.
std::vector<double> atoms(const MeasureSpec& m, int axis);

// True when no variant in the tree carries point masses (closure-independent
// box_measure).
bool is_atomless(const MeasureSpec& m);

// Flattened view used by the discrepancy sweep: point masses plus weighted
// continuous components.
struct MeasureDecomposition {
    std::vector<std::vector<double>> atom_positions;
    std::vector<double> atom_masses;
    std::vector<std::pair<double, const MeasureSpec*>> continuous; // (weight, component)
};
MeasureDecomposition decompose(const MeasureSpec& m);

std::string variant_name(const MeasureSpec& m);

} // namespace muqmc
