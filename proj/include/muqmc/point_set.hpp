#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "muqmc/errors.hpp"

namespace muqmc {

// Ordered list of points in [0,1]^d, flat row-major storage. Order is
// significant (colorings index into it); duplicates are allowed.
struct PointSet {
    int d = 0;
    std::vector<double> coords; // n * d values, point i at [i*d, i*d+d)

    PointSet() = default;
    explicit PointSet(int dim) : d(dim) {
        if (dim < 1) throw DimensionError("PointSet: dimension must be >= 1");
    }

    std::size_t size() const { return d == 0 ? 0 : coords.size() / d; }
    bool empty() const { return coords.empty(); }

    double at(std::size_t i, int axis) const { return coords[i * d + axis]; }
    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }

    void push_back(std::span<const double> p) {
        if (static_cast<int>(p.size()) != d)
            throw DimensionError("PointSet: point dimension mismatch");
        for (double c : p) {
            if (!(c >= 0.0 && c <= 1.0))
                throw DomainError("PointSet: coordinate outside [0,1]");
        }
        coords.insert(coords.end(), p.begin(), p.end());
    }

    void push_back(std::initializer_list<double> p) {
        push_back(std::span<const double>(p.begin(), p.size()));
    }
};

inline PointSet make_point_set(int d, std::initializer_list<std::initializer_list<double>> pts) {
    PointSet p(d);
    for (const auto& row : pts) p.push_back(row);
    return p;
}

// +/-1 sign vector aligned with a PointSet.
struct Coloring {
    std::vector<int> signs;

    std::size_t size() const { return signs.size(); }
    long long total() const {
        long long s = 0;
        for (int v : signs) s += v;
        return s;
    }
};

inline void check_alignment(const PointSet& p, const Coloring& y) {
    if (p.size() != y.size())
        throw AlignmentError("coloring length does not match point set");
    for (int v : y.signs) {
        if (v != 1 && v != -1) throw AlignmentError("coloring entries must be +1 or -1");
    }
}

} // namespace muqmc
