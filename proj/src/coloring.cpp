#include "muqmc/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <numeric>

#include "muqmc/discrepancy.hpp"
#include "muqmc/errors.hpp"
#include "muqmc/rng.hpp"

namespace muqmc {

namespace {

constexpr int kHilbertBits = 16;

// Skilling's axes-to-transpose conversion followed by bit interleaving;
// yields a total order along a fixed-depth Hilbert curve.
std::uint64_t hilbert_key(const double* x, int d) {
    std::uint32_t X[3] = {0, 0, 0};
    for (int j = 0; j < d; ++j) {
        double v = x[j] * 65536.0;
        X[j] = v >= 65536.0 ? 65535u : static_cast<std::uint32_t>(v);
    }
    if (d > 1) {
        std::uint32_t M = 1u << (kHilbertBits - 1), P, Q, t;
        for (Q = M; Q > 1; Q >>= 1) {
            P = Q - 1;
            for (int i = 0; i < d; i++) {
                if (X[i] & Q) {
                    X[0] ^= P;
                } else {
                    t = (X[0] ^ X[i]) & P;
                    X[0] ^= t;
                    X[i] ^= t;
                }
            }
        }
        for (int i = 1; i < d; i++) X[i] ^= X[i - 1];
        t = 0;
        for (Q = M; Q > 1; Q >>= 1)
            if (X[d - 1] & Q) t ^= Q - 1;
        for (int i = 0; i < d; i++) X[i] ^= t;
    }
    std::uint64_t key = 0;
    for (int b = kHilbertBits - 1; b >= 0; --b)
        for (int i = 0; i < d; ++i) key = (key << 1) | ((X[i] >> b) & 1u);
    return key;
}

// Sign of sum_i sinh(rate * c_i); switches to an exp-scaled form when the
// largest exponent would overflow cosh/sinh.
double sign_score(const std::vector<long long>& counts, double rate) {
    double maxabs = 0.0;
    for (long long c : counts) maxabs = std::max(maxabs, std::abs(static_cast<double>(c)));
    if (rate * maxabs <= 30.0) {
        double s = 0.0;
        for (long long c : counts) s += std::sinh(rate * static_cast<double>(c));
        return s;
    }
    const double M = rate * maxabs;
    double s = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        double a = rate * std::abs(static_cast<double>(c));
        double term = std::exp(a - M) * (1.0 - std::exp(-2.0 * a));
        s += c > 0 ? term : -term;
    }
    return s;
}

Coloring balanced_random(std::size_t n, std::uint64_t seed) {
    Coloring y;
    y.signs.assign(n, -1);
    std::size_t n_plus = (n + 1) / 2;
    for (std::size_t i = 0; i < n_plus; ++i) y.signs[i] = 1;
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = rng() % i;
        std::swap(y.signs[i - 1], y.signs[j]);
    }
    return y;
}

} // namespace

// Flipping point q shifts the signed count by -2*flip_sign on exactly the
// boxes containing q, so the post-flip disc decomposes into a max over the
// corner quadrant that contains q (shifted counts) and its complement
// (unshifted). Both maxima stream row by row in O(grid) per kernel.
std::vector<long long> disc_after_flip_all(const PointSet& p, const Coloring& y, int flip_sign) {
    check_alignment(p, y);
    if (p.empty()) throw EmptyInputError("disc_after_flip_all: empty point set");
    if (p.d > 2) throw UnsupportedError("disc_after_flip_all: implemented for d <= 2");
    if (flip_sign != 1 && flip_sign != -1)
        throw DomainError("disc_after_flip_all: flip_sign must be +1 or -1");
    const int d = p.d;
    const std::size_t n = p.size();
    std::vector<std::vector<double>> grid(d);
    for (int j = 0; j < d; ++j) {
        std::set<double> s;
        for (std::size_t i = 0; i < n; ++i) s.insert(p.at(i, j));
        s.insert(1.0);
        grid[j].assign(s.begin(), s.end());
    }

    const long long shift = 2 * flip_sign;
    std::vector<long long> result(n, std::numeric_limits<long long>::max());
    std::vector<long long> acc(n, 0);

    for (bool strict : {false, true}) {
        // Entry index per axis: the first corner index whose box contains the
        // point on that axis.
        std::vector<std::vector<int>> entry(d, std::vector<int>(n));
        for (int j = 0; j < d; ++j) {
            const auto& g = grid[j];
            for (std::size_t i = 0; i < n; ++i) {
                double x = p.at(i, j);
                auto it = strict ? std::upper_bound(g.begin(), g.end(), x)
                                 : std::lower_bound(g.begin(), g.end(), x);
                entry[j][i] = static_cast<int>(it - g.begin());
            }
        }
        // Collapse to two axes; d==1 gets a single virtual row.
        const int rows = d == 2 ? static_cast<int>(grid[0].size()) : 1;
        const int cols = static_cast<int>(grid[d - 1].size());
        auto row_of = [&](std::size_t i) { return d == 2 ? entry[0][i] : 0; };
        auto col_of = [&](std::size_t i) { return entry[d - 1][i]; };

        std::vector<std::vector<std::size_t>> leave(rows + 1), cands(rows + 1);
        for (std::size_t i = 0; i < n; ++i) {
            int r = row_of(i);
            if (r <= rows) leave[r].push_back(i); // r == rows: never contained
            if (y.signs[i] == flip_sign) cands[std::min(r, rows)].push_back(i);
        }

        std::vector<long long> buckets(cols, 0), srow(cols, 0);
        std::vector<long long> colmax_g(cols, std::numeric_limits<long long>::min());
        std::vector<long long> colmax_h(cols, std::numeric_limits<long long>::min());
        std::vector<long long> suff_g(cols + 1), pre_h(cols + 1);
        std::vector<long long> rowmax_h(rows, 0);
        std::vector<long long> a_val(n, std::numeric_limits<long long>::min());
        std::vector<long long> v_val(n, std::numeric_limits<long long>::min());

        // Insert every contained item, then sweep rows top-down, removing
        // items as their entry row passes.
        for (int r = 0; r < rows; ++r)
            for (std::size_t i : leave[r])
                if (col_of(i) < cols) buckets[col_of(i)] += y.signs[i];

        for (int r = rows - 1; r >= 0; --r) {
            long long run = 0;
            long long rmax = std::numeric_limits<long long>::min();
            for (int c = 0; c < cols; ++c) {
                run += buckets[c];
                srow[c] = run;
                long long h = std::llabs(run);
                rmax = std::max(rmax, h);
                colmax_h[c] = std::max(colmax_h[c], h);
                colmax_g[c] = std::max(colmax_g[c], std::llabs(run - shift));
            }
            rowmax_h[r] = rmax;
            suff_g[cols] = std::numeric_limits<long long>::min();
            for (int c = cols - 1; c >= 0; --c) suff_g[c] = std::max(suff_g[c + 1], colmax_g[c]);
            pre_h[0] = std::numeric_limits<long long>::min();
            for (int c = 0; c < cols; ++c) pre_h[c + 1] = std::max(pre_h[c], colmax_h[c]);
            for (std::size_t i : cands[r]) {
                int c = std::min(col_of(i), cols);
                a_val[i] = c < cols ? suff_g[c] : std::numeric_limits<long long>::min();
                v_val[i] = pre_h[c];
            }
            for (std::size_t i : leave[r])
                if (col_of(i) < cols) buckets[col_of(i)] -= y.signs[i];
        }

        // U[a]: max |S| over rows strictly above a candidate's entry row.
        std::vector<long long> upper(rows + 1, std::numeric_limits<long long>::min());
        for (int r = 0; r < rows; ++r) upper[r + 1] = std::max(upper[r], rowmax_h[r]);

        for (std::size_t i = 0; i < n; ++i) {
            if (y.signs[i] != flip_sign) continue;
            int r = std::min(row_of(i), rows);
            long long outside = std::max(upper[r], r < rows ? v_val[i] : pre_h[cols]);
            if (r == rows) outside = std::max(upper[rows], outside);
            long long best = std::max(a_val[i], outside);
            acc[i] = std::max(acc[i], best);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (y.signs[i] == flip_sign) result[i] = acc[i];
    return result;
}

namespace {

// Flips floor(|imbalance|/2) majority-sign points, each chosen to least
// increase the exact combinatorial discrepancy. d <= 2 uses the streaming
// evaluator above; higher dimensions fall back to per-candidate evaluation.
void rebalance(const PointSet& p, Coloring& y) {
    long long imb = y.total();
    while (std::llabs(imb) > 1) {
        int maj = imb > 0 ? 1 : -1;
        std::size_t best_idx = y.signs.size();
        long long best_disc = std::numeric_limits<long long>::max();
        if (p.d <= 2) {
            auto discs = disc_after_flip_all(p, y, maj);
            for (std::size_t i = 0; i < discs.size(); ++i) {
                if (discs[i] < best_disc) {
                    best_disc = discs[i];
                    best_idx = i;
                }
            }
        } else {
            for (std::size_t i = 0; i < y.signs.size(); ++i) {
                if (y.signs[i] != maj) continue;
                y.signs[i] = -maj;
                long long v = combinatorial_disc(p, y).value;
                y.signs[i] = maj;
                if (v < best_disc) {
                    best_disc = v;
                    best_idx = i;
                }
            }
        }
        y.signs[best_idx] = -maj;
        imb -= 2 * maj;
    }
}

void validate_strategy(const StrategyVariant& v) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AlternatingOrder>) {
                if (s.order.kind == OrderSpec::Kind::axis && s.order.axis < 0)
                    throw DomainError("alternating: axis must be >= 0");
            } else if constexpr (std::is_same_v<T, DyadicPotential>) {
                if (s.max_level < 1) throw DomainError("dyadic: max_level must be >= 1");
                if (s.max_level > 20) throw BudgetError("dyadic: max_level must be <= 20");
                if (!(s.rate >= 0.0) || !std::isfinite(s.rate))
                    throw DomainError("dyadic: rate must be finite and >= 0");
            } else if constexpr (std::is_same_v<T, LocalSearch>) {
                if (!s.init) throw DomainError("local: init strategy required");
                if (std::holds_alternative<LocalSearch>(s.init->variant()))
                    throw DomainError("local: init must not itself be a local search");
            }
        },
        v);
}

} // namespace

ColoringStrategy::ColoringStrategy(StrategyVariant v) : v_(std::move(v)) { validate_strategy(v_); }

std::vector<std::size_t> order_points(const PointSet& p, const OrderSpec& order) {
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    switch (order.kind) {
    case OrderSpec::Kind::axis: {
        if (order.axis < 0 || order.axis >= p.d)
            throw DimensionError("order_points: axis out of range");
        std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return p.at(a, order.axis) < p.at(b, order.axis);
        });
        break;
    }
    case OrderSpec::Kind::lex: {
        std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            auto pa = p.point(a), pb = p.point(b);
            return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
        });
        break;
    }
    case OrderSpec::Kind::hilbert: {
        if (p.d > 3) throw UnsupportedError("order_points: hilbert order requires d <= 3");
        std::vector<std::uint64_t> keys(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            keys[i] = hilbert_key(p.coords.data() + i * p.d, p.d);
        std::stable_sort(perm.begin(), perm.end(),
                         [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
        break;
    }
    }
    return perm;
}

Coloring color_alternating(const PointSet& p, const OrderSpec& order) {
    if (p.empty()) throw EmptyInputError("color_alternating: empty point set");
    auto perm = order_points(p, order);
    Coloring y;
    y.signs.resize(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) y.signs[perm[i]] = i % 2 == 0 ? 1 : -1;
    return y;
}

DyadicConstraintSystem build_dyadic_system(const PointSet& p, int max_level) {
    if (max_level < 1) throw DomainError("build_dyadic_system: max_level must be >= 1");
    if (max_level > 20) throw BudgetError("build_dyadic_system: max_level must be <= 20");

    DyadicConstraintSystem sys;
    sys.d = p.d;
    sys.max_level = max_level;
    sys.n_points = p.size();
    sys.incidence.resize(p.size());

    std::map<std::vector<std::uint64_t>, std::size_t> index;
    std::vector<int> lv(p.d, 0);
    std::vector<std::uint64_t> key(p.d);
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::fill(lv.begin(), lv.end(), 0);
        while (true) {
            DyadicBox box;
            box.levels.assign(lv.begin(), lv.end());
            box.cells.resize(p.d);
            for (int j = 0; j < p.d; ++j) {
                // Coordinate 1.0 clamps into the last cell at each level.
                auto side = std::uint64_t{1} << lv[j];
                auto c = static_cast<std::uint64_t>(p.at(i, j) * static_cast<double>(side));
                box.cells[j] = std::min(c, side - 1);
                key[j] = (static_cast<std::uint64_t>(lv[j]) << 40) | box.cells[j];
            }
            auto [it, inserted] = index.try_emplace(key, sys.boxes.size());
            if (inserted) sys.boxes.push_back(std::move(box));
            sys.incidence[i].push_back(it->second);

            int j = p.d - 1;
            for (; j >= 0; --j) {
                if (++lv[j] <= max_level) break;
                lv[j] = 0;
            }
            if (j < 0) break;
        }
    }
    return sys;
}

std::vector<DyadicBox> decompose_anchored_dyadic(std::span<const double> corner, int level) {
    const int d = static_cast<int>(corner.size());
    const auto side = std::uint64_t{1} << level;

    std::vector<std::vector<std::pair<int, std::uint64_t>>> per_axis(d);
    for (int j = 0; j < d; ++j) {
        double scaled = corner[j] * static_cast<double>(side);
        auto m = static_cast<std::uint64_t>(std::llround(scaled));
        if (std::abs(scaled - static_cast<double>(m)) > 1e-9 || m > side)
            throw DomainError("decompose_anchored_dyadic: corner not dyadic of the given level");
        std::uint64_t pos = 0;
        for (int l = 0; l <= level; ++l) {
            auto size = std::uint64_t{1} << (level - l);
            if (m & size) {
                per_axis[j].emplace_back(l, pos >> (level - l));
                pos += size;
            }
        }
        if (per_axis[j].empty()) return {}; // [0, 0) on some axis: empty box
    }

    std::vector<DyadicBox> out;
    std::vector<std::size_t> pick(d, 0);
    while (true) {
        DyadicBox box;
        box.levels.resize(d);
        box.cells.resize(d);
        for (int j = 0; j < d; ++j) {
            box.levels[j] = per_axis[j][pick[j]].first;
            box.cells[j] = per_axis[j][pick[j]].second;
        }
        out.push_back(std::move(box));
        int j = d - 1;
        for (; j >= 0; --j) {
            if (++pick[j] < per_axis[j].size()) break;
            pick[j] = 0;
        }
        if (j < 0) break;
    }
    return out;
}

Coloring greedy_potential_color(const DyadicConstraintSystem& sys, double rate,
                                const std::vector<std::size_t>& process_order) {
    if (!(rate > 0.0)) throw DomainError("greedy_potential_color: rate must be > 0");
    std::vector<long long> box_count(sys.boxes.size(), 0);
    long long global = 0;

    Coloring y;
    y.signs.assign(sys.n_points, 0);
    std::vector<long long> gathered;
    auto process = [&](std::size_t i) {
        gathered.clear();
        for (std::size_t b : sys.incidence[i]) gathered.push_back(box_count[b]);
        gathered.push_back(global);
        int s = sign_score(gathered, rate) <= 0.0 ? 1 : -1;
        y.signs[i] = s;
        for (std::size_t b : sys.incidence[i]) box_count[b] += s;
        global += s;
    };

    if (process_order.empty()) {
        for (std::size_t i = 0; i < sys.n_points; ++i) process(i);
    } else {
        if (process_order.size() != sys.n_points)
            throw AlignmentError("greedy_potential_color: order length mismatch");
        for (std::size_t i : process_order) process(i);
    }
    return y;
}

Coloring local_search(const PointSet& p, const Coloring& init, std::uint64_t budget,
                      std::uint64_t seed) {
    check_alignment(p, init);
    Coloring y = init;
    if (budget == 0 || p.empty()) return y;

    std::vector<std::size_t> plus, minus;
    for (std::size_t i = 0; i < y.signs.size(); ++i)
        (y.signs[i] > 0 ? plus : minus).push_back(i);
    if (plus.empty() || minus.empty()) return y;

    long long cur = combinatorial_disc(p, y).value;
    Rng rng(seed);
    std::uint64_t used = 0, stall = 0;
    const std::uint64_t stall_cap =
        std::max<std::uint64_t>(1024, 2 * plus.size() * minus.size());

    while (used < budget && cur > 0 && stall < stall_cap) {
        std::size_t pi = rng() % plus.size();
        std::size_t mi = rng() % minus.size();
        std::size_t i = plus[pi], j = minus[mi];
        y.signs[i] = -1;
        y.signs[j] = 1;
        long long cand = combinatorial_disc(p, y).value;
        ++used;
        if (cand < cur) {
            cur = cand;
            plus[pi] = j;
            minus[mi] = i;
            stall = 0;
        } else {
            y.signs[i] = 1;
            y.signs[j] = -1;
            ++stall;
        }
    }
    return y;
}

Coloring color(const PointSet& p, const ColoringStrategy& s) {
    if (p.empty()) throw EmptyInputError("color: empty point set");
    return std::visit(
        [&](const auto& strat) -> Coloring {
            using T = std::decay_t<decltype(strat)>;
            if constexpr (std::is_same_v<T, AlternatingOrder>) {
                return color_alternating(p, strat.order);
            } else if constexpr (std::is_same_v<T, BalancedRandom>) {
                return balanced_random(p.size(), strat.seed);
            } else if constexpr (std::is_same_v<T, DyadicPotential>) {
                auto sys = build_dyadic_system(p, strat.max_level);
                double rate = strat.rate > 0.0
                                  ? strat.rate
                                  : 1.0 / std::sqrt(std::pow(strat.max_level + 1.0, p.d));
                auto perm = order_points(p, strat.process_order);
                Coloring y = greedy_potential_color(sys, rate, perm);
                if (std::llabs(y.total()) > 1) rebalance(p, y);
                return y;
            } else { // LocalSearch
                Coloring y0 = color(p, *strat.init);
                return local_search(p, y0, strat.budget, strat.seed);
            }
        },
        s.variant());
}

std::string order_id(const OrderSpec& o) {
    switch (o.kind) {
    case OrderSpec::Kind::axis: return "axis" + std::to_string(o.axis);
    case OrderSpec::Kind::lex: return "lex";
    case OrderSpec::Kind::hilbert: return "hilbert";
    }
    return "?";
}

namespace {

OrderSpec parse_order(const std::string& s) {
    if (s == "lex") return {OrderSpec::Kind::lex, 0};
    if (s == "hilbert") return {OrderSpec::Kind::hilbert, 0};
    if (s.rfind("axis", 0) == 0) {
        try {
            return {OrderSpec::Kind::axis, std::stoi(s.substr(4))};
        } catch (const std::exception&) {
        }
    }
    throw ParseError("unknown point order '" + s + "'");
}

// Splits "k1=v1,k2=v2" at depth-0 commas; values may contain balanced parens.
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> out;
    int depth = 0;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        auto eq = cur.find('=');
        if (eq == std::string::npos)
            throw ParseError("strategy argument '" + cur + "' is not key=value");
        out.emplace_back(cur.substr(0, eq), cur.substr(eq + 1));
        cur.clear();
    };
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            flush();
            continue;
        }
        cur.push_back(c);
    }
    flush();
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string strategy_id(const ColoringStrategy& s) {
    return std::visit(
        [](const auto& strat) -> std::string {
            using T = std::decay_t<decltype(strat)>;
            if constexpr (std::is_same_v<T, AlternatingOrder>) {
                return "alternating(order=" + order_id(strat.order) + ")";
            } else if constexpr (std::is_same_v<T, BalancedRandom>) {
                return "balanced(seed=" + std::to_string(strat.seed) + ")";
            } else if constexpr (std::is_same_v<T, DyadicPotential>) {
                std::string lam = strat.rate > 0.0 ? format_double(strat.rate) : "auto";
                return "dyadic(L=" + std::to_string(strat.max_level) + ",lambda=" + lam +
                       ",order=" + order_id(strat.process_order) + ")";
            } else { // LocalSearch
                return "local(init=" + strategy_id(*strat.init) +
                       ",budget=" + std::to_string(strat.budget) +
                       ",seed=" + std::to_string(strat.seed) + ")";
            }
        },
        s.variant());
}

ColoringStrategy parse_strategy(const std::string& id) {
    std::string name = id;
    std::string body;
    auto paren = id.find('(');
    if (paren != std::string::npos) {
        if (id.back() != ')') throw ParseError("strategy '" + id + "': unbalanced parentheses");
        name = id.substr(0, paren);
        body = id.substr(paren + 1, id.size() - paren - 2);
    }
    auto kv = parse_kv(body);
    auto get = [&](const std::string& key) -> const std::string* {
        for (const auto& [k, v] : kv)
            if (k == key) return &v;
        return nullptr;
    };

    if (name == "alternating") {
        AlternatingOrder a;
        if (const auto* v = get("order")) a.order = parse_order(*v);
        return ColoringStrategy{a};
    }
    if (name == "balanced") {
        BalancedRandom b;
        if (const auto* v = get("seed")) b.seed = std::stoull(*v);
        return ColoringStrategy{b};
    }
    if (name == "dyadic") {
        DyadicPotential d;
        if (const auto* v = get("L")) d.max_level = std::stoi(*v);
        if (const auto* v = get("lambda")) d.rate = *v == "auto" ? 0.0 : std::stod(*v);
        if (const auto* v = get("order")) d.process_order = parse_order(*v);
        return ColoringStrategy{d};
    }
    if (name == "local") {
        LocalSearch ls;
        ColoringStrategy init{BalancedRandom{}};
        if (const auto* v = get("init")) init = parse_strategy(*v);
        ls.init = std::make_shared<const ColoringStrategy>(std::move(init));
        if (const auto* v = get("budget")) ls.budget = std::stoull(*v);
        if (const auto* v = get("seed")) ls.seed = std::stoull(*v);
        return ColoringStrategy{ls};
    }
    throw ParseError("unknown coloring strategy '" + name + "'");
}

} // namespace muqmc
