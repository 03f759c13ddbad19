#include "muqmc/transference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "muqmc/discrepancy.hpp"
#include "muqmc/rng.hpp"

namespace muqmc {

namespace {

constexpr double kLedgerTol = 1e-9;

double score_point_set(const PointSet& p, const MeasureSpec& m, std::uint64_t fallback_seed) {
    try {
        return star_discrepancy(p, m).value;
    } catch (const BudgetError&) {
        return star_discrepancy_lower_bound(p, m, 100000, fallback_seed);
    }
}

PointSet subset(const PointSet& p, const std::vector<std::size_t>& indices) {
    PointSet out(p.d);
    out.coords.reserve(indices.size() * static_cast<std::size_t>(p.d));
    for (std::size_t i : indices) {
        auto pt = p.point(i);
        out.coords.insert(out.coords.end(), pt.begin(), pt.end());
    }
    return out;
}

} // namespace

PointSet initial_approximation(const MeasureSpec& m, std::size_t size, std::uint64_t seed,
                               int best_of) {
    if (size < 1) throw DomainError("initial_approximation: size must be >= 1");
    if (best_of < 1) throw DomainError("initial_approximation: best_of must be >= 1");
    if (best_of == 1) return sample(m, size, seed);

    PointSet best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int a = 0; a < best_of; ++a) {
        PointSet cand = sample(m, size, seed + static_cast<std::uint64_t>(a));
        double score = score_point_set(cand, m, seed_mix(seed, 0xABu + a));
        if (score < best_score) {
            best_score = score;
            best = std::move(cand);
        }
    }
    return best;
}

std::pair<PointSet, HalvingStep> halving_step(const PointSet& p, const Coloring& y,
                                              PaddingRule rule, std::uint64_t seed,
                                              const MeasureSpec* measure_for_greedy) {
    check_alignment(p, y);
    const std::size_t n = p.size();
    if (n % 2 != 0) throw ParityError("halving_step: point count must be even");

    HalvingStep step;
    step.size_before = n;
    step.delta = combinatorial_disc(p, y).value;

    std::size_t n_plus = 0;
    for (int s : y.signs) n_plus += s > 0;
    const int minority_sign = n_plus <= n - n_plus ? 1 : -1;

    std::vector<std::size_t> kept, majority;
    for (std::size_t i = 0; i < n; ++i)
        (y.signs[i] == minority_sign ? kept : majority).push_back(i);
    step.minority_size = kept.size();
    step.padding_count = n / 2 - kept.size();

    if (step.padding_count > 0) {
        if (rule == PaddingRule::random) {
            Rng rng(seed);
            for (std::size_t i = majority.size(); i > 1; --i)
                std::swap(majority[i - 1], majority[rng() % i]);
            kept.insert(kept.end(), majority.begin(),
                        majority.begin() + static_cast<long>(step.padding_count));
        } else {
            if (!measure_for_greedy)
                throw DomainError("halving_step: greedy padding needs the target measure");
            std::vector<std::size_t> pool = majority;
            for (std::size_t round = 0; round < step.padding_count; ++round) {
                std::size_t best_pos = 0;
                double best_val = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < pool.size(); ++c) {
                    std::vector<std::size_t> trial = kept;
                    trial.push_back(pool[c]);
                    double v = star_discrepancy(subset(p, trial), *measure_for_greedy).value;
                    if (v < best_val) {
                        best_val = v;
                        best_pos = c;
                    }
                }
                kept.push_back(pool[best_pos]);
                pool.erase(pool.begin() + static_cast<long>(best_pos));
            }
        }
    }

    std::sort(kept.begin(), kept.end());
    step.kept_indices = kept;
    return {subset(p, kept), std::move(step)};
}

std::pair<PointSet, TransferenceTrace> generate(const MeasureSpec& m,
                                                const GenerationConfig& cfg) {
    if (cfg.N < 1) throw DomainError("generate: N must be >= 1");
    if (cfg.k < 0) throw DomainError("generate: k must be >= 0");
    if (cfg.k >= 30 || (cfg.N << cfg.k) > (std::size_t{1} << 30))
        throw BudgetError("generate: 2^k * N too large");

    const std::size_t size0 = cfg.N << cfg.k;
    PointSet current = initial_approximation(m, size0, cfg.seed, cfg.best_of);

    TransferenceTrace trace;
    trace.k = cfg.k;
    trace.audited = cfg.audit;
    trace.D0 = geometric_disc(current, m);
    if (cfg.audit) trace.Di.push_back(*trace.D0);

    double d_prev = *trace.D0;
    for (int i = 0; i < cfg.k; ++i) {
        Coloring y = color(current, cfg.strategy);
        auto [next, step] =
            halving_step(current, y, cfg.padding, seed_mix(cfg.seed, 1000u + i), &m);
        step.index = i;
        if (step.padding_count >
            static_cast<std::size_t>((step.delta + 1) / 2))
            throw InvariantViolation("generate: padding exceeds ceil(delta/2) at step " +
                                     std::to_string(i));
        if (cfg.audit) {
            double d_next = geometric_disc(next, m);
            if (d_next > d_prev / 2.0 + static_cast<double>(step.delta) + kLedgerTol)
                throw InvariantViolation("generate: step inequality violated at step " +
                                         std::to_string(i));
            trace.Di.push_back(d_next);
            d_prev = d_next;
        }
        trace.steps.push_back(std::move(step));
        current = std::move(next);
    }

    trace.Dk = cfg.audit ? d_prev : (cfg.k == 0 ? *trace.D0 : geometric_disc(current, m));
    if (*trace.Dk > ledger_bound(trace) + kLedgerTol)
        throw InvariantViolation("generate: final discrepancy exceeds the ledger bound");
    return {std::move(current), std::move(trace)};
}

double ledger_bound(const TransferenceTrace& t) {
    if (!t.D0) throw IncompleteTraceError("ledger_bound: trace lacks D0");
    double bound = *t.D0 / std::pow(2.0, t.k);
    for (const auto& step : t.steps)
        bound += static_cast<double>(step.delta) / std::pow(2.0, t.k - 1 - step.index);
    return bound;
}

std::string padding_rule_id(PaddingRule rule) {
    return rule == PaddingRule::random ? "random" : "greedy";
}

PaddingRule parse_padding_rule(const std::string& s) {
    if (s == "random") return PaddingRule::random;
    if (s == "greedy") return PaddingRule::greedy;
    throw ParseError("unknown padding rule '" + s + "'");
}

} // namespace muqmc
