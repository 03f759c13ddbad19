#include "muqmc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "muqmc/coloring.hpp"
#include "muqmc/io.hpp"

namespace muqmc {

using nlohmann::json;

double eq2_bound(std::size_t N, int d) {
    if (N < 2) throw DomainError("eq2_bound: N must be >= 2");
    if (d < 1) throw DimensionError("eq2_bound: d must be >= 1");
    double logs = 2.0 + std::log2(static_cast<double>(N));
    return 63.0 * std::sqrt(static_cast<double>(d)) *
           std::pow(logs, (3.0 * d + 1.0) / 2.0) / static_cast<double>(N);
}

namespace {

unsigned worker_count(std::size_t jobs) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MUQMC_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    struct Job {
        const BenchMeasure* measure;
        std::size_t N;
        const std::string* strategy;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& m : cfg.measures)
        for (std::size_t N : cfg.Ns)
            for (const auto& s : cfg.strategies)
                for (std::uint64_t seed : cfg.seeds) jobs.push_back({&m, N, &s, seed});

    std::vector<BenchRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        while (!failed.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& job = jobs[i];
            try {
                GenerationConfig gen;
                gen.N = job.N;
                gen.k = cfg.k;
                gen.strategy = parse_strategy(*job.strategy);
                gen.seed = job.seed;
                gen.best_of = cfg.best_of;
                gen.audit = cfg.audit;
                gen.padding = cfg.padding;

                auto t0 = std::chrono::steady_clock::now();
                auto [points, trace] = generate(job.measure->spec, gen);
                auto t1 = std::chrono::steady_clock::now();

                BenchRow& row = rows[i];
                row.measure_id = job.measure->id;
                row.d = job.measure->spec.dimension();
                row.N = job.N;
                row.k = cfg.k;
                row.strategy_id = strategy_id(gen.strategy);
                row.seed = job.seed;
                row.n_times_dstar = *trace.Dk;
                row.dstar = *trace.Dk / static_cast<double>(job.N);
                row.delta_max = 0;
                for (const auto& s : trace.steps) row.delta_max = std::max(row.delta_max, s.delta);
                row.ledger_bound_normalized = ledger_bound(trace) / static_cast<double>(job.N);
                row.eq2_bound = eq2_bound(job.N, row.d);
                row.runtime_ms =
                    cfg.deterministic_timing
                        ? 0.0
                        : std::chrono::duration<double, std::milli>(t1 - t0).count();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) {
                    try {
                        throw;
                    } catch (const std::exception& e) {
                        first_error = e.what();
                    }
                }
            }
        }
    };

    unsigned n_workers = worker_count(jobs.size());
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw BudgetError("bench: job failed: " + first_error);
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "measure_id,d,N,k,strategy_id,seed,dstar,n_times_dstar,delta_max,"
                      "ledger_bound_normalized,eq2_bound,runtime_ms\n";
    for (const auto& r : rows) {
        out += r.measure_id + ',' + std::to_string(r.d) + ',' + std::to_string(r.N) + ',' +
               std::to_string(r.k) + ',' + '"' + r.strategy_id + '"' + ',' +
               std::to_string(r.seed) + ',' + fmt(r.dstar) + ',' + fmt(r.n_times_dstar) + ',' +
               std::to_string(r.delta_max) + ',' + fmt(r.ledger_bound_normalized) + ',' +
               fmt(r.eq2_bound) + ',' + fmt(r.runtime_ms) + '\n';
    }
    return out;
}

std::string bench_summary_json(const std::vector<BenchRow>& rows) {
    std::map<std::pair<std::string, std::string>, std::vector<const BenchRow*>> groups;
    std::size_t max_n = 0;
    for (const auto& r : rows) {
        groups[{r.measure_id, r.strategy_id}].push_back(&r);
        max_n = std::max(max_n, r.N);
    }

    json fits = json::array();
    for (const auto& [key, group] : groups) {
        // ln(N*D*) = ln c + beta * ln(log2 N), least squares over usable rows.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int pts = 0;
        for (const BenchRow* r : group) {
            if (r->N < 2 || r->n_times_dstar <= 0.0) continue;
            double x = std::log(std::log2(static_cast<double>(r->N)));
            double y = std::log(r->n_times_dstar);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++pts;
        }
        json fit = {{"measure_id", key.first},
                    {"strategy_id", key.second},
                    {"points", pts},
                    {"exponent_d_minus_half", group.front()->d - 0.5},
                    {"exponent_d_minus_one", group.front()->d - 1.0}};
        double det = pts * sxx - sx * sx;
        if (pts >= 2 && std::abs(det) > 1e-12) {
            double beta = (pts * sxy - sx * sy) / det;
            double lnc = (sy - beta * sx) / pts;
            fit["beta"] = beta;
            fit["c"] = std::exp(lnc);
        } else {
            fit["beta"] = nullptr;
            fit["c"] = nullptr;
        }
        fits.push_back(fit);
    }

    // Cross-measure comparison at the largest N: best achieved N*D* per measure.
    std::map<std::string, double> best;
    for (const auto& r : rows) {
        if (r.N != max_n) continue;
        auto it = best.find(r.measure_id);
        if (it == best.end() || r.n_times_dstar < it->second) best[r.measure_id] = r.n_times_dstar;
    }
    std::vector<std::pair<std::string, double>> ranking(best.begin(), best.end());
    std::sort(ranking.begin(), ranking.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second > b.second : a.first < b.first;
              });
    json rank = json::array();
    for (const auto& [id, v] : ranking)
        rank.push_back({{"measure_id", id}, {"N", max_n}, {"n_times_dstar", v}});

    json doc = {{"fits", fits}, {"hardest_first_at_largest_N", rank}};
    return doc.dump(2) + "\n";
}

BenchConfig bench_config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("bench config: invalid JSON");
    if (!j.is_object()) throw ParseError("bench config: expected an object");
    BenchConfig cfg;
    if (!j.contains("measures") || !j.at("measures").is_array() || j.at("measures").empty())
        throw ParseError("bench config: needs a nonempty 'measures' array");
    for (const auto& m : j.at("measures")) {
        if (!m.contains("id") || !m.contains("spec"))
            throw ParseError("bench config: each measure needs 'id' and 'spec'");
        cfg.measures.push_back(
            {m.at("id").get<std::string>(), measure_from_json(m.at("spec").dump())});
    }
    try {
        cfg.Ns = j.at("N").get<std::vector<std::size_t>>();
        cfg.strategies = j.at("strategies").get<std::vector<std::string>>();
        cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("k")) cfg.k = j.at("k").get<int>();
        if (j.contains("best_of")) cfg.best_of = j.at("best_of").get<int>();
        if (j.contains("audit")) cfg.audit = j.at("audit").get<bool>();
        if (j.contains("padding"))
            cfg.padding = parse_padding_rule(j.at("padding").get<std::string>());
        if (j.contains("deterministic_timing"))
            cfg.deterministic_timing = j.at("deterministic_timing").get<bool>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bench config: ") + e.what());
    }
    if (cfg.Ns.empty() || cfg.strategies.empty() || cfg.seeds.empty())
        throw ParseError("bench config: N, strategies and seeds must be nonempty");
    for (const auto& s : cfg.strategies) parse_strategy(s); // validate early
    return cfg;
}

} // namespace muqmc
