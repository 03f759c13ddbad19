#include "muqmc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace muqmc {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_field(std::string_view field, std::size_t line_no, std::size_t col) {
    double v = 0.0;
    auto begin = field.data();
    auto end = field.data() + field.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("points csv: line " + std::to_string(line_no) + ", column " +
                         std::to_string(col) + ": not a number");
    return v;
}

json measure_to_json_obj(const MeasureSpec& m) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Uniform>) {
                return {{"type", "uniform"}, {"d", v.d}};
            } else if constexpr (std::is_same_v<T, ProductPower>) {
                return {{"type", "product_power"}, {"alphas", v.alphas}};
            } else if constexpr (std::is_same_v<T, PiecewiseConstantDyadic>) {
                return {{"type", "piecewise_dyadic"},
                        {"d", v.d},
                        {"level", v.level},
                        {"weights", v.weights}};
            } else if constexpr (std::is_same_v<T, Discrete>) {
                return {{"type", "discrete"}, {"d", v.d}, {"atoms", v.atoms},
                        {"weights", v.weights}};
            } else if constexpr (std::is_same_v<T, Clayton2D>) {
                return {{"type", "clayton2d"},
                        {"theta", v.theta},
                        {"alphas", {v.alphas[0], v.alphas[1]}}};
            } else { // Mixture
                json comps = json::array();
                for (const auto& c : v.components) comps.push_back(measure_to_json_obj(c));
                return {{"type", "mixture"}, {"weights", v.weights}, {"components", comps}};
            }
        },
        m.variant());
}

template <typename T>
T require(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key))
        throw ParseError(std::string(ctx) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string(ctx) + ": bad field '" + key + "': " + e.what());
    }
}

MeasureSpec measure_from_json_obj(const json& j) {
    if (!j.is_object()) throw ParseError("measure json: expected an object");
    auto type = require<std::string>(j, "type", "measure json");
    try {
        if (type == "uniform") {
            return MeasureSpec{Uniform{require<int>(j, "d", "uniform")}};
        } else if (type == "product_power") {
            return MeasureSpec{
                ProductPower{require<std::vector<double>>(j, "alphas", "product_power")}};
        } else if (type == "piecewise_dyadic") {
            PiecewiseConstantDyadic pw;
            pw.d = require<int>(j, "d", "piecewise_dyadic");
            pw.level = require<int>(j, "level", "piecewise_dyadic");
            pw.weights = require<std::vector<double>>(j, "weights", "piecewise_dyadic");
            return MeasureSpec{std::move(pw)};
        } else if (type == "discrete") {
            Discrete d;
            d.d = require<int>(j, "d", "discrete");
            d.atoms = require<std::vector<std::vector<double>>>(j, "atoms", "discrete");
            d.weights = require<std::vector<double>>(j, "weights", "discrete");
            return MeasureSpec{std::move(d)};
        } else if (type == "clayton2d") {
            Clayton2D c;
            c.theta = require<double>(j, "theta", "clayton2d");
            auto alphas = require<std::vector<double>>(j, "alphas", "clayton2d");
            if (alphas.size() != 2) throw ParseError("clayton2d: needs exactly 2 alphas");
            c.alphas = {alphas[0], alphas[1]};
            return MeasureSpec{c};
        } else if (type == "mixture") {
            Mixture mix;
            mix.weights = require<std::vector<double>>(j, "weights", "mixture");
            if (!j.contains("components") || !j.at("components").is_array())
                throw ParseError("mixture: missing 'components' array");
            for (const auto& c : j.at("components"))
                mix.components.push_back(measure_from_json_obj(c));
            return MeasureSpec{std::move(mix)};
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("measure json: ") + e.what());
    }
    throw ParseError("measure json: unknown type '" + type + "'");
}

json function_to_json_obj(const TestFunction& f) {
    json factors = json::array();
    for (const auto& g : f.factors) {
        factors.push_back(std::visit(
            [](const auto& fac) -> json {
                using T = std::decay_t<decltype(fac)>;
                if constexpr (std::is_same_v<T, PowerFactor>)
                    return {{"type", "power"}, {"p", fac.p}};
                if constexpr (std::is_same_v<T, AffineFactor>)
                    return {{"type", "affine"}, {"a", fac.a}, {"b", fac.b}};
                if constexpr (std::is_same_v<T, ExpFactor>) return {{"type", "exp"}, {"c", fac.c}};
            },
            g));
    }
    return {{"factors", factors}};
}

} // namespace

std::string points_to_csv(const PointSet& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (int j = 0; j < p.d; ++j) {
            if (j) out += ',';
            out += fmt17(p.at(i, j));
        }
        out += '\n';
    }
    return out;
}

PointSet points_from_csv(const std::string& text, bool header) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    PointSet p;
    bool first_data = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (header && line_no == 1) continue;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::size_t start = 0, col = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view field(line.data() + start,
                                   (comma == std::string::npos ? line.size() : comma) - start);
            ++col;
            row.push_back(parse_field(field, line_no, col));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first_data) {
            p = PointSet(static_cast<int>(row.size()));
            first_data = false;
        } else if (static_cast<int>(row.size()) != p.d) {
            throw ParseError("points csv: line " + std::to_string(line_no) + ": expected " +
                             std::to_string(p.d) + " columns, got " + std::to_string(row.size()));
        }
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0))
                throw ParseError("points csv: line " + std::to_string(line_no) +
                                 ": coordinate outside [0,1]");
        }
        p.coords.insert(p.coords.end(), row.begin(), row.end());
    }
    if (first_data) throw ParseError("points csv: no data rows");
    return p;
}

void save_points(const std::filesystem::path& path, const PointSet& p) {
    write_file(path, points_to_csv(p));
}

PointSet load_points(const std::filesystem::path& path, bool header) {
    return points_from_csv(read_file(path), header);
}

std::string coloring_to_csv(const Coloring& y) {
    std::string out;
    for (int s : y.signs) {
        out += s > 0 ? "1" : "-1";
        out += '\n';
    }
    return out;
}

Coloring coloring_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    Coloring y;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "1" || line == "+1") {
            y.signs.push_back(1);
        } else if (line == "-1") {
            y.signs.push_back(-1);
        } else {
            throw ParseError("coloring csv: line " + std::to_string(line_no) +
                             ": expected +1 or -1");
        }
    }
    return y;
}

std::string measure_to_json(const MeasureSpec& m, int indent) {
    return measure_to_json_obj(m).dump(indent) + "\n";
}

MeasureSpec measure_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ParseError("measure json: invalid JSON");
    return measure_from_json_obj(j);
}

MeasureSpec load_measure(const std::filesystem::path& path) {
    return measure_from_json(read_file(path));
}

void save_measure(const std::filesystem::path& path, const MeasureSpec& m) {
    write_file(path, measure_to_json(m));
}

std::string function_to_json(const TestFunction& f) { return function_to_json_obj(f).dump(2); }

TestFunction function_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("function json: invalid JSON");
    if (!j.is_object() || !j.contains("factors") || !j.at("factors").is_array())
        throw ParseError("function json: expected {\"factors\": [...]}");
    TestFunction f;
    for (const auto& g : j.at("factors")) {
        auto type = require<std::string>(g, "type", "function json");
        if (type == "power") {
            f.factors.push_back(PowerFactor{require<double>(g, "p", "power factor")});
        } else if (type == "affine") {
            f.factors.push_back(AffineFactor{require<double>(g, "a", "affine factor"),
                                             require<double>(g, "b", "affine factor")});
        } else if (type == "exp") {
            f.factors.push_back(ExpFactor{require<double>(g, "c", "exp factor")});
        } else {
            throw ParseError("function json: unknown factor type '" + type + "'");
        }
    }
    if (f.factors.empty()) throw ParseError("function json: needs >= 1 factor");
    return f;
}

std::string trace_to_json(const TransferenceTrace& t, const GenerationConfig& cfg,
                          const MeasureSpec& m) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        steps.push_back({{"index", s.index},
                         {"size_before", s.size_before},
                         {"delta", s.delta},
                         {"minority_size", s.minority_size},
                         {"padding_count", s.padding_count},
                         {"kept_indices", s.kept_indices}});
    }
    double bound = ledger_bound(t);
    json doc = {
        {"config",
         {{"N", cfg.N},
          {"k", cfg.k},
          {"strategy", strategy_id(cfg.strategy)},
          {"seed", cfg.seed},
          {"best_of", cfg.best_of},
          {"audit", cfg.audit},
          {"padding", padding_rule_id(cfg.padding)},
          {"measure", measure_to_json_obj(m)}}},
        {"k", t.k},
        {"steps", steps},
        {"D0", t.D0 ? json(*t.D0) : json(nullptr)},
        {"Di", t.Di},
        {"Dk", t.Dk ? json(*t.Dk) : json(nullptr)},
        {"ledger_bound", bound},
        {"ledger_bound_normalized", bound / static_cast<double>(cfg.N)},
    };
    return doc.dump(2) + "\n";
}

std::string report_to_json(const DiscrepancyReport& r, std::size_t n, int d) {
    json doc = {{"value", r.value},
                {"witness_corner", r.witness_corner},
                {"witness_side", to_string(r.witness_side)},
                {"closed_count", r.closed_count},
                {"open_count", r.open_count},
                {"mu_closed", r.mu_closed},
                {"mu_open", r.mu_open},
                {"n", n},
                {"d", d},
                {"n_times_value", r.value * static_cast<double>(n)}};
    return doc.dump(2) + "\n";
}

std::string kh_to_json(const KhCheck& k) {
    json doc = {{"estimate", k.estimate}, {"true_value", k.true_value}, {"error", k.error},
                {"dstar", k.dstar},       {"variation", k.variation},   {"bound", k.bound},
                {"satisfied", k.satisfied}};
    return doc.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << content;
}

} // namespace muqmc
