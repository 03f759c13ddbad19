#pragma once

#include <filesystem>
#include <string>

#include "muqmc/discrepancy.hpp"
#include "muqmc/measure.hpp"
#include "muqmc/point_set.hpp"
#include "muqmc/quadrature.hpp"
#include "muqmc/transference.hpp"

namespace muqmc {

// Points CSV: one point per row, d comma-separated columns, '.' decimal,
// 17 significant digits (doubles round-trip bit-identically).
std::string points_to_csv(const PointSet& p);
PointSet points_from_csv(const std::string& text, bool header = false);
void save_points(const std::filesystem::path& path, const PointSet& p);
PointSet load_points(const std::filesystem::path& path, bool header = false);

// Coloring CSV: one +1/-1 per row, aligned with the point file.
std::string coloring_to_csv(const Coloring& y);
Coloring coloring_from_csv(const std::string& text);

// Measure JSON carries a "type" discriminator; field names are frozen (see
// README). Raw masses are renormalized on load.
std::string measure_to_json(const MeasureSpec& m, int indent = 2);
MeasureSpec measure_from_json(const std::string& text);
MeasureSpec load_measure(const std::filesystem::path& path);
void save_measure(const std::filesystem::path& path, const MeasureSpec& m);

// Test-function JSON: {"factors":[{"type":"power","p":2.0}, ...]}.
std::string function_to_json(const TestFunction& f);
TestFunction function_from_json(const std::string& text);

// Trace JSON: config echo plus per-step ledger records.
std::string trace_to_json(const TransferenceTrace& t, const GenerationConfig& cfg,
                          const MeasureSpec& m);

std::string report_to_json(const DiscrepancyReport& r, std::size_t n, int d);
std::string kh_to_json(const KhCheck& k);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace muqmc
