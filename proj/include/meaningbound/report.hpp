#pragma once

#include "meaningbound/analysis.hpp"

#include <json.hpp>

#include <string>

namespace meaningbound {

enum class ReportFormat { Table, Csv, Json };

ReportFormat parse_report_format(std::string_view name);

/// Derived numbers are emitted at display precision in every format, so the
/// three renderings of one report parse to identical values.
///
/// JSON layout (keys in this order):
///   columns   {first, second, conjunction} -> canonical pattern
///   config    {n_www, eps}
///   totals    {first, second, conjunction} -> count
///   regions   [{exemplar, n_x, abs_w, verdict_weights, verdict_bounds,
///               cells: [{column, n_ax, n_a_not_x, corr, n_ax_corrected,
///                        rel_w, m, bound_class, inconsistent}]}]
///   failures  [{exemplar, cell, query, kind, message}]
nlohmann::ordered_json report_to_json(const StudyReport& report);

std::string render_table(const StudyReport& report);
/// Header row, then one "total" row per column and one "cell" row per
/// (exemplar, column).
std::string render_csv(const StudyReport& report);
std::string render_json(const StudyReport& report);
std::string render_report(const StudyReport& report, ReportFormat format);

/// exemplar, verdict, M(first), M(second), M(conjunction); tab separated.
std::string render_scan(const ScanResult& result, const DisplayPrecision& precision);

} // namespace meaningbound
