#include "meaningbound/report.hpp"

#include <sstream>

namespace meaningbound {

using nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view name) {
    if (name == "table") return ReportFormat::Table;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw Error(ErrorKind::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

ordered_json report_to_json(const StudyReport& report) {
    const auto& dp = report.config.display;
    ordered_json ordered;
    ordered["columns"] = ordered_json::object();
    for (const auto c : kColumns) {
        ordered["columns"][std::string(to_string(c))] = canonical_string(report.triple[c]);
    }
    ordered["config"] = {{"n_www", report.config.n_www.value()}, {"eps", report.config.neutral_band_eps}};
    ordered["totals"] = ordered_json::object();
    for (const auto c : kColumns) {
        ordered["totals"][std::string(to_string(c))] = report.totals[static_cast<std::size_t>(c)].value();
    }

    auto regions = ordered_json::array();
    for (const auto& region : report.regions) {
        ordered_json r;
        r["exemplar"] = canonical_string(region.exemplar);
        r["n_x"] = region.n_x.value();
        r["abs_w"] = round_for_display(region.abs_w, dp.absw_dp);
        r["verdict_weights"] = to_string(region.verdict_weights);
        r["verdict_bounds"] = to_string(region.verdict_bounds);
        auto cells = ordered_json::array();
        for (const auto c : kColumns) {
            const auto& cell = region.cell(c);
            ordered_json jc;
            jc["column"] = to_string(c);
            jc["n_ax"] = cell.raw.n_ax.value();
            jc["n_a_not_x"] = cell.raw.n_a_not_x.value();
            jc["corr"] = round_for_display(cell.corr, dp.corr_dp);
            jc["n_ax_corrected"] = cell.n_ax_corrected.display;
            jc["rel_w"] = round_for_display(cell.rel_w, dp.relw_dp);
            jc["m"] = round_for_display(cell.m, dp.m_dp);
            jc["bound_class"] = to_string(cell.bound_class);
            jc["inconsistent"] = cell.inconsistent_flag;
            cells.push_back(std::move(jc));
        }
        r["cells"] = std::move(cells);
        regions.push_back(std::move(r));
    }
    ordered["regions"] = std::move(regions);

    auto failures = ordered_json::array();
    for (const auto& f : report.failures) {
        failures.push_back(ordered_json{{"exemplar", f.exemplar},
                                        {"cell", f.cell},
                                        {"query", f.query},
                                        {"kind", to_string(f.kind)},
                                        {"message", f.message}});
    }
    ordered["failures"] = std::move(failures);
    return ordered;
}

std::string render_json(const StudyReport& report) { return report_to_json(report).dump(2) + "\n"; }

namespace {

constexpr int kLabelWidth = 16;
constexpr int kColumnWidth = 18;

std::string pad(const std::string& s, int width) {
    return s.size() >= static_cast<std::size_t>(width) ? s + " " : s + std::string(width - s.size(), ' ');
}

void row(std::ostringstream& out, const std::string& label, const std::vector<std::string>& values) {
    std::string line = pad(label, kLabelWidth);
    for (std::size_t i = 0; i < values.size(); ++i) {
        line += i + 1 == values.size() ? values[i] : pad(values[i], kColumnWidth);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
}

template <typename Fn>
std::vector<std::string> per_column(const ExemplarRegion& region, Fn&& fn) {
    std::vector<std::string> out;
    for (const auto c : kColumns) out.push_back(fn(region.cell(c)));
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void csv_row(std::ostringstream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) out << ',';
        out << csv_field(fields[i]);
    }
    out << '\n';
}

} // namespace

std::string render_table(const StudyReport& report) {
    const auto& dp = report.config.display;
    std::ostringstream out;
    std::vector<std::string> heads;
    std::vector<std::string> totals;
    for (const auto c : kColumns) {
        heads.push_back(canonical_string(report.triple[c]));
        totals.push_back(format_grouped(report.totals[static_cast<std::size_t>(c)].value()));
    }
    row(out, "", heads);
    row(out, "Tot. N", totals);
    for (const auto& region : report.regions) {
        out << '\n' << canonical_string(region.exemplar) << '\n';
        row(out, "Tot. N", {format_grouped(region.n_x.value())});
        row(out, "Abs. w", {format_fixed(region.abs_w, dp.absw_dp)});
        row(out, "Rel. N", per_column(region, [](const CellReport& c) { return format_grouped(c.raw.n_ax.value()); }));
        row(out, "Rel. -N",
            per_column(region, [](const CellReport& c) { return format_grouped(c.raw.n_a_not_x.value()); }));
        row(out, "Corr.", per_column(region, [&](const CellReport& c) { return format_fixed(c.corr, dp.corr_dp); }));
        row(out, "Rel. N corr.",
            per_column(region, [](const CellReport& c) { return format_grouped(c.n_ax_corrected.display); }));
        row(out, "Rel. w", per_column(region, [&](const CellReport& c) { return format_fixed(c.rel_w, dp.relw_dp); }));
        row(out, "M", per_column(region, [&](const CellReport& c) { return format_fixed(c.m, dp.m_dp); }));
        row(out, "Bound",
            per_column(region, [](const CellReport& c) { return std::string(to_string(c.bound_class)); }));
        bool inconsistent = false;
        for (const auto& cell : region.cells) inconsistent = inconsistent || cell.inconsistent_flag;
        if (inconsistent) {
            row(out, "Inconsistent", per_column(region, [](const CellReport& c) {
                    return std::string(c.inconsistent_flag ? "rel_w>1" : "-");
                }));
        }
        row(out, "Verdict", {std::string(to_string(region.verdict_weights))});
    }
    return out.str();
}

std::string render_csv(const StudyReport& report) {
    const auto& dp = report.config.display;
    std::ostringstream out;
    csv_row(out, {"kind", "exemplar", "column", "pattern", "tot_n", "n_x", "abs_w", "rel_n", "rel_not_n", "corr",
                  "rel_n_corr", "rel_w", "m", "bound_class", "inconsistent", "verdict_weights", "verdict_bounds"});
    for (const auto c : kColumns) {
        csv_row(out, {"total", "", std::string(to_string(c)), canonical_string(report.triple[c]),
                      std::to_string(report.totals[static_cast<std::size_t>(c)].value()), "", "", "", "", "", "", "",
                      "", "", "", "", ""});
    }
    for (const auto& region : report.regions) {
        for (const auto c : kColumns) {
            const auto& cell = region.cell(c);
            csv_row(out, {"cell", canonical_string(region.exemplar), std::string(to_string(c)),
                          canonical_string(report.triple[c]), std::to_string(cell.raw.n_a.value()),
                          std::to_string(region.n_x.value()), format_fixed(region.abs_w, dp.absw_dp),
                          std::to_string(cell.raw.n_ax.value()), std::to_string(cell.raw.n_a_not_x.value()),
                          format_fixed(cell.corr, dp.corr_dp), std::to_string(cell.n_ax_corrected.display),
                          format_fixed(cell.rel_w, dp.relw_dp), format_fixed(cell.m, dp.m_dp),
                          std::string(to_string(cell.bound_class)), cell.inconsistent_flag ? "true" : "false",
                          std::string(to_string(region.verdict_weights)),
                          std::string(to_string(region.verdict_bounds))});
        }
    }
    return out.str();
}

std::string render_report(const StudyReport& report, ReportFormat format) {
    switch (format) {
    case ReportFormat::Table: return render_table(report);
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return render_json(report);
    }
    return {};
}

std::string render_scan(const ScanResult& result, const DisplayPrecision& precision) {
    std::ostringstream out;
    for (const auto& e : result.entries) {
        out << canonical_string(e.exemplar) << '\t' << to_string(e.verdict);
        for (const double m : e.m) out << '\t' << format_fixed(m, precision.m_dp);
        out << '\n';
    }
    return out.str();
}

} // namespace meaningbound
