#include "meaningbound/analysis.hpp"

#include <algorithm>
#include <optional>

namespace meaningbound {

std::string_view to_string(Column c) {
    switch (c) {
    case Column::First: return "first";
    case Column::Second: return "second";
    case Column::Conjunction: return "conjunction";
    }
    return "unknown";
}

ConceptTriple ConceptTriple::with_phrase_conjunction(TermPattern first, TermPattern second) {
    std::vector<std::string> tokens = first.tokens();
    tokens.insert(tokens.end(), second.tokens().begin(), second.tokens().end());
    return ConceptTriple{std::move(first), std::move(second), TermPattern::phrase(std::move(tokens))};
}

const TermPattern& ConceptTriple::operator[](Column c) const {
    switch (c) {
    case Column::First: return first;
    case Column::Second: return second;
    case Column::Conjunction: return conjunction;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown column");
}

std::string describe(const CellFailure& f) {
    std::string out = f.exemplar.empty() ? "totals" : "exemplar `" + f.exemplar + "`";
    out += ", cell " + f.cell;
    if (!f.query.empty()) out += ", query `" + f.query + "`";
    out += ": " + std::string(to_string(f.kind)) + ": " + f.message;
    return out;
}

namespace {

std::string summarize(const std::vector<CellFailure>& failures) {
    if (failures.empty()) return "study failed";
    std::string out = describe(failures.front());
    if (failures.size() > 1) out += " (and " + std::to_string(failures.size() - 1) + " more)";
    return out;
}

ErrorKind first_kind(const std::vector<CellFailure>& failures) {
    return failures.empty() ? ErrorKind::InvalidArgument : failures.front().kind;
}

// Collects failures instead of throwing so a region reports every bad cell.
class CellFetcher {
public:
    CellFetcher(CountProvider& provider, std::string exemplar)
        : provider_(provider), exemplar_(std::move(exemplar)) {}

    std::optional<Count> fetch(const std::string& cell, const Query& query) {
        try {
            return provider_.get_count(query).count;
        } catch (const Error& e) {
            failures_.push_back(CellFailure{exemplar_, cell, canonical_query_string(query), e.kind(), e.what()});
            return std::nullopt;
        }
    }

    void fail(const std::string& cell, const Error& e) {
        failures_.push_back(CellFailure{exemplar_, cell, {}, e.kind(), e.what()});
    }

    std::vector<CellFailure>& failures() { return failures_; }

private:
    CountProvider& provider_;
    std::string exemplar_;
    std::vector<CellFailure> failures_;
};

std::string cell_name(Column c, std::string_view what) {
    return std::string(to_string(c)) + "/" + std::string(what);
}

std::array<Count, 3> fetch_totals(const ConceptTriple& triple, CountProvider& provider,
                                  std::vector<CellFailure>& failures) {
    CellFetcher fetcher(provider, "");
    std::array<Count, 3> totals{};
    for (const auto c : kColumns) {
        if (auto n = fetcher.fetch(cell_name(c, "total"), pattern_query(triple[c]))) {
            totals[static_cast<std::size_t>(c)] = *n;
        }
    }
    failures = std::move(fetcher.failures());
    return totals;
}

ExemplarRegion analyze_region(const ConceptTriple& triple, const std::array<Count, 3>& totals,
                              const TermPattern& exemplar, CountProvider& provider, const StudyConfig& config) {
    CellFetcher fetcher(provider, canonical_string(exemplar));
    const auto n_x = fetcher.fetch("exemplar/total", pattern_query(exemplar));
    std::array<std::optional<Count>, 3> n_ax;
    std::array<std::optional<Count>, 3> n_a_not_x;
    for (const auto c : kColumns) {
        const auto i = static_cast<std::size_t>(c);
        n_ax[i] = fetcher.fetch(cell_name(c, "with"), and_query(triple[c], exemplar));
        n_a_not_x[i] = fetcher.fetch(cell_name(c, "without"), and_not_query(triple[c], exemplar));
    }
    if (!fetcher.failures().empty()) throw StudyError(std::move(fetcher.failures()));

    ExemplarRegion region{exemplar, *n_x, 0.0, {}, {}, {}, {}};
    try {
        region.abs_w = absolute_weight(*n_x, config.n_www);
    } catch (const Error& e) {
        fetcher.fail("exemplar/abs_w", e);
    }
    for (const auto c : kColumns) {
        const auto i = static_cast<std::size_t>(c);
        const RawCellCounts raw{totals[i], *n_ax[i], *n_a_not_x[i], *n_x, config.n_www};
        try {
            region.cells[i] = evaluate_cell(raw, config.neutral_band_eps);
            region.bound_classes[i] = region.cells[i].bound_class;
        } catch (const Error& e) {
            fetcher.fail(cell_name(c, "derived"), e);
        }
    }
    if (!fetcher.failures().empty()) throw StudyError(std::move(fetcher.failures()));

    const auto& cells = region.cells;
    region.verdict_weights = classify_conjunction(cells[0].rel_w, cells[1].rel_w, cells[2].rel_w);
    region.verdict_bounds = classify_conjunction(cells[0].m, cells[1].m, cells[2].m);
    return region;
}

} // namespace

StudyError::StudyError(std::vector<CellFailure> failures)
    : Error(first_kind(failures), summarize(failures)), failures_(std::move(failures)) {}

ExemplarRegion analyze_exemplar(const ConceptTriple& triple, const TermPattern& exemplar,
                                CountProvider& provider, const StudyConfig& config) {
    std::vector<CellFailure> failures;
    const auto totals = fetch_totals(triple, provider, failures);
    if (!failures.empty()) throw StudyError(std::move(failures));
    return analyze_region(triple, totals, exemplar, provider, config);
}

StudyReport run_study(const ConceptTriple& triple, const std::vector<TermPattern>& exemplars,
                      CountProvider& provider, const StudyConfig& config) {
    if (config.n_www.value() == 0) {
        throw Error(ErrorKind::ZeroDenominator, "total document count n(www) must be positive");
    }
    StudyReport report{triple, config, {}, {}, {}};
    report.totals = fetch_totals(triple, provider, report.failures);
    if (!report.failures.empty()) return report;
    for (const auto& exemplar : exemplars) {
        try {
            report.regions.push_back(analyze_region(triple, report.totals, exemplar, provider, config));
        } catch (const StudyError& e) {
            report.failures.insert(report.failures.end(), e.failures().begin(), e.failures().end());
        }
    }
    return report;
}

ScanResult guppy_scan(const ConceptTriple& triple, const std::vector<TermPattern>& candidates,
                      CountProvider& provider, const StudyConfig& config) {
    auto report = run_study(triple, candidates, provider, config);
    ScanResult result;
    result.failures = std::move(report.failures);
    for (const auto& region : report.regions) {
        result.entries.push_back(ScanEntry{region.exemplar, region.verdict_bounds,
                                           {region.cells[0].m, region.cells[1].m, region.cells[2].m}});
    }
    std::sort(result.entries.begin(), result.entries.end(), [](const ScanEntry& a, const ScanEntry& b) {
        const bool ga = a.verdict == ConjunctionVerdict::GuppyEffect;
        const bool gb = b.verdict == ConjunctionVerdict::GuppyEffect;
        if (ga != gb) return ga;
        if (a.m[2] != b.m[2]) return a.m[2] > b.m[2];
        return canonical_string(a.exemplar) < canonical_string(b.exemplar);
    });
    return result;
}

std::vector<Query> study_queries(const ConceptTriple& triple, const std::vector<TermPattern>& exemplars) {
    std::vector<Query> out;
    for (const auto c : kColumns) out.push_back(pattern_query(triple[c]));
    for (const auto& x : exemplars) {
        out.push_back(pattern_query(x));
        for (const auto c : kColumns) {
            out.push_back(and_query(triple[c], x));
            out.push_back(and_not_query(triple[c], x));
        }
    }
    return out;
}

} // namespace meaningbound
