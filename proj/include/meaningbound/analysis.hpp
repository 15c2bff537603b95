#pragma once

#include "meaningbound/core_model.hpp"
#include "meaningbound/providers.hpp"
#include "meaningbound/query.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace meaningbound {

enum class Column { First = 0, Second = 1, Conjunction = 2 };
inline constexpr std::array<Column, 3> kColumns{Column::First, Column::Second, Column::Conjunction};
std::string_view to_string(Column c);

/// Two concepts and the pattern that expresses their conjunction.
struct ConceptTriple {
    TermPattern first;
    TermPattern second;
    TermPattern conjunction;

    /// Conjunction as the exact phrase "first second".
    static ConceptTriple with_phrase_conjunction(TermPattern first, TermPattern second);
    const TermPattern& operator[](Column c) const;
};

struct DisplayPrecision {
    int corr_dp = 7;
    int relw_dp = 7;
    int m_dp = 4;
    int absw_dp = 9;
};

struct StudyConfig {
    Count n_www{55'000'000'000};
    double neutral_band_eps = 0.0;
    DisplayPrecision display;
};

struct ExemplarRegion {
    TermPattern exemplar;
    Count n_x;
    double abs_w = 0.0;
    std::array<CellReport, 3> cells;  // indexed by Column
    ConjunctionVerdict verdict_weights = ConjunctionVerdict::Classical;
    ConjunctionVerdict verdict_bounds = ConjunctionVerdict::Classical;
    std::array<MeaningBoundClass, 3> bound_classes{};

    const CellReport& cell(Column c) const { return cells[static_cast<std::size_t>(c)]; }
};

/// One failed cell: which exemplar region (empty for column totals), which
/// cell, and the query or computation that failed.
struct CellFailure {
    std::string exemplar;
    std::string cell;
    std::string query;
    ErrorKind kind = ErrorKind::InvalidArgument;
    std::string message;
};

std::string describe(const CellFailure& failure);

class StudyError : public Error {
public:
    explicit StudyError(std::vector<CellFailure> failures);
    const std::vector<CellFailure>& failures() const noexcept { return failures_; }

private:
    std::vector<CellFailure> failures_;
};

struct StudyReport {
    ConceptTriple triple;
    StudyConfig config;
    std::array<Count, 3> totals{};
    std::vector<ExemplarRegion> regions;  // input order, failed regions omitted
    std::vector<CellFailure> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/// Fetches the column totals and the exemplar's cells, then evaluates them.
/// Throws StudyError listing every failed cell of the region.
ExemplarRegion analyze_exemplar(const ConceptTriple& triple, const TermPattern& exemplar,
                                CountProvider& provider, const StudyConfig& config);

/// Totals are fetched once; a failing region is dropped and its failures are
/// recorded while the remaining regions are still computed.
StudyReport run_study(const ConceptTriple& triple, const std::vector<TermPattern>& exemplars,
                      CountProvider& provider, const StudyConfig& config);

struct ScanEntry {
    TermPattern exemplar;
    ConjunctionVerdict verdict = ConjunctionVerdict::Classical;
    std::array<double, 3> m{};
};

struct ScanResult {
    std::vector<ScanEntry> entries;
    std::vector<CellFailure> failures;
};

/// GuppyEffect entries first, then by M(conjunction) descending, ties by
/// canonical exemplar string.
ScanResult guppy_scan(const ConceptTriple& triple, const std::vector<TermPattern>& candidates,
                      CountProvider& provider, const StudyConfig& config);

/// Every query a study over these exemplars issues, in fetch order.
std::vector<Query> study_queries(const ConceptTriple& triple, const std::vector<TermPattern>& exemplars);

} // namespace meaningbound
