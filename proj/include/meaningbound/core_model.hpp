#pragma once

// Co-occurrence arithmetic: relative/absolute weights, count correction,
// meaning bounds and the conjunction verdicts built on top of them.
// Everything here is a pure function of its arguments.

#include "meaningbound/error.hpp"

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace meaningbound {

/// Number of documents. Non-negative, exact up to 2^63-1; arithmetic throws
/// ErrorKind::Overflow instead of wrapping.
class Count {
public:
    constexpr Count() = default;
    constexpr explicit Count(std::int64_t value) : value_(value) {
        if (value < 0) {
            throw Error(ErrorKind::InvalidArgument, "count must be non-negative");
        }
    }

    constexpr std::int64_t value() const noexcept { return value_; }

    friend constexpr auto operator<=>(Count, Count) = default;

    Count operator+(Count other) const;
    Count operator*(Count other) const;

private:
    std::int64_t value_ = 0;
};

/// The five raw counts behind one (concept column, exemplar) cell.
/// No ordering between n_ax + n_a_not_x and n_a is required: search engines
/// routinely violate additivity and the correction factor exists to absorb it.
struct RawCellCounts {
    Count n_a;
    Count n_ax;
    Count n_a_not_x;
    Count n_x;
    Count n_www;

    friend bool operator==(const RawCellCounts&, const RawCellCounts&) = default;
};

enum class MeaningBoundClass { Attractive, Repulsive, Neutral };

enum class ConjunctionVerdict { Classical, OverextendedOnFirst, OverextendedOnSecond, GuppyEffect };

std::string_view to_string(MeaningBoundClass c);
std::string_view to_string(ConjunctionVerdict v);

struct CorrectedCount {
    double value = 0.0;          // corr * n_ax, never rounded
    std::int64_t display = 0;    // rounded half away from zero
};

struct CellReport {
    RawCellCounts raw;
    double corr = 1.0;
    CorrectedCount n_ax_corrected;
    double rel_w = 0.0;
    double abs_w = 0.0;
    double m = 0.0;
    MeaningBoundClass bound_class = MeaningBoundClass::Neutral;
    bool inconsistent_flag = false;  // rel_w > 1
};

/// n_ax / n_a. Not clamped: a value above 1 means the source is inconsistent.
double relative_weight(Count n_ax, Count n_a);
/// Same ratio with a real-valued (corrected) numerator.
double relative_weight(double n_ax, Count n_a);

/// n_x / n_www. Throws InconsistentCounts when n_x > n_www.
double absolute_weight(Count n_x, Count n_www);

/// n_a / (n_ax + n_a_not_x): rescales the two disjoint parts so they sum to
/// the whole. May be below, at, or above 1.
double correction_factor(Count n_a, Count n_ax, Count n_a_not_x);

CorrectedCount corrected_count(Count n_ax, double corr);

double meaning_bound(double rel_w, double abs_w);

/// (n_ax * n_www) / (n_a * n_x) with both products formed exactly in 128-bit
/// integers, so the result is symmetric in n_a and n_x bit-for-bit.
double meaning_bound_exact(Count n_ax, Count n_a, Count n_x, Count n_www);

MeaningBoundClass classify_bound(double m, double eps = 0.0);

/// Ties (w_ab equal to a constituent weight) count as classical.
ConjunctionVerdict classify_conjunction(double w_a, double w_b, double w_ab);

/// Runs the full per-cell pipeline: correction, corrected count, relative
/// weight from the unrounded corrected count, absolute weight, bound, class.
CellReport evaluate_cell(const RawCellCounts& raw, double eps = 0.0);

// Display helpers. Internal values are never rounded; only renderings are.
std::string format_fixed(double value, int decimals);
std::string format_grouped(std::int64_t value);
/// Parses the fixed-point rendering back, so every output format carries
/// numerically identical values.
double round_for_display(double value, int decimals);

} // namespace meaningbound
