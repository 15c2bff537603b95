#include "meaningbound/core_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace meaningbound {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::InconsistentCounts: return "InconsistentCounts";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidQuery: return "InvalidQuery";
    case ErrorKind::DuplicateDocId: return "DuplicateDocId";
    case ErrorKind::MissingFixtureEntry: return "MissingFixtureEntry";
    case ErrorKind::TransportFailure: return "TransportFailure";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::StorageFailure: return "StorageFailure";
    }
    return "Unknown";
}

std::string_view to_string(MeaningBoundClass c) {
    switch (c) {
    case MeaningBoundClass::Attractive: return "attractive";
    case MeaningBoundClass::Repulsive: return "repulsive";
    case MeaningBoundClass::Neutral: return "neutral";
    }
    return "unknown";
}

std::string_view to_string(ConjunctionVerdict v) {
    switch (v) {
    case ConjunctionVerdict::Classical: return "classical";
    case ConjunctionVerdict::OverextendedOnFirst: return "overextended-on-first";
    case ConjunctionVerdict::OverextendedOnSecond: return "overextended-on-second";
    case ConjunctionVerdict::GuppyEffect: return "guppy-effect";
    }
    return "unknown";
}

Count Count::operator+(Count other) const {
    std::int64_t out = 0;
    if (__builtin_add_overflow(value_, other.value_, &out)) {
        throw Error(ErrorKind::Overflow, "count addition overflows");
    }
    return Count{out};
}

Count Count::operator*(Count other) const {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(value_, other.value_, &out)) {
        throw Error(ErrorKind::Overflow, "count multiplication overflows");
    }
    return Count{out};
}

double relative_weight(Count n_ax, Count n_a) {
    return relative_weight(static_cast<double>(n_ax.value()), n_a);
}

double relative_weight(double n_ax, Count n_a) {
    if (n_a.value() == 0) {
        throw Error(ErrorKind::ZeroDenominator, "relative weight: concept count is zero");
    }
    return n_ax / static_cast<double>(n_a.value());
}

double absolute_weight(Count n_x, Count n_www) {
    if (n_www.value() == 0) {
        throw Error(ErrorKind::ZeroDenominator, "absolute weight: total document count is zero");
    }
    if (n_x > n_www) {
        throw Error(ErrorKind::InconsistentCounts,
                    "absolute weight: word count " + std::to_string(n_x.value()) +
                        " exceeds total " + std::to_string(n_www.value()));
    }
    return static_cast<double>(n_x.value()) / static_cast<double>(n_www.value());
}

double correction_factor(Count n_a, Count n_ax, Count n_a_not_x) {
    const Count parts = n_ax + n_a_not_x;
    if (parts.value() == 0) {
        throw Error(ErrorKind::ZeroDenominator, "correction factor: n(A and X) + n(A and not X) is zero");
    }
    if (n_a.value() == 0) {
        throw Error(ErrorKind::ZeroDenominator, "correction factor: concept count is zero");
    }
    return static_cast<double>(n_a.value()) / static_cast<double>(parts.value());
}

CorrectedCount corrected_count(Count n_ax, double corr) {
    if (!(corr > 0.0) || !std::isfinite(corr)) {
        throw Error(ErrorKind::InvalidArgument, "corrected count: correction factor must be positive");
    }
    CorrectedCount out;
    out.value = corr * static_cast<double>(n_ax.value());
    out.display = std::llround(out.value);
    return out;
}

double meaning_bound(double rel_w, double abs_w) {
    if (abs_w == 0.0) {
        throw Error(ErrorKind::ZeroDenominator, "meaning bound: absolute weight is zero");
    }
    if (rel_w < 0.0 || abs_w < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "meaning bound: weights must be non-negative");
    }
    return rel_w / abs_w;
}

double meaning_bound_exact(Count n_ax, Count n_a, Count n_x, Count n_www) {
    if (n_a.value() == 0 || n_x.value() == 0 || n_www.value() == 0) {
        throw Error(ErrorKind::ZeroDenominator, "meaning bound: zero count in denominator");
    }
    __extension__ typedef __int128 wide;
    const wide num = static_cast<wide>(n_ax.value()) * static_cast<wide>(n_www.value());
    const wide den = static_cast<wide>(n_a.value()) * static_cast<wide>(n_x.value());
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

MeaningBoundClass classify_bound(double m, double eps) {
    if (m > 1.0 + eps) return MeaningBoundClass::Attractive;
    if (m < 1.0 - eps) return MeaningBoundClass::Repulsive;
    return MeaningBoundClass::Neutral;
}

ConjunctionVerdict classify_conjunction(double w_a, double w_b, double w_ab) {
    const bool over_first = w_ab > w_a;
    const bool over_second = w_ab > w_b;
    if (over_first && over_second) return ConjunctionVerdict::GuppyEffect;
    if (over_first) return ConjunctionVerdict::OverextendedOnFirst;
    if (over_second) return ConjunctionVerdict::OverextendedOnSecond;
    return ConjunctionVerdict::Classical;
}

CellReport evaluate_cell(const RawCellCounts& raw, double eps) {
    CellReport r;
    r.raw = raw;
    r.corr = correction_factor(raw.n_a, raw.n_ax, raw.n_a_not_x);
    r.n_ax_corrected = corrected_count(raw.n_ax, r.corr);
    r.rel_w = relative_weight(r.n_ax_corrected.value, raw.n_a);
    r.abs_w = absolute_weight(raw.n_x, raw.n_www);
    r.m = meaning_bound(r.rel_w, r.abs_w);
    r.bound_class = classify_bound(r.m, eps);
    r.inconsistent_flag = r.rel_w > 1.0;
    return r;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string format_grouped(std::int64_t value) {
    std::string digits = std::to_string(value < 0 ? -value : value);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return value < 0 ? "-" + out : out;
}

double round_for_display(double value, int decimals) {
    return std::strtod(format_fixed(value, decimals).c_str(), nullptr);
}

} // namespace meaningbound
