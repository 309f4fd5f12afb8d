// Series representation, error types and skill metrics shared by every
// other header in the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edm {

/// Input data violates a documented precondition (bad length, NaN, missing
/// column, window out of range, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite or otherwise unusable state,
/// e.g. a generator trajectory leaving its admissible domain.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integer time index. Value i of a series sits at time origin + i.
using TimeIndex = std::int64_t;

/// A named, uniformly sampled sequence of finite observations.
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::string name, std::vector<double> values, TimeIndex origin = 0)
        : name_(std::move(name)), values_(std::move(values)), origin_(origin)
    {
        if (values_.empty()) {
            throw DataError("time series '" + name_ + "' is empty");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw DataError("time series '" + name_ + "' has a non-finite value at index " +
                                std::to_string(i));
            }
        }
    }

    const std::string& name() const noexcept { return name_; }
    std::span<const double> values() const noexcept { return values_; }
    TimeIndex origin() const noexcept { return origin_; }
    std::size_t size() const noexcept { return values_.size(); }

    TimeIndex first_time() const noexcept { return origin_; }
    TimeIndex last_time() const noexcept { return origin_ + static_cast<TimeIndex>(values_.size()) - 1; }
    bool contains_time(TimeIndex t) const noexcept { return t >= first_time() && t <= last_time(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double at_time(TimeIndex t) const
    {
        if (!contains_time(t)) {
            throw DataError("time " + std::to_string(t) + " outside series '" + name_ + "'");
        }
        return values_[static_cast<std::size_t>(t - origin_)];
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::string name_;
    std::vector<double> values_;
    TimeIndex origin_ = 0;
};

/// Prediction skill over (observed, predicted) pairs.
struct SkillStats {
    double rho = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n_pairs = 0;
    bool degenerate = false;

    friend bool operator==(const SkillStats&, const SkillStats&) = default;
};

namespace detail {

inline void check_pair(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DataError("length mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
    }
    if (a.size() < 2) {
        throw DataError("need at least 2 values, got " + std::to_string(a.size()));
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(a.begin(), a.end(), finite) || !std::all_of(b.begin(), b.end(), finite)) {
        throw DataError("non-finite value in correlation input");
    }
}

struct PearsonResult {
    double r = 0.0;
    bool degenerate = false;
};

// Two-pass: subtract the means first so nearly-constant inputs keep their
// precision.
inline PearsonResult pearson_impl(std::span<const double> a, std::span<const double> b)
{
    check_pair(a, b);
    const auto n = static_cast<double>(a.size());
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;

    double saa = 0.0;
    double sbb = 0.0;
    double sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        return {0.0, true};
    }
    const double r = sab / std::sqrt(saa * sbb);
    return {std::clamp(r, -1.0, 1.0), false};
}

} // namespace detail

/// Sample Pearson correlation. Returns 0 when either side has zero variance;
/// use skill_stats() to see the degenerate flag.
inline double pearson(std::span<const double> a, std::span<const double> b)
{
    return detail::pearson_impl(a, b).r;
}

inline SkillStats skill_stats(std::span<const double> observed, std::span<const double> predicted)
{
    const auto corr = detail::pearson_impl(observed, predicted);
    SkillStats s;
    s.rho = corr.r;
    s.degenerate = corr.degenerate;
    s.n_pairs = observed.size();
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = observed[i] - predicted[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const auto n = static_cast<double>(observed.size());
    s.mae = abs_sum / n;
    s.rmse = std::sqrt(sq_sum / n);
    return s;
}

/// Pearson correlation of x and y over value indices [start, end], both ends
/// inclusive and 0-based.
inline double windowed_pearson(const TimeSeries& x, const TimeSeries& y, std::size_t start,
                               std::size_t end)
{
    if (x.size() != y.size()) {
        throw DataError("windowed_pearson: series lengths differ (" + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()) + ")");
    }
    if (start >= end || end >= x.size()) {
        throw DataError("window [" + std::to_string(start) + ", " + std::to_string(end) +
                        "] out of bounds for length " + std::to_string(x.size()));
    }
    const std::size_t len = end - start + 1;
    return pearson(x.values().subspan(start, len), y.values().subspan(start, len));
}

} // namespace edm
