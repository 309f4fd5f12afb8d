// Delay-coordinate embedding and exact nearest-neighbour search over the
// resulting state points.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edm/core.hpp"

namespace edm {

struct EmbeddingParams {
    int e_dim = 1;
    int tau = 1;
    int tp = 1; // prediction horizon; negative values predict backwards

    void validate() const
    {
        if (e_dim < 1) {
            throw DataError("embedding dimension E must be >= 1, got " + std::to_string(e_dim));
        }
        if (tau < 1) {
            throw DataError("delay tau must be >= 1, got " + std::to_string(tau));
        }
    }

    /// Number of earlier steps each state point reaches back.
    TimeIndex span() const noexcept { return static_cast<TimeIndex>(e_dim - 1) * tau; }

    friend bool operator==(const EmbeddingParams&, const EmbeddingParams&) = default;
};

/// State points stored row-major. Row k is
/// (x_t, x_{t-tau}, ..., x_{t-(E-1)tau}) for t = times()[k].
class ShadowManifold {
public:
    ShadowManifold() = default;

    ShadowManifold(std::size_t dim, std::vector<double> coords, std::vector<TimeIndex> times,
                   EmbeddingParams params, std::string source_name)
        : dim_(dim), coords_(std::move(coords)), times_(std::move(times)), params_(params),
          source_name_(std::move(source_name))
    {
        if (dim_ == 0) {
            throw DataError("manifold dimension must be >= 1");
        }
        if (coords_.size() != dim_ * times_.size()) {
            throw DataError("manifold coordinate table does not match point count");
        }
        for (std::size_t k = 1; k < times_.size(); ++k) {
            if (times_[k] <= times_[k - 1]) {
                throw DataError("manifold times must be strictly increasing");
            }
        }
    }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    const EmbeddingParams& params() const noexcept { return params_; }
    const std::string& source_name() const noexcept { return source_name_; }
    std::span<const TimeIndex> times() const noexcept { return times_; }
    TimeIndex time(std::size_t row) const { return times_[row]; }

    std::span<const double> point(std::size_t row) const
    {
        return std::span<const double>(coords_).subspan(row * dim_, dim_);
    }

    /// Row holding time t, if any.
    std::optional<std::size_t> row_of(TimeIndex t) const
    {
        const auto it = std::lower_bound(times_.begin(), times_.end(), t);
        if (it == times_.end() || *it != t) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - times_.begin());
    }

private:
    std::size_t dim_ = 1;
    std::vector<double> coords_;
    std::vector<TimeIndex> times_;
    EmbeddingParams params_;
    std::string source_name_;
};

inline std::size_t min_embedding_length(const EmbeddingParams& params)
{
    return static_cast<std::size_t>(params.span()) + 1;
}

inline ShadowManifold embed(const TimeSeries& series, const EmbeddingParams& params)
{
    params.validate();
    const std::size_t need = min_embedding_length(params);
    if (series.size() < need) {
        throw DataError("series '" + series.name() + "' has length " + std::to_string(series.size()) +
                        "; E=" + std::to_string(params.e_dim) + ", tau=" + std::to_string(params.tau) +
                        " needs at least " + std::to_string(need));
    }
    const auto e = static_cast<std::size_t>(params.e_dim);
    const auto tau = static_cast<std::size_t>(params.tau);
    const std::size_t first = need - 1;
    const std::size_t count = series.size() - first;

    std::vector<double> coords;
    coords.reserve(count * e);
    std::vector<TimeIndex> times;
    times.reserve(count);
    for (std::size_t i = first; i < series.size(); ++i) {
        for (std::size_t j = 0; j < e; ++j) {
            coords.push_back(series[i - j * tau]);
        }
        times.push_back(series.origin() + static_cast<TimeIndex>(i));
    }
    return ShadowManifold(e, std::move(coords), std::move(times), params, series.name());
}

struct NeighborSet {
    std::vector<std::size_t> indices; // manifold rows, nearest first
    std::vector<double> distances;

    std::size_t size() const noexcept { return indices.size(); }
};

struct KnnOptions {
    /// Rows eligible as neighbours; empty means every row.
    std::span<const std::size_t> candidates{};
    /// Times never returned.
    std::span<const TimeIndex> excluded_times{};
    /// When set, rows with |t - query_time| <= exclusion_radius are skipped.
    std::optional<TimeIndex> query_time{};
    TimeIndex exclusion_radius = 0;
};

inline double euclidean(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// The k nearest rows to `query` by Euclidean distance. Ties go to the
/// earlier time, so the result is fully determined by the inputs.
inline NeighborSet knn(const ShadowManifold& manifold, std::span<const double> query, std::size_t k,
                       const KnnOptions& opts = {})
{
    if (query.size() != manifold.dim()) {
        throw DataError("query has dimension " + std::to_string(query.size()) + ", manifold has " +
                        std::to_string(manifold.dim()));
    }
    if (k == 0) {
        throw DataError("knn: k must be >= 1");
    }

    auto excluded = [&](std::size_t row) {
        const TimeIndex t = manifold.time(row);
        if (opts.query_time && std::abs(t - *opts.query_time) <= opts.exclusion_radius) {
            return true;
        }
        return std::find(opts.excluded_times.begin(), opts.excluded_times.end(), t) !=
               opts.excluded_times.end();
    };

    // Max-heap of the best k seen so far; rows are time-ordered so comparing
    // row numbers breaks ties by time.
    using Entry = std::pair<double, std::size_t>;
    std::vector<Entry> heap;
    heap.reserve(k + 1);
    auto consider = [&](std::size_t row) {
        if (excluded(row)) {
            return;
        }
        const Entry e{euclidean(query, manifold.point(row)), row};
        if (heap.size() < k) {
            heap.push_back(e);
            std::push_heap(heap.begin(), heap.end());
        } else if (e < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = e;
            std::push_heap(heap.begin(), heap.end());
        }
    };

    if (opts.candidates.empty()) {
        for (std::size_t row = 0; row < manifold.size(); ++row) {
            consider(row);
        }
    } else {
        for (const auto row : opts.candidates) {
            consider(row);
        }
    }
    if (heap.size() < k) {
        throw DataError("knn: only " + std::to_string(heap.size()) +
                        " candidate points after exclusion, need " + std::to_string(k));
    }
    std::sort_heap(heap.begin(), heap.end());

    NeighborSet out;
    out.indices.reserve(k);
    out.distances.reserve(k);
    for (const auto& [d, row] : heap) {
        out.distances.push_back(d);
        out.indices.push_back(row);
    }
    return out;
}

} // namespace edm
