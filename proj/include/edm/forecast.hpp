// Simplex projection: nearest-neighbour forecasting with exponentially
// decaying weights over the E+1 closest state points.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edm/core.hpp"
#include "edm/embedding.hpp"

namespace edm {

struct SimplexWeights {
    std::vector<double> weights;
    std::vector<TimeIndex> neighbor_times;
};

/// w_i = exp(-d_i / d_1) / sum_j exp(-d_j / d_1) for distances sorted
/// ascending. With d_1 = 0 the limit puts equal mass on the zero-distance
/// entries and nothing elsewhere.
inline SimplexWeights simplex_weights(std::span<const double> distances)
{
    if (distances.empty()) {
        throw DataError("simplex_weights: no distances");
    }
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] >= 0.0) || !std::isfinite(distances[i])) {
            throw DataError("simplex_weights: distance " + std::to_string(i) + " is negative or not finite");
        }
        if (i > 0 && distances[i] < distances[i - 1]) {
            throw DataError("simplex_weights: distances must be sorted non-decreasing");
        }
    }

    SimplexWeights out;
    out.weights.resize(distances.size());
    const double nearest = distances.front();
    double total = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double w = nearest > 0.0 ? std::exp(-distances[i] / nearest) : (distances[i] == 0.0 ? 1.0 : 0.0);
        out.weights[i] = w;
        total += w;
    }
    for (auto& w : out.weights) {
        w /= total;
    }
    return out;
}

struct Projection {
    double value = 0.0;
    SimplexWeights weights;
};

namespace detail {

// Rows of `library` whose time shifted by `shift` lands inside `target`.
inline std::vector<std::size_t> shift_valid_rows(const ShadowManifold& library, const TimeSeries& target,
                                                 TimeIndex shift, std::span<const std::size_t> rows = {})
{
    std::vector<std::size_t> out;
    auto keep = [&](std::size_t r) {
        if (target.contains_time(library.time(r) + shift)) {
            out.push_back(r);
        }
    };
    if (rows.empty()) {
        out.reserve(library.size());
        for (std::size_t r = 0; r < library.size(); ++r) {
            keep(r);
        }
    } else {
        out.reserve(rows.size());
        for (auto r : rows) {
            keep(r);
        }
    }
    return out;
}

// Projection over candidates already known to have a valid shifted target.
inline Projection project(const ShadowManifold& library, std::span<const double> query,
                          std::optional<TimeIndex> query_time, const TimeSeries& target, TimeIndex shift,
                          std::span<const std::size_t> candidates, TimeIndex exclusion_radius,
                          std::size_t k)
{
    KnnOptions opts;
    opts.candidates = candidates;
    opts.query_time = query_time;
    opts.exclusion_radius = exclusion_radius;
    if (candidates.empty()) {
        throw DataError("simplex: no usable library points");
    }
    NeighborSet nn;
    try {
        nn = knn(library, query, k, opts);
    } catch (const DataError&) {
        throw DataError("simplex: fewer than E+1=" + std::to_string(k) + " usable library points");
    }

    Projection p;
    p.weights = simplex_weights(nn.distances);
    p.weights.neighbor_times.reserve(k);
    for (std::size_t i = 0; i < nn.size(); ++i) {
        const TimeIndex t = library.time(nn.indices[i]);
        p.weights.neighbor_times.push_back(t);
        p.value += p.weights.weights[i] * target.at_time(t + shift);
    }
    return p;
}

} // namespace detail

/// Weighted average of target(t_i + tp) over the E+1 library neighbours of
/// `query`. Library points without a known future are skipped before the
/// neighbours are chosen; `query_time`, when given, is never its own
/// neighbour.
inline Projection simplex_forecast(const ShadowManifold& library, std::span<const double> query,
                                   std::optional<TimeIndex> query_time, const TimeSeries& target, int tp,
                                   TimeIndex exclusion_radius = 0)
{
    const auto rows = detail::shift_valid_rows(library, target, tp);
    return detail::project(library, query, query_time, target, tp, rows, exclusion_radius,
                           library.dim() + 1);
}

struct PredictionSet {
    std::vector<TimeIndex> times; // time of each query point
    std::vector<double> observed; // target at time + tp
    std::vector<double> predicted;
};

/// Leave-one-out simplex forecasts for every state point with a known
/// tp-ahead value.
inline PredictionSet loo_predictions(const TimeSeries& series, const EmbeddingParams& params,
                                     TimeIndex exclusion_radius = 0)
{
    const auto manifold = embed(series, params);
    const auto rows = detail::shift_valid_rows(manifold, series, params.tp);
    if (rows.size() < static_cast<std::size_t>(params.e_dim) + 2) {
        throw DataError("series '" + series.name() + "' too short for leave-one-out at E=" +
                        std::to_string(params.e_dim) + ": " + std::to_string(rows.size()) +
                        " usable points, need " + std::to_string(params.e_dim + 2));
    }
    PredictionSet out;
    out.times.reserve(rows.size());
    out.observed.reserve(rows.size());
    out.predicted.reserve(rows.size());
    for (const auto r : rows) {
        const TimeIndex t = manifold.time(r);
        const auto p = detail::project(manifold, manifold.point(r), t, series, params.tp, rows, exclusion_radius,
                                         manifold.dim() + 1);
        out.times.push_back(t);
        out.observed.push_back(series.at_time(t + params.tp));
        out.predicted.push_back(p.value);
    }
    return out;
}

inline SkillStats loo_skill(const TimeSeries& series, const EmbeddingParams& params, TimeIndex exclusion_radius = 0)
{
    const auto p = loo_predictions(series, params, exclusion_radius);
    return skill_stats(p.observed, p.predicted);
}

/// Train/test evaluation: the first `train_fraction` of the series forms
/// the library, state points built entirely from the remainder are
/// predicted. Library futures never reach into the test segment.
inline SkillStats split_skill(const TimeSeries& series, const EmbeddingParams& params, double train_fraction)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DataError("train fraction must lie in (0, 1)");
    }
    const auto manifold = embed(series, params);
    const auto split = series.origin() +
                       static_cast<TimeIndex>(std::floor(train_fraction * static_cast<double>(series.size())));
    std::vector<std::size_t> lib_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t r = 0; r < manifold.size(); ++r) {
        const TimeIndex t = manifold.time(r);
        const TimeIndex ahead = t + params.tp;
        if (!series.contains_time(ahead)) {
            continue;
        }
        if (t < split && ahead < split) {
            lib_rows.push_back(r);
        } else if (t - params.span() >= split) {
            test_rows.push_back(r);
        }
    }
    if (lib_rows.size() < static_cast<std::size_t>(params.e_dim) + 1 || test_rows.size() < 2) {
        throw DataError("split leaves too few library (" + std::to_string(lib_rows.size()) + ") or test (" +
                        std::to_string(test_rows.size()) + ") points");
    }
    std::vector<double> obs;
    std::vector<double> pred;
    for (const auto r : test_rows) {
        const TimeIndex t = manifold.time(r);
        obs.push_back(series.at_time(t + params.tp));
        pred.push_back(detail::project(manifold, manifold.point(r), std::nullopt, series, params.tp, lib_rows, 0,
                                        manifold.dim() + 1).value);
    }
    return skill_stats(obs, pred);
}

struct EDimRow {
    int e_dim = 0;
    bool available = false;
    SkillStats skill;
    std::string note; // why the row is unavailable
};

struct EDimScan {
    std::vector<EDimRow> rows;
    int best_e = 0;

    const EDimRow& best() const
    {
        for (const auto& r : rows) {
            if (r.e_dim == best_e) {
                return r;
            }
        }
        throw DataError("scan has no row for best E");
    }
};

inline std::vector<int> e_range(int lo, int hi)
{
    if (lo < 1 || hi < lo) {
        throw DataError("invalid E range " + std::to_string(lo) + ".." + std::to_string(hi));
    }
    std::vector<int> out;
    for (int e = lo; e <= hi; ++e) {
        out.push_back(e);
    }
    return out;
}

/// Skill for each E (leave-one-out, or a train/test split when
/// `train_fraction` is given); the best E maximises rho, smallest E on ties.
inline EDimScan select_embedding_dimension(const TimeSeries& series, std::span<const int> e_values, int tau = 1,
                                           int tp = 1, std::optional<double> train_fraction = std::nullopt)
{
    if (e_values.empty()) {
        throw DataError("empty E range");
    }
    EDimScan scan;
    bool any = false;
    double best_rho = 0.0;
    for (const int e : e_values) {
        EDimRow row;
        row.e_dim = e;
        try {
            const EmbeddingParams params{e, tau, tp};
            row.skill = train_fraction ? split_skill(series, params, *train_fraction) : loo_skill(series, params);
            row.available = true;
        } catch (const DataError& err) {
            row.note = err.what();
        }
        if (row.available && (!any || row.skill.rho > best_rho || (row.skill.rho == best_rho && e < scan.best_e))) {
            any = true;
            best_rho = row.skill.rho;
            scan.best_e = e;
        }
        scan.rows.push_back(std::move(row));
    }
    if (!any) {
        throw DataError("series '" + series.name() + "' is too short for every scanned E");
    }
    return scan;
}

} // namespace edm
