// Convergent cross mapping: estimate a putative cause from the shadow
// manifold of its effect, sweep the library size for convergence, scan
// prediction lags (extended CCM) and build pairwise causal tables.
//
// Direction convention throughout: testing the claim "cause => effect"
// embeds the EFFECT series and estimates the CAUSE from it.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "edm/core.hpp"
#include "edm/embedding.hpp"
#include "edm/forecast.hpp"

namespace edm {

enum class LibrarySampling {
    random_subset, // uniform draw of L points without replacement
    contiguous,    // L consecutive admissible points from a random start
};

inline const char* to_string(LibrarySampling s)
{
    return s == LibrarySampling::contiguous ? "contiguous" : "random";
}

/// Thresholds of the convergence decision. A curve is convergent when
/// rho rises by more than min_delta from the smallest to the largest
/// library, Kendall's tau of (L, rho) exceeds min_trend, and the final rho
/// exceeds min_final_rho.
struct ConvergenceCriteria {
    double min_delta = 0.10;
    double min_trend = 0.5;
    double min_final_rho = 0.2;

    friend bool operator==(const ConvergenceCriteria&, const ConvergenceCriteria&) = default;
};

struct CcmConfig {
    int e_dim = 2;
    int tau = 1;
    int lag = 0;
    std::vector<std::size_t> lib_sizes; // empty: default_lib_sizes()
    std::size_t samples_per_size = 100;
    std::uint64_t seed = 0;
    LibrarySampling sampling = LibrarySampling::random_subset;
    TimeIndex exclusion_radius = 0;
    ConvergenceCriteria criteria;
    unsigned threads = 1; // worker threads for library draws; results do not depend on it

    EmbeddingParams embedding() const { return EmbeddingParams{e_dim, tau, lag}; }
};

namespace detail {

inline std::vector<std::size_t> rows_for_times(const ShadowManifold& m, std::span<const TimeIndex> times)
{
    std::vector<std::size_t> rows;
    rows.reserve(times.size());
    for (const auto t : times) {
        const auto r = m.row_of(t);
        if (!r) {
            throw DataError("library time " + std::to_string(t) + " is not a state point of the manifold");
        }
        rows.push_back(*r);
    }
    return rows;
}

// Unbiased integer in [0, n) from a 64-bit engine by rejection. Avoids the
// implementation-defined std::uniform_int_distribution so draws match
// across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n)
{
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t r = gen();
        if (r >= threshold) {
            return r % n;
        }
    }
}

// Child stream for one (library size, draw) pair.
inline std::mt19937_64 child_stream(std::uint64_t seed, std::size_t size_index, std::size_t draw)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(size_index), static_cast<std::uint32_t>(draw)};
    return std::mt19937_64(seq);
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        });
    }
}

} // namespace detail

/// Estimates `target(t + shift)` from the neighbours of each state point of
/// a manifold. Shared by plain cross mapping and the joint (PAI) variant.
class CrossMapper {
public:
    CrossMapper(ShadowManifold manifold, TimeSeries target, TimeIndex shift, std::size_t neighbors,
                TimeIndex exclusion_radius = 0)
        : manifold_(std::move(manifold)), target_(std::move(target)), shift_(shift), neighbors_(neighbors),
          exclusion_radius_(exclusion_radius)
    {
        admissible_ = detail::shift_valid_rows(manifold_, target_, shift_);
        if (admissible_.empty()) {
            throw DataError("no valid targets after shifting by lag " + std::to_string(shift_));
        }
    }

    const ShadowManifold& manifold() const noexcept { return manifold_; }
    /// Rows usable both as targets and as library points.
    std::span<const std::size_t> admissible() const noexcept { return admissible_; }
    std::size_t min_library_size() const noexcept { return neighbors_ + 1; }

    PredictionSet predictions(std::span<const std::size_t> library_rows) const
    {
        check_library(library_rows);
        PredictionSet out;
        out.times.reserve(admissible_.size());
        out.observed.reserve(admissible_.size());
        out.predicted.reserve(admissible_.size());
        for (const auto r : admissible_) {
            const TimeIndex t = manifold_.time(r);
            const auto p = detail::project(manifold_, manifold_.point(r), t, target_, shift_, library_rows,
                                           exclusion_radius_, neighbors_);
            out.times.push_back(t);
            out.observed.push_back(target_.at_time(t + shift_));
            out.predicted.push_back(p.value);
        }
        return out;
    }

    SkillStats skill(std::span<const std::size_t> library_rows) const
    {
        const auto p = predictions(library_rows);
        if (p.observed.size() < 2) {
            throw DataError("fewer than 2 valid cross-map targets");
        }
        return skill_stats(p.observed, p.predicted);
    }

    SkillStats full_skill() const { return skill(admissible_); }

private:
    void check_library(std::span<const std::size_t> rows) const
    {
        if (rows.size() < min_library_size()) {
            throw DataError("library of " + std::to_string(rows.size()) + " points is too small; need at least " +
                            std::to_string(min_library_size()));
        }
        for (const auto r : rows) {
            if (r >= manifold_.size() || !target_.contains_time(manifold_.time(r) + shift_)) {
                throw DataError("library row " + std::to_string(r) + " has no valid shifted target");
            }
        }
    }

    ShadowManifold manifold_;
    TimeSeries target_;
    TimeIndex shift_ = 0;
    std::size_t neighbors_ = 1;
    TimeIndex exclusion_radius_ = 0;
    std::vector<std::size_t> admissible_;
};

namespace detail {

inline void check_equal_length(const TimeSeries& a, const TimeSeries& b)
{
    if (a.size() != b.size() || a.origin() != b.origin()) {
        throw DataError("series '" + a.name() + "' and '" + b.name() + "' must share length and time axis");
    }
}

inline CrossMapper make_cross_mapper(const TimeSeries& cause, const TimeSeries& effect, const CcmConfig& config)
{
    check_equal_length(cause, effect);
    const EmbeddingParams params{config.e_dim, config.tau, 1};
    return CrossMapper(embed(effect, params), cause, config.lag, static_cast<std::size_t>(config.e_dim) + 1,
                       config.exclusion_radius);
}

// Joint manifold: E lags of x followed by the contemporaneous y.
inline ShadowManifold joint_embedding(const TimeSeries& x, const TimeSeries& y, const EmbeddingParams& params)
{
    check_equal_length(x, y);
    const auto base = embed(x, params);
    const std::size_t dim = base.dim() + 1;
    std::vector<double> coords;
    coords.reserve(base.size() * dim);
    std::vector<TimeIndex> times(base.times().begin(), base.times().end());
    for (std::size_t r = 0; r < base.size(); ++r) {
        const auto p = base.point(r);
        coords.insert(coords.end(), p.begin(), p.end());
        coords.push_back(y.at_time(base.time(r)));
    }
    return ShadowManifold(dim, std::move(coords), std::move(times), params, x.name() + "+" + y.name());
}

} // namespace detail

/// Skill of estimating `cause` from the shadow manifold of `effect`, i.e.
/// evidence for the claim cause => effect. `library_times` defaults to every
/// admissible state point.
inline SkillStats cross_map_skill(const TimeSeries& cause, const TimeSeries& effect, const CcmConfig& config,
                                  std::optional<std::span<const TimeIndex>> library_times = std::nullopt)
{
    const auto mapper = detail::make_cross_mapper(cause, effect, config);
    if (!library_times) {
        return mapper.full_skill();
    }
    const auto rows = detail::rows_for_times(mapper.manifold(), *library_times);
    return mapper.skill(rows);
}

/// Joint-embedding cross map: state points (x_t, ..., x_{t-(E-1)tau}, y_t)
/// estimate x(t + lag) with E+1 neighbours.
inline SkillStats pai_cross_map(const TimeSeries& x, const TimeSeries& y, const CcmConfig& config,
                                std::optional<std::span<const TimeIndex>> library_times = std::nullopt)
{
    const EmbeddingParams params{config.e_dim, config.tau, 1};
    const CrossMapper mapper(detail::joint_embedding(x, y, params), x, config.lag,
                             static_cast<std::size_t>(config.e_dim) + 1, config.exclusion_radius);
    if (!library_times) {
        return mapper.full_skill();
    }
    return mapper.skill(detail::rows_for_times(mapper.manifold(), *library_times));
}

/// Geometric grid of `count` library sizes from E+2 to `max_size`,
/// rounded and deduplicated.
inline std::vector<std::size_t> default_lib_sizes(int e_dim, std::size_t max_size, std::size_t count = 8)
{
    const auto lo = static_cast<std::size_t>(e_dim) + 2;
    if (max_size < lo) {
        throw DataError("only " + std::to_string(max_size) + " admissible points; CCM needs at least " +
                        std::to_string(lo));
    }
    std::vector<std::size_t> out{lo};
    if (count >= 2) {
        const double ratio = std::pow(static_cast<double>(max_size) / static_cast<double>(lo),
                                      1.0 / static_cast<double>(count - 1));
        for (std::size_t i = 1; i < count; ++i) {
            const auto v = i + 1 == count ? max_size
                                          : static_cast<std::size_t>(std::llround(static_cast<double>(lo) *
                                                                                  std::pow(ratio, static_cast<double>(i))));
            if (v > out.back()) {
                out.push_back(v);
            }
        }
    }
    return out;
}

/// Kendall's tau-b between two equally long sequences.
inline double kendall_tau(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2) {
        throw DataError("kendall_tau: need two equally long sequences of length >= 2");
    }
    long long concordant = 0;
    long long discordant = 0;
    long long ties_a = 0;
    long long ties_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double da = a[j] - a[i];
            const double db = b[j] - b[i];
            if (da == 0.0 && db == 0.0) {
                continue;
            }
            if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if ((da > 0.0) == (db > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double denom = std::sqrt(static_cast<double>(concordant + discordant + ties_a) *
                                   static_cast<double>(concordant + discordant + ties_b));
    return denom > 0.0 ? static_cast<double>(concordant - discordant) / denom : 0.0;
}

struct CcmRow {
    std::size_t lib_size = 0;
    double mean_rho = 0.0;
    double sd_rho = 0.0;
    std::size_t samples_used = 0;
    std::size_t degenerate_draws = 0;

    friend bool operator==(const CcmRow&, const CcmRow&) = default;
};

struct ConvergenceDecision {
    bool convergent = false;
    double final_rho = 0.0;
    double delta = 0.0;
    double trend = 0.0; // Kendall's tau of (L, mean rho)

    friend bool operator==(const ConvergenceDecision&, const ConvergenceDecision&) = default;
};

inline ConvergenceDecision convergence_test(std::span<const CcmRow> rows, const ConvergenceCriteria& criteria = {})
{
    if (rows.size() < 3) {
        throw DataError("convergence test needs at least 3 library sizes, got " + std::to_string(rows.size()));
    }
    std::vector<double> sizes;
    std::vector<double> rhos;
    for (const auto& r : rows) {
        sizes.push_back(static_cast<double>(r.lib_size));
        rhos.push_back(r.mean_rho);
    }
    ConvergenceDecision d;
    d.final_rho = rows.back().mean_rho;
    d.delta = rows.back().mean_rho - rows.front().mean_rho;
    d.trend = kendall_tau(sizes, rhos);
    d.convergent = d.delta > criteria.min_delta && d.trend > criteria.min_trend && d.final_rho > criteria.min_final_rho;
    return d;
}

inline std::string direction_label(const TimeSeries& cause, const TimeSeries& effect)
{
    return cause.name() + "=>" + effect.name();
}

struct CcmCurve {
    std::string cause;
    std::string effect;
    std::string direction; // "cause=>effect": cause estimated from the effect's manifold
    int e_dim = 0;
    int tau = 1;
    int lag = 0;
    bool pai = false;
    std::vector<CcmRow> rows;
    ConvergenceDecision decision;

    bool convergent() const noexcept { return decision.convergent; }
    double final_rho() const noexcept { return decision.final_rho; }
};

namespace detail {

inline CcmCurve sweep(const CrossMapper& mapper, const CcmConfig& config)
{
    const auto admissible = mapper.admissible();
    const std::size_t n = admissible.size();
    auto sizes = config.lib_sizes.empty() ? default_lib_sizes(config.e_dim, n) : config.lib_sizes;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0 && sizes[i] <= sizes[i - 1]) {
            throw DataError("library sizes must be strictly increasing");
        }
        if (sizes[i] < mapper.min_library_size()) {
            throw DataError("library size " + std::to_string(sizes[i]) + " below minimum E+2=" +
                            std::to_string(mapper.min_library_size()));
        }
        if (sizes[i] > n) {
            throw DataError("library size " + std::to_string(sizes[i]) + " exceeds the " + std::to_string(n) +
                            " admissible points");
        }
    }
    if (config.samples_per_size == 0) {
        throw DataError("samples per library size must be >= 1");
    }

    CcmCurve curve;
    curve.e_dim = config.e_dim;
    curve.tau = config.tau;
    curve.lag = config.lag;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t lib = sizes[si];
        CcmRow row;
        row.lib_size = lib;
        if (lib == n) {
            const auto s = mapper.full_skill();
            row.mean_rho = s.rho;
            row.samples_used = 1;
            row.degenerate_draws = s.degenerate ? 1 : 0;
            curve.rows.push_back(row);
            continue;
        }

        std::vector<SkillStats> draws(config.samples_per_size);
        parallel_for(draws.size(), config.threads, [&](std::size_t d) {
            auto gen = child_stream(config.seed, si, d);
            std::vector<std::size_t> rows;
            if (config.sampling == LibrarySampling::contiguous) {
                const auto start = static_cast<std::size_t>(uniform_below(gen, n - lib + 1));
                rows.assign(admissible.begin() + static_cast<std::ptrdiff_t>(start),
                            admissible.begin() + static_cast<std::ptrdiff_t>(start + lib));
            } else {
                rows.assign(admissible.begin(), admissible.end());
                for (std::size_t i = 0; i < lib; ++i) {
                    const auto j = i + static_cast<std::size_t>(uniform_below(gen, n - i));
                    std::swap(rows[i], rows[j]);
                }
                rows.resize(lib);
                std::sort(rows.begin(), rows.end());
            }
            draws[d] = mapper.skill(rows);
        });

        double sum = 0.0;
        for (const auto& s : draws) {
            sum += s.rho;
            row.degenerate_draws += s.degenerate ? 1 : 0;
        }
        row.samples_used = draws.size();
        row.mean_rho = sum / static_cast<double>(draws.size());
        if (draws.size() > 1) {
            double ss = 0.0;
            for (const auto& s : draws) {
                ss += (s.rho - row.mean_rho) * (s.rho - row.mean_rho);
            }
            row.sd_rho = std::sqrt(ss / static_cast<double>(draws.size() - 1));
        }
        curve.rows.push_back(row);
    }
    if (curve.rows.size() >= 3) {
        curve.decision = convergence_test(curve.rows, config.criteria);
    } else {
        curve.decision.final_rho = curve.rows.back().mean_rho;
        curve.decision.delta = curve.rows.back().mean_rho - curve.rows.front().mean_rho;
    }
    return curve;
}

} // namespace detail

/// Cross-map skill against library size for the claim cause => effect.
/// Sizes below the full library average `samples_per_size` seeded draws;
/// the full library is evaluated once. With fewer than 3 sizes the curve
/// is reported but never flagged convergent.
inline CcmCurve ccm_curve(const TimeSeries& cause, const TimeSeries& effect, const CcmConfig& config)
{
    auto curve = detail::sweep(detail::make_cross_mapper(cause, effect, config), config);
    curve.cause = cause.name();
    curve.effect = effect.name();
    curve.direction = direction_label(cause, effect);
    return curve;
}

/// ccm_curve over the joint (x lags + y) manifold, estimating x.
inline CcmCurve pai_curve(const TimeSeries& x, const TimeSeries& y, const CcmConfig& config)
{
    const EmbeddingParams params{config.e_dim, config.tau, 1};
    const CrossMapper mapper(detail::joint_embedding(x, y, params), x, config.lag,
                             static_cast<std::size_t>(config.e_dim) + 1, config.exclusion_radius);
    auto curve = detail::sweep(mapper, config);
    curve.cause = x.name();
    curve.effect = y.name();
    curve.direction = x.name() + "|" + x.name() + "+" + y.name();
    curve.pai = true;
    return curve;
}

struct EccmRow {
    int lag = 0;
    bool available = false;
    double rho = 0.0;
    std::size_t n_pairs = 0;
    std::string note;
};

struct EccmProfile {
    std::string cause;
    std::string effect;
    std::string direction;
    int e_dim = 0;
    std::vector<EccmRow> rows;
    int best_lag = 0;
    double best_rho = 0.0;
};

inline std::vector<int> lag_range(int lo, int hi)
{
    std::vector<int> out;
    for (int l = lo; l <= hi; ++l) {
        out.push_back(l);
    }
    return out;
}

/// Full-library cross-map skill for each lag. The best lag maximises rho;
/// ties prefer the smallest |lag|, then the negative one.
inline EccmProfile eccm_profile(const TimeSeries& cause, const TimeSeries& effect, const CcmConfig& config,
                                std::span<const int> lags)
{
    if (lags.empty()) {
        throw DataError("empty lag range");
    }
    detail::check_equal_length(cause, effect);
    EccmProfile prof;
    prof.cause = cause.name();
    prof.effect = effect.name();
    prof.direction = direction_label(cause, effect);
    prof.e_dim = config.e_dim;

    const auto manifold = embed(effect, EmbeddingParams{config.e_dim, config.tau, 1});
    bool any = false;
    auto better = [](int lag, double rho, int best_lag, double best_rho) {
        if (rho != best_rho) {
            return rho > best_rho;
        }
        if (std::abs(lag) != std::abs(best_lag)) {
            return std::abs(lag) < std::abs(best_lag);
        }
        return lag < best_lag;
    };
    for (const int lag : lags) {
        EccmRow row;
        row.lag = lag;
        try {
            const CrossMapper mapper(manifold, cause, lag, static_cast<std::size_t>(config.e_dim) + 1,
                                     config.exclusion_radius);
            const auto s = mapper.full_skill();
            row.rho = s.rho;
            row.n_pairs = s.n_pairs;
            row.available = true;
        } catch (const DataError& e) {
            row.note = e.what();
        }
        if (row.available && (!any || better(lag, row.rho, prof.best_lag, prof.best_rho))) {
            any = true;
            prof.best_lag = lag;
            prof.best_rho = row.rho;
        }
        prof.rows.push_back(std::move(row));
    }
    if (!any) {
        throw DataError("no lag in the range leaves valid cross-map targets");
    }
    return prof;
}

/// Embedding dimension for a pair: the larger of the two series' best E,
/// so both shadow manifolds have room for the shared attractor.
inline int select_pair_dimension(const TimeSeries& a, const TimeSeries& b, std::span<const int> e_values, int tau = 1)
{
    return std::max(select_embedding_dimension(a, e_values, tau).best_e,
                    select_embedding_dimension(b, e_values, tau).best_e);
}

struct CausalEdge {
    std::string cause;
    std::string effect;
    int e_dim = 0;
    double final_rho = 0.0;
    bool convergent = false;
    std::optional<int> best_lag;
};

struct NetworkReport {
    std::vector<CausalEdge> edges;
    std::vector<std::string> warnings;
};

/// Edge table from already computed curves (and optional lag profiles,
/// matched by direction). Only tested edges appear; nothing is inferred
/// transitively.
inline NetworkReport causal_summary(std::span<const CcmCurve> curves, std::span<const EccmProfile> profiles = {})
{
    NetworkReport rep;
    for (const auto& c : curves) {
        CausalEdge e;
        e.cause = c.cause;
        e.effect = c.effect;
        e.e_dim = c.e_dim;
        e.final_rho = c.final_rho();
        e.convergent = c.convergent();
        for (const auto& p : profiles) {
            if (p.cause == c.cause && p.effect == c.effect) {
                e.best_lag = p.best_lag;
            }
        }
        for (const auto& r : c.rows) {
            if (r.degenerate_draws > 0) {
                rep.warnings.push_back(c.direction + ": " + std::to_string(r.degenerate_draws) +
                                       " degenerate correlation(s) at L=" + std::to_string(r.lib_size));
            }
        }
        rep.edges.push_back(std::move(e));
    }
    // Both directions convergent with no negative optimal lag on either side
    // is the signature of synchronisation rather than mutual coupling.
    for (std::size_t i = 0; i < rep.edges.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.edges.size(); ++j) {
            const auto& a = rep.edges[i];
            const auto& b = rep.edges[j];
            if (a.cause == b.effect && a.effect == b.cause && a.convergent && b.convergent && a.best_lag &&
                b.best_lag && *a.best_lag >= 0 && *b.best_lag >= 0) {
                rep.warnings.push_back("possible synchronization between " + a.cause + " and " + a.effect +
                                       ": both directions converge and neither optimal lag is negative");
            }
        }
    }
    return rep;
}

struct NetworkOptions {
    CcmConfig ccm;
    bool select_e = true;            // per-pair E via select_pair_dimension; otherwise ccm.e_dim
    std::vector<int> e_values = e_range(1, 10);
    bool run_eccm = false;
    std::vector<int> lags = lag_range(-8, 8);
};

struct NetworkResult {
    std::vector<CcmCurve> curves;
    std::vector<EccmProfile> profiles;
    NetworkReport report;
};

/// All ordered pairs of `series`, both directions, summarised.
inline NetworkResult causal_network(std::span<const TimeSeries> series, const NetworkOptions& options)
{
    NetworkResult out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = 0; j < series.size(); ++j) {
            if (i == j) {
                continue;
            }
            auto cfg = options.ccm;
            if (options.select_e) {
                cfg.e_dim = select_pair_dimension(series[i], series[j], options.e_values, cfg.tau);
            }
            out.curves.push_back(ccm_curve(series[i], series[j], cfg));
            if (options.run_eccm) {
                out.profiles.push_back(eccm_profile(series[i], series[j], cfg, options.lags));
            }
        }
    }
    out.report = causal_summary(out.curves, out.profiles);
    return out;
}

} // namespace edm
