// Command implementations behind the `edm` executable. Argument parsing
// lives in tools/edm.cpp; everything here takes resolved option structs so
// the commands can be driven directly from tests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "edm/edm.hpp"

namespace edm::cli {

/// Bad flags or flag combinations (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { ok = 0, usage = 2, data = 3, numerical = 4 };

/// Parses "a..b" (either bound may be negative).
inline std::pair<int, int> parse_range(const std::string& text)
{
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const int v = std::stoi(text);
            return {v, v};
        }
        std::size_t used = 0;
        const int lo = std::stoi(text.substr(0, dots), &used);
        if (used != dots) {
            throw UsageError("");
        }
        const auto rest = text.substr(dots + 2);
        const int hi = std::stoi(rest, &used);
        if (used != rest.size()) {
            throw UsageError("");
        }
        if (hi < lo) {
            throw UsageError("range '" + text + "' is empty");
        }
        return {lo, hi};
    } catch (const UsageError& e) {
        if (std::string(e.what()).empty()) {
            throw UsageError("malformed range '" + text + "' (expected a..b)");
        }
        throw;
    } catch (const std::exception&) {
        throw UsageError("malformed range '" + text + "' (expected a..b)");
    }
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw DataError("cannot write '" + path + "'");
    }
}

inline void emit_report(const RunReport& report, const std::string& out_path, std::ostream& stdout_sink)
{
    const auto text = serialize(report);
    if (out_path.empty()) {
        stdout_sink << text;
    } else {
        write_text(out_path, text);
    }
}

/// One row per (direction, L).
inline void write_curve_csv(std::ostream& out, std::span<const CcmCurve> curves)
{
    out << "direction,L,mean_rho,sd_rho,samples_used\n";
    for (const auto& c : curves) {
        for (const auto& r : c.rows) {
            out << c.direction << ',' << r.lib_size << ',' << format_real(r.mean_rho) << ','
                << format_real(r.sd_rho) << ',' << r.samples_used << '\n';
        }
    }
}

/// One row per (direction, lag).
inline void write_profile_csv(std::ostream& out, std::span<const EccmProfile> profiles)
{
    out << "direction,lag,rho,available\n";
    for (const auto& p : profiles) {
        for (const auto& r : p.rows) {
            out << p.direction << ',' << r.lag << ',' << (r.available ? format_real(r.rho) : "") << ','
                << (r.available ? 1 : 0) << '\n';
        }
    }
}

inline void write_network_csv(std::ostream& out, const NetworkReport& net)
{
    out << "cause,effect,E,final_rho,convergent,best_lag\n";
    for (const auto& e : net.edges) {
        out << e.cause << ',' << e.effect << ',' << e.e_dim << ',' << format_real(e.final_rho) << ','
            << (e.convergent ? 1 : 0) << ',' << (e.best_lag ? std::to_string(*e.best_lag) : "") << '\n';
    }
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer)
{
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    writer(out);
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    std::string system;
    std::size_t steps = 0;
    std::size_t burn_in = 0;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    std::string out; // CSV path; empty writes to the sink
};

inline RunReport cmd_generate(const GenerateOptions& opt, std::ostream& csv_sink)
{
    if (opt.steps < 1) {
        throw UsageError("--steps must be >= 1");
    }
    systems::Kind kind;
    try {
        kind = systems::parse_kind(opt.system);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
    const systems::GeneratorSpec spec{kind, opt.steps, opt.params, opt.seed, opt.burn_in};
    std::vector<TimeSeries> series;
    try {
        series = systems::generate(spec);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
    if (opt.out.empty()) {
        write_csv(csv_sink, series);
    } else {
        write_csv_file(opt.out, series);
    }

    RunReport r;
    r.config = {{"system", systems::to_string(kind)},
                {"steps", opt.steps},
                {"burn_in", opt.burn_in},
                {"seed", opt.seed},
                {"params", systems::resolved_params(spec)}};
    std::vector<std::string> names;
    for (const auto& s : series) {
        names.push_back(s.name());
    }
    r.results = {{"file", opt.out}, {"columns", names}, {"rows", opt.steps}};
    return r;
}

// ----------------------------------------------------------------- simplex

struct SimplexOptions {
    std::string in;
    std::string col;
    std::string e_range = "1..10";
    int tau = 1;
    int tp = 1;
    std::optional<double> train_fraction;
};

inline RunReport cmd_simplex(const SimplexOptions& opt)
{
    const auto columns = read_csv_file(opt.in);
    const auto& series = find_column(columns, opt.col);
    const auto [lo, hi] = parse_range(opt.e_range);
    if (lo < 1) {
        throw UsageError("--e-range must start at E >= 1");
    }
    if (opt.tau < 1) {
        throw UsageError("--tau must be >= 1");
    }
    const auto es = e_range(lo, hi);
    const auto scan = select_embedding_dimension(series, es, opt.tau, opt.tp, opt.train_fraction);

    RunReport r;
    r.inputs = {{"file", opt.in}, {"columns", {opt.col}}};
    r.config = {{"e_range", {lo, hi}},
                {"tau", opt.tau},
                {"tp", opt.tp},
                {"mode", opt.train_fraction ? "split" : "leave-one-out"},
                {"neighbors", "E+1"}};
    if (opt.train_fraction) {
        r.config["train_fraction"] = *opt.train_fraction;
    }
    r.results = {{"scan", scan}};
    for (const auto& row : scan.rows) {
        if (row.available && row.skill.degenerate) {
            r.warnings.push_back("E=" + std::to_string(row.e_dim) + ": degenerate correlation (zero variance)");
        }
        if (!row.available) {
            r.warnings.push_back("E=" + std::to_string(row.e_dim) + " unavailable: " + row.note);
        }
    }
    return r;
}

// --------------------------------------------------------------------- ccm

struct CcmOptions {
    std::string in;
    std::string cause;
    std::string effect;
    std::optional<int> e;
    std::string e_range = "1..10"; // used to select E when --e is absent
    int tau = 1;
    int lag = 0;
    std::vector<std::size_t> lib_sizes;
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    bool both_directions = false;
    bool pai = false;
    bool contiguous = false;
    TimeIndex exclusion_radius = 0;
    unsigned threads = 1;
    std::string curve_csv;
};

namespace detail {

inline CcmConfig make_config(int e, int tau, int lag, const std::vector<std::size_t>& lib_sizes,
                             std::size_t samples, std::uint64_t seed, bool contiguous, TimeIndex radius,
                             unsigned threads)
{
    if (tau < 1) {
        throw UsageError("--tau must be >= 1");
    }
    if (samples < 1) {
        throw UsageError("--samples must be >= 1");
    }
    CcmConfig cfg;
    cfg.e_dim = e;
    cfg.tau = tau;
    cfg.lag = lag;
    cfg.lib_sizes = lib_sizes;
    cfg.samples_per_size = samples;
    cfg.seed = seed;
    cfg.sampling = contiguous ? LibrarySampling::contiguous : LibrarySampling::random_subset;
    cfg.exclusion_radius = radius;
    cfg.threads = threads;
    return cfg;
}

inline std::pair<int, nlohmann::json> resolve_e(std::optional<int> e, const std::string& range, const TimeSeries& a,
                                                const TimeSeries& b, int tau)
{
    if (e) {
        if (*e < 1) {
            throw UsageError("--e must be >= 1");
        }
        return {*e, {{"source", "flag"}}};
    }
    const auto [lo, hi] = parse_range(range);
    if (lo < 1) {
        throw UsageError("--e-range must start at E >= 1");
    }
    const auto es = e_range(lo, hi);
    const int ea = select_embedding_dimension(a, es, tau).best_e;
    const int eb = select_embedding_dimension(b, es, tau).best_e;
    return {std::max(ea, eb),
            {{"source", "max best E of the pair (leave-one-out simplex)"},
             {"e_range", {lo, hi}},
             {"best_e", {{a.name(), ea}, {b.name(), eb}}}}};
}

} // namespace detail

inline RunReport cmd_ccm(const CcmOptions& opt)
{
    const auto columns = read_csv_file(opt.in);
    const auto& cause = find_column(columns, opt.cause);
    const auto& effect = find_column(columns, opt.effect);
    const auto [e, e_info] = detail::resolve_e(opt.e, opt.e_range, cause, effect, opt.tau);
    auto cfg = detail::make_config(e, opt.tau, opt.lag, opt.lib_sizes, opt.samples, opt.seed, opt.contiguous,
                                   opt.exclusion_radius, opt.threads);

    std::vector<CcmCurve> curves;
    auto run = [&](const TimeSeries& c, const TimeSeries& f) {
        curves.push_back(opt.pai ? pai_curve(c, f, cfg) : ccm_curve(c, f, cfg));
    };
    run(cause, effect);
    if (opt.both_directions) {
        run(effect, cause);
    }

    RunReport r;
    r.inputs = {{"file", opt.in}, {"columns", {opt.cause, opt.effect}}};
    r.config = config_json(cfg);
    r.config["E_selection"] = e_info;
    // Grid actually used, even when defaulted.
    r.config["lib_sizes"] = nlohmann::json::array();
    for (const auto& row : curves.front().rows) {
        r.config["lib_sizes"].push_back(row.lib_size);
    }
    r.config["both_directions"] = opt.both_directions;
    r.config["pai"] = opt.pai;
    r.results = {{"curves", curves}};
    for (const auto& c : curves) {
        for (auto& w : curve_warnings(c)) {
            r.warnings.push_back(std::move(w));
        }
    }
    if (!opt.curve_csv.empty()) {
        write_file(opt.curve_csv, [&](std::ostream& o) { write_curve_csv(o, curves); });
    }
    return r;
}

// -------------------------------------------------------------------- eccm

struct EccmOptions {
    std::string in;
    std::string cause;
    std::string effect;
    std::string lags = "-8..8";
    std::optional<int> e;
    std::string e_range = "1..10";
    int tau = 1;
    bool both_directions = false;
    TimeIndex exclusion_radius = 0;
    std::string profile_csv;
};

inline RunReport cmd_eccm(const EccmOptions& opt)
{
    const auto [lo, hi] = parse_range(opt.lags);
    const auto columns = read_csv_file(opt.in);
    const auto& cause = find_column(columns, opt.cause);
    const auto& effect = find_column(columns, opt.effect);
    const auto [e, e_info] = detail::resolve_e(opt.e, opt.e_range, cause, effect, opt.tau);
    auto cfg = detail::make_config(e, opt.tau, 0, {}, 1, 0, false, opt.exclusion_radius, 1);
    const auto lags = lag_range(lo, hi);

    std::vector<EccmProfile> profiles{eccm_profile(cause, effect, cfg, lags)};
    if (opt.both_directions) {
        profiles.push_back(eccm_profile(effect, cause, cfg, lags));
    }

    RunReport r;
    r.inputs = {{"file", opt.in}, {"columns", {opt.cause, opt.effect}}};
    r.config = {{"E", e},
                {"E_selection", e_info},
                {"tau", opt.tau},
                {"lags", {lo, hi}},
                {"library", "full"},
                {"exclusion_radius", opt.exclusion_radius},
                {"both_directions", opt.both_directions}};
    r.results = {{"profiles", profiles}};
    for (const auto& p : profiles) {
        for (const auto& row : p.rows) {
            if (!row.available) {
                r.warnings.push_back(p.direction + ": lag " + std::to_string(row.lag) + " unavailable");
            }
        }
    }
    if (!opt.profile_csv.empty()) {
        write_file(opt.profile_csv, [&](std::ostream& o) { write_profile_csv(o, profiles); });
    }
    return r;
}

// ----------------------------------------------------------------- network

struct NetworkCmdOptions {
    std::string in;
    std::vector<std::string> cols; // empty: every column
    std::optional<int> e;
    std::string e_range = "1..10";
    int tau = 1;
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    bool eccm = false;
    std::string lags = "-8..8";
    unsigned threads = 1;
    std::string table_csv;
};

struct NetworkRun {
    RunReport report;
    NetworkReport table;
};

inline NetworkRun network_report(std::span<const TimeSeries> series, const NetworkOptions& opts,
                                 const nlohmann::json& inputs)
{
    const auto result = causal_network(series, opts);
    RunReport r;
    r.inputs = inputs;
    r.config = config_json(opts.ccm);
    r.config["E_selection"] = opts.select_e ? nlohmann::json("max best E of each pair (leave-one-out simplex)")
                                            : nlohmann::json("fixed");
    if (opts.select_e) {
        r.config["E"] = nullptr;
        r.config["e_range"] = {opts.e_values.front(), opts.e_values.back()};
    }
    r.config["eccm"] = opts.run_eccm;
    if (opts.run_eccm) {
        r.config["lags"] = {opts.lags.front(), opts.lags.back()};
    }
    r.results = {{"network", result.report}, {"curves", result.curves}};
    if (opts.run_eccm) {
        r.results["profiles"] = result.profiles;
    }
    r.warnings = result.report.warnings;
    return {std::move(r), result.report};
}

inline RunReport cmd_network(const NetworkCmdOptions& opt)
{
    const auto columns = read_csv_file(opt.in);
    std::vector<TimeSeries> chosen;
    if (opt.cols.empty()) {
        chosen = columns;
    } else {
        for (const auto& c : opt.cols) {
            chosen.push_back(find_column(columns, c));
        }
    }
    NetworkOptions no;
    no.ccm = detail::make_config(opt.e.value_or(2), opt.tau, 0, {}, opt.samples, opt.seed, false, 0, opt.threads);
    no.select_e = !opt.e.has_value();
    if (opt.e && *opt.e < 1) {
        throw UsageError("--e must be >= 1");
    }
    const auto [elo, ehi] = parse_range(opt.e_range);
    no.e_values = e_range(elo, ehi);
    no.run_eccm = opt.eccm;
    const auto [llo, lhi] = parse_range(opt.lags);
    no.lags = lag_range(llo, lhi);

    std::vector<std::string> names;
    for (const auto& s : chosen) {
        names.push_back(s.name());
    }
    auto run = network_report(chosen, no, {{"file", opt.in}, {"columns", names}});
    if (!opt.table_csv.empty()) {
        write_file(opt.table_csv, [&](std::ostream& o) { write_network_csv(o, run.table); });
    }
    return std::move(run.report);
}

// -------------------------------------------------------------------- demo

struct DemoOptions {
    std::string figure;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::size_t samples = 100;
    unsigned threads = 1;
};

/// Mirage-correlation windows reported by `demo fig3`: 0-based, inclusive.
struct MirageWindow {
    std::size_t start;
    std::size_t end;
    const char* expectation;
};

inline constexpr MirageWindow mirage_windows[] = {
    {60, 70, "r > 0.7"},
    {260, 270, "|r| < 0.15"},
    {840, 850, "r < -0.8"},
};

inline bool mirage_band_holds(std::size_t index, double r)
{
    switch (index) {
    case 0: return r > 0.7;
    case 1: return std::abs(r) < 0.15;
    default: return r < -0.8;
    }
}

/// E used by the fig8 demo. Leave-one-out selection on the unidirectional
/// pair picks E=1 (both series are dominated by one-dimensional logistic
/// dynamics), which leaves no room for the cross-variable signal, so the
/// demo uses the two-variable system dimension.
inline constexpr int unidirectional_demo_e = 2;

inline RunReport cmd_demo(const DemoOptions& opt)
{
    namespace fs = std::filesystem;
    const fs::path dir(opt.out_dir);
    if (!fs::is_directory(dir)) {
        throw DataError("output directory '" + opt.out_dir + "' does not exist");
    }
    RunReport r;
    r.config = {{"figure", opt.figure}, {"seed", opt.seed}, {"samples_per_size", opt.samples}};

    auto two_way = [&](const std::vector<TimeSeries>& xy, int e, const char* csv_name, nlohmann::json e_info) {
        auto cfg = detail::make_config(e, 1, 0, {}, opt.samples, opt.seed, false, 0, opt.threads);
        std::vector<CcmCurve> curves{ccm_curve(xy[0], xy[1], cfg), ccm_curve(xy[1], xy[0], cfg)};
        const auto path = (dir / csv_name).string();
        write_file(path, [&](std::ostream& o) { write_curve_csv(o, curves); });
        r.config.update(config_json(cfg));
        r.config["E_selection"] = std::move(e_info);
        r.results = {{"csv", path}, {"curves", curves}};
        for (const auto& c : curves) {
            for (auto& w : curve_warnings(c)) {
                r.warnings.push_back(std::move(w));
            }
        }
    };

    if (opt.figure == "fig3") {
        const auto xy = systems::coupled_logistic(1000);
        const auto path = (dir / "fig3.csv").string();
        write_file(path, [&](std::ostream& o) {
            o << "t,X,Y\n";
            for (std::size_t t = 0; t < xy[0].size(); ++t) {
                o << t << ',' << format_real(xy[0][t]) << ',' << format_real(xy[1][t]) << '\n';
            }
        });
        r.config.update({{"system", "coupled-logistic"},
                         {"steps", 1000},
                         {"params", systems::resolved_params({systems::Kind::coupled_logistic, 1000, {}, 0, 0})},
                         {"window_indexing", "0-based, inclusive"}});
        nlohmann::json windows = nlohmann::json::array();
        for (std::size_t i = 0; i < std::size(mirage_windows); ++i) {
            const auto& w = mirage_windows[i];
            const double rho = windowed_pearson(xy[0], xy[1], w.start, w.end);
            windows.push_back({{"window", {w.start, w.end}},
                               {"r", rho},
                               {"expected", w.expectation},
                               {"within_band", mirage_band_holds(i, rho)}});
        }
        r.results = {{"csv", path}, {"windows", windows}};
    } else if (opt.figure == "fig7") {
        const auto xy = systems::coupled_logistic(1000);
        const auto es = e_range(1, 10);
        const int ex = select_embedding_dimension(xy[0], es).best_e;
        const int ey = select_embedding_dimension(xy[1], es).best_e;
        r.config["system"] = "coupled-logistic";
        r.config["steps"] = 1000;
        two_way(xy, std::max(ex, ey), "fig7.csv",
                {{"source", "max best E of the pair (leave-one-out simplex)"},
                 {"e_range", {1, 10}},
                 {"best_e", {{"X", ex}, {"Y", ey}}}});
    } else if (opt.figure == "fig8") {
        const auto xy = systems::unidirectional_logistic(1000);
        r.config["system"] = "unidirectional-logistic";
        r.config["steps"] = 1000;
        two_way(xy, unidirectional_demo_e, "fig8.csv", {{"source", "pinned two-variable system dimension"}});
    } else if (opt.figure == "fork") {
        const auto zab = systems::moran_fork(1000);
        NetworkOptions no;
        no.ccm = detail::make_config(2, 1, 0, {}, opt.samples, opt.seed, false, 0, opt.threads);
        no.select_e = true;
        auto run = network_report(zab, no, {{"system", "moran-fork"}, {"steps", 1000}});
        const auto path = (dir / "fork.csv").string();
        write_file(path, [&](std::ostream& o) { write_network_csv(o, run.table); });
        auto& net = run.report;
        net.config.update(r.config);
        net.config["system"] = "moran-fork";
        net.config["params"] = systems::resolved_params({systems::Kind::moran_fork, 1000, {}, 0, 0});
        net.results["csv"] = path;
        return std::move(run.report);
    } else {
        throw UsageError("unknown demo '" + opt.figure + "' (expected fig3, fig7, fig8, fork)");
    }
    return r;
}

} // namespace edm::cli
