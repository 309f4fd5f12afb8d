// Deterministic generators for the synthetic systems used to exercise the
// causality machinery: coupled logistic maps, a delayed driver, a shared
// driver fork and the Lorenz flow.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "edm/core.hpp"

namespace edm::systems {

struct CoupledLogisticParams {
    double x0 = 0.2;
    double y0 = 0.5;
    double rx = 3.8;
    double ry = 3.8;
    double bxy = 0.02; // weight of X_t*Y_t in the X update
    double byx = 0.08; // weight of Y_t*X_t in the Y update
};

struct LaggedLogisticParams {
    int delay = 2;         // X_{t-delay} enters Y_t
    double coupling = 0.1;
    double x0 = 0.2;
    double y0 = 0.5;
    double rx = 3.8;
    double ry = 3.8;
};

struct MoranForkParams {
    double gamma = 0.1;
    double z0 = 0.4;
    double a0 = 0.2;
    double b0 = 0.6;
    double rz = 3.8;
    double ra = 3.7;
    double rb = 3.9;
};

struct LorenzParams {
    double dt = 0.01;
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    std::array<double, 3> initial{1.0, 1.0, 1.0};
};

namespace detail {

inline void check_steps(std::size_t steps)
{
    if (steps < 1) {
        throw DataError("steps must be >= 1");
    }
}

inline void check_unit(double v, std::string_view name, std::size_t step)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw NumericalError(std::string(name) + " left [0,1] at step " + std::to_string(step) + " (value " +
                             std::to_string(v) + ")");
    }
}

inline std::vector<double> drop(std::vector<double> v, std::size_t burn_in)
{
    v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(burn_in));
    return v;
}

} // namespace detail

/// X_{t+1} = rx X_t (1 - X_t) - bxy X_t Y_t
/// Y_{t+1} = ry Y_t (1 - Y_t) - byx Y_t X_t
inline std::vector<TimeSeries> coupled_logistic(std::size_t steps, const CoupledLogisticParams& p = {},
                                                std::size_t burn_in = 0)
{
    detail::check_steps(steps);
    const std::size_t n = steps + burn_in;
    std::vector<double> x(n);
    std::vector<double> y(n);
    x[0] = p.x0;
    y[0] = p.y0;
    detail::check_unit(x[0], "X", 0);
    detail::check_unit(y[0], "Y", 0);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        x[t + 1] = p.rx * x[t] * (1 - x[t]) - p.bxy * x[t] * y[t];
        y[t + 1] = p.ry * y[t] * (1 - y[t]) - p.byx * y[t] * x[t];
        detail::check_unit(x[t + 1], "X", t + 1);
        detail::check_unit(y[t + 1], "Y", t + 1);
    }
    return {TimeSeries("X", detail::drop(std::move(x), burn_in)), TimeSeries("Y", detail::drop(std::move(y), burn_in))};
}

/// The coupled pair with the X => Y edge removed:
/// X_{t+1} = rx X_t (1 - X_t) - bxy X_t Y_t
/// Y_{t+1} = ry Y_t (1 - Y_t) - byx Y_t
inline std::vector<TimeSeries> unidirectional_logistic(std::size_t steps, const CoupledLogisticParams& p = {},
                                                       std::size_t burn_in = 0)
{
    detail::check_steps(steps);
    const std::size_t n = steps + burn_in;
    std::vector<double> x(n);
    std::vector<double> y(n);
    x[0] = p.x0;
    y[0] = p.y0;
    detail::check_unit(x[0], "X", 0);
    detail::check_unit(y[0], "Y", 0);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        x[t + 1] = p.rx * x[t] * (1 - x[t]) - p.bxy * x[t] * y[t];
        y[t + 1] = p.ry * y[t] * (1 - y[t]) - p.byx * y[t];
        detail::check_unit(x[t + 1], "X", t + 1);
        detail::check_unit(y[t + 1], "Y", t + 1);
    }
    return {TimeSeries("X", detail::drop(std::move(x), burn_in)), TimeSeries("Y", detail::drop(std::move(y), burn_in))};
}

/// Autonomous X driving Y with a delay:
/// X_{t+1} = rx X_t (1 - X_t)
/// Y_{t+1} = ry Y_t (1 - Y_t) - c Y_t X_{t+1-delay}
/// X before time 0 is taken as x0. delay = 1 is the plain one-step drive.
inline std::vector<TimeSeries> lagged_logistic(std::size_t steps, const LaggedLogisticParams& p = {},
                                               std::size_t burn_in = 0)
{
    detail::check_steps(steps);
    if (p.delay < 1) {
        throw DataError("delay must be >= 1, got " + std::to_string(p.delay));
    }
    const std::size_t n = steps + burn_in;
    const auto d = static_cast<std::size_t>(p.delay);
    std::vector<double> x(n);
    std::vector<double> y(n);
    x[0] = p.x0;
    y[0] = p.y0;
    detail::check_unit(x[0], "X", 0);
    detail::check_unit(y[0], "Y", 0);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        x[t + 1] = p.rx * x[t] * (1 - x[t]);
        const double driver = t + 1 >= d ? x[t + 1 - d] : p.x0;
        y[t + 1] = p.ry * y[t] * (1 - y[t]) - p.coupling * y[t] * driver;
        detail::check_unit(x[t + 1], "X", t + 1);
        detail::check_unit(y[t + 1], "Y", t + 1);
    }
    return {TimeSeries("X", detail::drop(std::move(x), burn_in)), TimeSeries("Y", detail::drop(std::move(y), burn_in))};
}

/// Shared driver Z acting on two non-interacting logistic populations:
/// Z_{t+1} = rz Z_t (1 - Z_t)
/// A_{t+1} = ra A_t (1 - A_t) - gamma A_t Z_t
/// B_{t+1} = rb B_t (1 - B_t) - gamma B_t Z_t
inline std::vector<TimeSeries> moran_fork(std::size_t steps, const MoranForkParams& p = {}, std::size_t burn_in = 0)
{
    detail::check_steps(steps);
    const std::size_t n = steps + burn_in;
    std::vector<double> z(n);
    std::vector<double> a(n);
    std::vector<double> b(n);
    z[0] = p.z0;
    a[0] = p.a0;
    b[0] = p.b0;
    detail::check_unit(z[0], "Z", 0);
    detail::check_unit(a[0], "A", 0);
    detail::check_unit(b[0], "B", 0);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        z[t + 1] = p.rz * z[t] * (1 - z[t]);
        a[t + 1] = p.ra * a[t] * (1 - a[t]) - p.gamma * a[t] * z[t];
        b[t + 1] = p.rb * b[t] * (1 - b[t]) - p.gamma * b[t] * z[t];
        detail::check_unit(z[t + 1], "Z", t + 1);
        detail::check_unit(a[t + 1], "A", t + 1);
        detail::check_unit(b[t + 1], "B", t + 1);
    }
    return {TimeSeries("Z", detail::drop(std::move(z), burn_in)), TimeSeries("A", detail::drop(std::move(a), burn_in)),
            TimeSeries("B", detail::drop(std::move(b), burn_in))};
}

/// Lorenz flow integrated with fixed-step RK4, one sample per step.
inline std::vector<TimeSeries> lorenz(std::size_t steps, const LorenzParams& p = {}, std::size_t burn_in = 0)
{
    detail::check_steps(steps);
    if (!(p.dt > 0.0) || !std::isfinite(p.dt)) {
        throw DataError("dt must be positive");
    }
    using State = std::array<double, 3>;
    auto deriv = [&](const State& s) {
        return State{p.sigma * (s[1] - s[0]), s[0] * (p.rho - s[2]) - s[1], s[0] * s[1] - p.beta * s[2]};
    };
    auto axpy = [](const State& s, double h, const State& k) {
        return State{s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]};
    };

    const std::size_t n = steps + burn_in;
    std::array<std::vector<double>, 3> out;
    for (auto& v : out) {
        v.resize(n);
    }
    State s = p.initial;
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t c = 0; c < 3; ++c) {
            if (!std::isfinite(s[c])) {
                throw NumericalError("Lorenz state became non-finite at step " + std::to_string(t));
            }
            out[c][t] = s[c];
        }
        const State k1 = deriv(s);
        const State k2 = deriv(axpy(s, p.dt / 2, k1));
        const State k3 = deriv(axpy(s, p.dt / 2, k2));
        const State k4 = deriv(axpy(s, p.dt, k3));
        for (std::size_t c = 0; c < 3; ++c) {
            s[c] += p.dt / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
        }
    }
    return {TimeSeries("X", detail::drop(std::move(out[0]), burn_in)),
            TimeSeries("Y", detail::drop(std::move(out[1]), burn_in)),
            TimeSeries("Z", detail::drop(std::move(out[2]), burn_in))};
}

enum class Kind { coupled_logistic, unidirectional_logistic, lagged_logistic, moran_fork, lorenz };

inline Kind parse_kind(std::string_view name)
{
    if (name == "coupled-logistic" || name == "coupled_logistic") return Kind::coupled_logistic;
    if (name == "unidirectional-logistic" || name == "unidirectional_logistic") return Kind::unidirectional_logistic;
    if (name == "lagged-logistic" || name == "lagged_logistic") return Kind::lagged_logistic;
    if (name == "moran-fork" || name == "moran_fork") return Kind::moran_fork;
    if (name == "lorenz") return Kind::lorenz;
    throw DataError("unknown system '" + std::string(name) +
                    "' (expected coupled-logistic, unidirectional-logistic, lagged-logistic, moran-fork, lorenz)");
}

inline const char* to_string(Kind k)
{
    switch (k) {
    case Kind::coupled_logistic: return "coupled-logistic";
    case Kind::unidirectional_logistic: return "unidirectional-logistic";
    case Kind::lagged_logistic: return "lagged-logistic";
    case Kind::moran_fork: return "moran-fork";
    case Kind::lorenz: return "lorenz";
    }
    return "?";
}

/// Generic description of a run, used by the CLI. `params` overrides the
/// per-system defaults by name; unknown names are rejected.
struct GeneratorSpec {
    Kind kind = Kind::coupled_logistic;
    std::size_t steps = 1000;
    std::map<std::string, double> params;
    std::uint64_t seed = 0; // no generator is stochastic; kept so reports echo it
    std::size_t burn_in = 0;
};

namespace detail {

class ParamReader {
public:
    explicit ParamReader(const std::map<std::string, double>& p) : params_(p) {}

    void read(const std::string& name, double& target)
    {
        if (const auto it = params_.find(name); it != params_.end()) {
            if (!std::isfinite(it->second)) {
                throw DataError("parameter '" + name + "' is not finite");
            }
            target = it->second;
            ++used_;
        }
    }

    void read(const std::string& name, int& target)
    {
        double v = target;
        read(name, v);
        if (v != std::floor(v)) {
            throw DataError("parameter '" + name + "' must be an integer");
        }
        target = static_cast<int>(v);
    }

    void finish(Kind kind) const
    {
        if (used_ != params_.size()) {
            std::string bad;
            for (const auto& [k, _] : params_) {
                bad += " " + k;
            }
            throw DataError(std::string("unrecognised parameter among") + bad + " for " + to_string(kind));
        }
    }

private:
    const std::map<std::string, double>& params_;
    std::size_t used_ = 0;
};

} // namespace detail

/// Resolved parameter set (defaults merged with overrides) for reports.
inline std::map<std::string, double> resolved_params(const GeneratorSpec& spec);

inline std::vector<TimeSeries> generate(const GeneratorSpec& spec)
{
    detail::ParamReader in(spec.params);
    std::vector<TimeSeries> out;
    switch (spec.kind) {
    case Kind::coupled_logistic:
    case Kind::unidirectional_logistic: {
        CoupledLogisticParams p;
        in.read("x0", p.x0);
        in.read("y0", p.y0);
        in.read("rx", p.rx);
        in.read("ry", p.ry);
        in.read("bxy", p.bxy);
        in.read("byx", p.byx);
        in.finish(spec.kind);
        out = spec.kind == Kind::coupled_logistic ? coupled_logistic(spec.steps, p, spec.burn_in)
                                                  : unidirectional_logistic(spec.steps, p, spec.burn_in);
        break;
    }
    case Kind::lagged_logistic: {
        LaggedLogisticParams p;
        in.read("delay", p.delay);
        in.read("coupling", p.coupling);
        in.read("x0", p.x0);
        in.read("y0", p.y0);
        in.read("rx", p.rx);
        in.read("ry", p.ry);
        in.finish(spec.kind);
        out = lagged_logistic(spec.steps, p, spec.burn_in);
        break;
    }
    case Kind::moran_fork: {
        MoranForkParams p;
        in.read("gamma", p.gamma);
        in.read("z0", p.z0);
        in.read("a0", p.a0);
        in.read("b0", p.b0);
        in.read("rz", p.rz);
        in.read("ra", p.ra);
        in.read("rb", p.rb);
        in.finish(spec.kind);
        out = moran_fork(spec.steps, p, spec.burn_in);
        break;
    }
    case Kind::lorenz: {
        LorenzParams p;
        in.read("dt", p.dt);
        in.read("sigma", p.sigma);
        in.read("rho", p.rho);
        in.read("beta", p.beta);
        in.read("x0", p.initial[0]);
        in.read("y0", p.initial[1]);
        in.read("z0", p.initial[2]);
        in.finish(spec.kind);
        out = lorenz(spec.steps, p, spec.burn_in);
        break;
    }
    }
    return out;
}

inline std::map<std::string, double> resolved_params(const GeneratorSpec& spec)
{
    std::map<std::string, double> r;
    switch (spec.kind) {
    case Kind::coupled_logistic:
    case Kind::unidirectional_logistic: {
        const CoupledLogisticParams p;
        r = {{"x0", p.x0}, {"y0", p.y0}, {"rx", p.rx}, {"ry", p.ry}, {"bxy", p.bxy}, {"byx", p.byx}};
        break;
    }
    case Kind::lagged_logistic: {
        const LaggedLogisticParams p;
        r = {{"delay", p.delay}, {"coupling", p.coupling}, {"x0", p.x0}, {"y0", p.y0}, {"rx", p.rx}, {"ry", p.ry}};
        break;
    }
    case Kind::moran_fork: {
        const MoranForkParams p;
        r = {{"gamma", p.gamma}, {"z0", p.z0}, {"a0", p.a0}, {"b0", p.b0}, {"rz", p.rz}, {"ra", p.ra}, {"rb", p.rb}};
        break;
    }
    case Kind::lorenz: {
        const LorenzParams p;
        r = {{"dt", p.dt},          {"sigma", p.sigma},     {"rho", p.rho},       {"beta", p.beta},
             {"x0", p.initial[0]}, {"y0", p.initial[1]}, {"z0", p.initial[2]}};
        break;
    }
    }
    for (const auto& [k, v] : spec.params) {
        r[k] = v;
    }
    return r;
}

} // namespace edm::systems
