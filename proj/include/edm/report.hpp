// JSON run reports and the conversions of analysis results into them.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "edm/ccm.hpp"
#include "edm/core.hpp"
#include "edm/forecast.hpp"

namespace edm {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int report_schema_version = 1;

struct RunReport {
    int version = report_schema_version;
    std::string tool_version = edm::tool_version;
    std::vector<std::string> command;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> warnings;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline void to_json(nlohmann::json& j, const RunReport& r)
{
    j = nlohmann::json{{"version", r.version}, {"tool_version", r.tool_version}, {"command", r.command},
                       {"inputs", r.inputs},   {"config", r.config},             {"results", r.results},
                       {"warnings", r.warnings}};
}

inline void from_json(const nlohmann::json& j, RunReport& r)
{
    j.at("version").get_to(r.version);
    j.at("tool_version").get_to(r.tool_version);
    j.at("command").get_to(r.command);
    r.inputs = j.at("inputs");
    r.config = j.at("config");
    r.results = j.at("results");
    j.at("warnings").get_to(r.warnings);
}

inline std::string serialize(const RunReport& r) { return nlohmann::json(r).dump(2) + "\n"; }

inline RunReport parse_report(const std::string& text) { return nlohmann::json::parse(text).get<RunReport>(); }

inline void to_json(nlohmann::json& j, const SkillStats& s)
{
    j = nlohmann::json{{"rho", s.rho}, {"mae", s.mae}, {"rmse", s.rmse}, {"n_pairs", s.n_pairs},
                       {"degenerate", s.degenerate}};
}

inline void from_json(const nlohmann::json& j, SkillStats& s)
{
    j.at("rho").get_to(s.rho);
    j.at("mae").get_to(s.mae);
    j.at("rmse").get_to(s.rmse);
    j.at("n_pairs").get_to(s.n_pairs);
    j.at("degenerate").get_to(s.degenerate);
}

inline void to_json(nlohmann::json& j, const EDimScan& scan)
{
    j = nlohmann::json{{"best_e", scan.best_e}, {"rows", nlohmann::json::array()}};
    for (const auto& r : scan.rows) {
        nlohmann::json row{{"E", r.e_dim}, {"available", r.available}};
        if (r.available) {
            row["skill"] = r.skill;
        } else {
            row["note"] = r.note;
        }
        j["rows"].push_back(std::move(row));
    }
}

inline void to_json(nlohmann::json& j, const ConvergenceCriteria& c)
{
    j = nlohmann::json{{"min_delta", c.min_delta}, {"min_trend", c.min_trend}, {"min_final_rho", c.min_final_rho}};
}

inline void to_json(nlohmann::json& j, const CcmCurve& c)
{
    j = nlohmann::json{{"direction", c.direction},
                       {"cause", c.cause},
                       {"effect", c.effect},
                       {"E", c.e_dim},
                       {"tau", c.tau},
                       {"lag", c.lag},
                       {"pai", c.pai},
                       {"convergent", c.decision.convergent},
                       {"final_rho", c.decision.final_rho},
                       {"delta", c.decision.delta},
                       {"trend", c.decision.trend},
                       {"rows", nlohmann::json::array()}};
    for (const auto& r : c.rows) {
        j["rows"].push_back({{"L", r.lib_size},
                             {"mean_rho", r.mean_rho},
                             {"sd_rho", r.sd_rho},
                             {"samples_used", r.samples_used},
                             {"degenerate_draws", r.degenerate_draws}});
    }
}

inline void to_json(nlohmann::json& j, const EccmProfile& p)
{
    j = nlohmann::json{{"direction", p.direction}, {"cause", p.cause},         {"effect", p.effect},
                       {"E", p.e_dim},             {"best_lag", p.best_lag}, {"best_rho", p.best_rho},
                       {"rows", nlohmann::json::array()}};
    for (const auto& r : p.rows) {
        nlohmann::json row{{"lag", r.lag}, {"available", r.available}};
        if (r.available) {
            row["rho"] = r.rho;
            row["n_pairs"] = r.n_pairs;
        } else {
            row["note"] = r.note;
        }
        j["rows"].push_back(std::move(row));
    }
}

inline void to_json(nlohmann::json& j, const NetworkReport& n)
{
    j = nlohmann::json{{"edges", nlohmann::json::array()}, {"warnings", n.warnings}};
    for (const auto& e : n.edges) {
        nlohmann::json row{{"cause", e.cause},
                           {"effect", e.effect},
                           {"E", e.e_dim},
                           {"final_rho", e.final_rho},
                           {"convergent", e.convergent}};
        row["best_lag"] = e.best_lag ? nlohmann::json(*e.best_lag) : nlohmann::json(nullptr);
        j["edges"].push_back(std::move(row));
    }
}

inline nlohmann::json config_json(const CcmConfig& c)
{
    return nlohmann::json{{"E", c.e_dim},
                          {"tau", c.tau},
                          {"lag", c.lag},
                          {"lib_sizes", c.lib_sizes},
                          {"samples_per_size", c.samples_per_size},
                          {"seed", c.seed},
                          {"sampling", to_string(c.sampling)},
                          {"exclusion_radius", c.exclusion_radius},
                          {"convergence", c.criteria}};
}

/// Degenerate-correlation warnings for a curve.
inline std::vector<std::string> curve_warnings(const CcmCurve& c)
{
    std::vector<std::string> out;
    for (const auto& r : c.rows) {
        if (r.degenerate_draws > 0) {
            out.push_back(c.direction + ": " + std::to_string(r.degenerate_draws) +
                          " degenerate correlation(s) at L=" + std::to_string(r.lib_size));
        }
    }
    return out;
}

} // namespace edm
