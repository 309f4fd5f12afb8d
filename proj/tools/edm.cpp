// edm: command-line front end. See README.md for the subcommands.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edm/cli.hpp"

namespace {

std::vector<std::string> echo(int argc, char** argv)
{
    return std::vector<std::string>(argv, argv + argc);
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items)
{
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw edm::cli::UsageError("--param expects name=value, got '" + item + "'");
        }
        try {
            std::size_t used = 0;
            const auto value = item.substr(eq + 1);
            out[item.substr(0, eq)] = std::stod(value, &used);
            if (used != value.size()) {
                throw std::invalid_argument(value);
            }
        } catch (const std::logic_error&) {
            throw edm::cli::UsageError("--param '" + item + "': value is not a number");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace edm::cli;

    CLI::App app{"Empirical dynamic modeling: embedding, simplex forecasting and convergent cross mapping"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(edm::tool_version));

    std::string report_out;

    GenerateOptions gen;
    std::vector<std::string> gen_params;
    auto* generate = app.add_subcommand("generate", "Write a synthetic system to CSV");
    generate->add_option("--system", gen.system, "coupled-logistic | unidirectional-logistic | lagged-logistic | moran-fork | lorenz")
        ->required();
    generate->add_option("--steps", gen.steps, "Number of output rows")->required();
    generate->add_option("--burn-in", gen.burn_in, "Steps discarded before output");
    generate->add_option("--param", gen_params, "Override a system parameter, name=value (repeatable)");
    generate->add_option("--seed", gen.seed, "Seed echoed into the report");
    generate->add_option("--out", gen.out, "CSV path (default: stdout)");
    generate->add_option("--report", report_out, "Also write a JSON report here");

    SimplexOptions sx;
    auto* simplex = app.add_subcommand("simplex", "Leave-one-out simplex skill across embedding dimensions");
    simplex->add_option("--in", sx.in, "Input CSV")->required();
    simplex->add_option("--col", sx.col, "Column to analyse")->required();
    simplex->add_option("--e-range", sx.e_range, "E values, a..b")->capture_default_str();
    simplex->add_option("--tau", sx.tau, "Delay")->capture_default_str();
    simplex->add_option("--tp", sx.tp, "Prediction horizon")->capture_default_str();
    simplex->add_option("--train-fraction", sx.train_fraction, "Use a train/test split instead of leave-one-out");
    simplex->add_option("--out", report_out, "Report path (default: stdout)");

    CcmOptions cc;
    auto* ccm = app.add_subcommand("ccm", "Convergent cross mapping over library sizes");
    ccm->add_option("--in", cc.in, "Input CSV")->required();
    ccm->add_option("--cause", cc.cause, "Putative cause column (estimated)")->required();
    ccm->add_option("--effect", cc.effect, "Putative effect column (embedded)")->required();
    ccm->add_option("--e", cc.e, "Embedding dimension (default: selected from the pair)");
    ccm->add_option("--e-range", cc.e_range, "E values scanned when --e is absent")->capture_default_str();
    ccm->add_option("--tau", cc.tau)->capture_default_str();
    ccm->add_option("--lag", cc.lag, "Cross-map lag")->capture_default_str();
    ccm->add_option("--lib-sizes", cc.lib_sizes, "Library sizes, comma separated")->delimiter(',');
    ccm->add_option("--samples", cc.samples, "Random libraries per size")->capture_default_str();
    ccm->add_option("--seed", cc.seed)->capture_default_str();
    ccm->add_flag("--both-directions", cc.both_directions, "Also test effect => cause");
    ccm->add_flag("--pai", cc.pai, "Joint embedding of cause lags plus effect");
    ccm->add_flag("--contiguous", cc.contiguous, "Draw contiguous library segments");
    ccm->add_option("--exclusion-radius", cc.exclusion_radius)->capture_default_str();
    ccm->add_option("--threads", cc.threads)->capture_default_str();
    ccm->add_option("--curve-csv", cc.curve_csv, "Write rows of (direction, L, rho) here");
    ccm->add_option("--out", report_out, "Report path (default: stdout)");

    EccmOptions ec;
    auto* eccm = app.add_subcommand("eccm", "Extended CCM: cross-map skill across lags");
    eccm->add_option("--in", ec.in, "Input CSV")->required();
    eccm->add_option("--cause", ec.cause)->required();
    eccm->add_option("--effect", ec.effect)->required();
    eccm->add_option("--lags", ec.lags, "Lag range a..b")->capture_default_str();
    eccm->add_option("--e", ec.e, "Embedding dimension (default: selected from the pair)");
    eccm->add_option("--e-range", ec.e_range)->capture_default_str();
    eccm->add_option("--tau", ec.tau)->capture_default_str();
    eccm->add_flag("--both-directions", ec.both_directions);
    eccm->add_option("--exclusion-radius", ec.exclusion_radius)->capture_default_str();
    eccm->add_option("--profile-csv", ec.profile_csv, "Write rows of (direction, lag, rho) here");
    eccm->add_option("--out", report_out, "Report path (default: stdout)");

    NetworkCmdOptions nw;
    auto* network = app.add_subcommand("network", "Pairwise CCM table over several columns");
    network->add_option("--in", nw.in, "Input CSV")->required();
    network->add_option("--cols", nw.cols, "Columns (default: all)")->delimiter(',');
    network->add_option("--e", nw.e, "Embedding dimension (default: per pair)");
    network->add_option("--e-range", nw.e_range)->capture_default_str();
    network->add_option("--tau", nw.tau)->capture_default_str();
    network->add_option("--samples", nw.samples)->capture_default_str();
    network->add_option("--seed", nw.seed)->capture_default_str();
    network->add_flag("--eccm", nw.eccm, "Also scan lags for every edge");
    network->add_option("--lags", nw.lags)->capture_default_str();
    network->add_option("--threads", nw.threads)->capture_default_str();
    network->add_option("--table-csv", nw.table_csv, "Write the edge table here");
    network->add_option("--out", report_out, "Report path (default: stdout)");

    DemoOptions dm;
    auto* demo = app.add_subcommand("demo", "Reproduce figure data with pinned defaults");
    demo->add_option("figure", dm.figure, "fig3 | fig7 | fig8 | fork")->required();
    demo->add_option("--out-dir", dm.out_dir, "Directory for the CSV output")->capture_default_str();
    demo->add_option("--seed", dm.seed)->capture_default_str();
    demo->add_option("--samples", dm.samples)->capture_default_str();
    demo->add_option("--threads", dm.threads)->capture_default_str();
    demo->add_option("--out", report_out, "Report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ExitCode::ok : ExitCode::usage;
    }

    try {
        edm::RunReport report;
        bool print_report = true;
        if (*generate) {
            gen.params = parse_params(gen_params);
            report = cmd_generate(gen, std::cout);
            print_report = false;
            report.command = echo(argc, argv);
            if (!report_out.empty()) {
                write_text(report_out, edm::serialize(report));
            }
        } else if (*simplex) {
            report = cmd_simplex(sx);
        } else if (*ccm) {
            report = cmd_ccm(cc);
        } else if (*eccm) {
            report = cmd_eccm(ec);
        } else if (*network) {
            report = cmd_network(nw);
        } else if (*demo) {
            report = cmd_demo(dm);
        }
        if (print_report) {
            report.command = echo(argc, argv);
            emit_report(report, report_out, std::cout);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return ExitCode::usage;
    } catch (const edm::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return ExitCode::data;
    } catch (const edm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return ExitCode::numerical;
    }
    return ExitCode::ok;
}
