#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "edm/cli.hpp"

namespace edm::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("edm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string generated(const std::string& system = "coupled-logistic", std::size_t steps = 1000)
    {
        GenerateOptions g;
        g.system = system;
        g.steps = steps;
        g.out = path(system + ".csv");
        std::ostringstream unused;
        cmd_generate(g, unused);
        return g.out;
    }

    fs::path dir_;
};

TEST(Report, RoundTrip)
{
    RunReport r;
    r.command = {"edm", "ccm", "--in", "a.csv"};
    r.inputs = {{"file", "a.csv"}};
    r.config = {{"E", 2}, {"seed", 1}};
    r.results = {{"rho", 0.1 + 0.2}, {"list", {1, 2, 3}}};
    r.warnings = {"something odd"};
    const auto back = parse_report(serialize(r));
    EXPECT_EQ(back, r);
    EXPECT_EQ(back.version, report_schema_version);
    EXPECT_EQ(back.tool_version, tool_version);
    EXPECT_EQ(back.results["rho"].get<double>(), 0.1 + 0.2);
}

TEST(Report, SkillStatsRoundTrip)
{
    const SkillStats s{0.25, 0.5, 0.75, 12, false};
    EXPECT_EQ(nlohmann::json(s).get<SkillStats>(), s);
}

TEST(ParseRange, Forms)
{
    EXPECT_EQ(parse_range("1..10"), std::make_pair(1, 10));
    EXPECT_EQ(parse_range("-8..8"), std::make_pair(-8, 8));
    EXPECT_EQ(parse_range("3"), std::make_pair(3, 3));
    EXPECT_THROW(parse_range("5..3"), UsageError);
    EXPECT_THROW(parse_range("a..3"), UsageError);
    EXPECT_THROW(parse_range("1..3x"), UsageError);
}

TEST_F(CliTest, GenerateWritesCsv)
{
    GenerateOptions g;
    g.system = "coupled-logistic";
    g.steps = 1000;
    std::ostringstream csv;
    const auto r = cmd_generate(g, csv);
    std::istringstream in(csv.str());
    const auto cols = read_csv(in);
    ASSERT_EQ(cols.size(), 2u);
    EXPECT_EQ(cols[0].name(), "X");
    EXPECT_EQ(cols[1].name(), "Y");
    EXPECT_EQ(cols[0].size(), 1000u);
    EXPECT_EQ(cols[0][0], 0.2);
    EXPECT_EQ(cols[1][0], 0.5);
    EXPECT_EQ(r.config["params"]["byx"].get<double>(), 0.08);
}

TEST_F(CliTest, GenerateUsageErrors)
{
    std::ostringstream sink;
    GenerateOptions g;
    g.system = "coupled-logistic";
    g.steps = 0;
    EXPECT_THROW(cmd_generate(g, sink), UsageError);
    g.steps = 10;
    g.system = "henon";
    EXPECT_THROW(cmd_generate(g, sink), UsageError);
    g.system = "lorenz";
    g.params = {{"gamma", 1.0}};
    EXPECT_THROW(cmd_generate(g, sink), UsageError);
}

TEST_F(CliTest, GeneratedFileFeedsAnalyses)
{
    const auto csv = generated();

    SimplexOptions sx;
    sx.in = csv;
    sx.col = "X";
    const auto s = cmd_simplex(sx);
    EXPECT_GT(s.results["scan"]["best_e"].get<int>(), 0);

    CcmOptions c;
    c.in = csv;
    c.cause = "X";
    c.effect = "Y";
    c.e = 2;
    c.samples = 5;
    c.both_directions = true;
    c.curve_csv = path("curve.csv");
    const auto ccm = cmd_ccm(c);
    EXPECT_EQ(ccm.results["curves"].size(), 2u);
    EXPECT_EQ(ccm.results["curves"][0]["direction"], "X=>Y");
    std::ifstream curve(c.curve_csv);
    std::string header;
    std::getline(curve, header);
    EXPECT_EQ(header, "direction,L,mean_rho,sd_rho,samples_used");

    EccmOptions e;
    e.in = csv;
    e.cause = "X";
    e.effect = "Y";
    e.e = 2;
    e.lags = "-2..2";
    const auto eccm = cmd_eccm(e);
    EXPECT_EQ(eccm.results["profiles"][0]["rows"].size(), 5u);
}

TEST_F(CliTest, MissingColumnListsAvailable)
{
    SimplexOptions sx;
    sx.in = generated();
    sx.col = "W";
    try {
        cmd_simplex(sx);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("X"), std::string::npos) << msg;
        EXPECT_NE(msg.find("Y"), std::string::npos) << msg;
    }
}

TEST_F(CliTest, ConstantColumnWarns)
{
    {
        std::ofstream out(path("flat.csv"));
        out << "C\n";
        for (int i = 0; i < 50; ++i) {
            out << "1.5\n";
        }
    }
    SimplexOptions sx;
    sx.in = path("flat.csv");
    sx.col = "C";
    sx.e_range = "1..3";
    const auto r = cmd_simplex(sx);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings[0].find("degenerate"), std::string::npos);
}

TEST_F(CliTest, EmptyLagRangeIsUsageError)
{
    EccmOptions e;
    e.in = generated();
    e.cause = "X";
    e.effect = "Y";
    e.lags = "5..3";
    EXPECT_THROW(cmd_eccm(e), UsageError);
}

TEST_F(CliTest, FixedSeedIsByteReproducible)
{
    CcmOptions c;
    c.in = generated();
    c.cause = "X";
    c.effect = "Y";
    c.samples = 10;
    c.seed = 42;
    EXPECT_EQ(cmd_ccm(c).results.dump(), cmd_ccm(c).results.dump());
    NetworkCmdOptions n;
    n.in = c.in;
    n.e = 2;
    n.samples = 5;
    EXPECT_EQ(cmd_network(n).results.dump(), cmd_network(n).results.dump());
}

TEST_F(CliTest, NetworkTable)
{
    NetworkCmdOptions n;
    n.in = generated("moran-fork");
    n.e = 2;
    n.samples = 5;
    n.eccm = true;
    n.lags = "-2..2";
    n.table_csv = path("table.csv");
    const auto r = cmd_network(n);
    EXPECT_EQ(r.results["network"]["edges"].size(), 6u);
    EXPECT_TRUE(fs::exists(n.table_csv));
}

TEST_F(CliTest, Demos)
{
    DemoOptions d;
    d.out_dir = dir_.string();
    d.samples = 5;
    d.figure = "fig3";
    const auto fig3 = cmd_demo(d);
    EXPECT_EQ(fig3.results["windows"].size(), 3u);
    EXPECT_TRUE(fs::exists(path("fig3.csv")));
    d.figure = "fig8";
    const auto fig8 = cmd_demo(d);
    EXPECT_EQ(fig8.config["E"].get<int>(), unidirectional_demo_e);
    EXPECT_TRUE(fs::exists(path("fig8.csv")));
    d.figure = "fig9";
    EXPECT_THROW(cmd_demo(d), UsageError);
    d.figure = "fig7";
    d.out_dir = path("missing");
    EXPECT_THROW(cmd_demo(d), DataError);
}

#ifdef EDM_CLI_PATH
int run(const std::string& args)
{
    const std::string cmd = std::string("\"") + EDM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

TEST_F(CliTest, ExitCodes)
{
    const auto csv = generated();
    EXPECT_EQ(run("simplex --in " + csv + " --col X --e-range 1..3"), ExitCode::ok);
    EXPECT_EQ(run("simplex --in " + csv), ExitCode::usage);
    EXPECT_EQ(run("bogus"), ExitCode::usage);
    EXPECT_EQ(run("generate --system coupled-logistic --steps 0"), ExitCode::usage);
    EXPECT_EQ(run("simplex --in " + csv + " --col W"), ExitCode::data);
    EXPECT_EQ(run("simplex --in " + path("nope.csv") + " --col X"), ExitCode::data);
    EXPECT_EQ(run("generate --system coupled-logistic --steps 100 --param rx=4.5 --out " + path("bad.csv")),
              ExitCode::numerical);
}

TEST_F(CliTest, ReportEchoesCommand)
{
    const auto csv = generated();
    const auto out = path("r.json");
    ASSERT_EQ(run("simplex --in " + csv + " --col Y --e-range 1..2 --out " + out), 0);
    std::ifstream in(out);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto r = parse_report(text);
    ASSERT_GE(r.command.size(), 2u);
    EXPECT_EQ(r.command[1], "simplex");
    EXPECT_EQ(r.config["e_range"][1].get<int>(), 2);
}
#endif

} // namespace
} // namespace edm::cli
