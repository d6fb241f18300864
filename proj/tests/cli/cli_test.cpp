#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mfl/io.hpp"

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mfl_cli_" + std::to_string(::getpid()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    // Runs the binary with stdout and stderr captured into files; returns the exit status.
    int run(const std::string& args) {
        const std::string cmd = std::string(MFL_CLI) + " " + args + " > " + path("stdout") + " 2> " + path("stderr");
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    }

    [[nodiscard]] std::string slurp(const std::string& name) const {
        std::ifstream in(path(name));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

private:
    fs::path dir_;
};

TEST_F(Cli, OracleSucceeds) {
    EXPECT_EQ(run("oracle"), 0) << slurp("stdout");
    const auto out = slurp("stdout");
    for (int c = 1; c <= 8; ++c) EXPECT_NE(out.find("PASS criterion " + std::to_string(c)), std::string::npos) << c;
    EXPECT_EQ(out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, SolveCentreValueAtHalfCriticalMass) {
    ASSERT_EQ(run("solve --rho 4pi --domain disc"), 0) << slurp("stderr");
    std::istringstream in(slurp("stdout"));
    const auto file = mfl::read_field_csv(in);
    ASSERT_TRUE(file.is_radial());
    EXPECT_EQ(file.radial().mesh()[0], 0.0);
    EXPECT_NEAR(file.radial().front(), 2.0 * std::log(2.0), 1e-6);
}

TEST_F(Cli, ExteriorCheckOnIncreasingFieldIsAPreconditionError) {
    std::ostringstream os;
    const auto mesh = mfl::RadialMesh::geometric(1.0, 100.0, 64);
    mfl::write_field_csv(os, mfl::RadialField::sample(mesh, [](double r) { return std::log(r); }));
    write("inc.csv", os.str());
    EXPECT_EQ(run("verify-bol " + path("inc.csv") + " --mode exterior"), 1);
    EXPECT_NE(slurp("stderr").find("precondition"), std::string::npos) << slurp("stderr");
}

TEST_F(Cli, RoundTripLevelSetsHold) {
    for (const std::string solver : {"radial", "grid"}) {
        ASSERT_EQ(run("solve --rho 4pi --solver " + solver + " --grid-nodes 65 -o " + path("u.csv")), 0) << slurp("stderr");
        const auto report = nlohmann::json::parse(slurp("stdout"));
        EXPECT_EQ(report.at("schema_version"), 1);
        EXPECT_EQ(report.at("result").at("status"), "converged");
        EXPECT_EQ(run("verify-bol " + path("u.csv") + " --mode interior --levels 12 -o " + path("bol.json")), 0) << solver;
        const auto doc = nlohmann::json::parse(slurp("bol.json"));
        ASSERT_EQ(doc.at("checks").size(), 12u) << solver;
        for (const auto& c : doc.at("checks")) {
            const std::string v = c.at("verdict");
            EXPECT_TRUE(v == "holds" || v == "violated-within-tolerance") << solver << " " << c.dump();
        }
    }
}

TEST_F(Cli, ExportedFieldReadsBackBitForBit) {
    ASSERT_EQ(run("solve --rho 2pi --solver grid --grid-nodes 33 -o " + path("a.csv") + " --report " + path("r.json")), 0);
    const auto a = mfl::load_field(path("a.csv"));
    std::ostringstream os;
    mfl::write_field_csv(os, a.grid(), a.extra());
    write("b.csv", os.str());
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
    EXPECT_DOUBLE_EQ(a.extra().at("rho").get<double>(), 2.0 * M_PI);
}

TEST_F(Cli, PipelineExitStatus) {
    ASSERT_EQ(run("solve --rho 4pi -o " + path("w.csv")), 0);
    EXPECT_EQ(run("pipeline " + path("w.csv") + " " + path("w.csv") + " -o " + path("p.json")), 0) << slurp("stderr");
    const auto doc = nlohmann::json::parse(slurp("p.json"));
    EXPECT_TRUE(doc.at("report").at("applicable").get<bool>());
    EXPECT_FALSE(doc.at("report").at("contradiction").get<bool>());

    // an equal-mass distinct partner fires the contradiction
    const auto w = mfl::load_field(path("w.csv"));
    const auto& u = w.radial();
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u[i] + std::log(2.0) + 0.1 * std::exp(-u.mesh()[i] * u.mesh()[i] / 0.1);
    const mfl::RadialField w1 = mfl::RadialField::sample(u.mesh(), [&](double r) { return u.at(r) + std::log(2.0); });
    const double k = std::log(mfl::cumulative_mass_gauss(w1).back() / mfl::cumulative_mass_gauss(mfl::RadialField(u.mesh(), v)).back());
    for (double& x : v) x += k;
    mfl::save_field(path("w1.csv"), w1);
    mfl::save_field(path("w2.csv"), mfl::RadialField(u.mesh(), v));
    EXPECT_EQ(run("pipeline " + path("w1.csv") + " " + path("w2.csv") + " --psi " + path("psi.csv")), 2) << slurp("stderr");
    EXPECT_EQ(slurp("psi.csv").rfind("r,psi,U_lambda\n", 0), 0u);

    std::vector<double> heavy(u.values().begin(), u.values().end());
    for (double& x : heavy) x += std::log(2.0) + 0.01;
    mfl::save_field(path("w3.csv"), mfl::RadialField(u.mesh(), heavy));
    EXPECT_EQ(run("pipeline " + path("w1.csv") + " " + path("w3.csv")), 1);
    EXPECT_NE(slurp("stderr").find("equal masses"), std::string::npos) << slurp("stderr");
}

TEST_F(Cli, RearrangeWritesTable) {
    ASSERT_EQ(run("solve --rho 4pi -o " + path("u.csv")), 0);
    ASSERT_EQ(run("rearrange --phi " + path("u.csv") + " --u " + path("u.csv") + " --thresholds 64 -o " + path("t.csv")), 0)
        << slurp("stderr");
    std::ifstream in(path("t.csv"));
    const auto t = mfl::read_rearrangement_csv(in);
    EXPECT_GE(t.table.size(), 64u);
    EXPECT_LE(t.meta.at("defect").get<double>(), 1e-6);
    for (std::size_t i = 1; i < t.table.size(); ++i) EXPECT_GE(t.table[i].r, t.table[i - 1].r);
}

TEST_F(Cli, UniquenessAndSweep) {
    EXPECT_EQ(run("uniqueness --rho 4pi --grid-nodes 33 --starts 4 --seed 9 -o " + path("u.json")), 0) << slurp("stderr");
    const auto doc = nlohmann::json::parse(slurp("u.json"));
    EXPECT_EQ(doc.at("report").at("distinct"), 1);
    EXPECT_EQ(run("uniqueness --rho 4pi --grid-nodes 33 --starts 4 --seed 9 -o " + path("v.json")), 0);
    EXPECT_EQ(slurp("u.json"), slurp("v.json"));

    EXPECT_EQ(run("sweep --rho-list 2pi,4pi,7pi --csv " + path("s.csv")), 0) << slurp("stderr");
    EXPECT_EQ(slurp("s.csv").rfind("rho,u_max,center,status\n", 0), 0u);
    EXPECT_EQ(run("sweep --eps-list 0.5,0.125"), 0);
    const auto sw = nlohmann::json::parse(slurp("stdout"));
    EXPECT_NEAR(sw.at("critical_sweep").at("rows").at(1).at("u_max").get<double>(), 6.0 * std::log(2.0), 1e-6);
}

TEST_F(Cli, ConfigFileAndDiagnostics) {
    write("ok.json", R"({
  // annulus at half the critical mass
  "domain": {"shape": "annulus", "inner_radius": 0.3},
  "equation": {"rho": "4pi"},
  "mesh": {"radial_nodes": 2048}
})");
    EXPECT_EQ(run("solve --config " + path("ok.json") + " -o " + path("a.csv")), 0) << slurp("stderr");
    EXPECT_EQ(mfl::load_field(path("a.csv")).radial().mesh().inner_radius(), 0.3);

    write("syntax.json", "{\n  \"equation\": {\"rho\": \"4pi\",\n    \"mode\": \"mean_field\"\n    \"K\": 1}\n}\n");
    EXPECT_EQ(run("solve --config " + path("syntax.json")), 1);
    EXPECT_NE(slurp("stderr").find("syntax.json:4:"), std::string::npos) << slurp("stderr");

    write("field.json", R"({"equation": {"rho": "four pi"}})");
    EXPECT_EQ(run("solve --config " + path("field.json")), 1);
    EXPECT_NE(slurp("stderr").find("equation.rho"), std::string::npos) << slurp("stderr");
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("nonsense"), 1);
    EXPECT_EQ(run("solve --domain square"), 1);
    EXPECT_EQ(run("verify-bol " + path("missing.csv")), 1);
    EXPECT_EQ(run("solve --help"), 0);
}

}  // namespace
