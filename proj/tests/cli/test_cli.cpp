#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "monolasso/data.hpp"
#include "monolasso/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("monolasso_cli_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Outcome run(const std::string& args, const std::string& env = {}) const {
        const std::string err_file = path("stderr.txt");
        const std::string cmd = env + (env.empty() ? "" : " ") + std::string(MONOLASSO_CLI) + " " + args + " 2>" + err_file;
        Outcome r;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return r;
        char buf[4096];
        std::size_t got;
        while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
        const int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = slurp(err_file);
        return r;
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
    }

    std::string sine_csv(const std::string& extra = {}) {
        const std::string file = path("sine.csv");
        const Outcome r = run("simulate --kind sine --seed 0 " + extra + " --out " + file);
        EXPECT_EQ(r.code, 0) << r.err;
        return file;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SinglePredictorGivesSingleSegment) {
    write("toy.csv", "x,y\n1,1\n2,3\n3,2\n4,5\n");
    const Outcome r = run("solve --input " + path("toy.csv") + " --method lasso --out " + path("p.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(slurp(path("p.json")));
    EXPECT_EQ(doc["breakpoints"].size(), 2u);
    EXPECT_EQ(doc["dimension"], 2);
    EXPECT_EQ(doc["events"][0]["kind"], "least-squares");
}

TEST_F(Cli, LassoOnSineRecordsZeroCrossing) {
    const std::string data = sine_csv();
    const Outcome r = run("solve --input " + data + " --method lasso");
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    bool crossing = false;
    for (const auto& e : doc["events"]) crossing = crossing || e["kind"] == "zero-crossing";
    EXPECT_TRUE(crossing);
    EXPECT_EQ(doc["metadata"]["method"], "lasso");
    EXPECT_EQ(doc["metadata"]["data"]["p"], 10);
}

TEST_F(Cli, CompareDetectsLarFs0Divergence) {
    const std::string data = sine_csv();
    ASSERT_EQ(run("solve --input " + data + " --method lar --out " + path("lar.json")).code, 0);
    ASSERT_EQ(run("solve --input " + data + " --method fs0 --out " + path("fs0.csv")).code, 0);
    const Outcome r = run("diagnose --compare --index norm --path " + path("lar.json") + " --path " + path("fs0.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    EXPECT_FALSE(doc["divergence"].is_null());
    EXPECT_GT(doc["sup_difference"].get<double>(), 1e-3);
}

TEST_F(Cli, StagewiseStepCountOnToy) {
    // Standardized x = (1,1,-1,-1); least-squares coefficient 0.53.
    write("toy.csv", "x,y\n2,0.83\n2,0.23\n0,-0.23\n0,-0.83\n");
    const Outcome r = run("stagewise --input " + path("toy.csv") + " --epsilon 0.01");
    ASSERT_EQ(r.code, 0) << r.err;
    const long iterations = json::parse(r.out)["metadata"]["iterations"].get<long>();
    EXPECT_LE(std::labs(iterations - 53), 1);
}

TEST_F(Cli, LogisticStagewiseIsMonotone) {
    std::string csv = "x1,x2,y\n";
    for (int i = 0; i < 40; ++i) {
        const double a = std::sin(1.7 * i), b = std::cos(0.9 * i);
        csv += std::to_string(a) + "," + std::to_string(b) + "," + ((a - 0.5 * b + 0.3 * std::sin(5.0 * i) > 0) ? "1" : "0") + "\n";
    }
    write("bin.csv", csv);
    const Outcome r = run("stagewise --input " + path("bin.csv") + " --loss logistic --epsilon 0.05 --max-iter 400 --out " +
                      path("lg.json"));
    ASSERT_TRUE(r.code == 0 || r.code == 4) << r.err;
    const monolasso::PiecewiseLinearPath p = monolasso::load_path(path("lg.json"));
    ASSERT_GT(p.vertices().size(), 2u);
    for (std::size_t k = 0; k + 1 < p.vertices().size(); ++k)
        EXPECT_GE((p.vertices()[k + 1] - p.vertices()[k]).minCoeff(), 0.0);
}

TEST_F(Cli, EpsilonSweepConvergesToFs0) {
    const std::string data = sine_csv();
    const Outcome r = run("stagewise --input " + data + " --epsilon 0.02 --sweep 3");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "epsilon,iterations,sup_distance");
    std::vector<double> eps, dist;
    while (std::getline(in, line)) {
        eps.push_back(std::stod(line.substr(0, line.find(','))));
        dist.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    }
    const int rows = static_cast<int>(dist.size());
    ASSERT_GT(rows, 0);
    EXPECT_LT(dist.back(), dist.front());
    EXPECT_LE(dist.back(), 5.0 * eps.back() * std::sqrt(10.0));
    EXPECT_EQ(rows, 4);
}

TEST_F(Cli, CheckMonotonePassThrough) {
    const std::string linear = sine_csv();
    Outcome r = run("check-monotone --input " + linear + " --subset 3,9,8 --signs=-,+,+");
    ASSERT_EQ(r.code, 0) << r.err;
    json doc = json::parse(r.out);
    EXPECT_FALSE(doc["pass"].get<bool>());
    EXPECT_LT(doc["subset"]["v"][1].get<double>(), 0.0);

    r = run("check-monotone --input " + linear + " --emit-violation");
    doc = json::parse(r.out);
    EXPECT_FALSE(doc["pass"].get<bool>());
    EXPECT_TRUE(doc.contains("violation"));

    const std::string constant = sine_csv("--basis piecewise-constant");
    r = run("check-monotone --input " + constant, "MONOLASSO_THREADS=3");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(r.out)["pass"].get<bool>());
    EXPECT_NE(r.err.find("\"threads\":3"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateIsByteIdenticalPerSeed) {
    const Outcome a = run("simulate --kind block --p 40 --seed 9");
    const Outcome b = run("simulate --kind block --p 40 --seed 9");
    const Outcome c = run("simulate --kind block --p 40 --seed 10");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 61);
    const Outcome ratio = run("simulate --kind block --p 200 --noise-to-signal 20");
    EXPECT_EQ(json::parse(ratio.out)["analytic"].get<double>(), 3.6);
}

TEST_F(Cli, RssAndMseCurves) {
    const std::string data = sine_csv();
    ASSERT_EQ(run("solve --input " + data + " --method lasso --out " + path("lasso.json")).code, 0);
    Outcome r = run("diagnose --rss --index arclength --grid 5 --input " + data + " --path " + path("lasso.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "index,value,method");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
    run("simulate --kind sine --seed 1 --noise-scale 0 --out " + path("hold.csv"));
    r = run("diagnose --mse --grid 4 --input " + data + " --holdout " + path("hold.csv") + " --path " +
            path("lasso.json") + " --out " + path("mse.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(path("mse.csv")).find(",lasso\n"), std::string::npos);
}

TEST_F(Cli, CertifyLassoPath) {
    const std::string data = sine_csv();
    ASSERT_EQ(run("solve --input " + data + " --method lasso --out " + path("lasso.json")).code, 0);
    const Outcome r = run("certify --input " + data + " --path " + path("lasso.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(r.out)["pass"].get<bool>());
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("solve --unknown-flag").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("solve --input " + path("missing.csv")).code, 3);
    write("bad.csv", "a,y\n1,2\n3,x\n");
    const Outcome bad = run("solve --input " + path("bad.csv"));
    EXPECT_EQ(bad.code, 3);
    EXPECT_NE(bad.err.find("line 3"), std::string::npos) << bad.err;
    write("dup.csv", "a,b,y\n1,1,1\n2,2,0\n3,3,4\n");
    EXPECT_EQ(run("solve --input " + path("dup.csv") + " --method lasso").code, 4);
    EXPECT_EQ(run("solve --input " + path("bad.csv") + " --method nope").code, 3);
    write("ok.csv", "a,y\n1,2\n3,1\n");
    EXPECT_EQ(run("solve --input " + path("ok.csv") + " --method nope").code, 2);
}

TEST_F(Cli, ConfigFileDefaultsAndFlagOverride) {
    const std::string data = sine_csv();
    write("cfg.json", json{{"input", data}, {"solve", {{"method", "fs0"}, {"stop-norm", 1.0}}}}.dump());
    Outcome r = run("--config " + path("cfg.json") + " solve");
    ASSERT_EQ(r.code, 0) << r.err;
    json doc = json::parse(r.out);
    EXPECT_EQ(doc["metadata"]["method"], "fs0");
    EXPECT_EQ(doc["termination"], "stop-bound");
    EXPECT_NE(r.err.find("resolved config"), std::string::npos);

    r = run("--config " + path("cfg.json") + " solve --method lar");
    doc = json::parse(r.out);
    EXPECT_EQ(doc["metadata"]["method"], "lar");

    write("badcfg.json", json{{"solve", {{"no-such-option", 1}}}}.dump());
    EXPECT_EQ(run("--config " + path("badcfg.json") + " solve").code, 2);
}

TEST_F(Cli, PathRoundTripThroughFiles) {
    const std::string data = sine_csv();
    ASSERT_EQ(run("solve --input " + data + " --method lasso --out " + path("a.json")).code, 0);
    const monolasso::PiecewiseLinearPath a = monolasso::load_path(path("a.json"));
    monolasso::save_path(path("b.json"), a);
    EXPECT_EQ(slurp(path("a.json")).size() > 0, true);
    const monolasso::PiecewiseLinearPath b = monolasso::load_path(path("b.json"));
    for (std::size_t k = 0; k < a.vertices().size(); ++k) EXPECT_EQ(a.vertices()[k], b.vertices()[k]);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
    const std::string data = sine_csv();
    const Outcome a = run("stagewise --input " + data + " --epsilon 0.05");
    const Outcome b = run("stagewise --input " + data + " --epsilon 0.05");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}
