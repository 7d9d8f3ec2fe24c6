#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "tfd/cli.hpp"

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "tfd");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = tfd::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) {
        v.push_back(l);
    }
    return v;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("tfd_cli_test_" + name);
}

}  // namespace

TEST_CASE("symbol prints the known value") {
    const Run r = run({"symbol", "--alpha", "0.5", "--eta", "1", "--lambda", "3"});
    CHECK(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() >= 2);
    CHECK(l[0] == "lambda,value");
    CHECK(l[1] == "3.0,1.0");
}

TEST_CASE("json output carries command, params and results") {
    const Run r = run({"--format", "json", "symbol", "--alpha", "0.5", "--eta", "1", "--lambda-grid", "0,3,4"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "symbol");
    CHECK(j["params"]["alpha"] == 0.5);
    CHECK(j["params"]["eta"] == 1.0);
    REQUIRE(j["results"].size() == 4);
    CHECK(j["results"][3]["lambda"] == 3.0);
    CHECK(std::abs(j["results"][3]["value"].get<double>() - 1.0) < 1e-15);
    CHECK(j["results"][0]["value"] == 0.0);
    CHECK(!j["params"].contains("threads"));
}

TEST_CASE("invalid input exits with 2") {
    CHECK(run({"symbol", "--alpha", "1.5", "--eta", "1", "--lambda", "3"}).code == 2);
    CHECK(run({"symbol", "--alpha", "abc"}).code == 2);
    CHECK(run({"nosuchcommand"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"density", "v", "--mu", "1", "--x", "0.5", "--y", "0.2", "--t", "1"}).code == 2);
    const Run grid = run({"deriv", "marchaud", "--x-grid", "0,1"});
    CHECK(grid.code == 2);
    CHECK(!grid.err.empty());
}

TEST_CASE("failed checks exit with 3") {
    const Run r = run({"verify", "thm2", "--y-grid", "0.6,4,8", "--t-grid", "0.2,2,16"});
    CHECK(r.code == 3);
    CHECK(r.err.find("check failed") != std::string::npos);
    // the table is still written
    CHECK(lines(r.out).size() >= 3);
}

TEST_CASE("verify passes on the reference grid") {
    const Run r = run({"verify", "g"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# pass=true") != std::string::npos);
    CHECK(run({"verify", "weyl"}).code == 0);
    CHECK(run({"verify", "init", "--density", "v", "--mu", "1", "--x", "0.5"}).code == 0);
    CHECK(run({"verify", "init", "--t", "1"}).code == 3);
}

TEST_CASE("config file values and precedence") {
    const auto path = temp_file("config.txt");
    {
        std::ofstream f(path);
        f << "# comment\nalpha = 0.5\neta=1\nlambda=3\n";
    }
    const Run a = run({"symbol", "--config", path.string()});
    CHECK(a.code == 0);
    CHECK(lines(a.out).at(1) == "3.0,1.0");
    // explicit flags win over the file
    const Run b = run({"symbol", "--config", path.string(), "--lambda", "0"});
    CHECK(b.code == 0);
    CHECK(lines(b.out).at(1) == "0.0,0.0");
    {
        std::ofstream f(path);
        f << "alpha=0.5\nbogus=1\n";
    }
    CHECK(run({"symbol", "--config", path.string(), "--lambda", "1"}).code == 2);
    CHECK(run({"symbol", "--config", "/nonexistent/tfd.cfg"}).code == 2);
    std::filesystem::remove(path);
}

TEST_CASE("output file and unwritable destination") {
    const auto path = temp_file("out.csv");
    const Run r = run({"-o", path.string(), "symbol", "--alpha", "0.5", "--eta", "1", "--lambda", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    CHECK(lines(s.str()).at(1) == "3.0,1.0");
    std::filesystem::remove(path);
    CHECK(run({"-o", "/nonexistent/dir/out.csv", "symbol", "--alpha", "0.5", "--eta", "1", "--lambda", "3"}).code == 2);
}

TEST_CASE("monte carlo output is byte-identical across thread counts and runs") {
    const std::vector<std::string> base{"mc", "subordinator", "--alpha", "0.5", "--eta", "1", "--t", "1",
                                        "--n", "100000", "--seed", "42"};
    auto with = [&](const std::string& threads) {
        std::vector<std::string> a{"--threads", threads};
        a.insert(a.end(), base.begin(), base.end());
        return run(a);
    };
    const Run one = with("1"), eight = with("8"), again = with("8");
    REQUIRE(one.code == 0);
    CHECK(one.out == eight.out);
    CHECK(eight.out == again.out);
    const Run js1 = run({"--threads", "1", "--format", "json", "mc", "reflected", "--mu", "1", "--x", "0.5",
                         "--n", "50000", "--seed", "3"});
    const Run js8 = run({"--threads", "8", "--format", "json", "mc", "reflected", "--mu", "1", "--x", "0.5",
                         "--n", "50000", "--seed", "3"});
    CHECK(js1.code == 0);
    CHECK(js1.out == js8.out);
}

TEST_CASE("help text states units") {
    const Run r = run({"symbol", "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("1/length") != std::string::npos);
    const Run v = run({"verify", "thm1", "--help"});
    CHECK(v.out.find("time units") != std::string::npos);
    CHECK(v.out.find("CSV columns") != std::string::npos);
}

TEST_CASE("small end-to-end values") {
    const auto mult = nlohmann::json::parse(
        run({"--format", "json", "multiplier", "--alpha", "0.5", "--eta", "0", "--gamma", "1"}).out);
    // untempered: -|gamma|^alpha
    CHECK(std::abs(mult["results"][0]["psi"].get<double>() + 1.0) < 1e-12);
    const auto ml = nlohmann::json::parse(run({"--format", "json", "ml", "--z", "0"}).out);
    CHECK(ml["results"][0]["value"] == 1.0);
    const Run dens = run({"--format", "json", "density", "u", "--mu", "0", "--x", "0", "--y", "0", "--t", "1"});
    CHECK(dens.code == 0);
}
