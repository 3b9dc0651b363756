#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cra/cli.hpp"
#include "cra/propagation.hpp"

using namespace cra;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    return {code, o.str(), e.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::map<std::string, std::string> record(const std::string& text)
{
    std::map<std::string, std::string> m;
    for (const auto& row : csv(text)) {
        if (row.size() == 2) {
            m[row[0]] = row[1];
        }
    }
    return m;
}

} // namespace

TEST_CASE("propagate emits the declared columns")
{
    const Run r = run({"propagate", "--r0", "1", "--v0", "1.26014", "--alpha", "-0.05", "--periods", "10", "--samples", "2000"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 2001);
    CHECK(rows[0] == std::vector<std::string>{"t", "tau", "r", "theta", "v", "gamma"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].size() == 6);
    }
    // Closed orbit: the last sample returns to the start.
    CHECK(std::stod(rows.back()[2]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero span echoes the initial state")
{
    const Run r = run({"propagate", "--r0", "1.1", "--v0", "1.1", "--gamma0-deg", "10", "--alpha", "0.02", "--t-span", "0", "--samples", "1"});
    REQUIRE(r.code == 0);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][0]) == 0.0);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(std::stod(rows[1][4]) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(std::stod(rows[1][5]) == doctest::Approx(10.0 * M_PI / 180.0).epsilon(1e-9));
}

TEST_CASE("uniform pseudo-time sampling for the bounded and unbounded radius curves")
{
    for (const char* a : {"0.1", "0.02"}) {
        const Run r = run({"propagate", "--r0", "1", "--v0", "1.2", "--alpha", a, "--tau-span", "3", "--samples", "31"});
        REQUIRE(r.code == 0);
        const auto rows = csv(r.out);
        REQUIRE(rows.size() == 32);
        CHECK(std::stod(rows[11][1]) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::stod(rows[1][2]) == 1.0);
    }
    const Run far = run({"propagate", "--r0", "1", "--v0", "1.2", "--alpha", "0.1", "--tau-span", "50", "--samples", "3"});
    CHECK(far.code == 2);
}

TEST_CASE("json output")
{
    const Run r = run({"propagate", "--r0", "1", "--v0", "1.2", "--alpha", "-0.01", "--t-span", "5", "--samples", "4", "--format", "json"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    REQUIRE(doc.contains("meta"));
    REQUIRE(doc["samples"].size() == 4);
    for (const auto& s : doc["samples"]) {
        for (const char* k : {"t", "tau", "r", "theta", "v", "gamma"}) {
            CHECK(s.at(k).is_number());
        }
    }
    const auto& m = doc["meta"];
    CHECK(m["energy"].get<double>() == doctest::Approx(0.72 - 1.0 + 0.01));
    CHECK(m["momentum"].get<double>() == doctest::Approx(1.2));
    CHECK(m["f_roots"].size() == 3);
    CHECK(m["g_roots"].size() == 3);
    CHECK(m["T_t"].is_number());
    CHECK(m["T_tau"].is_number());
}

TEST_CASE("identical invocations give identical bytes")
{
    const std::vector<std::string> args{"propagate", "--r0", "1.3", "--v0", "0.9", "--gamma0-deg", "-20", "--alpha", "0.03", "--t-span", "40", "--samples", "50"};
    CHECK(run(args).out == run(args).out);
}

TEST_CASE("csv round-trips doubles exactly")
{
    const Run r = run({"propagate", "--r0", "1", "--v0", "1.2", "--alpha", "-0.01", "--t-span", "3", "--samples", "2"});
    const auto rows = csv(r.out);
    const SolutionContext ctx = build_context({1.0, 1.2, 0.0, -0.01});
    CHECK(std::stod(rows[2][2]) == propagate(ctx, 3.0).r);
}

TEST_CASE("errors are typed records with exit code 2")
{
    const Run r = run({"classify", "--r0", "1", "--v0", "1", "--alpha", "0"});
    CHECK(r.code == 2);
    const json e = json::parse(r.err);
    CHECK(e["error"]["kind"] == "quadratic_degeneracy");
    CHECK(run({"propagate", "--r0", "-1", "--v0", "1", "--alpha", "0.1", "--t-span", "1"}).code == 2);
    CHECK(run({"propagate", "--r0", "1", "--v0", "1", "--alpha", "0.1"}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"propagate", "--r0", "1", "--v0", "1", "--alpha", "0.1", "--t-span", "1", "--tau-span", "1"}).code == 2);
}

TEST_CASE("classify")
{
    const auto bounded = record(run({"classify", "--r0", "1.1", "--v0", "1.1272790", "--gamma0-deg", "14.4", "--alpha", "0.02"}).out);
    CHECK(bounded.at("status") == "bounded");
    CHECK(bounded.count("g_roots_1_re") == 1);
    CHECK(bounded.count("f_roots_3_im") == 1);
    const auto esc = record(run({"classify", "--r0", "1", "--v0", "1", "--alpha", "0.2"}).out);
    CHECK(esc.at("status") == "unbounded");
    const auto marg = record(run({"classify", "--r0", "1", "--v0", "1", "--alpha", "0.125"}).out);
    CHECK(marg.at("status") == "marginal");
}

TEST_CASE("period")
{
    const Run r = run({"period", "--r0", "1", "--v0", "1.56", "--alpha", "-0.01", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["T_t"].get<double>() == doctest::Approx(j["T_t_implicit"].get<double>()).epsilon(1e-10));
    CHECK(run({"period", "--r0", "1", "--v0", "1.2", "--alpha", "0.1"}).code == 2);

    const Run k = run({"period", "--r0", "1", "--v0", "1.56", "--alpha", "-0.01", "--kepler-curve", "--samples", "200"});
    REQUIRE(k.code == 0);
    const auto rows = csv(k.out);
    CHECK(rows[0] == std::vector<std::string>{"tau", "t"});
    for (std::size_t i = 2; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) > std::stod(rows[i - 1][1]));
    }
    CHECK(std::stod(rows.back()[1]) == doctest::Approx(j["T_t"].get<double>()).epsilon(1e-12));

    const Run s = run({"period", "--r0", "1", "--v0", "1", "--sweep", "--alpha-steps", "9", "--vp-steps", "3"});
    REQUIRE(s.code == 0);
    const auto sw = csv(s.out);
    CHECK(sw[0] == std::vector<std::string>{"v_p", "alpha", "T_tau", "T_t"});
    CHECK(sw.size() > 10);
}

TEST_CASE("find-periodic")
{
    const auto rec = record(run({"find-periodic", "--rm", "1", "--alpha", "-0.05", "--M", "1", "--N", "10", "--v-lo", "1.2", "--v-hi", "1.3"}).out);
    CHECK(std::stod(rec.at("v_m")) == doctest::Approx(1.26014).epsilon(1e-4));
    CHECK(run({"find-periodic", "--rm", "1", "--alpha", "-0.05", "--M", "1", "--N", "10", "--v-lo", "1.3", "--v-hi", "1.2"}).code == 2);

    // One-eighth winding, closure checked through propagate.
    const auto r8 = record(run({"find-periodic", "--rm", "1", "--alpha", "-0.05", "--M", "1", "--N", "8", "--v-lo", "1.0", "--v-hi", "1.6"}).out);
    const Run p = run({"propagate", "--r0", "1", "--v0", r8.at("v_m"), "--alpha", "-0.05", "--periods", "8", "--samples", "2"});
    const auto rows = csv(p.out);
    CHECK(std::stod(rows[2][2]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::remainder(std::stod(rows[2][3]), 2 * M_PI) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("escape-alpha")
{
    const auto rec = record(run({"escape-alpha", "--r0", "1", "--v0", "1"}).out);
    CHECK(std::stod(rec.at("alpha_star")) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(run({"escape-alpha", "--r0", "1", "--v0", "1", "--alpha-lo", "0.2", "--alpha-hi", "0.5"}).code == 2);
}

TEST_CASE("dimensional units are converted consistently")
{
    // mu = 2, length unit 2: time unit 2, speed unit 1, acceleration unit 1/2.
    const auto can = csv(run({"propagate", "--r0", "1", "--v0", "1.1", "--gamma0-deg", "5", "--alpha", "-0.02", "--t-span", "6", "--samples", "3"}).out);
    const auto dim = csv(run({"propagate", "--r0", "2", "--v0", "1.1", "--gamma0-deg", "5", "--alpha", "-0.01", "--t-span", "12", "--samples", "3", "--mu", "2", "--length-unit", "2"}).out);
    for (std::size_t i = 1; i < can.size(); ++i) {
        CHECK(std::stod(dim[i][0]) == doctest::Approx(2.0 * std::stod(can[i][0])));
        CHECK(std::stod(dim[i][2]) == doctest::Approx(2.0 * std::stod(can[i][2])));
        CHECK(std::stod(dim[i][3]) == doctest::Approx(std::stod(can[i][3])));
        CHECK(std::stod(dim[i][4]) == doctest::Approx(std::stod(can[i][4])));
    }
}

TEST_CASE("output file")
{
    const auto path = std::filesystem::temp_directory_path() / "cra_cli_test.csv";
    const Run r = run({"propagate", "--r0", "1", "--v0", "1", "--alpha", "-0.05", "--t-span", "1", "--samples", "5", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(csv(ss.str()).size() == 6);
    std::filesystem::remove(path);
}
