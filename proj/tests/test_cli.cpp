#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::initializer_list<std::string> args)
{
    std::vector<std::string> a{"mgraph"};
    a.insert(a.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (auto& s : a) argv.push_back(s.c_str());
    std::ostringstream out, err;
    int c = mgraph::cli::dispatch(int(argv.size()), argv.data(), out, err);
    return {c, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("mgraph_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("help and usage errors")
{
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"simulate", "--help"}).code == 0);
    auto r = run({});
    CHECK(r.code == 2);
    CHECK(r.err.find("simulate") != std::string::npos);
    CHECK(run({"simulate", "--bogus"}).code == 2);
    CHECK(run({"nosuch"}).code == 2);
    CHECK(run({"simulate", "--mode", "lifo", "--out", scratch("x").string()}).code == 2); // no weights
    CHECK(run({"simulate", "--weights", "[1,2]", "--mode", "sideways", "--out", scratch("x").string()}).code == 2);
    CHECK(run({"simulate", "--weights", "[1,-2]", "--mode", "lifo", "--out", scratch("x").string()}).code == 2);
    CHECK(run({"simulate", "--weights", "{oops", "--mode", "lifo", "--out", scratch("x").string()}).code == 2);
    CHECK(run({"continuum", "--limit", "{\"beta\":-1}"}).code == 2);
    CHECK(run({"compare", "--weights", "[1]"}).code == 2); // no comparison chosen
}

TEST_CASE("simulate writes every artifact")
{
    auto d = scratch("sim");
    REQUIRE(run({"simulate", "--weights", "[1.2,1,0.8,0.5,0.5]", "--mode", "direct", "--seed", "3", "--out",
                 (d / "direct").string()})
                .code == 0);
    for (auto f : {"edges.csv", "components.csv", "meta.json"}) CHECK(fs::exists(d / "direct" / f));
    REQUIRE(run({"simulate", "--weights", "[1.2,1,0.8,0.5,0.5]", "--mode", "lifo", "--seed", "3", "--out",
                 (d / "lifo").string()})
                .code == 0);
    for (auto f : {"trace.csv", "pinches.csv", "edges.csv", "components.csv", "masses.csv", "meta.json"})
        CHECK(fs::exists(d / "lifo" / f));
    auto m = json::parse(slurp(d / "lifo" / "meta.json"));
    CHECK(m["schema"] == 1);
    CHECK(m["mode"] == "lifo");
    REQUIRE(run({"simulate", "--weights", "[2,1,1,1]", "--mode", "markov", "--seed", "3", "--horizon", "50",
                 "--out", (d / "markov").string()})
                .code == 0);
    for (auto f : {"markov_trace.csv", "forest.json", "identities.json", "meta.json"})
        CHECK(fs::exists(d / "markov" / f));
    CHECK(slurp(d / "markov" / "markov_trace.csv").rfind("time,event,client,type,X,H", 0) == 0);
}

TEST_CASE("same seed, same bytes")
{
    auto d = scratch("det");
    for (auto sub : {"a", "b"})
        REQUIRE(run({"simulate", "--weights", "[1,1,0.7,0.3]", "--mode", "lifo", "--seed", "11", "--out",
                     (d / sub).string()})
                    .code == 0);
    for (auto f : {"trace.csv", "pinches.csv", "edges.csv", "components.csv", "masses.csv", "meta.json"})
        CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
}

TEST_CASE("verify passes and does not depend on thread count")
{
    auto a = run({"verify", "--weights", "[2,1,1,1]", "--replicas", "8", "--seed", "5", "--threads", "1"});
    auto b = run({"verify", "--weights", "[2,1,1,1]", "--replicas", "8", "--seed", "5", "--threads", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto j = json::parse(a.out);
    CHECK(j["pass"] == true);
    CHECK(j["identities"].contains("Y=X(theta)"));
    CHECK(j["coded_distances"]["pass"] == true);
    CHECK(run({"verify", "--identities", "--weights", "[2,1,1,1]", "--replicas", "3"}).code == 0);
}

TEST_CASE("metric matrices")
{
    auto d = scratch("metric");
    auto r = run({"metric", "--mode", "lifo", "--weights", "[1.5,1.2,1,1,0.8,0.6]", "--seed", "2", "--out",
                  d.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(d / "tree_matrix.csv"));
    CHECK(fs::exists(d / "pinched_matrix.csv"));
    CHECK(json::parse(slurp(d / "metric.json"))["matches_bfs"] == true);
}

TEST_CASE("continuum and scaling")
{
    auto d = scratch("cont");
    std::string lim = R"({"alpha":0,"beta":1,"kappa":1,"c":[1,0.5]})";
    REQUIRE(run({"continuum", "--limit", lim, "--horizon", "4", "--dt", "0.001", "--replicas", "3", "--threads", "2",
                 "--out", (d / "a").string()})
                .code == 0);
    REQUIRE(run({"continuum", "--limit", lim, "--horizon", "4", "--dt", "0.001", "--replicas", "3", "--threads", "1",
                 "--out", (d / "b").string()})
                .code == 0);
    for (auto f : {"grid.csv", "masses.csv", "continuum.json"}) CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    auto j = json::parse(slurp(d / "a" / "continuum.json"));
    CHECK(j["dt"].get<double>() == 4.0 / 4096);

    auto s = run({"scaling", "--family", "powerlaw", "--ns", "1000", "10000", "--out", (d / "sc").string()});
    REQUIRE(s.code == 0);
    CHECK(fs::exists(d / "sc" / "regime.csv"));
    CHECK(fs::exists(d / "sc" / "c3.csv"));
    auto p = run({"scaling", "--limit", R"({"beta":1,"kappa":1})"});
    REQUIRE(p.code == 0);
    CHECK(json::parse(p.out)["psi"]["is_grey"] == true);
}

TEST_CASE("compare with the flag alias, and config defaults")
{
    auto d = scratch("cmp");
    fs::create_directories(d);
    {
        std::ofstream c(d / "cfg.json");
        c << R"({"schema":1,"weights":[1,0.5],"replicas":2000,"seed":9})";
    }
    auto r = run({"compare", "--theorem21", "--config", (d / "cfg.json").string(), "--out", (d / "o").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("marginals PASS") != std::string::npos);
    auto j = json::parse(slurp(d / "o" / "compare.json"));
    CHECK(j["schema"] == 1);
    CHECK(j["R"] == 2000);
    auto r2 = run({"compare", "--edge-law", "--config", (d / "cfg.json").string(), "--replicas", "1000"});
    CHECK(r2.code == 0);
    {
        std::ofstream c(d / "bad.json");
        c << R"({"schema":1,"wieghts":[1]})";
    }
    CHECK(run({"compare", "--edge-law", "--config", (d / "bad.json").string()}).code == 2);
    {
        std::ofstream c(d / "old.json");
        c << R"({"weights":[1]})";
    }
    CHECK(run({"compare", "--edge-law", "--config", (d / "old.json").string()}).code == 2);
}
