#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(WAVEKIN_CLI_PATH) + " " + args;
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& sub) const {
        return (path / sub).string();
    }
};

}  // namespace

TEST_CASE("resonances: unit lattice count at the zero level") {
    TempDir tmp("res");
    const int rc = run("resonances --out " + tmp / "r" +
                       " --override L=1 --override radius=1.5"
                       " --override profile=const --override profile_radius=1.5");
    REQUIRE(rc == 0);
    std::ifstream csv(tmp.path / "r" / "resonances.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "xi_num,xi_den,count,re,im");
    bool found = false;
    while (std::getline(csv, line)) {
        if (line.rfind("0,", 0) == 0) {
            found = true;
            CHECK(line.rfind("0,1,33,", 0) == 0);
        }
    }
    CHECK(found);
}

TEST_CASE("validate: admissible scaling family passes, toy parameters fail") {
    TempDir tmp("val");
    // L = 10, h = L^-(4+a), sigma = L^(b-3-a) with a = 0.4, b = 0.05
    const int rc = run("validate --out " + tmp / "ok" +
                       " --override L=10 --override h=3.9810717055349695e-05"
                       " --override sigma=4.466835921509635e-04 --override eps=0");
    CHECK(rc == 0);
    const auto rep = nlohmann::json::parse(slurp(tmp.path / "ok" / "report.json"));
    CHECK(rep["ok"] == true);
    CHECK(rep["violations"].empty());

    const int rc2 = run("validate --out " + tmp / "bad" +
                        " --override L=4 --override h=0.1 2>/dev/null");
    CHECK(rc2 == 2);
    const auto rep2 =
        nlohmann::json::parse(slurp(tmp.path / "bad" / "report.json"));
    CHECK(rep2["ok"] == false);
    CHECK(!rep2["violations"].empty());
}

TEST_CASE("malformed configuration is rejected with exit 2") {
    TempDir tmp("badcfg");
    CHECK(run("validate --override bogus_key=1 2>/dev/null") == 2);
    CHECK(run("validate --override L=notanumber --out " + tmp / "x" +
              " 2>/dev/null") == 2);
    {
        std::ofstream f(tmp.path / "broken.cfg");
        f << "L 4\n";
    }
    CHECK(run("validate --config " + tmp / "broken.cfg" + " 2>/dev/null") == 2);
    {
        std::ofstream f(tmp.path / "wrongexp.cfg");
        f << "experiment=mc\n";
    }
    CHECK(run("validate --config " + tmp / "wrongexp.cfg" + " 2>/dev/null") == 2);
}

TEST_CASE("long-time guard stops the expansion unless overridden") {
    TempDir tmp("guard");
    CHECK(run("expansion --out " + tmp / "g" +
              " --override L=2 --override sigma=0.15 --override times=100"
              " 2>/dev/null") == 2);
    CHECK(run("expansion --out " + tmp / "g2" +
              " --override L=2 --override sigma=0.4 --override h=0.2"
              " --override times=0.5") == 0);
}

TEST_CASE("reruns are byte-identical, including from the manifest") {
    TempDir tmp("repro");
    const std::string common =
        " --override L=2 --override h=0.1 --override sigma=0.15"
        " --override random_phases=true --seed 42 --override times=0,0.7,1.3";
    REQUIRE(run("propagate --out " + tmp / "a" + common) == 0);
    REQUIRE(run("propagate --out " + tmp / "b" + common) == 0);
    CHECK(slurp(tmp.path / "a" / "propagate.csv") ==
          slurp(tmp.path / "b" / "propagate.csv"));
    CHECK(slurp(tmp.path / "a" / "manifest.json") ==
          slurp(tmp.path / "b" / "manifest.json"));

    REQUIRE(run("propagate --config " + tmp / "a" + "/manifest.json --out " +
                tmp / "c") == 0);
    CHECK(slurp(tmp.path / "a" / "propagate.csv") ==
          slurp(tmp.path / "c" / "propagate.csv"));
    CHECK(slurp(tmp.path / "a" / "manifest.json") ==
          slurp(tmp.path / "c" / "manifest.json"));
}

TEST_CASE("level-set cache reproduces the uncached output") {
    TempDir tmp("cache");
    const std::string common =
        " --override L=3 --override radius=1 --override Kx=1"
        " --override random_phases=true --seed 9";
    REQUIRE(run("resonances --out " + tmp / "plain" + common) == 0);
    ::setenv("WAVEKIN_CACHE", (tmp.path / "store").string().c_str(), 1);
    REQUIRE(run("resonances --out " + tmp / "warm" + common) == 0);
    REQUIRE(run("resonances --out " + tmp / "hit" + common) == 0);
    ::unsetenv("WAVEKIN_CACHE");
    CHECK(!fs::is_empty(tmp.path / "store"));
    CHECK(slurp(tmp.path / "plain" / "resonances.csv") ==
          slurp(tmp.path / "warm" / "resonances.csv"));
    CHECK(slurp(tmp.path / "plain" / "resonances.csv") ==
          slurp(tmp.path / "hit" / "resonances.csv"));
}

TEST_CASE("key=value config files drive a run") {
    TempDir tmp("cfgfile");
    {
        std::ofstream f(tmp.path / "run.cfg");
        f << "# weekly decay scan\n"
             "experiment = decay\n"
             "times = 10,100,1000\n"
             "uw = 1.5   # wider packet\n";
    }
    REQUIRE(run("decay --config " + tmp / "run.cfg" + " --out " + tmp / "d") == 0);
    const auto rep = nlohmann::json::parse(slurp(tmp.path / "d" / "report.json"));
    const double slope = rep["loglog_slope"].get<double>();
    CHECK(slope > -2.3);
    CHECK(slope < -1.7);
    const auto man = nlohmann::json::parse(slurp(tmp.path / "d" / "manifest.json"));
    CHECK(man["config"]["uw"] == "1.5");
    CHECK(man["experiment"] == "decay");
}
