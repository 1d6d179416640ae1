#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace modelock;
using namespace modelock::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("modelock_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "modelock");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

const char* const find_cycle_cfg = R"(# Mira period 5
command = find-cycle
map = mira
param.B = -0.58
x0 = 0.544 -0.525 0.091
saddle = yes
check.period = 5
)";

}  // namespace

TEST_CASE("config grammar") {
    const auto c = Config::parse("# comment\n\n  a = 1  \nb=two words # trailing\n");
    CHECK(c.get("a") == "1");
    CHECK(c.get("b") == "two words");
    CHECK_FALSE(c.get("c"));
    CHECK(c.entries().size() == 2);
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse(" = 3\n"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/modelock.cfg"), ConfigError);
}

TEST_CASE("settings validation") {
    CHECK_NOTHROW(Settings(Config::parse(find_cycle_cfg)));
    CHECK_THROWS_AS(Settings(Config::parse("map = mira\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = nope\nmap = mira\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = orbit\nmap = nope\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = orbit\nmap = mira\nbogus = 1\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = orbit\nmap = mira\nparam.Q = 1\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = orbit\nmap = mira\ncheck.period = 5\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = orbit\nmap = mira\ntransient = many\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = orbit\nmap = mira\nx0 = 1 2\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = scan\nmap = mira\n")), ConfigError);
    CHECK_THROWS_AS(Settings(Config::parse("command = find-cycle\nmap = mira\nsaddle = maybe\n")), ConfigError);

    const Settings s(Config::parse(find_cycle_cfg));
    CHECK(s.map().param("B") == -0.58);
    CHECK(s.map().param("A") == -2.269);
    CHECK(s.integer("transient") == 20000);
    CHECK(s.flag("saddle"));
    CHECK(s.vec3("x0") == State3(0.544, -0.525, 0.091));
    CHECK(s.checks().size() == 1);
}

TEST_CASE("resolved configuration lists defaults and parameters") {
    const Settings s(Config::parse(find_cycle_cfg));
    const std::string text = s.resolved_text();
    CHECK(text.find("param.A = -2.269") != std::string::npos);
    CHECK(text.find("newton.tol = ") != std::string::npos);
    const Settings again(Config::parse(text));
    CHECK(again.resolved_text() == text);
}

TEST_CASE("preset catalog") {
    const auto& all = presets();
    CHECK(all.size() >= 20);
    for (const char* name : {"table1", "table2", "fig5", "fig6c", "fig17", "fig21"}) {
        CAPTURE(name);
        const Preset* p = find_preset(name);
        REQUIRE(p);
        CHECK_FALSE(p->description.empty());
        CHECK_FALSE(p->steps.empty());
    }
    CHECK(find_preset("nope") == nullptr);
    for (const auto& p : all)
        for (const auto& step : p.steps) {
            CAPTURE(p.name);
            CHECK_NOTHROW(Settings(Config::parse(step.config)));
        }
}

TEST_CASE("manifest reproduces the run") {
    const auto dir = scratch("manifest");
    std::string out;
    REQUIRE(invoke({"--config", write_config(dir, find_cycle_cfg).string(), "--out", (dir / "a").string()}, &out) ==
            exit_ok);
    CHECK(out.find("check.period: PASS") != std::string::npos);
    const std::string manifest = slurp(dir / "a" / "manifest.txt");
    CHECK(manifest.find("# version:") != std::string::npos);
    CHECK(manifest.find("# output: cycles.csv") != std::string::npos);
    REQUIRE(invoke({"--config", (dir / "a" / "manifest.txt").string(), "--out", (dir / "b").string()}) == exit_ok);
    CHECK(slurp(dir / "a" / "cycles.csv") == slurp(dir / "b" / "cycles.csv"));
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    std::string out, err;
    CHECK(invoke({"list-presets"}, &out) == exit_ok);
    CHECK(out.find("table1") != std::string::npos);
    CHECK(invoke({"list-maps"}, &out) == exit_ok);
    CHECK(out.find("map: bcnf") != std::string::npos);
    CHECK(invoke({"list-presets", "--threads", "2"}) == exit_ok);

    CHECK(invoke({"reproduce", "nope"}, nullptr, &err) == exit_config);
    CHECK(invoke({"--bogus"}) == exit_config);
    CHECK(invoke({}) == exit_config);
    CHECK(invoke({"--config", write_config(dir, "command = orbit\nmap = mira\nwhat = 1\n").string()}) == exit_config);

    const std::string failing = std::string(find_cycle_cfg) + "check.saddle.period = 7\n";
    CHECK(invoke({"--config", write_config(dir, failing).string(), "--out", (dir / "f").string()}, &out) ==
          exit_check);
    CHECK(out.find("FAIL") != std::string::npos);

    const std::string diverging = "command = find-cycle\nmap = henon\nx0 = 3 -2 1\nperiod = 7\ntransient = 0\nnewton.max_iter = 1\n";
    CHECK(invoke({"--config", write_config(dir, diverging).string(), "--out", (dir / "d").string()}, nullptr, &err) ==
          exit_numerical);

    const std::string empty = "command = scan\nmap = henon\nx0 = 0.1 0.1 0.1\nscan.param = a\nscan.from = 1\nscan.to = 2\nscan.count = 0\n";
    CHECK(invoke({"--config", write_config(dir, empty).string(), "--out", (dir / "e").string()}, &out) == exit_ok);
    CHECK(slurp(dir / "e" / "scan.csv") == "a,index,x,y,z\n");
    fs::remove_all(dir);
}
