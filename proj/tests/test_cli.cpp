#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ckn/cli.hpp"
#include "ckn/errors.hpp"

using namespace ckn;
using namespace ckn::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args)
{
    args.insert(args.begin(), "ckn");
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / ("ckn_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

} // namespace

TEST_CASE("cli: ini parsing")
{
    const auto entries = parse_ini("# comment\n[run]\ncommand = vector-scan\n; other\n\n[params]\nN = 4\n", "x.ini");
    REQUIRE(entries.size() == 4);
    CHECK(entries[0].section == "run");
    CHECK(entries[0].key.empty());
    CHECK(entries[1].key == "command");
    CHECK(entries[1].value == "vector-scan");
    CHECK(entries[1].line == 3);
    CHECK(entries[3].section == "params");

    try {
        parse_ini("[run]\nthis line has no equals\n", "cfg.ini");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg.ini:2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_ini("[run\n", "cfg.ini"), ConfigError);
    CHECK_THROWS_AS(parse_ini("key = 1\n", "cfg.ini"), ConfigError);
}

TEST_CASE("cli: entries name the offending field")
{
    RunConfig cfg;
    try {
        apply_entries(cfg, parse_ini("[params]\nN = 3\np = two\n", "c.ini"), "c.ini");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("c.ini:3") != std::string::npos);
        CHECK(msg.find("'p'") != std::string::npos);
    }
    CHECK_THROWS_AS(apply_entries(cfg, parse_ini("[nope]\nx = 1\n", "c.ini"), "c.ini"), ConfigError);
    CHECK_THROWS_AS(apply_entries(cfg, parse_ini("[scheme]\nfoo = 1\n", "c.ini"), "c.ini"), ConfigError);
    CHECK_THROWS_AS(apply_entries(cfg, parse_ini("[params]\nN = 3\np = 0.5\n", "c.ini"), "c.ini"), ConfigError);

    RunConfig two;
    apply_entries(two, parse_ini("[params]\nN = 3\np = 2\n[params]\nN = 5\np = 2.5\na = 1\nb = 0.5\n", "c.ini"), "c.ini");
    REQUIRE(two.params_sets.size() == 2);
    CHECK(two.params_sets[1].N == 5);
    CHECK(two.params_sets[1].b == 0.5);
}

TEST_CASE("cli: presets")
{
    for (const std::string& name : preset_names()) {
        RunConfig cfg;
        CHECK_NOTHROW(apply_preset(cfg, name));
        CHECK_FALSE(cfg.params_sets.empty());
    }
    RunConfig cfg;
    apply_preset(cfg, "thm1-default");
    REQUIRE(cfg.params_sets.size() == 1);
    CHECK(cfg.params_sets[0] == CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0));
    REQUIRE(cfg.theorem.has_value());
    CHECK(*cfg.theorem == TheoremId::Thm1);
    CHECK_THROWS_AS(apply_preset(cfg, "nope"), ConfigError);
}

TEST_CASE("cli: validation")
{
    RunConfig cfg;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.command = "estimate-constant";
    apply_preset(cfg, "cor7");
    cfg.theorem.reset();
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.theorem = TheoremId::Thm6;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.theorem = TheoremId::Thm2;
    CHECK_NOTHROW(validate(cfg));
    RunConfig v;
    v.command = "vector-scan";
    v.samples = 10;
    CHECK_THROWS_AS(validate(v), ConfigError);
}

TEST_CASE("cli: exit codes")
{
    CHECK(call({"verify-identities", "--preset", "no-such"}).code == kExitConfig);
    CHECK(call({"verify-identities"}).code == kExitConfig);
    CHECK(call({"not-a-command"}).code == kExitConfig);
    CHECK(call({"estimate-constant", "--preset", "cor7", "--theorem", "thm9"}).code == kExitConfig);
    const auto bad = temp_file("bad.ini", "[run]\ncommand = verify-identities\n[params]\nN = x\n");
    const Outcome o = call({"--config", bad});
    CHECK(o.code == kExitConfig);
    CHECK(o.err.find(":4") != std::string::npos);

    const Outcome ok = call({"verify-identities", "--preset", "cor7", "--no-timestamp"});
    CHECK(ok.code == kExitOk);
    CHECK(ok.out.rfind("N,p,a,b,profile,", 0) == 0);
}

TEST_CASE("cli: reports are deterministic across worker counts")
{
    const Outcome a = call({"verify-identities", "--preset", "identity-suite", "--no-timestamp", "--jobs", "1"});
    const Outcome b = call({"verify-identities", "--preset", "identity-suite", "--no-timestamp", "--jobs", "3"});
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
}

TEST_CASE("cli: json report and config precedence")
{
    const auto cfg = temp_file("vec.ini", "[run]\ncommand = vector-scan\nseed = 3\nformat = csv\n"
                                          "[vector]\np = 1.5, 3\nsamples = 10000\n");
    const Outcome o = call({"--config", cfg, "--format", "json", "--seed", "5"});
    CHECK(o.code == kExitOk);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["command"] == "vector-scan");
    CHECK(j["seed"] == 5);
    CHECK(j["summary"]["fail_count"] == 0);
    CHECK(j["summary"]["pass_count"].get<int>() > 0);
    CHECK(j.contains("generated"));
}

TEST_CASE("cli: other commands run")
{
    CHECK(call({"counterexample", "--preset", "cor7", "--no-timestamp"}).code == kExitOk);
    CHECK(call({"estimate-constant", "--preset", "thm4-default", "--no-timestamp"}).code == kExitOk);
    const Outcome c = call({"corpus-dump", "--preset", "cor7", "--format", "json", "--no-timestamp"});
    CHECK(c.code == kExitOk);
    CHECK(nlohmann::json::parse(c.out)["profiles"].size() == 14);
    const auto out = (std::filesystem::temp_directory_path() / "ckn_test_poincare.csv").string();
    const Outcome p = call({"poincare", "--output", out, "--no-timestamp"});
    CHECK(p.code == kExitOk);
    CHECK(std::filesystem::file_size(out) > 0);
}
