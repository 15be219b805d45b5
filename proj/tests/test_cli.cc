#include <doctest.h>

#include <pbforge/cli.hh>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/stat.h>
#include <unistd.h>

using namespace pbforge;
namespace fs = std::filesystem;

namespace
{
    struct Run
    {
        int code;
        std::string out, err;
    };

    auto cli(std::vector<std::string> args) -> Run
    {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return Run{code, out.str(), err.str()};
    }

    auto fixture(const std::string & name) -> std::string
    {
        return std::string{PBFORGE_FIXTURES} + "/" + name;
    }

    struct TempDir
    {
        fs::path path;
        TempDir() : path(fs::temp_directory_path() / ("pbforge-test-" + std::to_string(getpid())))
        {
            fs::create_directories(path);
        }
        ~TempDir()
        {
            std::error_code ignored;
            fs::remove_all(path, ignored);
        }
        auto write(const std::string & name, const std::string & text, bool executable = false) const -> std::string
        {
            auto p = path / name;
            std::ofstream{p} << text;
            if (executable)
                fs::permissions(p, fs::perms::owner_all);
            return p.string();
        }
    };
}

TEST_CASE("check accepts the fixtures")
{
    auto r = cli({"check", fixture("unit_clash.opb"), fixture("unit_clash.pbp"), fixture("php32_red.opb"), fixture("php32_red.pbp")});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.find("unit_clash.pbp: VerifiedUnsat") != std::string::npos);
    CHECK(r.out.find("php32_red.pbp: VerifiedUnsat") != std::string::npos);
}

TEST_CASE("check reports rejections with their line")
{
    TempDir dir;
    auto proof = dir.write("bad.pbp", "pseudo-Boolean proof version 3.0\nf 2 ;\npol 1 ;\nconclusion UNSAT : 3 ;\nend pseudo-Boolean proof\n");
    auto r = cli({"check", fixture("unit_clash.opb"), proof});
    CHECK(r.code == exit_code::rejected);
    CHECK(r.out.find("Rejected at line 4") != std::string::npos);

    auto garbage = dir.write("garbage.pbp", "pseudo-Boolean proof version 3.0\nfrobnicate ;\nend pseudo-Boolean proof\n");
    auto g = cli({"check", fixture("unit_clash.opb"), garbage});
    CHECK(g.code == exit_code::error);

    auto missing = cli({"check", fixture("unit_clash.opb"), "/nonexistent.pbp"});
    CHECK(missing.code == exit_code::error);

    CHECK(cli({"check", fixture("unit_clash.opb")}).code == exit_code::error);
}

TEST_CASE("check --json")
{
    auto r = cli({"check", "--json", fixture("pol_chain.opb"), fixture("pol_chain.pbp")});
    CHECK(r.code == exit_code::ok);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == report_schema);
    CHECK(j["command"] == "check");
    REQUIRE(j["runs"].size() == 1);
    CHECK(j["runs"][0]["verdict"] == "VerifiedUnsat");
    CHECK(j["runs"][0]["stats"]["rules"]["pol"] == 3);
    CHECK(j["runs"][0]["failing_line"].is_null());
}

TEST_CASE("check --strict-hints")
{
    TempDir dir;
    auto proof = dir.write("nohints.pbp", "pseudo-Boolean proof version 3.0\nf 2 ;\nrup >= 1 ;\nconclusion UNSAT : 3 ;\nend pseudo-Boolean proof\n");
    CHECK(cli({"check", fixture("unit_clash.opb"), proof}).code == exit_code::ok);
    CHECK(cli({"check", "--strict-hints", fixture("unit_clash.opb"), proof}).code == exit_code::rejected);
}

TEST_CASE("encode")
{
    auto r = cli({"encode", "php", "--pigeons", "3", "--holes", "2"});
    CHECK(r.code == exit_code::ok);
    CHECK(r.out.starts_with("* #variable= 6 #constraint= 9"));
    CHECK(r.err == "6 vars, 9 constraints\n");

    TempDir dir;
    auto path = (dir.path / "p13.opb").string();
    auto w = cli({"encode", "paley-is", "--p", "13", "--k", "4", "-o", path});
    CHECK(w.code == exit_code::ok);
    CHECK(w.out == "13 vars, 40 constraints\n");
    CHECK(fs::exists(path));

    auto j = cli({"encode", "--json", "ramsey", "--n", "9", "--s", "3", "--t", "4", "-o", (dir.path / "r.opb").string()});
    auto report = nlohmann::json::parse(j.out);
    CHECK(report["variables"] == 36);
    CHECK(report["constraints"] == 210);

    CHECK(cli({"encode", "paley-is", "--p", "7", "--k", "3"}).code == exit_code::error);
    CHECK(cli({"encode", "nosuchfamily"}).code == exit_code::error);
}

TEST_CASE("oracle")
{
    auto unsat = cli({"oracle", fixture("php32_red.opb")});
    CHECK(unsat.code == exit_code::rejected);
    CHECK(unsat.out.starts_with("UNSAT"));

    TempDir dir;
    auto sat = dir.write("sat.opb", "+1 x1 +1 x2 >= 2 ;\n");
    auto s = cli({"oracle", sat});
    CHECK(s.code == exit_code::ok);
    CHECK(s.out.find("v x1 x2") != std::string::npos);

    CHECK(cli({"oracle", "--limit", "1", sat}).code == exit_code::too_large);
}

TEST_CASE("witness")
{
    CHECK(cli({"witness", "vdw", "--n", "8", "--L", "3", "RRBBRRBB"}).code == exit_code::ok);
    CHECK(cli({"witness", "vdw", "--n", "8", "--L", "3", "RRRBRRBB"}).code == exit_code::rejected);
    CHECK(cli({"witness", "langford", "--n", "3", "2,3,1,2,1,3"}).code == exit_code::ok);
    CHECK(cli({"witness", "langford", "--n", "3", "1,2,3,1,2,3"}).code == exit_code::rejected);
    CHECK(cli({"witness", "vdw", "--n", "8", "--L", "3", "RRB"}).code == exit_code::error);
}

TEST_CASE("pipeline skips without tools")
{
    auto r = cli({"pipeline", "php", "--pigeons", "3", "--holes", "2", "--solver", "/nonexistent/solver", "--elaborator", "/nonexistent/elab"});
    CHECK(r.code == exit_code::skipped);
    CHECK(r.out.find("pipeline skipped") != std::string::npos);
}

TEST_CASE("pipeline with stand-in tools")
{
    TempDir dir;
    auto solver = dir.write("solver.sh",
        "#!/bin/sh\n"
        "if grep -q 'constraint= 9' \"$1\"; then echo 's UNSATISFIABLE'; echo 'stub' > \"$2\";\n"
        "else echo 's SATISFIABLE'; echo 'v x1 -x2 -x3 x4'; fi\n",
        true);
    auto elaborator = dir.write("elab.sh", "#!/bin/sh\ncp '" + fixture("php32_red.pbp") + "' \"$3\"\n", true);
    auto broken = dir.write("broken.sh", "#!/bin/sh\necho nope >&2\nexit 3\n", true);
    auto wrong = dir.write("wrong.sh", "#!/bin/sh\ncp '" + fixture("unit_clash.pbp") + "' \"$3\"\n", true);

    auto unsat = cli({"pipeline", "php", "--pigeons", "3", "--holes", "2", "--solver", solver, "--elaborator", elaborator});
    CHECK(unsat.code == exit_code::ok);
    CHECK(unsat.out.find("VerifiedUnsat") != std::string::npos);

    auto sat = cli({"pipeline", "--json", "php", "--pigeons", "2", "--holes", "2", "--solver", solver, "--elaborator", elaborator});
    CHECK(sat.code == exit_code::ok);
    auto j = nlohmann::json::parse(sat.out);
    CHECK(j["result"] == "VerifiedSat");

    CHECK(cli({"pipeline", "php", "--pigeons", "3", "--holes", "2", "--solver", solver, "--elaborator", broken}).code == exit_code::error);
    CHECK(cli({"pipeline", "php", "--pigeons", "3", "--holes", "2", "--solver", solver, "--elaborator", wrong}).code == exit_code::rejected);
}

TEST_CASE("usage errors")
{
    CHECK(cli({}).code != exit_code::ok);
    CHECK(cli({"frobnicate"}).code == exit_code::error);
}
