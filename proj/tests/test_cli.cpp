#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

// End-to-end checks of the command line surface: exit codes, report shape,
// determinism and the replay loop. The binary path arrives via VODIAG_BIN.

namespace {

using Json = nlohmann::ordered_json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string binary() {
    const char* env = std::getenv("VODIAG_BIN");
    REQUIRE_MESSAGE(env != nullptr, "VODIAG_BIN must point at the vodiag binary");
    return env;
}

RunResult run(const std::string& args) {
    RunResult res;
    const std::string cmd = binary() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string write_problem(const std::string& name, const std::string& body) {
    const std::string path = "cli_" + name + ".prob";
    std::ofstream out(path);
    out << body;
    return path;
}

} // namespace

TEST_CASE("rabier subcommand emits the multipliers") {
    const auto path = write_problem("quad", "objectives: [\"x1^2\"]\nconstraints: full\n");
    const auto res = run("rabier --problem " + path + " --at 3");
    REQUIRE(res.exit_code == 0);
    const Json report = Json::parse(res.out);
    CHECK(report["nu"].get<double>() == doctest::Approx(6.0));
    CHECK(report["lambda"][0].get<double>() == doctest::Approx(1.0));
    CHECK(report["problem_digest"].is_string());
}

TEST_CASE("usage and parse failures exit with 1") {
    CHECK(run("rabier --no-such-flag").exit_code == 1);
    CHECK(run("rabier --problem missing.prob --at 1").exit_code == 1);
    const auto bad = write_problem("bad", "objectives: [\"x1 +\"]\nconstraints: full\n");
    CHECK(run("rabier --problem " + bad + " --at 1").exit_code == 1);
    const auto quad = write_problem("quad2", "objectives: [\"x1^2\"]\nconstraints: full\n");
    CHECK(run("probe nosuch --problem " + quad + " --ybar 1").exit_code == 1);
}

TEST_CASE("failing verdicts still exit 0") {
    const auto sine = write_problem("sine", "objectives: [\"sin(x1)\"]\nconstraints: full\n");
    const auto res = run("probe proper --problem " + sine + " --ybar 0 --radii 1,2,12 --seed 1");
    REQUIRE(res.exit_code == 0);
    const Json report = Json::parse(res.out);
    CHECK(report["result"]["status"] == "FailsWithWitness");
}

TEST_CASE("crosscheck hypothesis violations exit 1") {
    const auto sum = write_problem("sum", "objectives: [\"x1+x2\"]\nconstraints: full\n");
    CHECK(run("crosscheck --problem " + sum + " --ybar 0 --radii 1,2,21").exit_code == 1);
}

TEST_CASE("reports are byte-identical modulo timing") {
    const auto sine = write_problem("sine2", "objectives: [\"sin(x1)\"]\nconstraints: full\n");
    const std::string args = "probe weak-ps --problem " + sine + " --ybar 0 --radii 1,2,10 --seed 7";
    auto a = Json::parse(run(args).out);
    auto b = Json::parse(run(args).out);
    a.erase("timing_ms");
    b.erase("timing_ms");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("replay verifies a stored report") {
    const auto sine = write_problem("sine3", "objectives: [\"sin(x1)\"]\nconstraints: full\n");
    const auto probe = run("probe ps --problem " + sine +
                           " --ybar 0 --radii 1,2,10 --seed 3 --out cli_report.json");
    REQUIRE(probe.exit_code == 0);
    const auto replay = run("replay --report cli_report.json");
    REQUIRE(replay.exit_code == 0);
    const Json report = Json::parse(replay.out);
    CHECK(report["ok"].get<bool>());
    CHECK(report["rows_checked"].get<int>() > 0);
}

TEST_CASE("witness tables cap at 50 rows unless --full is passed") {
    const auto sine = write_problem("sine4", "objectives: [\"sin(x1)\"]\nconstraints: full\n");
    const std::string base = "probe proper --problem " + sine + " --ybar 0 --radii 1,2,12 --seed 1";
    const Json capped = Json::parse(run(base).out);
    const Json full = Json::parse(run(base + " --full").out);
    CHECK(capped["result"]["witness"].size() <= 50);
    CHECK(full["result"]["witness"].size() ==
          static_cast<std::size_t>(full["result"]["witness_rows"].get<int>()));
}

TEST_CASE("oracle pareto-grid matches the known front") {
    const auto pair = write_problem("pair", "objectives: [\"x1\", \"x1^2\"]\nconstraints: full\n");
    const auto res = run("oracle pareto-grid --problem " + pair + " --box -2,2 --grid-step 0.5");
    REQUIRE(res.exit_code == 0);
    const Json report = Json::parse(res.out);
    CHECK(report["nondominated_count"].get<int>() == 5);  // grid points in [-2, 0]
}
