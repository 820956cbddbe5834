#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "kvf/cli.hpp"

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

/// Runs the installed binary with the given argument string and captures
/// standard output.
CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(KVF_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace

TEST_CASE("point specs parse and reject malformed input", "[cli]") {
    const auto p = kvf::cli::parse_point("u:0.5,1,0,-0.25");
    CHECK(p.chart == kvf::Chart::ModifiedU);
    CHECK(p.coords[0] == 0.5);
    CHECK(p.coords[3] == -0.25);
    CHECK_THROWS_AS(kvf::cli::parse_point("0.5,1,0,0"), kvf::ConfigError);
    CHECK_THROWS_AS(kvf::cli::parse_point("x:1,2,3"), kvf::ConfigError);
    CHECK_THROWS_AS(kvf::cli::parse_point("mars:0,0,0,0"), kvf::ConfigError);
}

TEST_CASE("catalog subcommand lists and evaluates fields", "[cli]") {
    const auto list = run_cli("catalog --list");
    CHECK(list.exit_code == 0);
    CHECK(list.out.find("hyp4") != std::string::npos);
    CHECK(list.out.find("static0") != std::string::npos);

    const auto eval = run_cli("catalog --eval hyp4 --profile secant:1 --point u:0,0,0,0");
    CHECK(eval.exit_code == 0);
    CHECK(eval.out.find("\"vector\":[-1.0") != std::string::npos);
    CHECK(eval.out.find("time-like") != std::string::npos);
}

TEST_CASE("killing-check and compat-rank report verdicts", "[cli]") {
    const auto kc = run_cli("killing-check --profile secant:1 --field equatorial-12 --samples 5");
    CHECK(kc.exit_code == 0);
    CHECK(kc.out.find("\"verdict\":\"pass\"") != std::string::npos);

    const auto bad = run_cli("killing-check --profile exponential:1,1 --field static0 --samples 5");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("\"verdict\":\"fail\"") != std::string::npos);

    const auto rank =
        run_cli("compat-rank --profile exponential:1,1 --point x:0.2,0.3,-0.1,0.25");
    CHECK(rank.exit_code == 0);
    CHECK(rank.out.find("\"kernel_dim\":6") != std::string::npos);
    CHECK(rank.out.find("\"case\":\"generic\"") != std::string::npos);

    // the --chart/--coords spelling parses to the same point
    const auto rank2 = run_cli(
        "compat-rank --profile exponential:1,1 --chart north --coords 0.2,0.3,-0.1,0.25");
    CHECK(rank2.exit_code == 0);
    CHECK(rank2.out == rank.out);
}

TEST_CASE("usage and config errors exit with code 2", "[cli]") {
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("algebra-dim --profile warp:1").exit_code == 2);
    CHECK(run_cli("full-verify --samples 0").exit_code == 2);
    CHECK(run_cli("catalog").exit_code == 2);
    CHECK(run_cli("transport --field mer1").exit_code == 2);
}

TEST_CASE("algebra-dim and transport produce the documented outputs", "[cli]") {
    const auto dim = run_cli("algebra-dim --profile constant:2 --samples 5");
    CHECK(dim.exit_code == 0);
    CHECK(dim.out.find("\"algebra_dimension\":7") != std::string::npos);

    const auto tr =
        run_cli("transport --profile constant:1 --field mer1 --point x:0.3,0.2,-0.1,0.15");
    CHECK(tr.exit_code == 0);
    CHECK(tr.out.find("\"verdict\":\"pass\"") != std::string::npos);
}

TEST_CASE("embed-check passes the documented thresholds", "[cli]") {
    const auto r = run_cli("embed-check --a 1 --samples 20 --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("max_hyperboloid_dev") != std::string::npos);
    CHECK(r.out.find("K_estimate") != std::string::npos);
}

TEST_CASE("seed precedence: environment variable loses to the flag", "[cli]") {
    const auto flagged = run_cli("algebra-dim --profile constant:2 --samples 5 --seed 7");
    const auto env = run_cli("algebra-dim --profile constant:2 --samples 5");
    CHECK(flagged.out.find("\"seed\":7") != std::string::npos);
    CHECK(env.out.find("\"seed\":42") != std::string::npos);

    const std::string env_cmd =
        std::string("KL_SEED=9 ") + KVF_CLI_PATH + " algebra-dim --profile constant:2 --samples 5";
    FILE* pipe = popen(env_cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    pclose(pipe);
    CHECK(out.find("\"seed\":9") != std::string::npos);
}

TEST_CASE("config files override defaults and flags override the file", "[cli]") {
    {
        std::ofstream cfg("cli_test_verify.cfg");
        cfg << "# test config\nprofile=constant:2\nsamples=4\n";
    }
    const auto from_file = run_cli("algebra-dim --config cli_test_verify.cfg");
    CHECK(from_file.exit_code == 0);
    CHECK(from_file.out.find("\"profile\":\"constant:2\"") != std::string::npos);
    CHECK(from_file.out.find("\"sample_count\":4") != std::string::npos);

    const auto overridden = run_cli("algebra-dim --config cli_test_verify.cfg --samples 5");
    CHECK(overridden.out.find("\"sample_count\":5") != std::string::npos);

    {
        std::ofstream cfg("cli_test_bad.cfg");
        cfg << "granularity=11\n";
    }
    CHECK(run_cli("algebra-dim --config cli_test_bad.cfg").exit_code == 2);
    std::remove("cli_test_verify.cfg");
    std::remove("cli_test_bad.cfg");
}

TEST_CASE("full-verify passes for all three reference profiles", "[cli]") {
    for (const char* profile : {"constant:2", "exponential:1,1", "secant:1"}) {
        const auto r = run_cli(std::string("full-verify --profile ") + profile +
                               " --samples 8 --seed 42");
        INFO(profile << "\n" << r.out);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("\"overall_pass\":true") != std::string::npos);
    }
    const auto secant = run_cli("full-verify --profile secant:1 --samples 8 --seed 42");
    CHECK(secant.out.find("\"algebra_dimension\":10") != std::string::npos);
}

TEST_CASE("reports can be written to a file in csv form", "[cli]") {
    const auto r = run_cli(
        "full-verify --profile constant:2 --samples 5 --format csv --output cli_test_report.csv");
    CHECK(r.exit_code == 0);
    std::ifstream in("cli_test_report.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "name,max_residual,tolerance,pass");
    std::remove("cli_test_report.csv");
}
