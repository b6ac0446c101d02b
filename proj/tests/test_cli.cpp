// End-to-end tests for the command line tool: each case drives the installed
// binary through a shell, then checks the exit code and the parsed output.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "smallforms/serialization.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string command =
      std::string(SMALLFORMS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.out.append(buffer, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

smallforms::Json parse_out(const CliResult& result) {
  return smallforms::Json::parse(result.out);
}

}  // namespace

TEST_CASE("regime subcommand reports the structural classification") {
  const CliResult r = run_cli("regime --m 1 --n 1");
  CHECK(r.exit_code == 0);
  const smallforms::Json j = parse_out(r);
  CHECK(j["regime"] == "Singleton");
  CHECK(j["variant"] == "absolute");

  const CliResult human = run_cli("regime --m 4 --n 2 --format human");
  CHECK(human.exit_code == 0);
  CHECK(human.out == "Generic\n");
}

TEST_CASE("classify subcommand runs a convergence criterion") {
  const CliResult r =
      run_cli("classify cor1 --m 3 --n 1 --psi powerlog:1,1.5,0");
  CHECK(r.exit_code == 0);
  const smallforms::Json j = parse_out(r);
  CHECK(j["verdict"]["classification"] == "Divergent");
  CHECK(j["verdict"]["power_exponent"].get<double>() ==
        doctest::Approx(-0.5));
  CHECK(j["criterion"]["kind"] == "absolute-lebesgue");

  const CliResult alias =
      run_cli("classify Cor1 --m 3 --n 1 --psi powerlog:1,1.5,0");
  CHECK(alias.exit_code == 0);
  CHECK(parse_out(alias)["verdict"]["classification"] == "Divergent");
}

TEST_CASE("critical subcommand prints the critical exponent") {
  const CliResult r = run_cli("critical thm1 --m 3 --n 1 --tau 2");
  CHECK(r.exit_code == 0);
  const smallforms::Json j = parse_out(r);
  CHECK(j["s_star"].get<double>() == doctest::Approx(3.0));
  CHECK(j["within_ambient"] == true);
}

TEST_CASE("enumerate subcommand lists solutions in a window") {
  const CliResult r = run_cli(
      "enumerate --matrix '1/2;1/3' --psi powerlog:1,2,0 --window 1:30");
  CHECK(r.exit_code == 0);
  const smallforms::Json j = parse_out(r);
  CHECK(j["solution_count"] == 15);
  CHECK(j["exact"] == true);

  const CliResult human = run_cli(
      "enumerate --matrix '1/2;1/3' --psi powerlog:1,2,0 --window 1:30 "
      "--format human");
  CHECK(human.exit_code == 0);
  CHECK(human.out.find("15 solutions") != std::string::npos);
}

TEST_CASE("lift then verify-cert round trip passes and a forgery fails") {
  const std::filesystem::path cert_path =
      std::filesystem::temp_directory_path() / "smallforms_cli_cert.json";
  const std::filesystem::path forged_path =
      std::filesystem::temp_directory_path() / "smallforms_cli_forged.json";

  const CliResult lift = run_cli(
      "lift --matrix '1/2;1/3;1/4' --psi powerlog:1,2,0 --r 3,-2 > " +
      cert_path.string());
  CHECK(lift.exit_code == 0);

  const std::string verify_args =
      " --matrix '1/2;1/3;1/4' --psi powerlog:1,2,0";
  const CliResult ok =
      run_cli("verify-cert --cert " + cert_path.string() + verify_args);
  CHECK(ok.exit_code == 0);
  CHECK(parse_out(ok)["verified"] == true);

  // Forge the certificate: claim the non-solution q = (0, 3, -2).
  {
    std::ifstream in(cert_path);
    smallforms::Json doc = smallforms::Json::parse(in);
    doc["p"] = smallforms::Json::array({0});
    doc["q"] = smallforms::Json::array({0, 3, -2});
    std::ofstream out(forged_path);
    out << doc.dump();
  }
  const CliResult bad =
      run_cli("verify-cert --cert " + forged_path.string() + verify_args);
  CHECK(bad.exit_code == 1);
  CHECK(parse_out(bad)["verified"] == false);

  std::filesystem::remove(cert_path);
  std::filesystem::remove(forged_path);
}

TEST_CASE("verify-law emits a fraction table in csv format") {
  const CliResult r = run_cli(
      "verify-law --m 3 --n 1 --psi powerlog:1/2,1,0 "
      "--schedule 1:3,1:6,1:12 --samples 20 --seed 7 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("q_min,q_max,fraction,ci_low,ci_high,hits,samples\n",
                    0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}

TEST_CASE("domain failures exit 1 with a structured error envelope") {
  const CliResult short_r =
      run_cli("lift --matrix '1/2;1/3;1/4' --psi powerlog:1,2,0 --r 3");
  CHECK(short_r.exit_code == 1);
  CHECK(parse_out(short_r)["error"]["kind"] == "dimension_mismatch");

  const CliResult budget = run_cli(
      "enumerate --matrix '1/2;1/3' --psi powerlog:1,2,0 --window 1:1000000 "
      "--budget 1000");
  CHECK(budget.exit_code == 1);
  CHECK(parse_out(budget)["error"]["kind"] == "budget_exceeded");
}

TEST_CASE("usage failures exit 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("enumerate --matrix '1/2;1/3'").exit_code == 2);
  CHECK(run_cli("regime --m 2 --n 1 --format xml").exit_code == 2);
  CHECK(run_cli("regime --m 2 --n 1 --format csv").exit_code == 2);
}
