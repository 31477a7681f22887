#include "symhorn/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

// End-to-end checks of the command-line tool (binary path injected by CMake).

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  symhorn::json output;
};

RunResult run_cli(const std::string& args, const std::string& out_file) {
  const std::string cmd = std::string(SYMHORN_CLI_PATH) + " " + args + " -o " + out_file +
                          " 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  RunResult r{WEXITSTATUS(status), {}};
  std::ifstream in(out_file);
  if (in) in >> r.output;
  return r;
}

void write_matrix(const std::string& path, const symhorn::Matrix& H) {
  symhorn::json j = {{"n", int(H.rows()) / 2},
                     {"order", "block"},
                     {"h", symhorn::matrix_to_json(H)}};
  std::ofstream(path) << j.dump();
}

}  // namespace

TEST_CASE("cli analyze: identity is strongly stable, exit 0") {
  write_matrix("cli_id.json", symhorn::Matrix::Identity(4, 4));
  const auto r = run_cli("analyze cli_id.json", "cli_out.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.at("report").at("class") == "StronglyStable");
  CHECK(r.output.at("version") == "0.1.0");
  CHECK(r.output.at("config").at("tol_profile") == "default");
}

TEST_CASE("cli analyze: unstable classification still exits 0") {
  symhorn::Matrix H(2, 2);
  H << 1, 0, 0, -1;
  write_matrix("cli_unst.json", H);
  const auto r = run_cli("analyze cli_unst.json --tol-profile strict", "cli_out.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.at("report").at("class") == "Unstable");
}

TEST_CASE("cli normal-form: resonant mixed signs exit 1 naming the precondition") {
  symhorn::Matrix H = symhorn::Matrix::Zero(4, 4);
  H(0, 0) = H(2, 2) = 1;
  H(1, 1) = H(3, 3) = -1;
  write_matrix("cli_res.json", H);
  const auto r = run_cli("normal-form cli_res.json", "cli_out.json");
  CHECK(r.exit_code == 1);
  std::ifstream err("cli_stderr.txt");
  std::string msg((std::istreambuf_iterator<char>(err)), {});
  CHECK(msg.find("not strongly stable") != std::string::npos);
}

TEST_CASE("cli normal-form: frequencies with --emit-s") {
  write_matrix("cli_id.json", symhorn::Matrix::Identity(4, 4));
  const auto r = run_cli("normal-form cli_id.json --emit-s", "cli_out.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.at("result").at("frequencies").size() == 2);
  CHECK(r.output.at("result").contains("diagonalizer"));
  CHECK(r.output.at("result").contains("residual_tolerance"));
}

TEST_CASE("cli pipeline: horn-sample -> hull -> convexity") {
  const std::string base = std::string(SYMHORN_CLI_PATH);
  int status = std::system((base + " horn-sample --lambda 1 --mu 1 -N 300 --seed 7 "
                                   "--out cli_cloud.csv").c_str());
  REQUIRE(WEXITSTATUS(status) == 0);
  REQUIRE(fs::exists("cli_cloud.csv"));

  // identical config reproduces identical bytes
  status = std::system((base + " horn-sample --lambda 1 --mu 1 -N 300 --seed 7 "
                               "--out cli_cloud2.csv").c_str());
  REQUIRE(WEXITSTATUS(status) == 0);
  std::ifstream a("cli_cloud.csv"), b("cli_cloud2.csv");
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);

  auto r = run_cli("hull --in cli_cloud.csv", "cli_out.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.at("hull").at("dim") == 1);
  CHECK(double(r.output.at("hull").at("interval")[0]) >= 2.0 - 1e-6);

  r = run_cli("convexity --in cli_cloud.csv --pairs 20", "cli_out.json");
  CHECK(r.exit_code == 0);
  CHECK(double(r.output.at("report").at("success_fraction")) == 1.0);
}

TEST_CASE("cli perturb: stable-not-strong input exits 1") {
  symhorn::Matrix H = symhorn::Matrix::Zero(4, 4);
  H(0, 0) = H(2, 2) = 1;
  H(1, 1) = H(3, 3) = -1;
  write_matrix("cli_res.json", H);
  const auto r = run_cli("perturb cli_res.json --trials 5", "cli_out.json");
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli: malformed json exits 1") {
  std::ofstream("cli_bad.json") << "{ nope";
  const auto r = run_cli("analyze cli_bad.json", "cli_out.json");
  CHECK(r.exit_code == 1);
}
