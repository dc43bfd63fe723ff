#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SFLOW_CLI_PATH;
const std::string kSpecs = SFLOW_SPEC_DIR;

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("sflow_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > " + (scratch_dir() / "stdout").string() + " 2> " +
                          (scratch_dir() / "stderr").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string spec(const std::string& name) { return kSpecs + "/" + name; }

}  // namespace

TEST_CASE("sfl on the NP spec") {
  const auto out = scratch_dir() / "np.json";
  CHECK(run("sfl " + spec("np.json") + " --seed 1 --out " + out.string()) == 0);
  auto j = json::parse(read(out));
  CHECK(j["schema_version"] == "1.0");
  CHECK(j["command"] == "sfl");
  CHECK(j["result"]["value"] == 1);
  REQUIRE(j["crossings"].size() == 1);
  CHECK(std::abs(j["crossings"][0]["lambda"].get<double>() - 0.5) < 1e-8);
}

TEST_CASE("sfl report goes to stdout without --out") {
  CHECK(run("sfl " + spec("two_branches.json")) == 0);
  auto j = json::parse(read(scratch_dir() / "stdout"));
  CHECK(j["result"]["value"] == 0);
}

TEST_CASE("sfl csv trajectory") {
  const auto csv = scratch_dir() / "traj.csv";
  CHECK(run("sfl " + spec("normalization.json") + " --samples 10 --emit-csv " + csv.string()) == 0);
  const auto text = read(csv);
  CHECK(text.rfind("lambda,eig_1,eig_2,eig_3\n", 0) == 0);
}

TEST_CASE("gap exit codes") {
  CHECK(run("gap " + spec("gap_mismatch.json")) == 2);
  CHECK(run("gap " + spec("gap_lines.json")) == 0);
  auto j = json::parse(read(scratch_dir() / "stdout"));
  CHECK(j["result"]["perturbation"]["lhs"].get<double>() == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(j["result"]["perturbation"]["rhs"].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("maslov subcommand") {
  CHECK(run("maslov " + spec("rotating_line.json")) == 0);
  CHECK(json::parse(read(scratch_dir() / "stdout"))["result"]["value"] == 1);
  CHECK(run("maslov " + spec("rotating_pair.json")) == 0);
  CHECK(json::parse(read(scratch_dir() / "stdout"))["result"]["value"] == 3);
}

TEST_CASE("hamiltonian subcommand") {
  CHECK(run("hamiltonian " + spec("rotation_family.json") + " --grid 200") == 0);
  auto j = json::parse(read(scratch_dir() / "stdout"));
  CHECK(j["result"]["value"] == 3);
  CHECK(j["crossings"].size() == 4);
}

TEST_CASE("malformed input exits 2") {
  const auto bad = scratch_dir() / "bad.json";
  std::ofstream(bad) << "{ \"kind\": \"operator_path\", \"matrix\": [[";
  CHECK(run("sfl " + bad.string()) == 2);
  const auto unknown = scratch_dir() / "unknown.json";
  std::ofstream(unknown) << R"J({"kind": "operator_path", "matrix": [["frobnicate(lambda)"]]})J";
  CHECK(run("sfl " + unknown.string()) == 2);
  CHECK(run("sfl " + (scratch_dir() / "missing.json").string()) == 2);
  CHECK(run("sfl " + spec("np.json") + " --tol-rank -1") == 2);
  CHECK(run("nonsense") == 2);
}

TEST_CASE("axioms exit codes and determinism") {
  const auto a = scratch_dir() / "a.json", b = scratch_dir() / "b.json";
  const std::string args = "axioms --seed 1 --samples 3 --dim 3 --suite method_agreement --suite gap --out ";
  CHECK(run(args + a.string()) == 0);
  CHECK(run(args + b.string()) == 0);
  CHECK(read(a) == read(b));
  auto j = json::parse(read(a));
  CHECK(j["result"]["verdict"] == "pass");
  CHECK(run("axioms --suite nope") == 2);
}

TEST_CASE("axioms --seed 1 on the default configuration") {
  CHECK(run("axioms --seed 1") == 0);
}
