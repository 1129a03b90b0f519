#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "surfcert/approx.hpp"

using nlohmann::json;

namespace {

std::string g_cli;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + g_cli + "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string stderr_of(const std::string& args) {
  const std::string cmd = "'" + g_cli + "' " + args + " 2>&1 >/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("surfcert_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] != '-') {
    g_cli = argv[1];
    --argc;
    ++argv;
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli PATH_TO_CLI [doctest options]\n");
    return 2;
  }
  doctest::Context ctx(argc, argv);
  return ctx.run();
}

TEST_CASE("verify on the torus passes with a stable schema") {
  const Run r = run("verify --surface torus:2,1 --field du --grid 16x16");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["config"]["command"] == "verify");
  CHECK(j["config"]["surface"]["name"] == "torus");
  CHECK(j["config"]["grid"] == json::array({16, 16}));
  CHECK(j["pass"] == true);
  CHECK(j["failures"].empty());
  CHECK(j["guarded_nodes"] == 256);
  CHECK(j["timings"].contains("total_seconds"));
  REQUIRE(j["checks"].size() == 4);
  const std::array<const char*, 4> names = {"bochner", "trace_identity", "divergence_square", "curvature_identity"};
  for (std::size_t k = 0; k < names.size(); ++k) {
    const json& c = j["checks"][k];
    CHECK(c["name"] == names[k]);
    CHECK(c["pass"] == true);
    CHECK(c["sup"].get<double>() < 1e-6);
    CHECK(c["tolerance"] == 1e-6);
    CHECK(c["nodes"] == 256);
  }
}

TEST_CASE("fd backend and tolerance overrides are echoed") {
  const Run r = run("verify --surface torus --field du --grid 8x8 --backend fd:2e-3 --tol bochner=1e-2");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["config"]["backend"]["kind"] == "fd");
  CHECK(j["config"]["backend"]["step"] == 2e-3);
  CHECK(j["config"]["tolerance_overrides"]["bochner"] == 1e-2);
  CHECK(j["checks"][0]["tolerance"] == 1e-2);
  CHECK(j["checks"][1]["tolerance"] == 1e-3);
}

TEST_CASE("verify works on every built-in and on expression fields") {
  CHECK(run("verify --surface sphere --field dv --grid 16x16").code == 0);
  CHECK(run("verify --surface ellipsoid:1,1.3,0.7 --field dv --grid 16x16").code == 0);
  CHECK(run("verify --surface clifford --field du --grid 16x16").code == 0);
  CHECK(run("verify --surface torus --field \"1, 0.5*sin(v)\" --grid 16x16").code == 0);
}

TEST_CASE("a vanishing field reports zero-field-point nodes") {
  const Run r = run("verify --surface torus --field \"sin(u),0\" --grid 8x8");
  CHECK(r.code == 1);
  const json j = json::parse(r.out);
  CHECK(j["pass"] == false);
  REQUIRE(j["failures"].size() == 16);
  for (const json& f : j["failures"]) {
    CHECK(f["error"] == "zero-field-point");
    const double u = f["point"]["u"];
    CHECK((u == 0.0 || std::abs(u - 3.141592653589793) < 1e-12));
  }
  CHECK(stderr_of("verify --surface torus --field \"sin(u),0\" --grid 8x8").find("16 of 64 nodes failed") !=
        std::string::npos);
}

TEST_CASE("the kinked field is not certified by verify") {
  const Run r = run("verify --surface torus --field kinked --grid 16x16");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["pass"] == false);
}

TEST_CASE("configuration errors exit with status 2") {
  for (const char* args : {"verify --surface cube --field du", "verify --surface torus --field curl",
                           "verify --field du --grid 3x8", "verify --field du --grid 8by8",
                           "verify --surface torus:1,2 --field du", "verify --surface sphere:-1 --field du",
                           "verify --field du --tol foo=1", "verify --field du --tol bochner",
                           "verify --field du --backend spectral", "verify --field du --format xml",
                           "verify --field \"sin(u\"", "verify", "smooth --field du --max-degree -1",
                           "gauss-bonnet --tol bochner=1", "frobnicate"}) {
    CAPTURE(args);
    CHECK(run(args).code == 2);
  }
  CHECK(stderr_of("verify --surface cube --field du").rfind("error: config-error: unknown surface", 0) == 0);
}

TEST_CASE("csv export has one row per node and check") {
  const Run r = run("verify --surface torus --field du --grid 8x8 --format csv");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "i,j,u,v,check,value,tolerance,pass,error");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 64 * 4);
}

TEST_CASE("--out writes the report to a file") {
  const auto path = scratch("report.json");
  const Run r = run("verify --field du --grid 8x8 --out '" + path.string() + "'");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  CHECK(json::parse(f)["schema"] == 1);
  std::filesystem::remove(path);
}

TEST_CASE("gauss-bonnet reports chi and the torus verdict") {
  const json sphere = json::parse(run("gauss-bonnet --surface sphere --grid 32x64").out);
  CHECK(sphere["chi"]["rounded"] == 2);
  CHECK(sphere["chi"]["determinate"] == true);
  CHECK(sphere["torus"] == false);
  CHECK(sphere["known_chi"] == 2);
  const Run torus = run("gauss-bonnet --surface torus --field du");
  CHECK(torus.code == 0);
  const json t = json::parse(torus.out);
  CHECK(t["chi"]["rounded"] == 0);
  CHECK(t["torus"] == true);
  CHECK(t["divergence_theorem"]["pass"] == true);
  CHECK(std::abs(t["divergence_theorem"]["value"].get<double>()) < 1e-8);
  CHECK(t["curvature_integral"]["rule"] == "periodic-trapezoid");
}

TEST_CASE("under-resolved gauss-bonnet is indeterminate") {
  const Run r = run("gauss-bonnet --surface ellipsoid:1,1,0.05 --grid 4x4");
  CHECK(r.code == 1);
  CHECK(stderr_of("gauss-bonnet --surface ellipsoid:1,1,0.05 --grid 4x4").find("chi-indeterminate") !=
        std::string::npos);
}

TEST_CASE("smooth certifies the kinked torus field and writes coefficients") {
  const auto path = scratch("coeffs.txt");
  const Run r = run("smooth --surface torus --field kinked --coeffs '" + path.string() + "'");
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["config"]["max_degree"] == 16);
  const json& s = j["smoothing"];
  CHECK(s["pass"] == true);
  CHECK(s["sup_error"].get<double>() < 0.5);
  CHECK(s["min_tangential_norm"].get<double>() > 0.5);
  CHECK(s["verify_grid"] == json::array({256, 256}));
  std::ifstream f(path);
  const surfcert::PolynomialField p = surfcert::read_polynomial_field(f);
  CHECK(p.degree() == s["final_degree"]);
  CHECK(p.ambient_dim() == 3);
  std::filesystem::remove(path);
}

TEST_CASE("smooth reports budget-not-met with its attempts") {
  const Run r = run("smooth --surface sphere --field dv --max-degree 4");
  CHECK(r.code == 1);
  const json s = json::parse(r.out)["smoothing"];
  CHECK(s["pass"] == false);
  CHECK(s["attempts"].size() == 2);
  CHECK(s["sup_error"].get<double>() >= 0.5);
}

TEST_CASE("reports are deterministic apart from timings") {
  const auto strip = [](std::string text) {
    json j = json::parse(text);
    CHECK(j.contains("timings"));
    j.erase("timings");
    return j.dump();
  };
  const std::string args = "verify --surface torus --field kinked --grid 32x32";
  const Run a = run(args), b = run(args);
  CHECK(strip(a.out) == strip(b.out));
  const auto checks = [](const Run& r) { return json::parse(r.out)["checks"].dump(); };
  CHECK(checks(run(args, "BOCHNER_THREADS=1")) == checks(run(args, "BOCHNER_THREADS=4")));
}
