#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string bin_path() {
  const char* p = std::getenv("SFM_BIN");
  REQUIRE_MESSAGE(p != nullptr, "SFM_BIN must point at the command-line binary");
  return p;
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sfm_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  fs::path out = scratch_dir() / "stdout.txt";
  const std::string cmd = bin_path() + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ostringstream text;
  text << std::ifstream(out).rdbuf();
  return {WEXITSTATUS(status), text.str()};
}

std::string slurp(const fs::path& p) {
  std::ostringstream text;
  text << std::ifstream(p).rdbuf();
  return text.str();
}

const char* kScalarPath =
    R"({"schema_version":"1","kind":"form_path","mesh":[-1.0,1.0],)"
    R"("samples":[[[-1.0]],[[1.0]]]})";

}  // namespace

TEST_CASE("compute sf on the one-dimensional crossing") {
  auto p = write_file("sf_basic.json", kScalarPath);
  auto r = run("compute sf " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1\n");
}

TEST_CASE("compute sf track emission is columnar") {
  auto p = write_file("sf_tracks.json", kScalarPath);
  auto r = run("compute sf " + p.string() + " --emit-tracks");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "1");
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cols(line);
    double t, lambda;
    CHECK(bool(cols >> t >> lambda));
    CHECK(t >= -1.0);
    CHECK(t <= 1.0);
    CHECK(lambda == doctest::Approx(t));  // the path is Q_t = (t)
    ++rows;
  }
  CHECK(rows > 10);
}

TEST_CASE("compute maslov on the rotating line") {
  // span(cos t e1 + sin t e2) over [pi/4, 3pi/4], l0 = span(e2)
  std::ostringstream j;
  j << R"({"schema_version":"1","kind":"lagrangian_path","n":1,"l0":[[0.0],[1.0]],"mesh":[)";
  const double pi = 3.14159265358979323846;
  std::ostringstream mesh, frames;
  for (int i = 0; i <= 8; ++i) {
    const double t = pi / 4 + (pi / 2) * i / 8;
    mesh << (i ? "," : "") << t;
    frames << (i ? "," : "") << "[[" << std::cos(t) << "],[" << std::sin(t) << "]]";
  }
  j << mesh.str() << R"(],"frames":[)" << frames.str() << "]}";
  auto p = write_file("maslov_rot.json", j.str());
  auto r = run("compute maslov " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "-1\n");
}

TEST_CASE("compute reduce on the worked four-dimensional instance") {
  // w_perp = span(e4), l0 = span(e1,e2), ell(s) = graph of diag(s,1):
  // frame columns e1 - s e3 and e2 - e4
  std::ostringstream j;
  j << R"({"schema_version":"1","kind":"reduction","n":2,)"
    << R"("l0":[[1,0],[0,1],[0,0],[0,0]],)"
    << R"("w":[[1,0,0],[0,0,0],[0,1,0],[0,0,1]],"mesh":[-1,-0.5,0,0.5,1],"frames":[)";
  bool first = true;
  for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    j << (first ? "" : ",") << "[[1,0],[0,1],[" << -s << ",0],[0,-1]]";
    first = false;
  }
  j << "]}";
  auto p = write_file("reduce_worked.json", j.str());
  auto r = run("compute reduce " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out == "mu 1\nmu_reduced 1\ndefect 0\n");
}

TEST_CASE("run writes a passing report and respects flag overrides") {
  auto p = write_file("scen_sf.json",
                      R"({"schema_version":"1","kind":"sf","parameters":{"trials":20}})");
  fs::path out = scratch_dir() / "rep_sf.json";
  auto r = run("run " + p.string() + " --seed 9 --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string rep = slurp(out);
  CHECK(rep.find("\"suite\": \"flow_crossval\"") != std::string::npos);
  CHECK(rep.find("\"seed\": 9") != std::string::npos);
  CHECK(rep.find("\"trials\": 20") != std::string::npos);
  CHECK(rep.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("reports are byte-identical across parallelism and reruns") {
  auto p = write_file("scen_eq1.json",
                      R"({"schema_version":"1","kind":"eq1","parameters":{"seed":3,"trials":60}})");
  fs::path o1 = scratch_dir() / "r1.json";
  fs::path o2 = scratch_dir() / "r2.json";
  fs::path o3 = scratch_dir() / "r3.json";
  CHECK(run("run " + p.string() + " --out " + o1.string() + " --jobs 1").exit_code == 0);
  CHECK(run("run " + p.string() + " --out " + o2.string() + " --jobs 4").exit_code == 0);
  CHECK(run("run " + p.string() + " --out " + o3.string() + " --jobs 1").exit_code == 0);
  const std::string r1 = slurp(o1);
  CHECK(!r1.empty());
  CHECK(r1 == slurp(o2));
  CHECK(r1 == slurp(o3));
}

TEST_CASE("explicit instances are checked alongside generated trials") {
  auto p = write_file("scen_explicit.json", R"({"schema_version":"1","kind":"eq1",
    "parameters":{"trials":5},
    "explicit_instances":[
      {"q":[[0.0,0.0,0.0],[0.0,1.0,0.0],[0.0,0.0,-1.0]],
       "w":[[1.0,0.0],[0.0,1.0],[0.0,0.0]]}]})");
  auto r = run("run " + p.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"note\": \"explicit\"") != std::string::npos);
  CHECK(r.out.find("\"trials\": 6") != std::string::npos);
}

TEST_CASE("exit code 2 on malformed or non-conforming input") {
  CHECK(run("run " + write_file("broken.json", "{").string()).exit_code == 2);
  CHECK(run("run " + write_file("unknown_field.json",
                                R"({"schema_version":"1","kind":"eq1","extra":0})")
                         .string())
            .exit_code == 2);
  CHECK(run("run " + write_file("bad_version.json",
                                R"({"schema_version":"0","kind":"eq1"})")
                         .string())
            .exit_code == 2);
  CHECK(run("run " + write_file("bad_kind.json",
                                R"({"schema_version":"1","kind":"nope"})")
                         .string())
            .exit_code == 2);
  CHECK(run("run " + (scratch_dir() / "missing.json").string()).exit_code == 2);
  CHECK(run("compute sf " + write_file("not_sf.json",
                                       R"({"schema_version":"1","kind":"form_path"})")
                                .string())
            .exit_code == 2);
  // integer in a float slot is fine; a string is not
  CHECK(run("compute sf " +
            write_file("bad_entry.json",
                       R"({"schema_version":"1","kind":"form_path","mesh":[0,1],)"
                       R"("samples":[[["x"]],[[1.0]]]})")
                .string())
            .exit_code == 2);
}

TEST_CASE("help text lists both subcommands") {
  auto r = run("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("run") != std::string::npos);
  CHECK(r.out.find("compute") != std::string::npos);
}
