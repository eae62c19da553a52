#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

#include "statman/diagnostics.hpp"
#include "statman/manifold_file.hpp"
#include "statman/models.hpp"
#include "statman/report.hpp"

using namespace statman;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(STATMAN_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch_dir() {
    fs::path d = fs::temp_directory_path() / "statman_cli_tests";
    fs::create_directories(d);
    return d;
}

fs::path write_file(const std::string& name, const std::string& text) {
    fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kSphereJson = R"({
  "schema": "statman/1",
  "name": "unit sphere",
  "builtin": {"family": "sphere", "params": {"r": 1.0}}
})";

const char* kGammaJson = R"({
  "schema": "statman/1",
  "name": "gamma",
  "builtin": {"family": "gamma_fisher", "params": {"chart": "shape-rate"}}
})";

const char* kFlatCubicJson = R"({
  "schema": "statman/1",
  "name": "flat with cubic",
  "builtin": {"family": "flat_with_cubic",
              "params": {"n": 2, "entries": [{"indices": [1, 1, 1], "value": 2.0}]}}
})";

// Constant asymmetric-derivative part on top of a large symmetric constant:
// the five conjugate-symmetry formulations produce defects that straddle a
// well-chosen tolerance, which the tool must refuse to classify.
const char* kSplitJson = R"({
  "schema": "statman/1",
  "name": "split",
  "dim": 2,
  "custom": {
    "metric": [["1", "0"], ["0", "1"]],
    "cubic": [{"indices": [1, 1, 1], "expr": "5 + x2"}]
  },
  "box": [[0.5, 1.5], [0.5, 1.5]]
})";

}  // namespace

TEST_CASE("check: healthy built-in exits 0 and reports a pass") {
    fs::path f = write_file("sphere.json", kSphereJson);
    RunResult r = run_cli("check " + f.string() + " --points 10 --seed 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("unit sphere") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);
}

TEST_CASE("check: JSON report is byte-identical across runs and round-trips") {
    fs::path f = write_file("gamma.json", kGammaJson);
    fs::path j1 = scratch_dir() / "rep1.json";
    fs::path j2 = scratch_dir() / "rep2.json";
    RunResult r1 = run_cli("check " + f.string() + " --points 12 --seed 7 --json " + j1.string());
    RunResult r2 = run_cli("check " + f.string() + " --points 12 --seed 7 --json " + j2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    std::string a = slurp(j1), b = slurp(j2);
    REQUIRE_FALSE(a.empty());
    CHECK(a == b);

    nlohmann::json doc = nlohmann::json::parse(a);
    CHECK(doc["schema"] == "statman/1");
    CHECK(doc["manifold"] == "gamma");
    CHECK(doc["seed"] == 7);
    CHECK(doc["points"] == 12);
    CHECK(doc["validation"]["pass"] == true);
    CHECK(doc["checks"]["conjugate_R"]["verdict"] == "pass");
    CHECK(doc["constant_curvature"]["verdict"] == "pass");
    CHECK(doc["alpha_scan"]["hypothesis_g_not_cc"] == true);
    CHECK(doc["all_pass"] == true);
}

TEST_CASE("check: classifier failures do not fail the process") {
    fs::path f = write_file("fwc.json", kFlatCubicJson);
    fs::path j = scratch_dir() / "fwc_rep.json";
    RunResult r = run_cli("check " + f.string() + " --points 10 --seed 2 --json " + j.string());
    CHECK(r.exit_code == 0);  // healthy run; 'trace-free' is a classification
    nlohmann::json doc = nlohmann::json::parse(slurp(j));
    CHECK(doc["checks"]["trace_free"]["verdict"] == "fail");
    CHECK(doc["checks"]["conjugate_R"]["verdict"] == "pass");
    CHECK(doc["all_pass"] == true);
    CHECK(doc["theorems"]["characterization_trace_free"]["hypothesis_met"] == false);
}

TEST_CASE("parse failures exit 2") {
    fs::path bad = write_file("bad.json", "{ not json");
    CHECK(run_cli("check " + bad.string()).exit_code == 2);

    fs::path missing = scratch_dir() / "does_not_exist.json";
    CHECK(run_cli("check " + missing.string()).exit_code == 2);

    fs::path dup = write_file("dup.json", R"({
      "builtin": {"family": "flat_with_cubic",
                  "params": {"n": 2, "entries": [
                    {"indices": [1, 1, 1], "value": 2.0},
                    {"indices": [1, 1, 1], "value": 3.0}]}}
    })");
    RunResult r = run_cli("check " + dup.string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("duplicate") != std::string::npos);

    fs::path both = write_file("both.json", R"({"builtin": {"family": "sphere"},
      "custom": {"metric": [["1"]]}, "dim": 1, "box": [[0,1]]})");
    CHECK(run_cli("check " + both.string()).exit_code == 2);

    fs::path schema = write_file("schema.json", R"({"schema": "statman/99",
      "builtin": {"family": "sphere"}})");
    CHECK(run_cli("check " + schema.string()).exit_code == 2);
}

TEST_CASE("eval: curvature of the Euclidean chart is zero") {
    fs::path f = write_file("euclid.json", R"({
      "builtin": {"family": "euclidean", "params": {"n": 2}}
    })");
    RunResult r = run_cli("eval " + f.string() + " --point 0.1,0.2 --quantity R");
    CHECK(r.exit_code == 0);
    // every printed component must be zero
    std::istringstream lines(r.out);
    std::string line;
    int components = 0;
    while (std::getline(lines, line)) {
        auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        ++components;
        CHECK(std::abs(std::stod(line.substr(eq + 3))) == 0.0);
    }
    CHECK(components == 16);
}

TEST_CASE("eval: polar Christoffels show the closed-form entry") {
    fs::path f = write_file("polar.json", R"({
      "name": "polar",
      "dim": 2,
      "coords": ["r", "theta"],
      "custom": {"metric": [["1", "0"], ["0", "r^2"]]},
      "box": [[0.5, 3.0], [-3.0, 3.0]]
    })");
    RunResult r = run_cli("eval " + f.string() + " --point 2,1 --quantity gamma_hat");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("gamma_hat^r_theta_theta") != std::string::npos);
    CHECK(r.out.find("-2") != std::string::npos);

    CHECK(run_cli("eval " + f.string() + " --point 2,1 --quantity nonsense").exit_code == 2);
    CHECK(run_cli("eval " + f.string() + " --point 2 --quantity g").exit_code == 2);
    CHECK(run_cli("eval " + f.string() + " --point 2,abc --quantity g").exit_code == 2);
}

TEST_CASE("alpha-scan: endpoints of the gamma family are flat") {
    fs::path f = write_file("gamma2.json", kGammaJson);
    RunResult r = run_cli("alpha-scan " + f.string() + " --alphas -1,0,1 --points 12 --seed 0");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("-1") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);
    CHECK(r.out.find("fail") != std::string::npos);  // alpha = 0 is not constant
}

TEST_CASE("verify-theorems: healthy on the sphere") {
    fs::path f = write_file("sphere2.json", kSphereJson);
    RunResult r = run_cli("verify-theorems " + f.string() + " --points 10 --seed 4");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("agree") != std::string::npos);
}

TEST_CASE("conclusive disagreement between equivalent formulations exits 3") {
    fs::path f = write_file("split.json", kSplitJson);
    // Reproduce the tool's sampling in-process and pick a tolerance that one
    // formulation passes while another conclusively fails.
    ManifoldFile mf = parse_manifold(kSplitJson);
    auto pts = sample_points(mf.chart, 20, 0);
    auto defects = conjugate_R_defects(mf.chart, pts);
    double tol = -1.0;
    double dmax = *std::max_element(defects.begin(), defects.end());
    for (double d : defects) {
        double t = 1.2 * d;
        if (t > 0.0 && dmax >= 10.0 * t) tol = t;
    }
    REQUIRE(tol > 0.0);
    std::ostringstream cmd;
    cmd << "check " << f.string() << " --points 20 --seed 0 --tol " << tol;
    RunResult r = run_cli(cmd.str());
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("onsisten") != std::string::npos);  // Consistency / inconsistency
}

TEST_CASE("identity defects beyond the tolerance exit 1") {
    // The identity catalog holds to roundoff, so a tolerance below machine
    // epsilon forces a reported (non-crash) check failure.
    fs::path f = write_file("fd.json", R"json({
      "name": "fd chart",
      "dim": 2,
      "custom": {
        "metric": [["1 + 0.2*sin(x1)", "0"], ["0", "1 + 0.1*x1*x2"]],
        "cubic": [{"indices": [1, 1, 1], "expr": "0.3*x2"}]
      },
      "jets": {"mode": "fd", "fd_step": 1e-3},
      "box": [[-0.8, 0.8], [0.2, 0.9]]
    })json");
    RunResult ok = run_cli("check " + f.string() + " --points 5 --seed 1");
    CHECK(ok.exit_code == 0);  // the fd tolerance tier accommodates fd jets
    RunResult tight = run_cli("check " + f.string() + " --points 5 --seed 1 --tol 1e-18");
    CHECK(tight.exit_code == 1);
}

TEST_CASE("library report generation is deterministic for equal seeds") {
    ManifoldFile mf = parse_manifold(kGammaJson);
    DiagnosticsReport a = run_all(mf.chart, 10, 5, 1e-8);
    DiagnosticsReport b = run_all(mf.chart, 10, 5, 1e-8);
    CHECK(report_to_json(a) == report_to_json(b));
}
