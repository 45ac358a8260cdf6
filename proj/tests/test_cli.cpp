#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct RunResult {
    int status = -1;
    std::string output;
};

RunResult run(const std::string& args)
{
    const std::string cmd = std::string(CLI_BIN) + " " + args + " 2>&1";
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) result.output.append(buf, n);
    const int raw = pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& haystack, const std::string& needle)
{
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("geodesics listing")
{
    const RunResult three = run("geodesics --n 1 --a 19.74");
    CHECK(three.status == 0);
    CHECK(contains(three.output, "components: 3"));
    CHECK(contains(three.output, "k1,energy,morse_index,nullity"));
    CHECK(contains(three.output, "19.7392088022"));

    const RunResult five = run("geodesics --n 2 --a 19.74");
    CHECK(five.status == 0);
    CHECK(contains(five.output, "components: 5"));

    const RunResult json = run("geodesics --n 2 --a 19.74 --format json --out /tmp/loopmorse_cli_geo.json");
    CHECK(json.status == 0);
    const std::string payload = slurp("/tmp/loopmorse_cli_geo.json");
    CHECK(contains(payload, "\"energy\""));
    CHECK(contains(payload, "19.7392088022"));
}

TEST_CASE("homology sides and the three-way check")
{
    const RunResult agree = run("homology --n 2 --k 1,0 --check-all");
    CHECK(agree.status == 0);
    CHECK(contains(agree.output, "agreement: morse = floer(regraded) = singular"));
    CHECK(contains(agree.output, "1,10,"));

    const RunResult floer = run("homology --n 2 --k 1,0 --side floer");
    CHECK(floer.status == 0);
    CHECK(contains(floer.output, "-1,10,")); // cohomological regrading at degree -1

    const RunResult singular = run("homology --n 1 --k 2 --side singular");
    CHECK(singular.status == 0);
    CHECK(contains(singular.output, "0,5,"));
}

TEST_CASE("homology JSON export is byte-stable")
{
    const std::string cmd = "homology --n 2 --k 1,0 --format json --out /tmp/loopmorse_cli_hom";
    CHECK(run(cmd + "1.json").status == 0);
    CHECK(run(cmd + "2.json").status == 0);
    CHECK(slurp("/tmp/loopmorse_cli_hom1.json") == slurp("/tmp/loopmorse_cli_hom2.json"));
}

TEST_CASE("conley-zehnder commands")
{
    const RunResult shear = run("cz --shear --n 2");
    CHECK(shear.status == 0);
    CHECK(contains(shear.output, "index = -1"));
    CHECK(contains(shear.output, "signature = -2"));

    CHECK(contains(run("cz --shear --n 1").output, "index = -1/2"));
    CHECK(contains(run("cz --shear --n 3").output, "index = -3/2"));

    const RunResult quad = run("cz --quadratic 1,1");
    CHECK(quad.status == 0);
    CHECK(contains(quad.output, "index = -1"));

    const RunResult quad_plus = run("cz --quadratic -1,1");
    CHECK(quad_plus.status == 0);
    CHECK(contains(quad_plus.output, "index = 0"));

    const RunResult expo = run("cz --exp-path=-1,1");
    CHECK(expo.status == 0);
    CHECK(contains(expo.output, "index = 0"));
    CHECK(contains(expo.output, "[consistent]"));

    CHECK(run("cz --shear --quadratic 1,1").status == 2);
    CHECK(run("cz").status == 2);
}

TEST_CASE("perturb reports the full chain and rejects k = 0")
{
    const RunResult ok = run("perturb --k 1");
    CHECK(ok.status == 0);
    CHECK(contains(ok.output, "actions: minus 20.7392088022, plus 18.7392088022"));
    CHECK(contains(ok.output, "morse indices: (1, 0)"));
    CHECK(contains(ok.output, "cz indices: (-1, 0)"));
    CHECK(contains(ok.output, "relation cz = -morse_index: PASS"));
    CHECK(contains(ok.output, "connecting orbits: count 2, parity 0"));

    const RunResult rejected = run("perturb --k 0");
    CHECK(rejected.status == 2);
    CHECK(contains(rejected.output, "k = 0"));
}

TEST_CASE("flow: connection ODE limits")
{
    const RunResult chi = run("flow --chi 0.25 --range -20,20");
    CHECK(chi.status == 0);
    CHECK(contains(chi.output, "limits (0, 0.5)"));

    const RunResult up = run("flow --chi 0.75");
    CHECK(up.status == 0);
    CHECK(contains(up.output, "limits (1, 0.5)"));
}

TEST_CASE("flow: free orbit closure")
{
    const RunResult orbit = run("flow --orbit --n 1 --k 2");
    CHECK(orbit.status == 0);
    CHECK(contains(orbit.output, "closure_defect"));
    CHECK(contains(orbit.output, "energy_drift"));
}

TEST_CASE("flow: cylinder evolution and the loop round trip")
{
    const RunResult cyl = run(
        "flow --cylinder --k 1 --chi0 0.25 --s-max 6 --t-points 64 "
        "--out-loop /tmp/loopmorse_cli_slice.json");
    CHECK(cyl.status == 0);
    CHECK(contains(cyl.output, "ansatz coherence max deviation"));
    CHECK(!contains(cyl.output, "FAIL"));

    // Feed the final slice back in as initial data.
    const RunResult resumed = run(
        "flow --cylinder --k 1 --w0 /tmp/loopmorse_cli_slice.json --s-max 2 --t-points 64");
    CHECK(resumed.status == 0);
    CHECK(contains(resumed.output, "final residual"));

    CHECK(run("flow --cylinder --k 1 --s-max 2").status == 2);        // no initial data
    CHECK(run("flow --cylinder --k 1 --chi0 0.25 --w0 /tmp/loopmorse_cli_slice.json").status == 2);
}

TEST_CASE("paper anchors by category")
{
    const RunResult core = run("paper --only core");
    CHECK(core.status == 0);
    CHECK(contains(core.output, "passed 4/4"));
    CHECK(!contains(core.output, "[FAIL]"));

    const RunResult index = run("paper --only index");
    CHECK(index.status == 0);
    CHECK(contains(index.output, "[PASS] index.shear"));

    CHECK(run("paper --only nonsense").status == 2);
}

TEST_CASE("config file injection with flag override")
{
    {
        std::ofstream cfg("/tmp/loopmorse_cli_cfg.json");
        cfg << "{\"n\": 2, \"a\": 19.74}\n";
    }
    const RunResult from_cfg = run("geodesics --config /tmp/loopmorse_cli_cfg.json");
    CHECK(from_cfg.status == 0);
    CHECK(contains(from_cfg.output, "components: 5"));

    // Explicit flags outrank the config file.
    const RunResult overridden = run("geodesics --config /tmp/loopmorse_cli_cfg.json --n 1");
    CHECK(overridden.status == 0);
    CHECK(contains(overridden.output, "components: 3"));
}

TEST_CASE("usage errors exit with 2")
{
    CHECK(run("").status == 2);
    CHECK(run("frobnicate").status == 2);
    CHECK(run("geodesics --bogus 3").status == 2);
    CHECK(run("geodesics --n 0").status == 2);
    CHECK(run("flow --chi 1.5").status == 2);
}
