#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "fbg/cli.hpp"
#include "fbg/config.hpp"

using namespace fbg;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "fbgsq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto d = std::filesystem::temp_directory_path() / ("fbgsq_cli_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("version") {
    const auto r = run({"version"});
    CHECK(r.code == 0);
    CHECK(r.out == "fbgsq 0.1.0\n");
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"transmogrify"}).code == kExitUsage);
    CHECK(run({"sweep"}).code == kExitUsage);  // --variable is required
    const auto r = run({"simulate", "--config", "/nonexistent/x.ini"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.rfind("error: usage:", 0) == 0);
}

TEST_CASE("help lists config defaults") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("kappa0 = 10") != std::string::npos);
}

TEST_CASE("bad config exits 3 with a one-line error") {
    const auto d = scratch("badcfg");
    std::ofstream(d / "c.ini") << "[grating]\nkapa0 = 3\n";
    const auto r = run({"squeeze", "--config", (d / "c.ini").string()});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("did you mean 'kappa0'") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    std::ofstream(d / "v.ini") << "[grating]\nkappa0 = -1\n";
    CHECK(run({"squeeze", "--config", (d / "v.ini").string()}).code == kExitValidation);
}

TEST_CASE("dispersion writes band and transfer tables") {
    const auto d = scratch("disp");
    const auto r = run({"dispersion", "--n", "11", "--out", d.string()});
    REQUIRE(r.code == 0);
    std::ifstream band(d / "band.csv"), tr(d / "transfer.csv");
    std::string line;
    std::getline(band, line);
    CHECK(line == "delta,re_q,im_q");
    std::getline(tr, line);
    CHECK(line == "delta,t2,r2");
    int rows = 0;
    while (std::getline(tr, line)) ++rows;
    CHECK(rows == 11);
}

TEST_CASE("squeeze writes the result record with the exact parameters") {
    const auto d = scratch("squeeze");
    RunConfig c;
    c.length = 10.0;
    c.dz = 0.02;
    c.directory = d.string();
    std::ofstream(d / "c.ini") << serialize_config(c);
    const auto r = run({"squeeze", "--config", (d / "c.ini").string(), "--dump-adjoint"});
    REQUIRE(r.code == 0);
    std::ifstream f(d / "result.json");
    const auto j = nlohmann::json::parse(f);
    for (const char* k : {"ratio", "ratio_db", "transmittance", "gate_lo_cm", "gate_hi_cm", "fwhm_ps", "peak_gw_cm2"}) {
        CHECK(j.contains(k));
    }
    CHECK(j["params"]["grating"]["length"] == 10.0);
    CHECK(j["params"]["grid"]["dz"] == 0.02);
    CHECK(std::filesystem::exists(d / "projection_in.csv"));
}

TEST_CASE("simulate writes observables with full precision") {
    const auto d = scratch("sim");
    RunConfig c;
    c.length = 10.0;
    c.dz = 0.02;
    c.total_time = 200.0;
    std::ofstream(d / "c.ini") << serialize_config(c);
    const auto r = run({"simulate", "--config", (d / "c.ini").string(), "--out", d.string()});
    REQUIRE(r.code == 0);
    std::ifstream obs(d / "observables.csv");
    std::string line;
    std::getline(obs, line);
    CHECK(line == "t_ps,norm,hamiltonian,peak_a,transmitted_fraction");
    std::ifstream cfg(d / "config.ini");
    std::stringstream ss;
    ss << cfg.rdbuf();
    RunConfig back = parse_config(ss.str());
    CHECK(back.total_time == 200.0);
    CHECK(back.directory == d.string());
}

TEST_CASE("validate runs the oracle comparison") {
    const auto r = run({"validate", "--points", "32", "--steps", "50", "--projections", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("max relative error") != std::string::npos);
    CHECK(run({"validate", "--points", "8"}).code == kExitUsage);
}
