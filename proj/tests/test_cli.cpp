#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(OMKIT_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path workdir()
{
    const auto dir = fs::temp_directory_path() / "omkit_test_cli";
    fs::create_directories(dir);
    return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

nlohmann::json estimate_table(const std::string& json_text)
{
    const auto doc = nlohmann::json::parse(json_text);
    nlohmann::json out;
    for (const auto& p : doc.at("parameters")) {
        out[p.at("parameter").get<std::string>()] = p.at("estimate");
    }
    return out;
}

} // namespace

TEST_CASE("report is deterministic and honours zero drive")
{
    const auto a = run("report --detuning-hz 2.1e9 --dropped-power-w 1.5e-3");
    const auto b = run("report --detuning-hz 2.1e9 --dropped-power-w 1.5e-3");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j.contains("entries"));

    const auto zero = run("report --format csv");
    REQUIRE(zero.code == 0);
    std::istringstream lines(zero.out);
    std::string line;
    int checked = 0;
    while (std::getline(lines, line)) {
        for (const char* name : {"cooperativity,", "damping_shift,", "spring_shift,", "temperature_rise,"}) {
            if (line.rfind(name, 0) == 0) {
                const auto first = line.find(',');
                CHECK(std::stod(line.substr(first + 1, line.find(',', first + 1) - first - 1)) == 0.0);
                ++checked;
            }
        }
    }
    CHECK(checked == 4);

    // The shipped preset is the built-in device.
    const auto preset = run("report --config " + q(fs::path(OMKIT_DATA_DIR) / "devices" / "diamond_microdisk.json"));
    CHECK(preset.code == 0);
    CHECK(preset.out == run("report").out);
}

TEST_CASE("exit codes")
{
    const auto dir = workdir();
    CHECK(run("report --dropped-power-w -1").code == 1);
    CHECK(run("no-such-command").code == 1);
    CHECK(run("report --config " + q(dir / "missing.json")).code == 3);
    CHECK(run("fit-psd --in " + q(dir / "missing.csv")).code == 3);

    // A flat spectrum has no peak to fit.
    std::ofstream(dir / "flat.csv") << "freq_hz,psd\n1,1\n2,1\n3,1\n4,1\n5,1\n6,1\n7,1\n8,1\n9,1\n10,1\n";
    std::ofstream(dir / "flat.json") << R"({"input_power_w": 1e-3, "detuning_rad_s": 0, "rbw_hz": 1, "seed": null})";
    CHECK(run("fit-psd --in " + q(dir / "flat.csv")).code == 2);
}

TEST_CASE("sweep synthesis feeds the lineshape fit")
{
    const auto dir = workdir();
    REQUIRE(run("transmission --points 401 --out " + q(dir / "cold.csv")).code == 0);
    const auto cold = run("fit-lineshape --cold --in " + q(dir / "cold.csv"));
    REQUIRE(cold.code == 0);
    const auto c = estimate_table(cold.out);
    CHECK(c["q_intrinsic"].get<double>() == doctest::Approx(6.4e4).epsilon(0.01));
    CHECK(c["q_external"].get<double>() == doctest::Approx(9.6e5).epsilon(0.01));

    REQUIRE(run("bistable-sweep --input-power-w 1e-3 --points 401 --out " + q(dir / "hot.csv")).code == 0);
    const auto hot = run("fit-lineshape --in " + q(dir / "hot.csv"));
    REQUIRE(hot.code == 0);
    CHECK(estimate_table(hot.out)["d"].get<double>() > 0.0);
}

TEST_CASE("spectrum synthesis feeds the Lorentzian fit")
{
    const auto dir = workdir();
    REQUIRE(run("psd-synth --seed 3 --out " + q(dir / "psd.csv")).code == 0);
    const auto fit = run("fit-psd --in " + q(dir / "psd.csv"));
    REQUIRE(fit.code == 0);
    const auto e = estimate_table(fit.out);
    CHECK(e["f0"].get<double>() == doctest::Approx(2.1e9).epsilon(1e-4));
    CHECK(e["fwhm"].get<double>() == doctest::Approx(2.1e9 / 9000.0).epsilon(0.1));
    CHECK(run("fit-psd --covariance standard --format csv --in " + q(dir / "psd.csv")).code == 0);
}

TEST_CASE("backaction sweep feeds the g0 and alpha fits")
{
    const auto dir = workdir();
    REQUIRE(run("backaction-sweep --detuning-min-hz 2e8 --detuning-max-hz 4e9 --points 12 --input-power-w 5e-3 --out "
                + q(dir / "ba.csv"))
                .code
            == 0);
    const auto g0 = run("fit-g0 --in " + q(dir / "ba.csv"));
    REQUIRE(g0.code == 0);
    CHECK(estimate_table(g0.out)["g0"].get<double>() == doctest::Approx(2.0 * 3.141592653589793 * 26e3).epsilon(1e-9));
    const auto alpha = run("fit-alpha --in " + q(dir / "ba.csv"));
    REQUIRE(alpha.code == 0);
    CHECK(estimate_table(alpha.out)["alpha"].get<double>()
          == doctest::Approx(2.0 * 3.141592653589793 * -220e3 / 1e-3).epsilon(1e-9));
}

TEST_CASE("threshold, spin and survey")
{
    const auto dir = workdir();
    const auto thr = run("threshold --format csv");
    REQUIRE(thr.code == 0);
    CHECK(thr.out.find("threshold_power_w") != std::string::npos);
    const auto implied = run("threshold --target-power-w 3e-3");
    REQUIRE(implied.code == 0);
    const auto ij = nlohmann::json::parse(implied.out);
    CHECK(ij.at("q_intrinsic").get<double>() > 0.0);
    CHECK(ij.contains("consistent_with_loading"));

    const auto spin = run("spin --strain-zpm 3e-10 --amplitude-m 31e-12");
    REQUIRE(spin.code == 0);
    const auto sj = nlohmann::json::parse(spin.out);
    CHECK(sj.at("single_phonon_coupling_hz").get<double>() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(sj.at("driven_coupling_hz").get<double>() == doctest::Approx(0.6e6).epsilon(0.1));

    const auto sv = run("survey --in " + q(fs::path(OMKIT_DATA_DIR) / "survey" / "example.csv") + " --plot-data "
                        + q(dir / "plot.csv"));
    REQUIRE(sv.code == 0);
    CHECK(fs::exists(dir / "plot.csv"));
    std::ofstream(dir / "bad_survey.csv") << "label,material,structure,qf_hz,environment\nx,y,z,1e13,orbit\n";
    CHECK(run("survey --in " + q(dir / "bad_survey.csv")).code == 1);
}
