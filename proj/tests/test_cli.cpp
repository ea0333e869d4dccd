// End-to-end checks of the command-line tool: exit codes, file layout, and
// byte-level determinism of repeated runs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "indesign/config.hpp"
#include "indesign/design.hpp"
#include "indesign/embeddings.hpp"
#include "indesign/inversion.hpp"
#include "indesign/serialize.hpp"
#include "indesign/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() { return INDESIGN_CLI_PATH; }

int run(const std::string& args) {
    const std::string command = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "indesign_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& path, bool drop_power = false) {
    json j{
        {"N", 16},
        {"n", 4},
        {"C", 8.0},
        {"sigma2", 0.5},
        {"kernel", {{"family", "tc"}, {"scale", 1.0}, {"decay", 0.85}}},
        {"criterion", "d"},
        {"solver", {{"max_iter", 20000}, {"tol", 1e-7}, {"line_search", true}}},
        {"seed", 5},
    };
    if (drop_power) j.erase("C");
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("design then invert produce artifacts and exit zero") {
    const auto dir = work_dir();
    write_config(dir / "config.json");
    CHECK(run("design --config " + (dir / "config.json").string() + " --out-dir " +
              (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "artifact.json"));

    CHECK(run("invert --artifact " + (dir / "out").string() + " --count 8 --route giie --seed 4") ==
          0);
    CHECK(fs::exists(dir / "out" / "inputs.csv"));
    CHECK(fs::exists(dir / "out" / "membership.csv"));
    CHECK(fs::exists(dir / "out" / "scatter.csv"));

    const auto summary = json::parse(slurp(dir / "out" / "summary.json"));
    CHECK(summary.at("passes").get<int>() == 8);
}

TEST_CASE("missing config field exits 2 and names the field") {
    const auto dir = work_dir();
    write_config(dir / "bad.json", /*drop_power=*/true);
    const std::string command = std::string(cli_path()) + " design --config " +
                                (dir / "bad.json").string() + " --out-dir " +
                                (dir / "ignored").string() + " 2> " +
                                (dir / "stderr.txt").string();
    const int status = std::system(command.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(slurp(dir / "stderr.txt").find("'C'") != std::string::npos);
}

TEST_CASE("solver that cannot converge exits 3") {
    const auto dir = work_dir();
    const auto path = dir / "tiny.json";
    json j = json::parse(slurp(write_config(path)));
    j["solver"]["max_iter"] = 2;
    j["solver"]["tol"] = 1e-12;
    j["solver"]["line_search"] = false;
    std::ofstream(path) << j.dump(2);
    CHECK(run("design --config " + path.string() + " --out-dir " + (dir / "nc").string()) == 3);
}

TEST_CASE("invert with zero count writes an empty batch and exits zero") {
    const auto dir = work_dir();
    write_config(dir / "config.json");
    REQUIRE(run("design --config " + (dir / "config.json").string() + " --out-dir " +
                (dir / "zero").string()) == 0);
    CHECK(run("invert --artifact " + (dir / "zero").string() + " --count 0 --seed 1") == 0);
    const auto summary = json::parse(slurp(dir / "zero" / "summary.json"));
    CHECK(summary.at("count").get<int>() == 0);
    CHECK(summary.at("passes").get<int>() == 0);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
    const auto dir = work_dir();
    write_config(dir / "config.json");
    for (const char* out : {"rep1", "rep2"}) {
        REQUIRE(run("design --config " + (dir / "config.json").string() + " --out-dir " +
                    (dir / out).string()) == 0);
        REQUIRE(run("invert --artifact " + (dir / out).string() +
                    " --count 12 --route giie --seed 77") == 0);
    }
    CHECK(slurp(dir / "rep1" / "artifact.json") == slurp(dir / "rep2" / "artifact.json"));
    CHECK(slurp(dir / "rep1" / "inputs.csv") == slurp(dir / "rep2" / "inputs.csv"));
    CHECK(slurp(dir / "rep1" / "membership.csv") == slurp(dir / "rep2" / "membership.csv"));
}

TEST_CASE("serial and parallel runs produce identical files") {
    const auto dir = work_dir();
    write_config(dir / "config.json");
    REQUIRE(run("design --config " + (dir / "config.json").string() + " --out-dir " +
                (dir / "par").string()) == 0);
    REQUIRE(run("invert --artifact " + (dir / "par").string() +
                " --count 16 --route fdie --seed 9 --out-dir " + (dir / "par_out").string()) == 0);
    const std::string serial_cmd = "INDESIGN_THREADS=1 " + std::string(cli_path()) +
                                   " invert --artifact " + (dir / "par").string() +
                                   " --count 16 --route fdie --seed 9 --out-dir " +
                                   (dir / "ser_out").string() + " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(serial_cmd.c_str())) == 0);
    CHECK(slurp(dir / "par_out" / "inputs.csv") == slurp(dir / "ser_out" / "inputs.csv"));
}

TEST_CASE("verify subcommand covers the battery") {
    CHECK(run("verify --N 6 --n 3") == 0);
    CHECK(run("verify --N 6 --n 4") == 0);  // singleton branch
    CHECK(run("verify --N 9 --n 3") == 0);
    CHECK(run("verify --N 6 --n 3 --embedding tde --embedding fde "
              "--embedding gie:0.3,0.7 --embedding real:17") == 0);
    CHECK(run("verify --N 6 --n 3 --embedding bogus") == 1);
}

TEST_CASE("scalar design via the CLI matches the closed form") {
    const auto dir = work_dir();
    json j{
        {"N", 6},
        {"n", 1},
        {"C", 4.0},
        {"sigma2", 0.5},
        {"kernel", {{"family", "tc"}, {"scale", 1.0}, {"decay", 0.85}}},
        {"criterion", "d"},
    };
    std::ofstream(dir / "scalar.json") << j.dump(2);
    REQUIRE(run("design --config " + (dir / "scalar.json").string() + " --out-dir " +
                (dir / "scalar").string()) == 0);
    const auto artifact = json::parse(slurp(dir / "scalar" / "artifact.json"));
    const double expected = std::log(0.5) - std::log(4.0 + 0.5 / 0.85);
    CHECK(artifact.at("objective").get<double>() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("infeasible stored autocovariance exits 4 on invert") {
    const auto dir = work_dir() / "infeasible";
    indesign::io::RunArtifact artifact;
    artifact.config = indesign::io::parse_config(json{
        {"N", 4},
        {"n", 3},
        {"C", 1.0},
        {"sigma2", 0.5},
        {"kernel", {{"family", "tc"}, {"scale", 1.0}, {"decay", 0.85}}},
    });
    artifact.r_star.resize(3);
    artifact.r_star << 1.0, 0.5, -0.5;  // PSD Toeplitz but outside the polytope
    artifact.w_star = Eigen::VectorXd::Zero(4);
    indesign::io::write_artifact(dir, artifact);
    CHECK(run("invert --artifact " + dir.string() + " --count 2 --seed 1") == 4);
}

TEST_CASE("inputs from the tdie route map onto spectrum-route outputs") {
    const auto dir = work_dir();
    write_config(dir / "config.json");
    REQUIRE(run("design --config " + (dir / "config.json").string() + " --out-dir " +
                (dir / "cross").string()) == 0);
    REQUIRE(run("invert --artifact " + (dir / "cross").string() +
                " --count 6 --route tdie --seed 31") == 0);
    const auto artifact = indesign::io::read_artifact(dir / "cross");
    const int n_signal = artifact.config.problem.n_signal;
    const Eigen::MatrixXd basis = indesign::embeddings::tde_basis(n_signal);
    const indesign::inversion::Autocovariance r(artifact.r_star);
    for (int i = 0; i < artifact.inputs.rows(); ++i) {
        const Eigen::VectorXd u = artifact.inputs.row(i).transpose();
        const Eigen::VectorXd z = basis.transpose() * u;
        const auto spectrum = indesign::inversion::cross_map_tde_to_fde(z);
        const auto rebuilt = indesign::spectral::idft(indesign::inversion::assign_phases(
            indesign::inversion::weights_from_spectrum(spectrum),
            indesign::inversion::phases_from_spectrum(spectrum)));
        CHECK((rebuilt.samples() - u).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(indesign::inversion::membership_check(rebuilt, r).pass);
    }
}

TEST_CASE("tdie route emits fiber members too") {
    const auto dir = work_dir();
    write_config(dir / "config.json");
    REQUIRE(run("design --config " + (dir / "config.json").string() + " --out-dir " +
                (dir / "td").string()) == 0);
    CHECK(run("invert --artifact " + (dir / "td").string() + " --count 6 --route tdie --seed 2") ==
          0);
    const auto summary = json::parse(slurp(dir / "td" / "summary.json"));
    CHECK(summary.at("passes").get<int>() == 6);
}

TEST_CASE("small reproduce run passes for both routes") {
    const auto dir = work_dir();
    CHECK(run("reproduce-paper --trials 3 --seed 6 --out-dir " + (dir / "rp").string()) == 0);
    const auto summary = json::parse(slurp(dir / "rp" / "summary.json"));
    CHECK(summary.at("membership_passes").get<int>() == 3);
    CHECK(summary.at("certificate_ok").get<bool>());
    CHECK(run("reproduce-paper --trials 3 --seed 6 --route fdie --out-dir " +
              (dir / "rp_fdie").string()) == 0);
}
