#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + STOCHCTL_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "stochctl_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("cli: figure commands write reproducible files") {
    const fs::path a = scratch("fig1_a.csv"), b = scratch("fig1_b.csv");
    REQUIRE(run("fig1 --out " + a.string()) == 0);
    REQUIRE(run("fig1 --out " + b.string()) == 0);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text.find("gamma0_tau,ratio_gamma,ratio_gaussian,status") != std::string::npos);

    const fs::path f3 = scratch("fig3.json");
    REQUIRE(run("fig3 --sigma 0 --sigma 1e-4 --tau 1 --tau 10 --format json --out " + f3.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(f3));
    CHECK(j["columns"] == nlohmann::json({"gamma0_tau", "ratio_sigma_0", "ratio_sigma_0.0001"}));
    CHECK(j["rows"].size() == 2);

    const fs::path f2 = scratch("fig2.csv");
    REQUIRE(run("fig2 --t-max 1 --points 3 --x 0.5 --seed 9 --out " + f2.string()) == 0);
    const std::string t2 = slurp(f2);
    CHECK(t2.find("# seed: 9") != std::string::npos);
    CHECK(t2.find("\"x\":0.5") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
    CHECK(run("") == 2);
    CHECK(run("fig9") == 2);
    CHECK(run("fig1 --format xml") == 2);
    CHECK(run("fig1 --tau 2 --tau 1") == 2);
    CHECK(run("fig2 --points 1") == 2);
    CHECK(run("fig1 --q abc") == 2);
    CHECK(run("fig1 --out /nonexistent_dir/x.csv") == 1);
    CHECK(run("--help") == 0);
}

TEST_CASE("cli: validate passes by default and fails with a corrupted tolerance") {
    const fs::path good = scratch("validate.json");
    CHECK(run("validate --samples 20000 --out " + good.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(good));
    CHECK(j["passed"] == true);
    CHECK(run("validate --samples 20000 --tol 0.1") == 1);
}
