#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "json.hpp"

#include "stochctl/errors.hpp"
#include "stochctl/experiment.hpp"

using namespace stochctl;

namespace {

std::string csv_of(const Dataset& d, const ExperimentConfig& c) {
    std::ostringstream os;
    write_csv(os, d, c);
    return os.str();
}

std::string body_of(const std::string& csv) {
    std::istringstream is(csv);
    std::string line, body;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '#') body += line + '\n';
    }
    return body;
}

} // namespace

TEST_CASE("grids") {
    const auto g = log_grid(1e-9, 1e4, 131);
    CHECK(g.size() == 131);
    CHECK(g.front() == 1e-9);
    CHECK(g.back() == 1e4);
    CHECK(g[10] == doctest::Approx(1e-8));
    const auto l = linear_grid(0, 3, 121);
    CHECK(l[1] == doctest::Approx(0.025));
    CHECK(l.back() == 3.0);
    CHECK_THROWS_AS(log_grid(0, 1, 5), InvalidParameter);
    CHECK_THROWS_AS(linear_grid(1, 1, 5), InvalidParameter);
}

TEST_CASE("column naming") {
    CHECK(visibility_column(0) == "V_tau0");
    CHECK(visibility_column(1.5) == "V_1p5");
    CHECK(visibility_column(20) == "V_20");
    CHECK(visibility_column(100) == "V_100");
    CHECK(sigma_column(0) == "ratio_sigma_0");
    CHECK(sigma_column(1e-5) == "ratio_sigma_1e-05");
    CHECK(sigma_column(1e-4) == "ratio_sigma_0.0001");
}

TEST_CASE("config validation") {
    ExperimentConfig c = default_config("fig2");
    CHECK_NOTHROW(c.validate());
    c.t_grid = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = default_config("fig1");
    c.tau_grid.clear();
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = default_config("fig3");
    c.rel_tol = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("fig1 dataset") {
    const ExperimentConfig c = default_config("fig1");
    const Dataset d = cmd_fig1(c);
    REQUIRE(d.columns == std::vector<std::string>{"gamma0_tau", "ratio_gamma", "ratio_gaussian"});
    REQUIRE(d.rows.size() == 131);
    CHECK(std::abs(d.rows.front()[1] - 1.0) < 1e-4);
    CHECK(std::abs(d.rows.front()[2] - 1.0) < 1e-4);
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        CHECK(d.status[i] == "ok");
        const double gt = d.rows[i][0];
        if (gt >= 1.0) CHECK(d.rows[i][2] > d.rows[i][1]);
        if (gt <= 13.0) CHECK(d.rows[i][1] > 1.0);
        if (gt >= 16.0) CHECK(d.rows[i][1] < 1.0);
    }
}

TEST_CASE("fig3 sigma = 0 column is the fig1 curve") {
    ExperimentConfig c1 = default_config("fig1");
    ExperimentConfig c3 = default_config("fig3");
    const Dataset d1 = cmd_fig1(c1);
    const Dataset d3 = cmd_fig3(c3);
    REQUIRE(d3.columns == std::vector<std::string>{"gamma0_tau", "ratio_sigma_0", "ratio_sigma_1e-05",
                                                   "ratio_sigma_0.0001"});
    for (std::size_t i = 0; i < d1.rows.size(); ++i) CHECK(d3.rows[i][1] == d1.rows[i][1]);
}

TEST_CASE("fig2 dataset on a short grid") {
    ExperimentConfig c = default_config("fig2");
    c.t_grid = linear_grid(0, 1, 5);
    const Dataset d = cmd_fig2(c);
    REQUIRE(d.columns == std::vector<std::string>{"gamma0_t", "V_tau0", "V_1p5", "V_20", "V_100"});
    REQUIRE(d.rows.size() == 5);
    for (double v : {d.rows[0][1], d.rows[0][2], d.rows[0][3], d.rows[0][4]}) CHECK(std::abs(v - 1) < 1e-9);
    for (const auto& r : d.rows) {
        CHECK(r[1] == doctest::Approx(std::exp(-8 * (1 - std::exp(-r[0])))).epsilon(1e-10));
        if (r[0] > 0) {
            CHECK(r[1] < r[3]);
            CHECK(r[3] < r[4]);
        }
    }
}

TEST_CASE("csv output: metadata header, status column and byte-identical reruns") {
    ExperimentConfig c = default_config("fig2");
    c.t_grid = linear_grid(0, 0.5, 3);
    c.seed = 4242;
    const std::string a = csv_of(cmd_fig2(c), c);
    const std::string b = csv_of(cmd_fig2(c), c);
    CHECK(a == b);
    CHECK(a.find("# command: fig2\n") == 0);
    CHECK(a.find("# seed: 4242\n") != std::string::npos);
    CHECK(a.find(std::string("# version: ") + artifact_version()) != std::string::npos);
    CHECK(a.find("# config: {") != std::string::npos);
    const std::string body = body_of(a);
    CHECK(body.rfind("gamma0_t,V_tau0,V_1p5,V_20,V_100,status\n", 0) == 0);
    CHECK(std::count(body.begin(), body.end(), '\n') == 4);
}

TEST_CASE("json output parses and mirrors the dataset") {
    ExperimentConfig c = default_config("fig1");
    c.tau_grid = {0.1, 1.0};
    c.format = OutputFormat::json;
    std::ostringstream os;
    const Dataset d = cmd_fig1(c);
    write_json(os, d, c);
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j["metadata"]["seed"] == c.seed);
    CHECK(j["columns"].size() == 3);
    CHECK(j["rows"][1][1].get<double>() == d.rows[1][1]);
    CHECK(j["status"][0] == "ok");
}

TEST_CASE("validation suite passes by default and flags a corrupted tolerance") {
    ExperimentConfig c = default_config("validate");
    c.samples = 20000;
    const ValidationReport good = cmd_validate(c);
    CHECK(good.passed());
    CHECK(good.checks.size() == 5);
    for (const auto& ch : good.checks) {
        CAPTURE(ch.name);
        CHECK(ch.passed);
        CHECK(ch.tolerance > 0);
    }
    std::ostringstream r1, r2;
    write_report(r1, good, c);
    write_report(r2, cmd_validate(c), c);
    CHECK(r1.str() == r2.str());

    c.rel_tol = 1e-1;
    const ValidationReport bad = cmd_validate(c);
    CHECK_FALSE(bad.passed());
    int failed = 0;
    for (const auto& ch : bad.checks) failed += ch.passed ? 0 : 1;
    CHECK(failed >= 2);
}
