#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lpp/io.hpp"

using namespace lpp;
namespace fs = std::filesystem;

namespace {
const RowLaw kRows[] = {
    RowLaw::bernoulli(0.4),
    RowLaw::exponential(2.5),
    RowLaw::two_point(-1.0, 3.0, 0.25),
    RowLaw::bounded_table({0.0, 1.0, 1.0, 2.0}, {0.0, 0.3, 0.6, 1.0}),
    tilde_truncate(RowLaw::exponential(1.5), 2.0),
    truncate_m(RowLaw::exponential(1.0), 4.0),
};
}

TEST_CASE("row laws survive a JSON round trip") {
    for (const auto& row : kRows) {
        const auto j = row_to_json(row);
        const RowLaw back = row_from_json(j);
        CHECK(back.kind() == row.kind());
        for (double x : {-2.0, 0.0, 0.4, 1.0, 1.9, 3.5})
            CHECK(back.cdf(x) == doctest::Approx(row.cdf(x)).epsilon(1e-14));
        CHECK(back.mean() == doctest::Approx(row.mean()).epsilon(1e-14));
    }
}

TEST_CASE("environment laws and configs round trip") {
    RunConfig cfg;
    cfg.law = EnvironmentLaw::exponential_rate(RateDist::lower_power(1.0, 1.0, 0.5),
                                               TailSpec{-0.5, 1.0});
    cfg.geometry = Geometry::StrictY;
    cfg.convention = Convention::IncludeEndpoint;
    cfg.alphas = {0.1, 0.2, 0.3};
    cfg.axis = AlphaAxis::YisAlpha;
    cfg.n = 4321;
    cfg.replicas = 7;
    cfg.seed = 99;
    cfg.out_dir = "somewhere";

    const auto j = config_to_json(cfg);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);  // echo re-parses to an identical config

    const auto law2 = EnvironmentLaw::finite_mixture(
        {RowLaw::bernoulli(0.3), RowLaw::bernoulli(0.7)}, {0.25, 0.75});
    CHECK(law_to_json(law_from_json(law_to_json(law2))) == law_to_json(law2));
}

TEST_CASE("grid targets expand to the cross product of points") {
    nlohmann::json j;
    j["law"] = {{"kind", "point_mass"}, {"row", {{"kind", "exponential"}, {"rate", 1.0}}}};
    j["targets"] = {{"type", "grid"},
                    {"xs", {0.5, 1.0}},
                    {"ys", {1.0, 2.0, 3.0}},
                    {"n", 50}};
    const RunConfig cfg = config_from_json(j);
    REQUIRE(cfg.points.size() == 6);
    CHECK(cfg.points[0].x == 0.5);
    CHECK(cfg.points[5].y == 3.0);
    CHECK(cfg.points[5].n == 50);
}

TEST_CASE("config errors carry distinct messages") {
    CHECK_THROWS_AS(law_from_json({{"kind", "unknown"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json({{"geometry", "weak_weak"}}),
                    std::invalid_argument);
    nlohmann::json bad = {{"law", {{"kind", "bernoulli"}, {"p", 2.0}}}};
    bad["law"] = {{"kind", "point_mass"}, {"row", {{"kind", "bernoulli"}, {"p", 2.0}}}};
    CHECK_THROWS(config_from_json(bad));
}

TEST_CASE("csv and svg writers emit well-formed files") {
    const fs::path dir = fs::temp_directory_path() / "lpp_io_test";
    fs::create_directories(dir);
    const std::string csv = (dir / "t.csv").string();
    write_csv(csv, {"alpha", "value"}, {{"0.1", "1.5"}, {"0.2", "1.25"}});
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,value");
    std::getline(in, line);
    CHECK(line == "0.1,1.5");

    const std::string svg = (dir / "t.svg").string();
    write_svg_plot(svg, "demo", "alpha", "value",
                   {{"mc", "#1f77b4", true, {{0.1, 1.5}, {0.2, 1.25}}},
                    {"theory", "#d62728", false, {{0.1, 1.48}, {0.2, 1.24}}}});
    std::ifstream sin(svg);
    std::string all((std::istreambuf_iterator<char>(sin)),
                    std::istreambuf_iterator<char>());
    CHECK(all.find("<svg") != std::string::npos);
    CHECK(all.find("polyline") != std::string::npos);
    CHECK(all.find("</svg>") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("manifest echoes the config and version") {
    RunConfig cfg;
    cfg.points.push_back({1.0, 1.0, 100});
    const auto man = make_manifest("simulate", cfg, 1.25, {"a.csv"});
    CHECK(man["tool"] == "lpp");
    CHECK(man["command"] == "simulate");
    CHECK(man["config"]["seed"] == cfg.seed);
    const RunConfig echoed = config_from_json(man["config"]);
    CHECK(config_to_json(echoed) == man["config"]);
}
