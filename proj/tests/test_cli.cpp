#include "cbd/config.hpp"
#include "cbd/suites.hpp"

#include <doctest.h>

using namespace cbd;

TEST_CASE("config parsing") {
    SUBCASE("defaults validate") {
        ExperimentConfig cfg;
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("well-formed file parses") {
        const std::string text = R"(# comment
[grid]
d = 1
L = 6

[value]
n = 2
m = 1
r = inf

[operator]
kind = dini_smooth
c = 2.0
delta_mod = 0.5

[run]
seed = 42
)";
        const ExperimentConfig cfg = ExperimentConfig::parse_string(text);
        CHECK(cfg.L == 6);
        CHECK(cfg.r == kInfExponent);
        CHECK(cfg.kernel == "dini_smooth");
        CHECK(cfg.seed == 42);
    }
    SUBCASE("unknown key is rejected with its line number") {
        const std::string text = "[grid]\nd = 1\nbogus = 3\n";
        try {
            ExperimentConfig::parse_string(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 3);
            CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        }
    }
    SUBCASE("unknown section is rejected") {
        CHECK_THROWS_AS(ExperimentConfig::parse_string("[nope]\nx = 1\n"), ConfigError);
    }
    SUBCASE("malformed values are rejected") {
        CHECK_THROWS_AS(ExperimentConfig::parse_string("[grid]\nL = abc\n"), ConfigError);
        CHECK_THROWS_AS(ExperimentConfig::parse_string("[grid]\nL\n"), ConfigError);
    }
    SUBCASE("semantic validation failures throw") {
        ExperimentConfig cfg;
        cfg.epsilon = 0.4; // n = 2 gives n*eps >= 1/2
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}

TEST_CASE("suite reports are deterministic for a fixed seed") {
    ExperimentConfig cfg;
    cfg.L = 5;
    cfg.eq_seeds = 2;
    const nlohmann::json a = run_suite_json("equivalence", cfg);
    const nlohmann::json b = run_suite_json("equivalence", cfg);
    CHECK(a.dump() == b.dump());

    ExperimentConfig other = cfg;
    other.seed = cfg.seed + 1;
    const nlohmann::json c = run_suite_json("equivalence", other);
    CHECK(a.dump() != c.dump());
}

TEST_CASE("unknown suite is rejected") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(run_suite_json("nope", cfg), std::invalid_argument);
}

TEST_CASE("families serialize to json with witness ranges") {
    DyadicGrid grid(1, 3);
    SparseFamily fam;
    fam.grid = &grid;
    fam.eta = 0.5;
    fam.provenance = "test";
    fam.members.push_back({grid.root(), {0, 1, 2, 5, 6}, 1.25});
    const nlohmann::json j = family_to_json(fam);
    CHECK(j.at("eta").get<double>() == 0.5);
    REQUIRE(j.at("members").size() == 1);
    const auto& m = j.at("members")[0];
    CHECK(m.at("cube").at("level").get<int>() == 0);
    CHECK(m.at("a").get<double>() == 1.25);
    // cells 0,1,2 and 5,6 compress to the ranges [0,3) and [5,7)
    REQUIRE(m.at("witness_ranges").size() == 2);
    CHECK(m.at("witness_ranges")[0][0].get<int>() == 0);
    CHECK(m.at("witness_ranges")[0][1].get<int>() == 3);
    CHECK(m.at("witness_ranges")[1][0].get<int>() == 5);
    CHECK(m.at("witness_ranges")[1][1].get<int>() == 7);
}

TEST_CASE("suite reports carry anchors and pass flags") {
    ExperimentConfig cfg;
    cfg.L = 5;
    cfg.eq_seeds = 2;
    const nlohmann::json rep = run_suite_json("equivalence", cfg);
    REQUIRE(rep.contains("checks"));
    const auto rows = checks_from_json(rep.at("checks"));
    REQUIRE(!rows.empty());
    for (const auto& row : rows) {
        CHECK(!row.anchor.empty());
        CHECK(row.pass);
    }
    CHECK(rep.at("all_pass").get<bool>());
}
