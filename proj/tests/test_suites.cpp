#include <algorithm>

#include "doctest.h"
#include "qteich/error.hpp"
#include "qteich/suites.hpp"

using namespace qteich;

TEST_CASE("suite names round trip") {
    for (int k = 0; k <= static_cast<int>(Suite::All); ++k) CHECK(parse_suite(suite_name(static_cast<Suite>(k))) == static_cast<Suite>(k));
    CHECK_THROWS_AS(parse_suite("nope"), Error);
}

TEST_CASE("check ids are unique and sorted") {
    const auto ids = suite_check_ids(Suite::All);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
    CHECK(std::find(ids.begin(), ids.end(), "qdilog.inversion") != ids.end());
}

TEST_CASE("unknown or non-positive tolerance overrides are config errors") {
    SuiteConfig cfg;
    cfg.suite = Suite::Groupoid;
    cfg.tolerances["groupoid.nothing"] = 1.0;
    CHECK_THROWS_AS(run_suite(cfg), Error);
    cfg.tolerances = {{"groupoid.flip", -1.0}};
    CHECK_THROWS_AS(run_suite(cfg), Error);
}

TEST_CASE("tolerance override applies and can fail a check") {
    SuiteConfig cfg;
    cfg.suite = Suite::Qdilog;
    cfg.only = {"qdilog.inversion"};
    auto recs = run_suite(cfg);
    REQUIRE(recs.size() == 1u);
    CHECK(recs[0].pass);
    cfg.tolerances["qdilog.inversion"] = 1e-30;
    recs = run_suite(cfg);
    CHECK(recs[0].tolerance == 1e-30);
    CHECK_FALSE(recs[0].pass);
}

TEST_CASE("reports are deterministic") {
    SuiteConfig cfg;
    cfg.suite = Suite::System;
    cfg.n_points = 64;
    const std::string a = report_json(run_suite(cfg)), b = report_json(run_suite(cfg));
    CHECK(a == b);
    CHECK(report_csv(run_suite(cfg)).rfind("check_id,relation,residual,tolerance,pass\n", 0) == 0);
}

TEST_CASE("groupoid suite passes") {
    SuiteConfig cfg;
    cfg.suite = Suite::Groupoid;
    for (const auto& r : run_suite(cfg)) {
        INFO(r.check_id);
        CHECK(r.pass);
    }
}

TEST_CASE("quantum group record names line up with the library") {
    SuiteConfig cfg;
    cfg.suite = Suite::Qgroup;
    cfg.n_points = 32;
    cfg.only = {"qgroup.algebra", "qgroup.uq", "qgroup.beta", "qgroup.heisenberg"};
    const auto recs = run_suite(cfg);
    CHECK(recs.size() == 22u);
    for (const auto& r : recs) {
        INFO(r.check_id);
        CHECK(std::isfinite(r.residual));
        CHECK(r.params.count("error") == 0);
    }
}
