#include "catch_amalgamated.hpp"

#include "mab/campaign.hpp"

#include <atomic>
#include <stdexcept>

using namespace mab;

TEST_CASE("draw streams are deterministic and independent of order") {
    auto a = draw_rng(7, 3);
    auto b = draw_rng(7, 3);
    CHECK(a() == b());
    CHECK(draw_rng(7, 3)() != draw_rng(7, 4)());
    CHECK(draw_rng(7, 3)() != draw_rng(8, 3)());
}

TEST_CASE("random cases are valid") {
    for (std::uint64_t k = 0; k < 500; ++k) {
        auto rng = draw_rng(1, k);
        const auto c = random_case(rng, 2, 8);
        REQUIRE(c.config.size() >= 2);
        REQUIRE(c.config.size() <= 8);
        REQUIRE_NOTHROW(validate_config(c.config));
        REQUIRE_NOTHROW(validate_shifts(c.shifts, c.config.size()));
    }
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                     if (i == 42) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
    parallel_for(0, 2, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("campaign passes and is reproducible") {
    CampaignOptions o;
    o.seed = 12;
    o.draws = 300;
    const auto a = run_campaign(o);
    CHECK(a.passed());
    CHECK(a.oracle_error <= 1e-9);
    CHECK(a.instant_error <= 1e-9);
    CHECK(a.min_offset_term >= 0.0);
    o.threads = 1;
    const auto b = run_campaign(o);
    CHECK(a.oracle_error == b.oracle_error);
    CHECK(a.power_balance_error == b.power_balance_error);

    o.draws = 1;
    CHECK(run_campaign(o).oracle_error == run_campaign(o).oracle_error);
}

TEST_CASE("campaign detects an injected fault") {
    CampaignOptions o;
    o.draws = 20;
    o.injected_fault = 1e-6;
    const auto r = run_campaign(o);
    CHECK_FALSE(r.passed());
    CHECK(r.failed_draws == 20);
    CHECK(r.oracle_error > 1e-9);
}

TEST_CASE("campaign argument checks") {
    CampaignOptions o;
    o.draws = 0;
    CHECK_THROWS_AS(run_campaign(o), ConfigError);
    o.draws = 1;
    o.min_ports = 1;
    CHECK_THROWS_AS(run_campaign(o), ConfigError);
}
