#include <catch2/catch_amalgamated.hpp>

#include "bichores/ef_divisible.hpp"
#include "bichores/verify.hpp"
#include "test_support.hpp"

using namespace bichores;
using testsupport::golden_instance_a;
using testsupport::make_raw;

TEST_CASE("take_fractional_subset") {
    const PriceVector prices{1, 1, 5};
    REQUIRE(take_fractional_subset({{0, Rational(1)}}, prices, 0).empty());
    {
        const auto c = take_fractional_subset({{0, Rational(1)}, {1, Rational(1)}}, prices,
                                              Rational(3) / 2);
        REQUIRE(c.size() == 2);
        REQUIRE(c.at(0) == 1);
        REQUIRE(c.at(1) == Rational(1) / 2);
    }
    {
        const auto c = take_fractional_subset({{2, Rational(1)}}, prices, 2);
        REQUIRE(c.size() == 1);
        REQUIRE(c.at(2) == Rational(2) / 5);
    }
    CHECK_THROWS_AS(take_fractional_subset({{0, Rational(1)}}, prices, 2), InsufficientSpend);
}

TEST_CASE("make_init_groups_div forms singleton groups on disjoint stars") {
    const auto out = make_init_groups_div(normalize(make_raw({{1, 5}, {5, 1}})));
    REQUIRE(out.groups.size() == 2);
    REQUIRE(out.groups.group_agents[0] == std::vector<int>{0});
    REQUIRE(out.groups.group_agents[1] == std::vector<int>{1});
    REQUIRE(out.groups.formation_value[0] == 1);
    REQUIRE(out.groups.formation_value[1] == 1);
}

TEST_CASE("make_init_groups_div forms one group on identical costs") {
    const auto out = make_init_groups_div(normalize(make_raw({{2, 2, 2}, {2, 2, 2}})));
    REQUIRE(out.groups.size() == 1);
    REQUIRE(out.groups.formation_value[0] == Rational(3) / 2);
}

TEST_CASE("make_init_groups_div mirrors the integral groups on the golden instance") {
    const auto out = make_init_groups_div(normalize(golden_instance_a()));
    REQUIRE(out.groups.size() == 6);
    const std::vector<long long> want = {5, 4, 1, 1, 1, 1};
    for (int r = 0; r < 6; ++r) {
        REQUIRE(out.groups.group_agents[r] == std::vector<int>{r});
        REQUIRE(out.groups.formation_value[r] == want[r]);
    }
}

TEST_CASE("divisible solver: identical costs are pEF at initialization") {
    const auto inst = normalize(make_raw({{1, 1, 1}, {1, 1, 1}}));
    const auto sol = solve_ef_fpo(inst);
    REQUIRE(sol.r_star == 0);
    const auto spend = testsupport::fractional_spendings(sol.x, sol.prices);
    REQUIRE(spend[0] == Rational(3) / 2);
    REQUIRE(spend[1] == Rational(3) / 2);
}

TEST_CASE("divisible solver: disjoint stars resolve to the identity") {
    const auto sol = solve_ef_fpo(normalize(make_raw({{1, 5}, {5, 1}})));
    REQUIRE(sol.r_star == 0);
    REQUIRE(sol.x.x[0][0] == 1);
    REQUIRE(sol.x.x[1][1] == 1);
    REQUIRE(sol.x.x[0][1] == 0);
    REQUIRE(sol.x.x[1][0] == 0);
}

TEST_CASE("divisible solver: one raise and a final drain") {
    const auto inst = normalize(make_raw({{1, 1, 1}, {5, 1, 5}}));
    const auto sol = solve_ef_fpo(inst);
    REQUIRE(sol.r_star == 1);
    const auto spend = testsupport::fractional_spendings(sol.x, sol.prices);
    REQUIRE(spend[0] == Rational(11) / 2);
    REQUIRE(spend[1] == Rational(11) / 2);
    // prices after raising agent 0's chores (0 and 2)
    REQUIRE(sol.prices == PriceVector{5, 1, 5});
    // greedy drain takes nine tenths of chore 0
    REQUIRE(sol.x.x[0][0] == Rational(1) / 10);
    REQUIRE(sol.x.x[1][0] == Rational(9) / 10);
    REQUIRE(sol.x.x[0][2] == 1);
    REQUIRE(sol.x.x[1][1] == 1);
    REQUIRE(check_ef_fractional(inst.costs, sol.x).pass);
    REQUIRE(check_fpo_certificate(inst.costs, sol.x, sol.prices).pass);
}

TEST_CASE("divisible solver: binary regime splits the all-ones chores equally") {
    const auto inst = normalize(make_raw({{0, 3, 3}, {3, 0, 3}, {3, 3, 3}}));
    REQUIRE(inst.regime == Regime::Binary);
    const auto sol = solve_ef_fpo(inst);
    REQUIRE(sol.x.x[0][0] == 1);
    REQUIRE(sol.x.x[1][1] == 1);
    for (int i = 0; i < 3; ++i) REQUIRE(sol.x.x[i][2] == Rational(1) / 3);
    REQUIRE(check_ef_fractional(inst.costs, sol.x).pass);
    REQUIRE(check_fpo_certificate(inst.costs, sol.x, sol.prices).pass);
}

TEST_CASE("divisible solver properties on random instances") {
    for (int t = 0; t < 80; ++t) {
        const auto raw = testsupport::scheduled_instance(t, 6, 10);
        const auto inst = normalize(raw);
        const auto sol = solve_ef_fpo(inst);
        const auto spend = testsupport::fractional_spendings(sol.x, sol.prices);
        for (std::size_t i = 1; i < spend.size(); ++i) REQUIRE(spend[i] == spend[0]);
        REQUIRE(check_ef_fractional(raw.costs, sol.x).pass);
        REQUIRE(check_fpo_certificate(raw.costs, sol.x, sol.prices).pass);
        for (int j = 0; j < inst.m; ++j) {
            Rational col = 0;
            for (int i = 0; i < inst.n; ++i) col += sol.x.x[i][j];
            REQUIRE(col == 1);
        }
        const int R = make_init_groups_div(inst).groups.size();
        REQUIRE(sol.r_star >= 0);
        REQUIRE((sol.r_star == 0 || sol.r_star <= R - 1));
    }
}
