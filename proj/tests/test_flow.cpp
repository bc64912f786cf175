#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "bichores/flow.hpp"
#include "test_support.hpp"

using namespace bichores;
using testsupport::make_raw;

TEST_CASE("max_flow basics") {
    {
        // source -> chore(1) -> agent(2) -> sink(3), uncapped agent
        FlowNetwork net(4);
        net.add_arc(0, 1, 1);
        net.add_arc(1, 2, 100);
        net.add_arc(2, 3, 100);
        REQUIRE(max_flow(net, 0, 3) == 1);
    }
    {
        // two unit chores feeding one agent capped at 1
        FlowNetwork net(5);
        net.add_arc(0, 1, 1);
        net.add_arc(0, 2, 1);
        net.add_arc(1, 3, 100);
        net.add_arc(2, 3, 100);
        net.add_arc(3, 4, 1);
        REQUIRE(max_flow(net, 0, 4) == 1);
    }
    {
        // chores priced (1,3), complete adjacency to two agents capped at 2
        FlowNetwork net(6);
        net.add_arc(0, 1, 1);
        net.add_arc(0, 2, 3);
        for (int c = 1; c <= 2; ++c)
            for (int a = 3; a <= 4; ++a) net.add_arc(c, a, 100);
        net.add_arc(3, 5, 2);
        net.add_arc(4, 5, 2);
        REQUIRE(max_flow(net, 0, 5) == 4);
    }
}

TEST_CASE("max_flow conserves flow exactly") {
    FlowNetwork net(6);
    net.add_arc(0, 1, Rational(7) / 3);
    net.add_arc(0, 2, Rational(5) / 2);
    net.add_arc(1, 3, 100);
    net.add_arc(1, 4, 100);
    net.add_arc(2, 4, 100);
    net.add_arc(3, 5, Rational(3) / 2);
    net.add_arc(4, 5, Rational(10) / 3);
    const Rational value = max_flow(net, 0, 5);
    REQUIRE(value == Rational(7) / 3 + Rational(5) / 2);
    for (int v = 1; v <= 4; ++v) {
        Rational net_in = 0;
        for (std::size_t a = 0; a < net.arcs.size(); a += 2) {
            if (net.arcs[a].to == v) net_in += net.arcs[a].flow;
            if (net.arcs[a + 1].to == v) net_in -= net.arcs[a].flow;
        }
        REQUIRE(net_in == 0);
    }
    for (std::size_t a = 0; a < net.arcs.size(); a += 2) {
        REQUIRE(net.arcs[a].flow >= 0);
        REQUIRE(net.arcs[a].flow <= net.arcs[a].cap);
    }
}

TEST_CASE("balanced_flow on disjoint mBB stars is the identity") {
    const auto inst = normalize(make_raw({{1, 5}, {5, 1}}));
    const PriceVector prices{1, 1};
    const auto x = balanced_flow(inst, prices);
    REQUIRE(x.x[0][0] == 1);
    REQUIRE(x.x[1][1] == 1);
    REQUIRE(x.x[0][1] == 0);
    REQUIRE(x.x[1][0] == 0);
}

TEST_CASE("balanced_flow splits identical chores evenly") {
    const auto inst = normalize(make_raw({{3, 3, 3}, {3, 3, 3}}));
    const PriceVector prices{1, 1, 1};
    const auto x = balanced_flow(inst, prices);
    const auto spend = testsupport::fractional_spendings(x, prices);
    REQUIRE(spend[0] == Rational(3) / 2);
    REQUIRE(spend[1] == Rational(3) / 2);
}

TEST_CASE("balanced_flow pins the forced split") {
    const auto inst = normalize(make_raw({{1, 1}, {5, 1}}));
    const PriceVector prices{1, 1};
    const auto x = balanced_flow(inst, prices);
    REQUIRE(x.x[0][0] == 1);
    REQUIRE(x.x[0][1] == 0);
    REQUIRE(x.x[1][1] == 1);
}

TEST_CASE("balanced_flow rejects a chore without mBB edges") {
    // price 1 on a chore everyone costs at k keeps it off every mBB set
    const auto inst = normalize(make_raw({{1, 5}, {1, 5}}));
    CHECK_THROWS_AS(balanced_flow(inst, PriceVector{1, 1}), MalformedMarket);
}

TEST_CASE("balanced_flow contract on random instances") {
    for (int t = 0; t < 60; ++t) {
        const auto inst = normalize(testsupport::scheduled_instance(t, 5, 7));
        PriceVector prices(inst.m);
        for (int j = 0; j < inst.m; ++j) prices[j] = inst.chore_is_low[j] ? Rational(1) : inst.k;
        const auto x = balanced_flow(inst, prices);
        const auto mbb = mbb_data(inst.costs, prices);
        const auto spend = testsupport::fractional_spendings(x, prices);
        for (int j = 0; j < inst.m; ++j) {
            Rational col = 0;
            for (int i = 0; i < inst.n; ++i) {
                col += x.x[i][j];
                if (x.x[i][j] > 0) REQUIRE(mbb.in_mbb[i][j] == 1);
            }
            REQUIRE(col == 1);
        }
        // no alternating path from a strictly higher to a strictly lower spender
        std::vector<FractionalBundle> bundles(inst.n);
        for (int i = 0; i < inst.n; ++i)
            for (int j = 0; j < inst.m; ++j)
                if (x.x[i][j] > 0) bundles[i][j] = x.x[i][j];
        for (int i = 0; i < inst.n; ++i) {
            const auto comp = component_fractional(mbb, bundles, inst.m, i);
            for (const int h : comp.agents) REQUIRE(spend[h] >= spend[i]);
        }
    }
}
