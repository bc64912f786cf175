// Acceptance suite: one test case per criterion, each printing a single
// [PASS]/[FAIL] line with its wall time. Run via ctest (test name
// "acceptance") or directly as ./acceptance_tests.
#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "bichores/ef1_solver.hpp"
#include "bichores/ef_divisible.hpp"
#include "bichores/flow.hpp"
#include "bichores/verify.hpp"
#include "test_support.hpp"

using namespace bichores;
using testsupport::golden_instance_a;
using testsupport::golden_instance_b;

namespace {

struct Criterion {
    int id;
    const char* title;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    bool passed = false;

    Criterion(int id, const char* title) : id(id), title(title) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    ~Criterion() {
        std::printf("[%s] criterion %d: %s (%.2f s)\n", passed ? "PASS" : "FAIL", id, title,
                    seconds());
        std::fflush(stdout);
    }
};

// Test-only oracle: the lexicographically minimal (sorted descending)
// spending profile over all full mBB-supported fractional allocations,
// computed by exhaustive enumeration of chore subsets. Each level's value is
// the largest price-to-neighborhood ratio max_J p(J)/|gamma(J)|; the union of
// all maximizing subsets is forced to exactly that per-agent spending.
std::vector<Rational> lexmin_spending_oracle(const NormalizedInstance& inst,
                                             const PriceVector& prices) {
    const auto mbb = mbb_data(inst.costs, prices);
    std::vector<char> chore_left(inst.m, 1), agent_left(inst.n, 1);
    std::vector<Rational> spend(inst.n, 0);
    int chores_left = inst.m;
    while (chores_left > 0) {
        std::vector<int> rem;
        for (int j = 0; j < inst.m; ++j)
            if (chore_left[j]) rem.push_back(j);
        const int c = static_cast<int>(rem.size());
        Rational best;
        unsigned best_union = 0;
        bool have = false;
        for (unsigned mask = 1; mask < (1u << c); ++mask) {
            Rational total = 0;
            std::vector<char> gamma(inst.n, 0);
            int gamma_size = 0;
            for (int b = 0; b < c; ++b)
                if (mask & (1u << b)) {
                    total += prices[rem[b]];
                    for (const int i : mbb.mbb_agents[rem[b]])
                        if (agent_left[i] && !gamma[i]) {
                            gamma[i] = 1;
                            ++gamma_size;
                        }
                }
            REQUIRE(gamma_size > 0);
            const Rational ratio = total / gamma_size;
            if (!have || ratio > best) {
                best = ratio;
                best_union = mask;
                have = true;
            } else if (ratio == best) {
                best_union |= mask;
            }
        }
        for (int b = 0; b < c; ++b)
            if (best_union & (1u << b)) {
                chore_left[rem[b]] = 0;
                --chores_left;
            }
        for (int b = 0; b < c; ++b)
            if (best_union & (1u << b))
                for (const int i : mbb.mbb_agents[rem[b]])
                    if (agent_left[i]) {
                        spend[i] = best;
                        agent_left[i] = 0;
                    }
    }
    return spend;
}

std::vector<Rational> sorted_desc(std::vector<Rational> v) {
    std::sort(v.begin(), v.end(), [](const Rational& a, const Rational& b) { return a > b; });
    return v;
}

bool lex_less(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Exhaustive lattice search: every allocation whose shares are multiples of
// 1/depth on mBB edges. Returns the lex-min sorted-descending spending
// vector over that lattice.
std::vector<Rational> lattice_best_profile(const NormalizedInstance& inst,
                                           const PriceVector& prices, int depth) {
    const auto mbb = mbb_data(inst.costs, prices);
    std::vector<Rational> spend(inst.n, 0);
    std::vector<Rational> best;
    bool have = false;
    const std::function<void(int)> rec = [&](int j) {
        if (j == inst.m) {
            auto profile = sorted_desc(spend);
            if (!have || lex_less(profile, best)) {
                best = std::move(profile);
                have = true;
            }
            return;
        }
        const auto& eligible = mbb.mbb_agents[j];
        std::vector<int> units(eligible.size(), 0);
        const std::function<void(int, int)> comp = [&](int idx, int left) {
            if (idx + 1 == static_cast<int>(eligible.size())) {
                units[idx] = left;
                for (std::size_t e = 0; e < eligible.size(); ++e)
                    spend[eligible[e]] += prices[j] * units[e] / depth;
                rec(j + 1);
                for (std::size_t e = 0; e < eligible.size(); ++e)
                    spend[eligible[e]] -= prices[j] * units[e] / depth;
                return;
            }
            for (int u = 0; u <= left; ++u) {
                units[idx] = u;
                comp(idx + 1, left - u);
            }
        };
        comp(0, depth);
    };
    rec(0);
    return best;
}

} // namespace

TEST_CASE("criterion 1: six-agent golden example") {
    Criterion c(1, "six-agent golden example, exact bundles and trace");
    const auto sol = solve_ef1_fpo(normalize(golden_instance_a()));
    REQUIRE(sol.alloc.bundles ==
            std::vector<std::vector<int>>{{4}, {5, 6, 7, 8}, {0, 9}, {1, 10}, {2, 11}, {3, 12}});
    REQUIRE(count_kind(sol.trace, trace_kind::price_rise) == 1);
    std::vector<int> raised;
    for (const auto& ev : sol.trace)
        if (ev.kind == trace_kind::price_rise) raised.push_back(ev.payload["group"].get<int>());
    REQUIRE(raised == std::vector<int>{1});
    REQUIRE(count_kind(sol.trace, trace_kind::direct_transfer) == 4);
    REQUIRE(count_kind(sol.trace, trace_kind::path_transfer) == 0);
    REQUIRE(c.seconds() < 1.0);
    c.passed = true;
}

TEST_CASE("criterion 2: seven-agent golden example") {
    Criterion c(2, "seven-agent golden example, exact bundles and trace");
    const auto sol = solve_ef1_fpo(normalize(golden_instance_b()));
    REQUIRE(sol.alloc.bundles ==
            std::vector<std::vector<int>>{
                {0, 4}, {7, 8}, {6, 9}, {1, 10}, {2, 11}, {3, 12}, {5, 13}});
    std::vector<int> raised;
    for (const auto& ev : sol.trace)
        if (ev.kind == trace_kind::price_rise) raised.push_back(ev.payload["group"].get<int>());
    REQUIRE(raised == std::vector<int>{1, 2});
    REQUIRE(count_kind(sol.trace, trace_kind::path_transfer) == 1);
    REQUIRE(c.seconds() < 1.0);
    c.passed = true;
}

TEST_CASE("criterion 3: indivisible property suite") {
    Criterion c(3, "1000 random instances: EF1, pEF1, fPO certificate, monitors quiet");
    for (int t = 0; t < 1000; ++t) {
        const auto raw = testsupport::scheduled_instance(t, 7, 12);
        const auto inst = normalize(raw);
        // monitors live inside the solver; an InvariantViolation fails the test
        const auto sol = solve_ef1_fpo(inst);
        REQUIRE(check_ef1(raw.costs, sol.alloc).pass);
        REQUIRE(check_pef1(sol.alloc, sol.prices).pass);
        REQUIRE(check_fpo_certificate(raw.costs, sol.alloc, sol.prices).pass);
    }
    REQUIRE(c.seconds() < 60.0);
    c.passed = true;
}

TEST_CASE("criterion 4: brute-force Pareto agreement") {
    Criterion c(4, "200 small instances: outputs survive exhaustive PO search");
    for (int t = 0; t < 200; ++t) {
        const auto raw = testsupport::scheduled_instance(t, 3, 7);
        const auto sol = solve_ef1_fpo(normalize(raw));
        REQUIRE(brute_force_po(raw.costs, sol.alloc).pass);
    }
    REQUIRE(c.seconds() < 30.0);
    c.passed = true;
}

TEST_CASE("criterion 5: divisible property suite") {
    Criterion c(5, "500 random instances: exact pEF, EF, fPO certificate");
    for (int t = 0; t < 500; ++t) {
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
        const int groups = make_init_groups_div(inst).groups.size();
        REQUIRE((sol.r_star == 0 || (1 <= sol.r_star && sol.r_star <= groups - 1)));
    }
    REQUIRE(c.seconds() < 120.0);
    c.passed = true;
}

TEST_CASE("criterion 6: balanced-flow contract and oracle equivalence") {
    Criterion c(6, "balanced flow: contract on 200 instances, oracle match on small ones");
    for (int t = 0; t < 200; ++t) {
        const auto inst = normalize(testsupport::scheduled_instance(t, 5, 5));
        PriceVector prices(inst.m);
        for (int j = 0; j < inst.m; ++j) prices[j] = inst.chore_is_low[j] ? Rational(1) : inst.k;
        const auto x = balanced_flow(inst, prices);
        const auto mbb = mbb_data(inst.costs, prices);
        const auto spend = testsupport::fractional_spendings(x, prices);
        std::vector<FractionalBundle> bundles(inst.n);
        for (int j = 0; j < inst.m; ++j) {
            Rational col = 0;
            for (int i = 0; i < inst.n; ++i) {
                col += x.x[i][j];
                if (x.x[i][j] > 0) {
                    REQUIRE(mbb.in_mbb[i][j] == 1);
                    bundles[i][j] = x.x[i][j];
                }
            }
            REQUIRE(col == 1);
        }
        for (int i = 0; i < inst.n; ++i) {
            const auto comp = component_fractional(mbb, bundles, inst.m, i);
            for (const int h : comp.agents) REQUIRE(spend[h] >= spend[i]);
        }
    }
    for (int t = 0; t < 200; ++t) {
        const auto inst = normalize(testsupport::scheduled_instance(t, 4, 4));
        PriceVector prices(inst.m);
        for (int j = 0; j < inst.m; ++j) prices[j] = inst.chore_is_low[j] ? Rational(1) : inst.k;
        const auto x = balanced_flow(inst, prices);
        const auto spend = testsupport::fractional_spendings(x, prices);
        const auto oracle = lexmin_spending_oracle(inst, prices);
        REQUIRE(spend == oracle);
    }
    // lattice brute force cannot beat the oracle profile on tiny instances
    for (int t = 0; t < 12; ++t) {
        const auto inst = normalize(testsupport::scheduled_instance(t, 3, 3));
        PriceVector prices(inst.m);
        for (int j = 0; j < inst.m; ++j) prices[j] = inst.chore_is_low[j] ? Rational(1) : inst.k;
        const auto exact = sorted_desc(lexmin_spending_oracle(inst, prices));
        const auto lattice = lattice_best_profile(inst, prices, 3);
        REQUIRE_FALSE(lex_less(lattice, exact));
    }
    REQUIRE(c.seconds() < 60.0);
    c.passed = true;
}

TEST_CASE("criterion 7: strong polynomiality smoke check") {
    Criterion c(7, "step counts ignore k's magnitude; large solve under budget");
    {
        const auto a = solve_ef1_fpo(
            normalize(generate_random(20, 200, Rational(5), 0.3, 20260810)));
        const auto b = solve_ef1_fpo(
            normalize(generate_random(20, 200, Rational(1000000007), 0.3, 20260810)));
        REQUIRE(a.stats.init_transfers == b.stats.init_transfers);
        REQUIRE(a.stats.price_rises == b.stats.price_rises);
        REQUIRE(a.stats.direct_transfers == b.stats.direct_transfers);
        REQUIRE(a.stats.path_transfers == b.stats.path_transfers);
        REQUIRE(a.stats.total_steps() == b.stats.total_steps());
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = solve_ef1_fpo(
            normalize(generate_random(50, 1000, Rational(1000000007), 0.3, 424243)));
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        REQUIRE(sol.alloc.bundles.size() == 50);
        REQUIRE(secs < 5.0);
    }
    c.passed = true;
}

TEST_CASE("criterion 8: coverage note") {
    Criterion c(8, "no experimental tables to replicate; coverage is criteria 1-7");
    // The source results are existence and complexity statements plus two
    // fully worked examples; the exact examples (1-2) and the property
    // suites (3-7) are the complete verifiable surface.
    c.passed = true;
}
