// EF+fPO solver for divisible bivalued chores. Initialization allocates by
// balanced flow and groups agents into equal-spending partial components;
// the main search guesses how many leading groups to raise (r), then drains
// spending uniformly from the pool of biggest spenders into the pool of least
// spenders until either every agent spends the same (success) or a pool
// crosses the raised/unraised boundary (try the next r).
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "bichores/ef1_solver.hpp" // GroupPartition
#include "bichores/errors.hpp"
#include "bichores/flow.hpp"
#include "bichores/instance.hpp"
#include "bichores/market.hpp"
#include "bichores/rational.hpp"
#include "bichores/trace.hpp"

namespace bichores {

// Greedy prefix of a bundle, in ascending chore order, whose price is exactly
// `target`: whole shares while they fit, then one fractional piece.
inline FractionalBundle take_fractional_subset(const FractionalBundle& bundle,
                                               const PriceVector& prices, const Rational& target) {
    if (target < 0) throw InsufficientSpend("negative target");
    FractionalBundle out;
    Rational cum = 0;
    for (const auto& [j, share] : bundle) {
        if (cum == target) break;
        const Rational value = prices[j] * share;
        if (cum + value <= target) {
            out[j] = share;
            cum += value;
        } else {
            out[j] = (target - cum) / prices[j];
            cum = target;
            break;
        }
    }
    if (cum != target) throw InsufficientSpend("bundle is worth less than the target");
    return out;
}

struct DivInitOutcome {
    std::vector<FractionalBundle> bundles;
    PriceVector prices;
    GroupPartition groups;
};

// Balanced-flow allocation at the {1,k} prices, grouped into partial
// components of successive biggest spenders. Each group is pEF (its agents
// spend exactly the same) and per-agent group spending is non-increasing.
inline DivInitOutcome make_init_groups_div(const NormalizedInstance& inst) {
    if (inst.regime == Regime::Binary)
        throw MalformedMarket("market initialization requires strictly positive costs");

    DivInitOutcome out;
    out.prices.resize(inst.m);
    for (int j = 0; j < inst.m; ++j) out.prices[j] = inst.chore_is_low[j] ? Rational(1) : inst.k;

    const FractionalAllocation x = balanced_flow(inst, out.prices);
    out.bundles.assign(inst.n, {});
    std::vector<Rational> spend(inst.n, 0);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.m; ++j)
            if (x.x[i][j] > 0) {
                out.bundles[i][j] = x.x[i][j];
                spend[i] += x.x[i][j] * out.prices[j];
            }

    const MbbData mbb = mbb_data(inst.costs, out.prices);
    GroupPartition& groups = out.groups;
    groups.group_of.assign(inst.n, -1);
    std::vector<char> pool(inst.n, 1);
    int pool_size = inst.n;
    while (pool_size > 0) {
        int b = -1;
        for (int i = 0; i < inst.n; ++i)
            if (pool[i] && (b < 0 || spend[i] > spend[b])) b = i;
        const auto comp = component_fractional(mbb, out.bundles, inst.m, b);
        std::vector<int> members, chores;
        for (const int a : comp.agents)
            if (pool[a]) members.push_back(a);
        for (const int j : comp.chores) {
            bool any_pool = false, any_frozen = false;
            for (int i = 0; i < inst.n; ++i)
                if (out.bundles[i].count(j)) (pool[i] ? any_pool : any_frozen) = true;
            if (any_pool && any_frozen)
                throw InvariantViolation("chore split across group boundaries");
            if (any_pool) chores.push_back(j);
        }
        std::sort(members.begin(), members.end());
        std::sort(chores.begin(), chores.end());
        for (const int a : members)
            if (spend[a] != spend[b])
                throw InvariantViolation("group members must spend exactly the same");
        if (!groups.formation_value.empty() && spend[b] > groups.formation_value.back())
            throw InvariantViolation("group spendings must be non-increasing");

        const int r = groups.size();
        for (const int a : members) {
            groups.group_of[a] = r;
            pool[a] = 0;
        }
        pool_size -= static_cast<int>(members.size());
        groups.group_agents.push_back(std::move(members));
        groups.group_chores.push_back(std::move(chores));
        groups.formation_value.push_back(spend[b]);
        groups.founder.push_back(b);
    }
    return out;
}

struct EfDivSolution {
    FractionalAllocation x;
    PriceVector prices;
    Trace trace;
    // 0 when the initial grouped allocation was already pEF, else the number
    // of leading groups raised in the successful attempt (1..R-1).
    int r_star = 0;
};

namespace detail {

inline FractionalAllocation to_matrix(int n, int m, const std::vector<FractionalBundle>& bundles) {
    FractionalAllocation out;
    out.x.assign(n, std::vector<Rational>(m, 0));
    for (int i = 0; i < n; ++i)
        for (const auto& [j, share] : bundles[i]) out.x[i][j] = share;
    return out;
}

inline EfDivSolution solve_divisible_binary(const NormalizedInstance& inst) {
    // Footnote regime: zero-cost chores go wholly to their lowest-index
    // zero-cost agent; chores costing one for everyone are split equally.
    EfDivSolution out;
    out.x.x.assign(inst.n, std::vector<Rational>(inst.m, 0));
    out.prices.assign(inst.m, 1);
    int step = 0;
    const Rational equal_share = Rational(1) / inst.n;
    for (int j = 0; j < inst.m; ++j) {
        int target = -1;
        for (int i = 0; i < inst.n; ++i)
            if (inst.costs[i][j] == 0) {
                target = i;
                break;
            }
        if (target >= 0) {
            out.x.x[target][j] = 1;
            out.trace.push_back({step++, trace_kind::init_assign,
                                 {{"chore", j}, {"agent", target}, {"price", "1"}, {"amount", "1"}}});
        } else {
            for (int i = 0; i < inst.n; ++i) {
                out.x.x[i][j] = equal_share;
                out.trace.push_back({step++, trace_kind::init_assign,
                                     {{"chore", j},
                                      {"agent", i},
                                      {"price", "1"},
                                      {"amount", format_rational(equal_share)}}});
            }
        }
    }
    out.trace.push_back({step, trace_kind::terminate, {{"reason", "binary shortcut"}}});
    return out;
}

} // namespace detail

inline EfDivSolution solve_ef_fpo(const NormalizedInstance& inst) {
    if (inst.regime == Regime::Binary) return detail::solve_divisible_binary(inst);

    const int n = inst.n;
    const std::uint64_t n64 = static_cast<std::uint64_t>(n) + 2;
    std::uint64_t total_budget = 64 + 8 * n64 * n64 * n64 * n64;

    const int R = make_init_groups_div(inst).groups.size();

    for (int r_guess = 0; r_guess <= R - 1; ++r_guess) {
        // Fresh rebuild per guess; r_guess == 0 only checks the initial state.
        DivInitOutcome init = make_init_groups_div(inst);
        auto& bundles = init.bundles;
        auto& prices = init.prices;
        const GroupPartition& groups = init.groups;

        Trace trace;
        int step = 0;
        for (int i = 0; i < n; ++i)
            for (const auto& [j, share] : bundles[i])
                trace.push_back({step++, trace_kind::init_assign,
                                 {{"chore", j},
                                  {"agent", i},
                                  {"price", format_rational(prices[j])},
                                  {"amount", format_rational(share)}}});
        for (int g = 0; g < groups.size(); ++g)
            trace.push_back({step++, trace_kind::group_formed,
                             {{"group", g + 1},
                              {"agents", detail::int_array(groups.group_agents[g])},
                              {"chores", detail::int_array(groups.group_chores[g])}}});

        std::vector<Rational> spend(n, 0);
        const auto recompute_spend = [&] {
            for (int i = 0; i < n; ++i) {
                spend[i] = 0;
                for (const auto& [j, share] : bundles[i]) spend[i] += share * prices[j];
            }
        };
        recompute_spend();

        const auto finish = [&](int r_star) {
            EfDivSolution out;
            out.x = detail::to_matrix(n, inst.m, bundles);
            out.prices = prices;
            out.r_star = r_star;
            trace.push_back({step, trace_kind::terminate, {{"reason", "pEF"}}});
            out.trace = std::move(trace);
            for (int j = 0; j < inst.m; ++j) {
                Rational col = 0;
                for (int i = 0; i < n; ++i) col += out.x.x[i][j];
                if (col != 1) throw InvariantViolation("chore not fully allocated");
            }
            return out;
        };

        if (r_guess == 0) {
            if (is_pef_spendings(spend)) return finish(0);
            continue;
        }

        MbbData mbb;
        {
            std::vector<int> raised_chores;
            for (int g = 0; g < r_guess; ++g) {
                const auto& chores = groups.group_chores[g];
                raised_chores.insert(raised_chores.end(), chores.begin(), chores.end());
                for (const int j : chores) prices[j] *= inst.k;
            }
            std::sort(raised_chores.begin(), raised_chores.end());
            for (int g = 0; g < r_guess; ++g)
                trace.push_back({step++, trace_kind::price_rise,
                                 {{"group", g + 1},
                                  {"factor", format_rational(inst.k)},
                                  {"chores", detail::int_array(groups.group_chores[g])}}});
            mbb = mbb_data(inst.costs, prices);
            recompute_spend();
            for (int i = 0; i < n; ++i)
                for (const auto& [j, share] : bundles[i])
                    if (!mbb.in_mbb[i][j])
                        throw InvariantViolation("allocation left the mBB sets after the rise");
        }

        // Pools, tracked by 0-based group index: B = groups [0, beta],
        // L = groups [lambda, R-1].
        int beta = 0, lambda = R - 1;
        std::vector<int> b_agents = groups.group_agents[0];
        std::vector<int> l_agents = groups.group_agents[R - 1];

        const auto pool_spending = [&](const std::vector<int>& agents, const char* which) {
            for (const int a : agents)
                if (spend[a] != spend[agents[0]])
                    throw InvariantViolation(std::string(which) + " pool spending is not uniform");
            return spend[agents[0]];
        };
        const Rational total_price = [&] {
            Rational t = 0;
            for (const auto& p : prices) t += p;
            return t;
        }();

        while (beta <= r_guess - 1 && lambda >= r_guess) {
            const Rational s_b = pool_spending(b_agents, "big-spender");
            const Rational s_l = pool_spending(l_agents, "least-spender");
            if (s_b < s_l) throw InvariantViolation("pool spendings out of order");
            const Rational s_next = spend[groups.group_agents[beta + 1][0]];
            const Rational s_prev = spend[groups.group_agents[lambda - 1][0]];
            const Rational d_b = static_cast<int>(b_agents.size()) * (s_b - s_next);
            const Rational d_l = static_cast<int>(l_agents.size()) * (s_prev - s_l);
            if (d_b < 0 || d_l < 0) throw InvariantViolation("negative drain amount");

            Rational per_b;
            const bool final_drain = (beta == r_guess - 1 && lambda == r_guess);
            if (final_drain) {
                const Rational q = (static_cast<int>(b_agents.size()) * s_b +
                                    static_cast<int>(l_agents.size()) * s_l) /
                                   n;
                per_b = s_b - q;
            } else if (d_b >= d_l) {
                per_b = d_l / static_cast<int>(b_agents.size());
            } else {
                per_b = d_b / static_cast<int>(b_agents.size());
            }

            const Rational l_size = static_cast<int>(l_agents.size());
            for (const int b : b_agents) {
                const FractionalBundle taken = take_fractional_subset(bundles[b], prices, per_b);
                for (const auto& [j, share] : taken) {
                    auto it = bundles[b].find(j);
                    it->second -= share;
                    if (it->second == 0) bundles[b].erase(it);
                    const Rational piece = share / l_size;
                    for (const int l : l_agents) {
                        if (!mbb.in_mbb[l][j])
                            throw InvariantViolation("drain chore is off a receiver's mBB set");
                        bundles[l][j] += piece;
                        trace.push_back({step++, trace_kind::direct_transfer,
                                         {{"from", b},
                                          {"to", l},
                                          {"chore", j},
                                          {"amount", format_rational(piece)}}});
                    }
                }
            }
            recompute_spend();
            {
                Rational total = 0;
                for (const auto& s : spend) total += s;
                if (total != total_price)
                    throw InvariantViolation("total spending is not conserved");
            }
            if (--total_budget == 0)
                throw InternalBoundViolation("divisible solve exceeded its transfer budget");

            if (is_pef_spendings(spend)) return finish(r_guess);
            if (d_b >= d_l) {
                --lambda;
                const auto& g = groups.group_agents[lambda];
                l_agents.insert(l_agents.end(), g.begin(), g.end());
                std::sort(l_agents.begin(), l_agents.end());
            } else {
                ++beta;
                const auto& g = groups.group_agents[beta];
                b_agents.insert(b_agents.end(), g.begin(), g.end());
                std::sort(b_agents.begin(), b_agents.end());
            }
        }
        // Pool crossed the raised/unraised boundary: this r fails.
    }
    throw InvariantViolation("no raise count produced a pEF allocation");
}

} // namespace bichores
