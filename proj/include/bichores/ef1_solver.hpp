// EF1+fPO solver for indivisible bivalued chores.
//
// Stage one builds an initial on-mBB market outcome and freezes the agents
// into ordered groups, each internally pEF1 (the partial component of its big
// spender). Stage two removes pEF1-envy globally: before time T it alternates
// group price-rises with direct big-spender -> least-spender transfers; once
// the least spender sits in a raised group it switches to three-agent path
// transfers. Every structural fact the analysis relies on is monitored at
// runtime and raises InvariantViolation when it fails to hold.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/instance.hpp"
#include "bichores/market.hpp"
#include "bichores/rational.hpp"
#include "bichores/trace.hpp"

namespace bichores {

struct GroupPartition {
    std::vector<std::vector<int>> group_agents; // ascending within each group
    std::vector<std::vector<int>> group_chores; // chores of the group at formation
    std::vector<int> group_of;                  // agent -> 0-based group index
    std::vector<Rational> formation_value;      // reduced spending (integral) or
                                                // per-agent spending (divisible) of
                                                // the founding big spender
    std::vector<int> founder;

    int size() const { return static_cast<int>(group_agents.size()); }
};

struct InitGroupsOutcome {
    MarketState state;
    GroupPartition groups;
    Trace trace;
    std::uint64_t transfers = 0;
};

struct SolveStats {
    std::uint64_t init_transfers = 0;
    std::uint64_t price_rises = 0;
    std::uint64_t direct_transfers = 0;
    std::uint64_t path_transfers = 0;

    std::uint64_t total_steps() const {
        return init_transfers + price_rises + direct_transfers + path_transfers;
    }
};

struct Ef1Solution {
    IntegralAllocation alloc;
    PriceVector prices;
    Trace trace;
    GroupPartition groups;
    // Number of raised groups when the main loop left its first phase (0 if it
    // never raised or terminated before T).
    int r_star = 0;
    SolveStats stats;
};

namespace detail {

inline nlohmann::json int_array(const std::vector<int>& v) {
    return nlohmann::json(v);
}

inline void assert_groups_pef1(const MarketState& st, const GroupPartition& groups) {
    for (const auto& members : groups.group_agents) {
        Rational max_reduced = 0, min_spend;
        bool first = true;
        for (const int a : members) {
            const Rational red = st.reduced_spending(a);
            if (first || red > max_reduced) max_reduced = red;
            if (first || st.spending(a) < min_spend) min_spend = st.spending(a);
            first = false;
        }
        if (max_reduced > min_spend)
            throw InvariantViolation("a group stopped being internally pEF1");
    }
}

} // namespace detail

// Builds the initial allocation (each chore to a minimum-cost agent, low
// chores priced 1 and high chores priced k) and partitions the agents into
// groups by repeatedly making the remaining big spender's component pEF1.
// All tie-breaks are lowest-index.
inline InitGroupsOutcome make_init_groups(const NormalizedInstance& inst) {
    if (inst.regime == Regime::Binary)
        throw MalformedMarket("market initialization requires strictly positive costs");

    InitGroupsOutcome out{MarketState::initial_min_cost(inst), {}, {}, 0};
    MarketState& st = out.state;
    int step = 0;
    for (int j = 0; j < inst.m; ++j) {
        out.trace.push_back({step++, trace_kind::init_assign,
                             {{"chore", j},
                              {"agent", st.owner(j)},
                              {"price", format_rational(st.prices()[j])}}});
    }

    const std::uint64_t m64 = static_cast<std::uint64_t>(inst.m);
    const std::uint64_t n64 = static_cast<std::uint64_t>(inst.n);
    std::uint64_t budget = 64 + 8 * m64 * m64 * m64 * n64 * n64; // appendix bound, loose constants

    GroupPartition& groups = out.groups;
    groups.group_of.assign(inst.n, -1);
    std::vector<char> pool(inst.n, 1);
    int pool_size = inst.n;

    while (pool_size > 0) {
        int b = -1;
        ComponentSet comp;
        while (true) {
            b = st.big_spender_among(pool);
            comp = st.component(b);
            const Rational reduced_b = st.reduced_spending(b);
            int envied = -1;
            for (const int i : comp.agents)
                if (i != b && reduced_b > st.spending(i) && (envied < 0 || i < envied)) envied = i;
            if (envied < 0) break;
            if (!pool[envied])
                throw InvariantViolation("big spender envies an already-frozen group");
            const auto path = comp.path_nodes(envied);
            const int chore = path[path.size() - 2];
            const int holder = path[path.size() - 3];
            if (st.owner(chore) != holder)
                throw InvariantViolation("alternating path does not match the allocation");
            st.transfer(chore, holder, envied);
            out.trace.push_back({step++, trace_kind::init_transfer,
                                 {{"from", holder}, {"to", envied}, {"chore", chore}}});
            ++out.transfers;
            if (--budget == 0)
                throw InternalBoundViolation("group formation exceeded its step budget");
        }

        std::vector<int> members, chores;
        for (const int a : comp.agents)
            if (pool[a]) members.push_back(a);
        for (const int j : comp.chores)
            if (pool[st.owner(j)]) chores.push_back(j);
        std::sort(members.begin(), members.end());
        std::sort(chores.begin(), chores.end());

        const Rational f = st.reduced_spending(b);
        if (!groups.formation_value.empty() && f > groups.formation_value.back())
            throw InvariantViolation("group formation values must be non-increasing");
        {
            Rational max_reduced = 0, min_spend;
            bool first = true;
            for (const int a : members) {
                const Rational red = st.reduced_spending(a);
                if (first || red > max_reduced) max_reduced = red;
                if (first || st.spending(a) < min_spend) min_spend = st.spending(a);
                first = false;
            }
            if (max_reduced > min_spend)
                throw InvariantViolation("freshly formed group is not pEF1");
        }

        const int r = groups.size();
        for (const int a : members) {
            groups.group_of[a] = r;
            pool[a] = 0;
        }
        pool_size -= static_cast<int>(members.size());
        groups.group_agents.push_back(members);
        groups.group_chores.push_back(chores);
        groups.formation_value.push_back(f);
        groups.founder.push_back(b);
        out.trace.push_back({step++, trace_kind::group_formed,
                             {{"group", r + 1},
                              {"agents", detail::int_array(members)},
                              {"chores", detail::int_array(chores)}}});
    }

    // Structural facts about the output, checked wholesale.
    for (int j = 0; j < inst.m; ++j) {
        const Rational want = inst.chore_is_low[j] ? Rational(1) : inst.k;
        if (st.prices()[j] != want) throw InvariantViolation("initial price pattern is wrong");
    }
    for (int i = 0; i < inst.n; ++i)
        if (st.alpha(i) != 1) throw InvariantViolation("initial mBB ratios must all be 1");
    for (int i = 0; i < inst.n; ++i)
        for (int r2 = 0; r2 < groups.group_of[i]; ++r2)
            for (const int j : groups.group_chores[r2])
                if (inst.costs[i][j] != inst.k)
                    throw InvariantViolation("agent has a unit cost on an earlier group's chore");
    if (!inst.high_chores.empty()) {
        const auto& last = groups.group_chores.back();
        for (const int j : inst.high_chores)
            if (!std::binary_search(last.begin(), last.end(), j))
                throw InvariantViolation("high-cost chore outside the last group");
    }
    return out;
}

namespace detail {

inline Ef1Solution solve_binary(const NormalizedInstance& inst) {
    // Zero costs make market dynamics unnecessary: hand every chore with a
    // zero-cost agent to the lowest-index such agent, then deal the all-ones
    // chores round-robin, which keeps the counts within one of each other.
    Ef1Solution out;
    out.alloc.bundles.assign(inst.n, {});
    out.prices.assign(inst.m, 1);
    int step = 0;
    std::vector<int> leftovers;
    for (int j = 0; j < inst.m; ++j) {
        int target = -1;
        for (int i = 0; i < inst.n; ++i)
            if (inst.costs[i][j] == 0) {
                target = i;
                break;
            }
        if (target < 0) {
            leftovers.push_back(j);
            continue;
        }
        out.alloc.bundles[target].push_back(j);
        out.trace.push_back({step++, trace_kind::init_assign,
                             {{"chore", j}, {"agent", target}, {"price", "1"}}});
    }
    int next = 0;
    for (const int j : leftovers) {
        out.alloc.bundles[next].push_back(j);
        out.trace.push_back(
            {step++, trace_kind::init_assign, {{"chore", j}, {"agent", next}, {"price", "1"}}});
        next = (next + 1) % inst.n;
    }
    for (auto& b : out.alloc.bundles) std::sort(b.begin(), b.end());
    out.trace.push_back({step, trace_kind::terminate, {{"reason", "binary shortcut"}}});
    return out;
}

struct MainLoopMonitors {
    Rational ls_spending;
    std::optional<Rational> post_t_gap;

    void after_event(const MarketState& st, const GroupPartition& groups) {
        const Rational now = st.spending(st.least_spender());
        if (now < ls_spending)
            throw InvariantViolation("least spender's spending decreased");
        ls_spending = now;
        assert_groups_pef1(st, groups);
    }
};

} // namespace detail

inline Ef1Solution solve_ef1_fpo(const NormalizedInstance& inst) {
    if (inst.regime == Regime::Binary) return detail::solve_binary(inst);

    InitGroupsOutcome init = make_init_groups(inst);
    MarketState& st = init.state;
    const GroupPartition& groups = init.groups;

    Ef1Solution out;
    out.trace = std::move(init.trace);
    out.groups = groups;
    out.stats.init_transfers = init.transfers;
    int step = out.trace.empty() ? 0 : out.trace.back().step + 1;

    const std::vector<std::vector<int>> x0 = st.allocation().bundles;
    std::vector<int> x0_owner(inst.m);
    for (int i = 0; i < inst.n; ++i)
        for (const int j : x0[i]) x0_owner[j] = i;

    const int R = groups.size();
    std::vector<char> raised(R, 0);
    int raised_count = 0;

    detail::MainLoopMonitors mon;
    mon.ls_spending = st.spending(st.least_spender());

    const std::uint64_t nm = static_cast<std::uint64_t>(inst.n + inst.m);
    std::uint64_t budget = 64 + 8 * nm * nm;
    const auto spend_budget = [&] {
        if (--budget == 0) throw InternalBoundViolation("main loop exceeded its step budget");
    };

    const auto lowest_mbb_chore = [&](int from, int to) {
        for (const int j : st.bundle(from))
            if (st.in_mbb(to, j)) return j;
        return -1;
    };

    bool done = false;
    // Phase one: until the least spender enters a raised group.
    while (true) {
        if (st.is_pef1()) {
            done = true;
            break;
        }
        const int ls = st.least_spender();
        const int s = groups.group_of[ls];
        if (raised[s]) break; // time T
        const int bs = st.big_spender();
        const int r = groups.group_of[bs];
        if (r == s) throw InvariantViolation("big and least spender share a group while not pEF1");
        if (r > s) throw InvariantViolation("big spender below the least spender before T");
        if (!raised[r]) {
            if (r != raised_count)
                throw InvariantViolation("price-rises must hit the groups in order");
            std::vector<int> chores;
            for (const int a : groups.group_agents[r]) {
                if (st.bundle(a) != x0[a])
                    throw InvariantViolation("group changed since the initial allocation at rise time");
                chores.insert(chores.end(), st.bundle(a).begin(), st.bundle(a).end());
            }
            std::sort(chores.begin(), chores.end());
            st.raise_prices(chores, inst.k);
            raised[r] = 1;
            ++raised_count;
            out.trace.push_back({step++, trace_kind::price_rise,
                                 {{"group", r + 1},
                                  {"factor", format_rational(inst.k)},
                                  {"chores", detail::int_array(chores)}}});
            ++out.stats.price_rises;
        } else {
            const int j = lowest_mbb_chore(bs, ls);
            if (j < 0) throw InvariantViolation("no mBB edge for a direct transfer");
            st.transfer(j, bs, ls);
            out.trace.push_back({step++, trace_kind::direct_transfer,
                                 {{"from", bs}, {"to", ls}, {"chore", j}}});
            ++out.stats.direct_transfers;
        }
        mon.after_event(st, groups);
        spend_budget();
    }
    out.r_star = raised_count;

    // Phase two: no further price-rises; direct transfers when the least
    // spender is in an unraised group, three-agent path transfers otherwise.
    while (!done) {
        if (st.is_pef1()) break;
        const int bs = st.big_spender();
        const int ls = st.least_spender();
        const int r = groups.group_of[bs];
        const int s = groups.group_of[ls];
        const Rational gap = st.reduced_spending(bs) - st.spending(ls);
        if (mon.post_t_gap && gap > *mon.post_t_gap)
            throw InvariantViolation("spending gap grew after T");
        mon.post_t_gap = gap;
        if (r != raised_count - 1)
            throw InvariantViolation("big spender left the last raised group while not pEF1");
        if (s == r) throw InvariantViolation("big and least spender share a group while not pEF1");
        if (s > r) {
            const int j = lowest_mbb_chore(bs, ls);
            if (j < 0) throw InvariantViolation("no mBB edge for a direct transfer");
            st.transfer(j, bs, ls);
            out.trace.push_back({step++, trace_kind::direct_transfer,
                                 {{"from", bs}, {"to", ls}, {"chore", j}}});
            ++out.stats.direct_transfers;
        } else {
            // The least spender lost one of her initial chores; fetch the
            // lowest-index such chore back from its (unraised) holder and
            // refill the holder from the big spender.
            int back = -1;
            for (const int j : x0[ls])
                if (!raised[groups.group_of[st.owner(j)]]) {
                    back = j;
                    break;
                }
            if (back < 0)
                throw InvariantViolation("no path transfer available while not pEF1");
            const int mid = st.owner(back);
            const int fill = lowest_mbb_chore(bs, mid);
            if (fill < 0) throw InvariantViolation("no mBB edge from the big spender to the middle agent");
            if (st.prices()[back] != st.prices()[fill])
                throw InvariantViolation("path transfer chores must share one price");
            const Rational mid_before = st.spending(mid);
            st.transfer(back, mid, ls);
            st.transfer(fill, bs, mid);
            if (st.spending(mid) != mid_before)
                throw InvariantViolation("middle agent's spending changed in a path transfer");
            out.trace.push_back({step++, trace_kind::path_transfer,
                                 {{"bs", bs},
                                  {"mid", mid},
                                  {"ls", ls},
                                  {"chore_mid_to_ls", back},
                                  {"chore_bs_to_mid", fill}}});
            ++out.stats.path_transfers;
        }
        mon.after_event(st, groups);
        spend_budget();
    }

    out.trace.push_back({step, trace_kind::terminate, {{"reason", "pEF1"}}});
    out.alloc = st.allocation();
    out.prices = st.prices();
    return out;
}

} // namespace bichores
