// Exact-rational maximum flow (shortest augmenting paths) and the balanced
// fractional allocation used to seed the divisible solver: the unique
// mBB-supported full allocation whose descending spending vector is
// lexicographically minimal, built by bottleneck decomposition.
#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/instance.hpp"
#include "bichores/market.hpp"
#include "bichores/rational.hpp"

namespace bichores {

struct FlowNetwork {
    struct Arc {
        int to;
        Rational cap;
        Rational flow;
    };
    int node_count = 0;
    std::vector<Arc> arcs; // arc 2t and its reverse 2t+1
    std::vector<std::vector<int>> adj;

    explicit FlowNetwork(int nodes) : node_count(nodes), adj(nodes) {}

    int add_arc(int from, int to, const Rational& cap) {
        const int id = static_cast<int>(arcs.size());
        arcs.push_back({to, cap, 0});
        arcs.push_back({from, 0, 0});
        adj[from].push_back(id);
        adj[to].push_back(id + 1);
        return id;
    }

    Rational residual(int arc) const { return arcs[arc].cap - arcs[arc].flow; }
};

// Edmonds-Karp. Conservation and capacities hold exactly at every arc.
inline Rational max_flow(FlowNetwork& net, int source, int sink) {
    Rational total = 0;
    std::vector<int> parent_arc(net.node_count);
    while (true) {
        std::fill(parent_arc.begin(), parent_arc.end(), -1);
        parent_arc[source] = -2;
        std::vector<int> queue{source};
        for (std::size_t head = 0; head < queue.size() && parent_arc[sink] == -1; ++head) {
            const int u = queue[head];
            for (const int a : net.adj[u]) {
                const int v = net.arcs[a].to;
                if (parent_arc[v] != -1 || !(net.residual(a) > 0)) continue;
                parent_arc[v] = a;
                queue.push_back(v);
            }
        }
        if (parent_arc[sink] == -1) break;
        Rational push = net.residual(parent_arc[sink]);
        for (int v = sink; v != source;) {
            const int a = parent_arc[v];
            push = std::min(push, net.residual(a));
            v = net.arcs[a ^ 1].to;
        }
        for (int v = sink; v != source;) {
            const int a = parent_arc[v];
            net.arcs[a].flow += push;
            net.arcs[a ^ 1].flow -= push;
            v = net.arcs[a ^ 1].to;
        }
        total += push;
    }
    return total;
}

namespace detail {

// One decomposition level: the remaining sub-instance, its minimum uniform
// agent cap t*, the maximal tight chore set at t*, and the flow that routes it.
struct BalancedLevel {
    Rational t_star;
    std::vector<int> tight_chores;
    std::vector<int> tight_agents;
};

} // namespace detail

// Requires every chore to have at least one incident mBB edge and at most two
// distinct price values (the {1,k} pricing both solvers use).
inline FractionalAllocation balanced_flow(const NormalizedInstance& inst,
                                          const PriceVector& prices) {
    const int n = inst.n;
    const int m = inst.m;
    const MbbData mbb = mbb_data(inst.costs, prices);
    for (int j = 0; j < m; ++j)
        if (mbb.mbb_agents[j].empty()) throw MalformedMarket("chore without an mBB edge");

    std::vector<Rational> price_values;
    for (const auto& p : prices)
        if (std::find(price_values.begin(), price_values.end(), p) == price_values.end())
            price_values.push_back(p);
    if (price_values.size() > 2)
        throw MalformedMarket("balanced_flow expects at most two distinct prices");
    while (price_values.size() < 2) price_values.push_back(0);

    FractionalAllocation out;
    out.x.assign(n, std::vector<Rational>(m, 0));

    std::vector<char> chore_left(m, 1), agent_left(n, 1);
    int chores_left = m;
    // Node layout per probe: 0 = source, 1..m = chores, m+1..m+n = agents,
    // m+n+1 = sink.
    const auto chore_node = [&](int j) { return 1 + j; };
    const auto agent_node = [&](int i) { return 1 + m + i; };
    const int source = 0, sink = m + n + 1;

    const auto build = [&](const Rational& cap) {
        FlowNetwork net(m + n + 2);
        Rational inf = 1;
        for (int j = 0; j < m; ++j)
            if (chore_left[j]) inf += prices[j];
        for (int j = 0; j < m; ++j)
            if (chore_left[j]) net.add_arc(source, chore_node(j), prices[j]);
        for (int j = 0; j < m; ++j)
            if (chore_left[j])
                for (const int i : mbb.mbb_agents[j])
                    if (agent_left[i]) net.add_arc(chore_node(j), agent_node(i), inf);
        for (int i = 0; i < n; ++i)
            if (agent_left[i]) net.add_arc(agent_node(i), sink, cap);
        return net;
    };

    Rational prev_level; // strictly decreasing across levels
    bool have_prev = false;

    while (chores_left > 0) {
        Rational supply = 0;
        int low_count = 0, high_count = 0, agents_count = 0;
        for (int j = 0; j < m; ++j)
            if (chore_left[j]) {
                supply += prices[j];
                (prices[j] == price_values[0] ? low_count : high_count) += 1;
            }
        for (int i = 0; i < n; ++i) agents_count += agent_left[i];

        // Candidate grid for t*: every value p(J)/|gamma(J)| has the form
        // (a*v0 + b*v1)/g with a,b bounded by the remaining chore counts.
        std::vector<Rational> grid;
        for (int a = 0; a <= low_count; ++a)
            for (int b = 0; b <= high_count; ++b) {
                if (a + b == 0) continue;
                const Rational num = a * price_values[0] + b * price_values[1];
                for (int g = 1; g <= agents_count; ++g) grid.push_back(num / g);
            }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        if (grid.empty()) throw MalformedMarket("chores remain but no agents can take them");

        const auto feasible = [&](const Rational& t) {
            FlowNetwork net = build(t);
            return max_flow(net, source, sink) == supply;
        };

        // feasible(t) is monotone non-decreasing in t; binary search for the
        // smallest feasible grid value.
        std::size_t lo = 0, hi = grid.size() - 1;
        if (!feasible(grid[hi])) throw MalformedMarket("balanced flow is infeasible");
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (feasible(grid[mid]))
                hi = mid;
            else
                lo = mid + 1;
        }
        const Rational t_star = grid[lo];
        if (lo > 0 && feasible(grid[lo - 1]))
            throw InvariantViolation("feasibility was not monotone in t");
        if (have_prev && !(t_star < prev_level))
            throw InvariantViolation("bottleneck levels must strictly decrease");
        prev_level = t_star;
        have_prev = true;

        FlowNetwork net = build(t_star);
        const Rational value = max_flow(net, source, sink);
        if (value != supply) throw InvariantViolation("t* probe did not saturate the chores");

        // Agents below cap have slack; a chore that can still reach slack via
        // residual arcs is not forced to level t*. The complement is the
        // maximal tight set.
        std::vector<Rational> agent_in(n, 0);
        // flow(j -> i) per mBB arc, and the reverse residual adjacency.
        std::vector<std::vector<std::pair<int, Rational>>> into_agent(n); // (chore, flow)
        std::vector<std::vector<int>> chore_from_agent(m);                // reverse of mBB arcs
        std::vector<std::vector<int>> agent_from_chore(n);
        for (int u = 0; u < net.node_count; ++u)
            for (const int a : net.adj[u]) {
                if (a & 1) continue; // forward arcs only
                const int v = net.arcs[a].to;
                if (u >= 1 && u <= m && v >= 1 + m && v <= m + n) {
                    const int j = u - 1, i = v - 1 - m;
                    if (net.arcs[a].flow > 0) {
                        agent_in[i] += net.arcs[a].flow;
                        into_agent[i].push_back({j, net.arcs[a].flow});
                        chore_from_agent[j].push_back(i); // residual i -> j (flow > 0)
                    }
                    agent_from_chore[i].push_back(j); // residual j -> i (infinite cap)
                }
            }

        // Reverse BFS from slack agents over reversed residual middle arcs.
        std::vector<char> reaches_slack_agent(n, 0), reaches_slack_chore(m, 0);
        std::vector<int> aq;
        for (int i = 0; i < n; ++i)
            if (agent_left[i] && agent_in[i] < t_star) {
                reaches_slack_agent[i] = 1;
                aq.push_back(i);
            }
        std::vector<int> cq;
        const auto visit_chore = [&](int j) {
            if (reaches_slack_chore[j]) return;
            reaches_slack_chore[j] = 1;
            cq.push_back(j);
        };
        const auto visit_agent = [&](int i) {
            if (reaches_slack_agent[i]) return;
            reaches_slack_agent[i] = 1;
            aq.push_back(i);
        };
        std::size_t ah = 0, ch = 0;
        while (ah < aq.size() || ch < cq.size()) {
            if (ah < aq.size()) {
                const int i = aq[ah++];
                // chores with a residual arc into i: every mBB neighbor chore
                for (const int j : agent_from_chore[i]) visit_chore(j);
            } else {
                const int j = cq[ch++];
                // agents with a residual arc into j: those currently sending flow into j..
                // arc agent->chore exists in residual when flow(j->agent) > 0
                for (const int i : chore_from_agent[j]) visit_agent(i);
            }
        }

        std::vector<int> tight_chores, tight_agents;
        std::vector<char> agent_tight(n, 0);
        for (int j = 0; j < m; ++j)
            if (chore_left[j] && !reaches_slack_chore[j]) tight_chores.push_back(j);
        if (tight_chores.empty()) throw InvariantViolation("no tight set at t*");
        for (const int j : tight_chores)
            for (const int i : mbb.mbb_agents[j])
                if (agent_left[i] && !agent_tight[i]) {
                    agent_tight[i] = 1;
                    tight_agents.push_back(i);
                }
        std::sort(tight_agents.begin(), tight_agents.end());

        Rational tight_supply = 0;
        for (const int j : tight_chores) tight_supply += prices[j];
        if (tight_supply != t_star * static_cast<int>(tight_agents.size()))
            throw InvariantViolation("tight set does not balance at t*");

        // The max flow already routes the tight chores wholly inside the tight
        // agents; freeze that routing as the allocation of this level.
        std::vector<char> chore_tight(m, 0);
        for (const int j : tight_chores) chore_tight[j] = 1;
        for (const int i : tight_agents)
            for (const auto& [j, f] : into_agent[i]) {
                if (!chore_tight[j])
                    throw InvariantViolation("tight agent fed from outside the tight set");
                out.x[i][j] += f / prices[j];
            }

        for (const int j : tight_chores) {
            chore_left[j] = 0;
            --chores_left;
        }
        for (const int i : tight_agents) agent_left[i] = 0;
    }

    // Postconditions checked directly: full allocation on mBB with no
    // alternating path from a strictly higher spender to a strictly lower one.
    std::vector<Rational> spend(n, 0);
    for (int j = 0; j < m; ++j) {
        Rational col = 0;
        for (int i = 0; i < n; ++i) {
            if (out.x[i][j] < 0 || out.x[i][j] > 1)
                throw InvariantViolation("share outside [0,1]");
            if (out.x[i][j] > 0 && !mbb.in_mbb[i][j])
                throw InvariantViolation("balanced flow left the mBB sets");
            col += out.x[i][j];
            spend[i] += out.x[i][j] * prices[j];
        }
        if (col != 1) throw InvariantViolation("chore not fully allocated");
    }
    std::vector<FractionalBundle> bundles(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (out.x[i][j] > 0) bundles[i][j] = out.x[i][j];
    for (int i = 0; i < n; ++i) {
        const auto comp = component_fractional(mbb, bundles, m, i);
        for (const int h : comp.agents)
            if (spend[h] < spend[i])
                throw InvariantViolation("alternating path from a higher to a lower spender");
    }
    return out;
}

} // namespace bichores
