// Market state over a normalized instance: an allocation plus prices, the
// derived minimum bang-per-buck structure, alternating-path searches, and the
// spending statistics / pEF1 / pEF predicates the solvers drive.
#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/instance.hpp"
#include "bichores/rational.hpp"

namespace bichores {

using PriceVector = std::vector<Rational>;

struct IntegralAllocation {
    // bundles[i] lists agent i's chores in ascending order; bundles partition
    // the chore set (empty bundles allowed).
    std::vector<std::vector<int>> bundles;
};

struct FractionalAllocation {
    // x[i][j] in [0,1]; every column sums to exactly 1.
    std::vector<std::vector<Rational>> x;
};

// Sparse fractional bundle: chore -> share, shares strictly positive.
using FractionalBundle = std::map<int, Rational>;

struct MbbData {
    std::vector<Rational> alpha;              // per agent, min_j c_ij / p_j
    std::vector<std::vector<char>> in_mbb;    // [agent][chore]
    std::vector<std::vector<int>> mbb_agents; // [chore] -> agents, ascending
};

inline MbbData mbb_data(const CostMatrix& costs, const PriceVector& prices) {
    const int n = static_cast<int>(costs.size());
    const int m = static_cast<int>(prices.size());
    MbbData out;
    out.alpha.resize(n);
    out.in_mbb.assign(n, std::vector<char>(m, 0));
    out.mbb_agents.assign(m, {});
    for (int i = 0; i < n; ++i) {
        Rational best = costs[i][0] / prices[0];
        for (int j = 1; j < m; ++j) {
            const Rational r = costs[i][j] / prices[j];
            if (r < best) best = r;
        }
        out.alpha[i] = best;
        for (int j = 0; j < m; ++j)
            if (costs[i][j] / prices[j] == best) {
                out.in_mbb[i][j] = 1;
                out.mbb_agents[j].push_back(i);
            }
    }
    return out;
}

// The closure of alternating paths (allocation edge, then mBB edge, agents at
// strictly increasing level) from one root agent. The BFS explores chores and
// agents in ascending index order, so following the stored parents from any
// member yields the lexicographically least shortest alternating path.
struct ComponentSet {
    int root = -1;
    std::vector<int> agents;      // discovery order, root first
    std::vector<int> chores;      // discovery order
    std::vector<int> agent_level; // -1 when not in the component
    std::vector<char> chore_in;
    std::vector<int> parent_chore; // per agent: the mBB edge it was found over
    std::vector<int> parent_agent; // per chore: its owner on the path

    bool contains_agent(int a) const { return agent_level[a] >= 0; }
    bool contains_chore(int j) const { return chore_in[j] != 0; }

    // Alternating node sequence [root, j1, h1, ..., jl, target]; even
    // positions are agents, odd positions chores.
    std::vector<int> path_nodes(int target) const {
        std::vector<int> rev;
        rev.push_back(target);
        int a = target;
        while (a != root) {
            const int j = parent_chore[a];
            rev.push_back(j);
            a = parent_agent[j];
            rev.push_back(a);
        }
        std::reverse(rev.begin(), rev.end());
        return rev;
    }
};

namespace detail {

// Shared BFS over (owner -> chore, chore -> mBB agent) edges. bundle_of must
// return the owner's chores in ascending order.
template <typename BundleOf>
ComponentSet component_bfs(int n, int m, const MbbData& mbb, BundleOf&& bundle_of, int root) {
    ComponentSet comp;
    comp.root = root;
    comp.agent_level.assign(n, -1);
    comp.chore_in.assign(m, 0);
    comp.parent_chore.assign(n, -1);
    comp.parent_agent.assign(m, -1);
    comp.agent_level[root] = 0;
    comp.agents.push_back(root);
    std::vector<int> queue{root};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int a = queue[head];
        for (const int j : bundle_of(a)) {
            if (comp.chore_in[j]) continue;
            comp.chore_in[j] = 1;
            comp.parent_agent[j] = a;
            comp.chores.push_back(j);
            for (const int h : mbb.mbb_agents[j]) {
                if (comp.agent_level[h] >= 0) continue;
                comp.agent_level[h] = comp.agent_level[a] + 1;
                comp.parent_chore[h] = j;
                comp.agents.push_back(h);
                queue.push_back(h);
            }
        }
    }
    return comp;
}

} // namespace detail

inline ComponentSet component_fractional(const MbbData& mbb,
                                         const std::vector<FractionalBundle>& bundles, int m,
                                         int root) {
    const int n = static_cast<int>(bundles.size());
    std::vector<std::vector<int>> keys(n);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, share] : bundles[i]) {
            assert(share > 0);
            keys[i].push_back(j);
        }
    return detail::component_bfs(n, m, mbb, [&](int a) -> const std::vector<int>& { return keys[a]; },
                                 root);
}

inline bool is_pef_spendings(const std::vector<Rational>& spendings) {
    for (std::size_t i = 1; i < spendings.size(); ++i)
        if (spendings[i] != spendings[0]) return false;
    return true;
}

// Integral market state. Single-writer: the owning solver mutates it through
// transfer/raise_prices, which keep the spending caches and the on-mBB
// invariant checked.
class MarketState {
public:
    static MarketState initial_min_cost(const NormalizedInstance& inst) {
        MarketState s;
        s.inst_ = inst;
        s.prices_.resize(inst.m);
        s.owner_.resize(inst.m);
        s.bundles_.assign(inst.n, {});
        for (int j = 0; j < inst.m; ++j) {
            int best = 0;
            for (int i = 1; i < inst.n; ++i)
                if (inst.costs[i][j] < inst.costs[best][j]) best = i;
            s.owner_[j] = best;
            s.bundles_[best].push_back(j);
            s.prices_[j] = inst.costs[best][j];
        }
        s.recompute_all();
        return s;
    }

    static MarketState from_allocation(const NormalizedInstance& inst,
                                       const IntegralAllocation& alloc, PriceVector prices) {
        MarketState s;
        s.inst_ = inst;
        s.prices_ = std::move(prices);
        s.owner_.assign(inst.m, -1);
        s.bundles_.assign(inst.n, {});
        for (int i = 0; i < inst.n; ++i)
            for (const int j : alloc.bundles[i]) {
                if (j < 0 || j >= inst.m || s.owner_[j] != -1)
                    throw MalformedMarket("allocation does not partition the chores");
                s.owner_[j] = i;
                s.bundles_[i].push_back(j);
            }
        for (int j = 0; j < inst.m; ++j)
            if (s.owner_[j] == -1) throw MalformedMarket("unallocated chore");
        for (auto& b : s.bundles_) std::sort(b.begin(), b.end());
        for (const auto& p : s.prices_)
            if (p <= 0) throw MalformedMarket("prices must be positive");
        s.recompute_all();
        return s;
    }

    const NormalizedInstance& instance() const { return inst_; }
    const PriceVector& prices() const { return prices_; }
    const MbbData& mbb() const { return mbb_; }
    int owner(int j) const { return owner_[j]; }
    const std::vector<int>& bundle(int i) const { return bundles_[i]; }
    const Rational& spending(int i) const { return spending_[i]; }
    const std::vector<Rational>& spendings() const { return spending_; }
    const Rational& alpha(int i) const { return mbb_.alpha[i]; }
    bool in_mbb(int i, int j) const { return mbb_.in_mbb[i][j] != 0; }

    // p(x_i) minus the price of i's highest-priced chore; 0 for empty bundles.
    Rational reduced_spending(int i) const { return spending_[i] - max_price_[i]; }

    int big_spender() const {
        int best = 0;
        Rational best_v = reduced_spending(0);
        for (int i = 1; i < inst_.n; ++i) {
            const Rational v = reduced_spending(i);
            if (v > best_v) {
                best = i;
                best_v = v;
            }
        }
        return best;
    }

    int big_spender_among(const std::vector<char>& pool) const {
        int best = -1;
        Rational best_v;
        for (int i = 0; i < inst_.n; ++i) {
            if (!pool[i]) continue;
            const Rational v = reduced_spending(i);
            if (best < 0 || v > best_v) {
                best = i;
                best_v = v;
            }
        }
        return best;
    }

    int least_spender() const {
        int best = 0;
        for (int i = 1; i < inst_.n; ++i)
            if (spending_[i] < spending_[best]) best = i;
        return best;
    }

    bool is_pef1() const { return reduced_spending(big_spender()) <= spending_[least_spender()]; }
    bool is_pef() const { return is_pef_spendings(spending_); }

    void transfer(int j, int from, int to) {
        assert(owner_[j] == from && from != to);
        if (!in_mbb(to, j)) throw InvariantViolation("transfer off the receiver's mBB set");
        auto& src = bundles_[from];
        src.erase(std::lower_bound(src.begin(), src.end(), j));
        auto& dst = bundles_[to];
        dst.insert(std::lower_bound(dst.begin(), dst.end(), j), j);
        owner_[j] = to;
        refresh_agent(from);
        refresh_agent(to);
    }

    void raise_prices(const std::vector<int>& chores, const Rational& factor) {
        assert(factor > 0);
        for (const int j : chores) prices_[j] *= factor;
        recompute_all();
    }

    ComponentSet component(int root) const {
        return detail::component_bfs(
            inst_.n, inst_.m, mbb_, [&](int a) -> const std::vector<int>& { return bundles_[a]; },
            root);
    }

    // Half the length of the shortest special path from root to target; n
    // when target is unreachable.
    int level(int root, int target) const {
        const auto comp = component(root);
        return comp.contains_agent(target) ? comp.agent_level[target] : inst_.n;
    }

    IntegralAllocation allocation() const { return IntegralAllocation{bundles_}; }

    void check_on_mbb() const {
        for (int i = 0; i < inst_.n; ++i)
            for (const int j : bundles_[i])
                if (!in_mbb(i, j)) throw InvariantViolation("allocation left the mBB sets");
    }

private:
    void refresh_agent(int i) {
        Rational total = 0, top = 0;
        for (const int j : bundles_[i]) {
            total += prices_[j];
            if (prices_[j] > top) top = prices_[j];
        }
        spending_[i] = total;
        max_price_[i] = top;
    }

    void recompute_all() {
        mbb_ = mbb_data(inst_.costs, prices_);
        spending_.assign(inst_.n, 0);
        max_price_.assign(inst_.n, 0);
        for (int i = 0; i < inst_.n; ++i) refresh_agent(i);
        check_on_mbb();
    }

    NormalizedInstance inst_;
    PriceVector prices_;
    std::vector<int> owner_;
    std::vector<std::vector<int>> bundles_;
    std::vector<Rational> spending_;
    std::vector<Rational> max_price_;
    MbbData mbb_;
};

} // namespace bichores
