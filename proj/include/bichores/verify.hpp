// Independent auditing oracles. Everything here recomputes from first
// principles (raw costs, quantifier loops, exhaustive enumeration) so a bug in
// the solvers' incremental bookkeeping cannot hide from the checks. Failing
// verdicts carry a witness that re-validates as a genuine violation.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/instance.hpp"
#include "bichores/market.hpp"
#include "bichores/rational.hpp"

namespace bichores {

struct Verdict {
    bool pass = true;
    nlohmann::json witness = nlohmann::json::object();
};

// EF1 from raw costs: every agent either has an empty bundle or can drop one
// of her chores to stop envying each other agent.
inline Verdict check_ef1(const CostMatrix& costs, const IntegralAllocation& alloc) {
    const int n = static_cast<int>(costs.size());
    for (int i = 0; i < n; ++i) {
        if (alloc.bundles[i].empty()) continue;
        Rational own = 0, top = 0;
        for (const int j : alloc.bundles[i]) {
            own += costs[i][j];
            if (costs[i][j] > top) top = costs[i][j];
        }
        for (int h = 0; h < n; ++h) {
            if (h == i) continue;
            Rational other = 0;
            for (const int j : alloc.bundles[h]) other += costs[i][j];
            if (own - top > other)
                return {false, {{"envier", i}, {"envied", h}}};
        }
    }
    return {};
}

inline Verdict check_ef_fractional(const CostMatrix& costs, const FractionalAllocation& alloc) {
    const int n = static_cast<int>(costs.size());
    const int m = static_cast<int>(costs[0].size());
    for (int i = 0; i < n; ++i) {
        Rational own = 0;
        for (int j = 0; j < m; ++j) own += costs[i][j] * alloc.x[i][j];
        for (int h = 0; h < n; ++h) {
            if (h == i) continue;
            Rational other = 0;
            for (int j = 0; j < m; ++j) other += costs[i][j] * alloc.x[h][j];
            if (own > other) return {false, {{"envier", i}, {"envied", h}}};
        }
    }
    return {};
}

inline Verdict check_pef1(const IntegralAllocation& alloc, const PriceVector& prices) {
    const int n = static_cast<int>(alloc.bundles.size());
    for (int i = 0; i < n; ++i) {
        if (alloc.bundles[i].empty()) continue;
        Rational own = 0, top = 0;
        for (const int j : alloc.bundles[i]) {
            own += prices[j];
            if (prices[j] > top) top = prices[j];
        }
        for (int h = 0; h < n; ++h) {
            if (h == i) continue;
            Rational other = 0;
            for (const int j : alloc.bundles[h]) other += prices[j];
            if (own - top > other) return {false, {{"envier", i}, {"envied", h}}};
        }
    }
    return {};
}

inline Verdict check_pef_spendings(const std::vector<Rational>& spendings) {
    for (std::size_t i = 1; i < spendings.size(); ++i)
        if (spendings[i] != spendings[0])
            return {false,
                    {{"agent_a", 0},
                     {"agent_b", static_cast<int>(i)},
                     {"spending_a", format_rational(spendings[0])},
                     {"spending_b", format_rational(spendings[i])}}};
    return {};
}

inline Verdict check_pef(const IntegralAllocation& alloc, const PriceVector& prices) {
    std::vector<Rational> spend(alloc.bundles.size(), 0);
    for (std::size_t i = 0; i < alloc.bundles.size(); ++i)
        for (const int j : alloc.bundles[i]) spend[i] += prices[j];
    return check_pef_spendings(spend);
}

inline Verdict check_pef_fractional(const FractionalAllocation& alloc, const PriceVector& prices) {
    std::vector<Rational> spend(alloc.x.size(), 0);
    for (std::size_t i = 0; i < alloc.x.size(); ++i)
        for (std::size_t j = 0; j < prices.size(); ++j) spend[i] += alloc.x[i][j] * prices[j];
    return check_pef_spendings(spend);
}

namespace detail {

// Sound fPO certificates over the positive support of an allocation. Either
// of two sufficient conditions certifies:
//  - market support: every held chore is minimum bang-per-buck for its holder
//    at the given prices (First Welfare Theorem route), or
//  - pointwise minimum cost: every chore is held only by agents with minimal
//    cost for it, so total social cost is the unconditional minimum. This is
//    the condition the zero-cost (binary) shortcut satisfies, where no finite
//    price vector can put cost-one chores on a zero-cost agent's mBB set.
// Absence of a certificate does not prove a violation of fPO.
inline Verdict fpo_certificate(const CostMatrix& costs,
                               const std::vector<std::pair<int, int>>& support,
                               const PriceVector& prices) {
    const int n = static_cast<int>(costs.size());
    const int m = static_cast<int>(costs[0].size());
    for (const auto& p : prices)
        if (p <= 0) throw MalformedMarket("prices must be positive");

    std::vector<Rational> alpha(n);
    for (int i = 0; i < n; ++i) {
        alpha[i] = costs[i][0] / prices[0];
        for (int j = 1; j < m; ++j) {
            const Rational r = costs[i][j] / prices[j];
            if (r < alpha[i]) alpha[i] = r;
        }
    }
    nlohmann::json mbb_witness = nlohmann::json::object();
    bool mbb_ok = true;
    for (const auto& [i, j] : support)
        if (costs[i][j] / prices[j] != alpha[i]) {
            mbb_ok = false;
            mbb_witness = {{"agent", i},
                           {"chore", j},
                           {"ratio", format_rational(costs[i][j] / prices[j])},
                           {"alpha", format_rational(alpha[i])}};
            break;
        }
    if (mbb_ok) return {};

    bool pointwise_ok = true;
    for (const auto& [i, j] : support) {
        Rational col_min = costs[0][j];
        for (int h = 1; h < n; ++h) col_min = std::min(col_min, costs[h][j]);
        if (costs[i][j] != col_min) {
            pointwise_ok = false;
            break;
        }
    }
    if (pointwise_ok) return {};
    return {false, mbb_witness};
}

} // namespace detail

inline Verdict check_fpo_certificate(const CostMatrix& costs, const IntegralAllocation& alloc,
                                     const PriceVector& prices) {
    std::vector<std::pair<int, int>> support;
    for (std::size_t i = 0; i < alloc.bundles.size(); ++i)
        for (const int j : alloc.bundles[i]) support.push_back({static_cast<int>(i), j});
    return detail::fpo_certificate(costs, support, prices);
}

inline Verdict check_fpo_certificate(const CostMatrix& costs, const FractionalAllocation& alloc,
                                     const PriceVector& prices) {
    std::vector<std::pair<int, int>> support;
    for (std::size_t i = 0; i < alloc.x.size(); ++i)
        for (std::size_t j = 0; j < alloc.x[i].size(); ++j)
            if (alloc.x[i][j] > 0) support.push_back({static_cast<int>(i), static_cast<int>(j)});
    return detail::fpo_certificate(costs, support, prices);
}

// Exhaustive Pareto check: enumerate all n^m integral allocations in
// mixed-radix order (lowest agent first per chore) and look for a dominator.
inline Verdict brute_force_po(const CostMatrix& costs, const IntegralAllocation& alloc,
                              std::uint64_t cap = 1000000) {
    const int n = static_cast<int>(costs.size());
    const int m = static_cast<int>(costs[0].size());
    std::uint64_t count = 1;
    for (int j = 0; j < m; ++j) {
        count *= static_cast<std::uint64_t>(n);
        if (count > cap) throw TooLarge("n^m exceeds the enumeration cap");
    }

    std::vector<Rational> base(n, 0);
    for (int i = 0; i < n; ++i)
        for (const int j : alloc.bundles[i]) base[i] += costs[i][j];

    std::vector<int> assign(m, 0);
    std::vector<Rational> cost(n);
    while (true) {
        std::fill(cost.begin(), cost.end(), Rational(0));
        for (int j = 0; j < m; ++j) cost[assign[j]] += costs[assign[j]][j];
        bool weakly_better = true, strictly = false;
        for (int i = 0; i < n && weakly_better; ++i) {
            if (cost[i] > base[i]) weakly_better = false;
            if (cost[i] < base[i]) strictly = true;
        }
        if (weakly_better && strictly) {
            auto bundles = nlohmann::json::array();
            for (int i = 0; i < n; ++i) {
                auto b = nlohmann::json::array();
                for (int j = 0; j < m; ++j)
                    if (assign[j] == i) b.push_back(j);
                bundles.push_back(std::move(b));
            }
            return {false, {{"dominating", std::move(bundles)}}};
        }
        int j = 0;
        while (j < m && assign[j] == n - 1) assign[j++] = 0;
        if (j == m) break;
        ++assign[j];
    }
    return {};
}

} // namespace bichores
