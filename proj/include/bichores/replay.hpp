// Mechanical re-application of a trace from the empty state. A trace is valid
// evidence for a solve exactly when replaying it lands bit-for-bit on the
// reported allocation and prices.
#pragma once

#include <map>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/market.hpp"
#include "bichores/rational.hpp"
#include "bichores/trace.hpp"

namespace bichores {

struct ReplayState {
    std::vector<FractionalBundle> shares; // per agent: chore -> share
    PriceVector prices;
    std::vector<char> price_known;
};

namespace detail {

inline Rational event_amount(const TraceEvent& ev) {
    if (ev.payload.contains("amount"))
        return parse_rational(ev.payload["amount"].get<std::string>());
    return 1;
}

inline void replay_move(ReplayState& st, int from, int to, int chore, const Rational& amount) {
    auto it = st.shares[from].find(chore);
    if (it == st.shares[from].end() || it->second < amount)
        throw ParseError("trace moves more of a chore than the sender holds");
    it->second -= amount;
    if (it->second == 0) st.shares[from].erase(it);
    st.shares[to][chore] += amount;
}

} // namespace detail

inline ReplayState replay_trace(int n, int m, const Trace& trace) {
    ReplayState st;
    st.shares.assign(n, {});
    st.prices.assign(m, 1);
    st.price_known.assign(m, 0);
    const auto check_agent = [&](int a) {
        if (a < 0 || a >= n) throw ParseError("trace references an unknown agent");
        return a;
    };
    const auto check_chore = [&](int j) {
        if (j < 0 || j >= m) throw ParseError("trace references an unknown chore");
        return j;
    };
    for (const auto& ev : trace) {
        const auto& p = ev.payload;
        if (ev.kind == trace_kind::init_assign) {
            const int j = check_chore(p.at("chore").get<int>());
            const int a = check_agent(p.at("agent").get<int>());
            st.shares[a][j] += detail::event_amount(ev);
            st.prices[j] = parse_rational(p.at("price").get<std::string>());
            st.price_known[j] = 1;
        } else if (ev.kind == trace_kind::init_transfer || ev.kind == trace_kind::direct_transfer) {
            const int j = check_chore(p.at("chore").get<int>());
            detail::replay_move(st, check_agent(p.at("from").get<int>()),
                                check_agent(p.at("to").get<int>()), j, detail::event_amount(ev));
        } else if (ev.kind == trace_kind::path_transfer) {
            const int bs = check_agent(p.at("bs").get<int>());
            const int mid = check_agent(p.at("mid").get<int>());
            const int ls = check_agent(p.at("ls").get<int>());
            detail::replay_move(st, mid, ls, check_chore(p.at("chore_mid_to_ls").get<int>()), 1);
            detail::replay_move(st, bs, mid, check_chore(p.at("chore_bs_to_mid").get<int>()), 1);
        } else if (ev.kind == trace_kind::price_rise) {
            const Rational factor = parse_rational(p.at("factor").get<std::string>());
            for (const auto& jj : p.at("chores")) st.prices[check_chore(jj.get<int>())] *= factor;
        } else if (ev.kind == trace_kind::group_formed || ev.kind == trace_kind::terminate) {
            // bookkeeping only
        } else {
            throw ParseError("unknown trace event kind: " + ev.kind);
        }
    }
    return st;
}

inline bool replay_matches(const ReplayState& st, const IntegralAllocation& alloc,
                           const PriceVector& prices) {
    const int n = static_cast<int>(st.shares.size());
    if (static_cast<int>(alloc.bundles.size()) != n) return false;
    if (st.prices != prices) return false;
    for (int i = 0; i < n; ++i) {
        FractionalBundle want;
        for (const int j : alloc.bundles[i]) want[j] = 1;
        if (st.shares[i] != want) return false;
    }
    return true;
}

inline bool replay_matches(const ReplayState& st, const FractionalAllocation& alloc,
                           const PriceVector& prices) {
    const int n = static_cast<int>(st.shares.size());
    if (static_cast<int>(alloc.x.size()) != n) return false;
    if (st.prices != prices) return false;
    for (int i = 0; i < n; ++i) {
        FractionalBundle want;
        for (std::size_t j = 0; j < alloc.x[i].size(); ++j)
            if (alloc.x[i][j] != 0) want[static_cast<int>(j)] = alloc.x[i][j];
        if (st.shares[i] != want) return false;
    }
    return true;
}

} // namespace bichores
