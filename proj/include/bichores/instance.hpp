// Instance model: raw bivalued cost matrices, normalization to {1,k} costs,
// seeded random generation, and the canonical JSON wire format.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/rational.hpp"

namespace bichores {

using CostMatrix = std::vector<std::vector<Rational>>;

// A raw instance is bivalued by construction: building one with three or more
// distinct cost values fails.
struct RawInstance {
    int n = 0;
    int m = 0;
    CostMatrix costs;

    static RawInstance create(int n, int m, CostMatrix costs) {
        if (n < 1 || m < 1) throw ParseError("agent and chore counts must be positive");
        if (static_cast<int>(costs.size()) != n) throw ParseError("cost matrix row count != agents");
        std::set<Rational> values;
        for (const auto& row : costs) {
            if (static_cast<int>(row.size()) != m) throw ParseError("cost matrix is not rectangular");
            for (const auto& c : row) {
                if (c < 0) throw ParseError("negative cost");
                values.insert(c);
            }
        }
        if (values.size() > 2) throw NotBivalued("more than two distinct cost values");
        return RawInstance{n, m, std::move(costs)};
    }
};

enum class Regime { Identical, Binary, Bivalued };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Identical: return "IDENTICAL";
        case Regime::Binary: return "BINARY";
        case Regime::Bivalued: return "BIVALUED";
    }
    return "?";
}

// Costs rescaled so every entry is in {1,k} (or {0,1} in the binary regime).
// agent_scale[i] is the total divisor applied to row i, so
// raw cost = agent_scale[i] * normalized cost.
struct NormalizedInstance {
    int n = 0;
    int m = 0;
    Rational k = 1;
    CostMatrix costs;
    std::vector<char> chore_is_low;  // size m
    std::vector<int> low_chores;
    std::vector<int> high_chores;
    std::vector<Rational> agent_scale;
    Regime regime = Regime::Bivalued;
};

namespace detail {

inline void recompute_low_high(NormalizedInstance& inst) {
    inst.chore_is_low.assign(inst.m, 0);
    inst.low_chores.clear();
    inst.high_chores.clear();
    for (int j = 0; j < inst.m; ++j) {
        for (int i = 0; i < inst.n; ++i) {
            if (inst.costs[i][j] == 1) {
                inst.chore_is_low[j] = 1;
                break;
            }
        }
        (inst.chore_is_low[j] ? inst.low_chores : inst.high_chores).push_back(j);
    }
}

} // namespace detail

inline NormalizedInstance normalize(const RawInstance& raw) {
    Rational lo = raw.costs[0][0];
    Rational hi = lo;
    for (const auto& row : raw.costs)
        for (const auto& c : row) {
            if (c < lo) lo = c;
            if (c > hi) hi = c;
        }

    NormalizedInstance out;
    out.n = raw.n;
    out.m = raw.m;
    out.costs = raw.costs;
    out.agent_scale.assign(raw.n, 1);

    if (hi == 0) throw DegenerateAllZero("all costs are zero; any allocation works");

    if (lo == 0) {
        // Binary regime: rescale to {0,1} and stop; the solvers use a
        // dedicated shortcut instead of market dynamics here.
        out.regime = Regime::Binary;
        out.k = 1;
        for (int i = 0; i < out.n; ++i) {
            for (auto& c : out.costs[i]) c /= hi;
            out.agent_scale[i] = hi;
        }
        detail::recompute_low_high(out);
        return out;
    }

    out.k = hi / lo;
    out.regime = (out.k == 1) ? Regime::Identical : Regime::Bivalued;
    for (int i = 0; i < out.n; ++i) {
        for (auto& c : out.costs[i]) c /= lo;
        out.agent_scale[i] = lo;
    }
    // An agent with cost k for everything is rescaled so her row is all ones.
    for (int i = 0; i < out.n; ++i) {
        bool all_high = true;
        for (const auto& c : out.costs[i])
            if (c != out.k) {
                all_high = false;
                break;
            }
        if (all_high && out.k != 1) {
            for (auto& c : out.costs[i]) c /= out.k;
            out.agent_scale[i] *= out.k;
        }
    }
    detail::recompute_low_high(out);
    for (int i = 0; i < out.n; ++i) {
        bool has_unit = false;
        for (const auto& c : out.costs[i]) {
            if (c != 1 && c != out.k) throw InvariantViolation("normalized cost outside {1,k}");
            if (c == 1) has_unit = true;
        }
        if (!has_unit) throw InvariantViolation("agent without a unit-cost chore after normalization");
    }
    return out;
}

// Seeded bivalued generator. Each entry is 1 with probability low_density and
// k otherwise; a post-pass forces one uniformly chosen column per all-high row
// so the normalization invariant holds without rescaling. The draw pattern
// depends only on (n, m, low_density, seed), never on k.
inline RawInstance generate_random(int n, int m, const Rational& k, double low_density,
                                   std::uint64_t seed) {
    if (n < 1 || m < 1) throw ParseError("agent and chore counts must be positive");
    if (!(k > 1)) throw ParseError("k must exceed 1");
    if (!(low_density > 0.0) || low_density > 1.0) throw ParseError("low_density must be in (0,1]");

    std::mt19937_64 rng(seed);
    // Compare against a 53-bit threshold; low_density == 1 maps to 2^53,
    // which every draw is below, so density 1 yields the all-ones matrix.
    const std::uint64_t threshold =
        static_cast<std::uint64_t>(low_density * 9007199254740992.0 + 0.5);

    CostMatrix costs(n, std::vector<Rational>(m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const std::uint64_t draw = rng() >> 11;
            costs[i][j] = (draw < threshold) ? Rational(1) : k;
        }
    for (int i = 0; i < n; ++i) {
        bool has_low = false;
        for (int j = 0; j < m; ++j)
            if (costs[i][j] == 1) {
                has_low = true;
                break;
            }
        if (!has_low) {
            const int j = static_cast<int>(
                (static_cast<unsigned __int128>(rng()) * static_cast<unsigned>(m)) >> 64);
            costs[i][j] = 1;
        }
    }
    return RawInstance::create(n, m, std::move(costs));
}

// Wire format: {"agents": n, "chores": m, "costs": [[string,...],...]}.
// Any "p" / "p/q" form parses; serialization is always lowest terms, so
// serialize(parse(t)) == t for canonical t.
inline RawInstance parse_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad instance JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("agents") || !doc.contains("chores") ||
        !doc.contains("costs"))
        throw ParseError("instance JSON needs agents, chores, costs");
    if (!doc["agents"].is_number_integer() || !doc["chores"].is_number_integer())
        throw ParseError("agents/chores must be integers");
    const int n = doc["agents"].get<int>();
    const int m = doc["chores"].get<int>();
    if (!doc["costs"].is_array()) throw ParseError("costs must be an array");
    CostMatrix costs;
    for (const auto& row : doc["costs"]) {
        if (!row.is_array()) throw ParseError("costs rows must be arrays");
        std::vector<Rational> r;
        for (const auto& cell : row) {
            if (cell.is_string())
                r.push_back(parse_rational(cell.get<std::string>()));
            else if (cell.is_number_integer())
                r.push_back(Rational(cell.get<long long>()));
            else
                throw ParseError("cost entries must be rational strings");
        }
        costs.push_back(std::move(r));
    }
    return RawInstance::create(n, m, std::move(costs));
}

inline std::string serialize_instance(const RawInstance& inst) {
    nlohmann::json doc;
    doc["agents"] = inst.n;
    doc["chores"] = inst.m;
    auto rows = nlohmann::json::array();
    for (const auto& row : inst.costs) {
        auto r = nlohmann::json::array();
        for (const auto& c : row) r.push_back(format_rational(c));
        rows.push_back(std::move(r));
    }
    doc["costs"] = std::move(rows);
    return doc.dump();
}

} // namespace bichores
