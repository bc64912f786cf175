// JSON wire formats for solver outputs.
//   indivisible: {"bundles": [[int,...],...], "prices": [string,...]}
//   divisible:   {"x": [[string,...],...],   "prices": [string,...]}
// Rationals are serialized in lowest terms, so identical inputs produce
// byte-identical outputs.
#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "bichores/errors.hpp"
#include "bichores/market.hpp"
#include "bichores/rational.hpp"

namespace bichores {

inline nlohmann::json prices_to_json(const PriceVector& prices) {
    auto arr = nlohmann::json::array();
    for (const auto& p : prices) arr.push_back(format_rational(p));
    return arr;
}

inline PriceVector prices_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ParseError("prices must be an array of rational strings");
    PriceVector out;
    for (const auto& p : arr) out.push_back(parse_rational(p.get<std::string>()));
    return out;
}

inline nlohmann::json indivisible_solution_to_json(const IntegralAllocation& alloc,
                                                   const PriceVector& prices) {
    nlohmann::json doc;
    doc["bundles"] = alloc.bundles;
    doc["prices"] = prices_to_json(prices);
    return doc;
}

inline nlohmann::json divisible_solution_to_json(const FractionalAllocation& alloc,
                                                 const PriceVector& prices) {
    nlohmann::json doc;
    auto rows = nlohmann::json::array();
    for (const auto& row : alloc.x) {
        auto r = nlohmann::json::array();
        for (const auto& v : row) r.push_back(format_rational(v));
        rows.push_back(std::move(r));
    }
    doc["x"] = std::move(rows);
    doc["prices"] = prices_to_json(prices);
    return doc;
}

inline IntegralAllocation bundles_from_json(const nlohmann::json& doc, int n, int m) {
    if (!doc.contains("bundles") || !doc["bundles"].is_array())
        throw ParseError("allocation JSON needs a bundles array");
    IntegralAllocation alloc;
    alloc.bundles.assign(n, {});
    const auto& rows = doc["bundles"];
    if (static_cast<int>(rows.size()) != n) throw ParseError("bundle count != agents");
    std::vector<char> seen(m, 0);
    for (int i = 0; i < n; ++i) {
        for (const auto& jj : rows[i]) {
            const int j = jj.get<int>();
            if (j < 0 || j >= m || seen[j]) throw ParseError("bundles must partition the chores");
            seen[j] = 1;
            alloc.bundles[i].push_back(j);
        }
        std::sort(alloc.bundles[i].begin(), alloc.bundles[i].end());
    }
    for (int j = 0; j < m; ++j)
        if (!seen[j]) throw ParseError("bundles must partition the chores");
    return alloc;
}

inline FractionalAllocation fractional_from_json(const nlohmann::json& doc, int n, int m) {
    if (!doc.contains("x") || !doc["x"].is_array())
        throw ParseError("fractional allocation JSON needs an x matrix");
    const auto& rows = doc["x"];
    if (static_cast<int>(rows.size()) != n) throw ParseError("x row count != agents");
    FractionalAllocation alloc;
    alloc.x.assign(n, std::vector<Rational>(m, 0));
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != m) throw ParseError("x column count != chores");
        for (int j = 0; j < m; ++j) alloc.x[i][j] = parse_rational(rows[i][j].get<std::string>());
    }
    for (int j = 0; j < m; ++j) {
        Rational col = 0;
        for (int i = 0; i < n; ++i) {
            if (alloc.x[i][j] < 0 || alloc.x[i][j] > 1) throw ParseError("share outside [0,1]");
            col += alloc.x[i][j];
        }
        if (col != 1) throw ParseError("column sums must equal 1");
    }
    return alloc;
}

} // namespace bichores
