// Append-only event log for a solve. One JSON object per line:
//   {"step": int, "kind": string, ...payload}
// Replaying a trace from the initial state reproduces the final allocation
// exactly (see replay.hpp), which is what the golden tests key on.
#pragma once

#include <json.hpp>

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bichores/errors.hpp"

namespace bichores {

namespace trace_kind {
inline constexpr const char* init_assign = "INIT_ASSIGN";
inline constexpr const char* group_formed = "GROUP_FORMED";
inline constexpr const char* init_transfer = "INIT_TRANSFER";
inline constexpr const char* price_rise = "PRICE_RISE";
inline constexpr const char* direct_transfer = "DIRECT_TRANSFER";
inline constexpr const char* path_transfer = "PATH_TRANSFER";
inline constexpr const char* terminate = "TERMINATE";
} // namespace trace_kind

struct TraceEvent {
    int step = 0;
    std::string kind;
    nlohmann::json payload = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j = payload;
        j["step"] = step;
        j["kind"] = kind;
        return j;
    }

    static TraceEvent from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("step") || !j.contains("kind"))
            throw ParseError("trace event needs step and kind");
        TraceEvent ev;
        ev.step = j["step"].get<int>();
        ev.kind = j["kind"].get<std::string>();
        ev.payload = j;
        ev.payload.erase("step");
        ev.payload.erase("kind");
        return ev;
    }
};

using Trace = std::vector<TraceEvent>;

inline void write_trace_jsonl(std::ostream& os, const Trace& trace) {
    for (const auto& ev : trace) os << ev.to_json().dump() << "\n";
}

inline Trace read_trace_jsonl(std::istream& is) {
    Trace trace;
    std::string line;
    int prev_step = -1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw ParseError(std::string("bad trace line: ") + e.what());
        }
        auto ev = TraceEvent::from_json(j);
        if (ev.step <= prev_step) throw ParseError("trace steps must be strictly increasing");
        prev_step = ev.step;
        trace.push_back(std::move(ev));
    }
    return trace;
}

inline std::size_t count_kind(const Trace& trace, const char* kind) {
    std::size_t c = 0;
    for (const auto& ev : trace)
        if (ev.kind == kind) ++c;
    return c;
}

} // namespace bichores
