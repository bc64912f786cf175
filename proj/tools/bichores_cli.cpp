// Command-line front door for the bichores library.
//
// Subcommands:
//   solve-indivisible  EF1+fPO allocation of an indivisible instance
//   solve-divisible    EF+fPO fractional allocation of a divisible instance
//   verify             audit an allocation against an instance
//   gen                write a seeded random bivalued instance
//   replay             re-apply a trace and compare against an allocation
//
// Exit codes: 0 success, 1 input error, 2 solver self-verification failure,
// 3 verify property failure, 4 replay divergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bichores/ef1_solver.hpp"
#include "bichores/ef_divisible.hpp"
#include "bichores/errors.hpp"
#include "bichores/instance.hpp"
#include "bichores/io.hpp"
#include "bichores/replay.hpp"
#include "bichores/trace.hpp"
#include "bichores/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSelfVerify = 2;
constexpr int kExitProperty = 3;
constexpr int kExitReplay = 4;

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw bichores::ParseError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw bichores::ParseError("cannot open output file: " + path);
    out << text;
}

void write_trace_file(const std::string& path, const bichores::Trace& trace) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw bichores::ParseError("cannot open trace file: " + path);
    bichores::write_trace_jsonl(out, trace);
}

struct SolveIo {
    std::string input, output, trace;
};

int run_solve_indivisible(const SolveIo& io) {
    using namespace bichores;
    const RawInstance raw = parse_instance(read_input(io.input));
    IntegralAllocation alloc;
    PriceVector prices;
    Trace trace;
    try {
        const Ef1Solution sol = solve_ef1_fpo(normalize(raw));
        alloc = sol.alloc;
        prices = sol.prices;
        trace = sol.trace;
    } catch (const DegenerateAllZero&) {
        std::cerr << "note: all costs are zero; emitting a round-robin allocation\n";
        alloc.bundles.assign(raw.n, {});
        prices.assign(raw.m, 1);
        for (int j = 0; j < raw.m; ++j) {
            alloc.bundles[j % raw.n].push_back(j);
            trace.push_back({j, trace_kind::init_assign,
                             {{"chore", j}, {"agent", j % raw.n}, {"price", "1"}}});
        }
        trace.push_back({raw.m, trace_kind::terminate, {{"reason", "all-zero costs"}}});
    }
    if (!check_ef1(raw.costs, alloc).pass ||
        !check_fpo_certificate(raw.costs, alloc, prices).pass) {
        std::cerr << "self-verification failed; refusing to emit the allocation\n";
        return kExitSelfVerify;
    }
    write_trace_file(io.trace, trace);
    write_output(io.output, indivisible_solution_to_json(alloc, prices).dump() + "\n");
    return kExitOk;
}

int run_solve_divisible(const SolveIo& io) {
    using namespace bichores;
    const RawInstance raw = parse_instance(read_input(io.input));
    FractionalAllocation alloc;
    PriceVector prices;
    Trace trace;
    bool market_based = true;
    try {
        const NormalizedInstance inst = normalize(raw);
        market_based = inst.regime != Regime::Binary;
        EfDivSolution sol = solve_ef_fpo(inst);
        alloc = std::move(sol.x);
        prices = std::move(sol.prices);
        trace = std::move(sol.trace);
    } catch (const DegenerateAllZero&) {
        std::cerr << "note: all costs are zero; emitting an equal split\n";
        market_based = false;
        alloc.x.assign(raw.n, std::vector<Rational>(raw.m, Rational(1) / raw.n));
        prices.assign(raw.m, 1);
    }
    bool ok = check_ef_fractional(raw.costs, alloc).pass &&
              check_fpo_certificate(raw.costs, alloc, prices).pass;
    // pEF is a market-outcome property; the zero-cost shortcut is EF+fPO but
    // not a market outcome, so equal spending is only required otherwise.
    if (ok && market_based) ok = check_pef_fractional(alloc, prices).pass;
    if (!ok) {
        std::cerr << "self-verification failed; refusing to emit the allocation\n";
        return kExitSelfVerify;
    }
    write_trace_file(io.trace, trace);
    write_output(io.output, divisible_solution_to_json(alloc, prices).dump() + "\n");
    return kExitOk;
}

int run_verify(const std::string& instance_path, const std::string& alloc_path,
               const std::string& output, std::string properties, std::uint64_t po_cap) {
    using namespace bichores;
    const RawInstance raw = parse_instance(read_input(instance_path));
    nlohmann::json alloc_doc;
    try {
        alloc_doc = nlohmann::json::parse(read_input(alloc_path));
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad allocation JSON: ") + e.what());
    }
    const bool fractional = alloc_doc.contains("x");
    std::optional<IntegralAllocation> bundles;
    std::optional<FractionalAllocation> shares;
    if (fractional)
        shares = fractional_from_json(alloc_doc, raw.n, raw.m);
    else
        bundles = bundles_from_json(alloc_doc, raw.n, raw.m);
    std::optional<PriceVector> prices;
    if (alloc_doc.contains("prices")) {
        prices = prices_from_json(alloc_doc["prices"]);
        if (static_cast<int>(prices->size()) != raw.m)
            throw ParseError("price count != chores");
    }

    if (properties.empty()) properties = fractional ? "ef,pef,fpo" : "ef1,pef1,fpo";
    std::vector<std::string> wanted;
    {
        std::stringstream ss(properties);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) wanted.push_back(tok);
    }

    nlohmann::json report;
    report["ef1"] = "skipped";
    report["po"] = "skipped";
    report["fpo_certificate"] = "skipped";
    report["pef1"] = "skipped";
    report["pef"] = "skipped";
    report["ef"] = "skipped";
    auto witnesses = nlohmann::json::object();

    const auto need_prices = [&](const std::string& prop) {
        if (!prices)
            throw ParseError("property '" + prop + "' needs prices in the allocation file");
    };
    const auto need_kind = [&](const std::string& prop, bool needs_fractional) {
        if (fractional != needs_fractional)
            throw ParseError("property '" + prop + "' does not apply to this allocation kind");
    };

    bool all_pass = true;
    for (const auto& prop : wanted) {
        Verdict v;
        if (prop == "ef1") {
            need_kind(prop, false);
            v = check_ef1(raw.costs, *bundles);
        } else if (prop == "ef") {
            need_kind(prop, true);
            v = check_ef_fractional(raw.costs, *shares);
        } else if (prop == "po") {
            need_kind(prop, false);
            v = brute_force_po(raw.costs, *bundles, po_cap);
        } else if (prop == "fpo") {
            need_prices(prop);
            v = fractional ? check_fpo_certificate(raw.costs, *shares, *prices)
                           : check_fpo_certificate(raw.costs, *bundles, *prices);
        } else if (prop == "pef1") {
            need_kind(prop, false);
            need_prices(prop);
            v = check_pef1(*bundles, *prices);
        } else if (prop == "pef") {
            need_prices(prop);
            v = fractional ? check_pef_fractional(*shares, *prices)
                           : check_pef(*bundles, *prices);
        } else {
            throw ParseError("unknown property: " + prop);
        }
        const std::string key = (prop == "fpo") ? "fpo_certificate" : prop;
        report[key] = v.pass;
        if (!v.pass) {
            witnesses[key] = v.witness;
            all_pass = false;
        }
    }
    report["witnesses"] = std::move(witnesses);
    write_output(output, report.dump() + "\n");
    return all_pass ? kExitOk : kExitProperty;
}

int run_gen(int n, int m, const std::string& k_text, double density, std::uint64_t seed,
            const std::string& output) {
    using namespace bichores;
    const RawInstance inst = generate_random(n, m, parse_rational(k_text), density, seed);
    write_output(output, serialize_instance(inst) + "\n");
    return kExitOk;
}

int run_replay(const std::string& instance_path, const std::string& trace_path,
               const std::string& alloc_path) {
    using namespace bichores;
    const RawInstance raw = parse_instance(read_input(instance_path));
    std::ifstream tf(trace_path);
    if (!tf) throw ParseError("cannot open trace file: " + trace_path);
    const Trace trace = read_trace_jsonl(tf);
    nlohmann::json alloc_doc;
    try {
        alloc_doc = nlohmann::json::parse(read_input(alloc_path));
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad allocation JSON: ") + e.what());
    }
    if (!alloc_doc.contains("prices")) throw ParseError("replay needs prices in the allocation file");
    const PriceVector prices = prices_from_json(alloc_doc["prices"]);
    const ReplayState st = replay_trace(raw.n, raw.m, trace);
    bool ok;
    if (alloc_doc.contains("x"))
        ok = replay_matches(st, fractional_from_json(alloc_doc, raw.n, raw.m), prices);
    else
        ok = replay_matches(st, bundles_from_json(alloc_doc, raw.n, raw.m), prices);
    if (!ok) {
        std::cerr << "replay diverged from the provided allocation\n";
        return kExitReplay;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair division of bivalued chores via Fisher-market dynamics"};
    app.require_subcommand(1);

    SolveIo solve_io;
    auto* solve_ind = app.add_subcommand("solve-indivisible", "compute an EF1+fPO allocation");
    solve_ind->add_option("--input,-i", solve_io.input, "instance JSON (default: stdin)");
    solve_ind->add_option("--output,-o", solve_io.output, "output path (default: stdout)");
    solve_ind->add_option("--trace", solve_io.trace, "write a JSONL event trace");

    auto* solve_div = app.add_subcommand("solve-divisible", "compute an EF+fPO fractional allocation");
    solve_div->add_option("--input,-i", solve_io.input, "instance JSON (default: stdin)");
    solve_div->add_option("--output,-o", solve_io.output, "output path (default: stdout)");
    solve_div->add_option("--trace", solve_io.trace, "write a JSONL event trace");

    std::string verify_alloc, verify_props, verify_out;
    std::string verify_input;
    std::uint64_t po_cap = 1000000;
    auto* verify = app.add_subcommand("verify", "audit an allocation");
    verify->add_option("--input,-i", verify_input, "instance JSON (default: stdin)");
    verify->add_option("--allocation,-a", verify_alloc, "allocation JSON")->required();
    verify->add_option("--properties", verify_props, "comma list: ef1,ef,po,fpo,pef1,pef");
    verify->add_option("--output,-o", verify_out, "report path (default: stdout)");
    verify->add_option("--po-cap", po_cap, "enumeration bound for the po property");

    int gen_n = 0, gen_m = 0;
    std::string gen_k = "2", gen_out;
    double gen_density = 0.5;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "generate a random bivalued instance");
    gen->add_option("--agents", gen_n, "agent count")->required();
    gen->add_option("--chores", gen_m, "chore count")->required();
    gen->add_option("--k", gen_k, "high cost as a rational, e.g. 5 or 9/2");
    gen->add_option("--density", gen_density, "probability of a low-cost entry");
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--output,-o", gen_out, "output path (default: stdout)");

    std::string replay_input, replay_trace_path, replay_alloc;
    auto* replay = app.add_subcommand("replay", "re-apply a trace and compare");
    replay->add_option("--input,-i", replay_input, "instance JSON (default: stdin)");
    replay->add_option("--trace", replay_trace_path, "trace JSONL")->required();
    replay->add_option("--allocation,-a", replay_alloc, "expected allocation JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_ind->parsed()) return run_solve_indivisible(solve_io);
        if (solve_div->parsed()) return run_solve_divisible(solve_io);
        if (verify->parsed())
            return run_verify(verify_input, verify_alloc, verify_out, verify_props, po_cap);
        if (gen->parsed()) return run_gen(gen_n, gen_m, gen_k, gen_density, gen_seed, gen_out);
        if (replay->parsed()) return run_replay(replay_input, replay_trace_path, replay_alloc);
    } catch (const bichores::TooLarge& e) {
        std::cerr << "error: " << e.what() << " (raise --po-cap or drop the po property)\n";
        return kExitInput;
    } catch (const bichores::InternalBoundViolation& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitSelfVerify;
    } catch (const bichores::InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitSelfVerify;
    } catch (const bichores::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
